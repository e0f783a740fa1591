"""Compiled CART core shared by the tree, forest, and boosting back-ends.

Trees are grown best-first on the weighted variance-reduction criterion:
leaves are split in order of decreasing impurity improvement until no split
helps, the depth bound binds, or the leaf budget is spent.  Without a leaf
budget this yields the same tree as depth-first growth.  Thresholds sit at
the midpoint between adjacent sorted values, leaf values are target means.

A node pool is returned as flat arrays: ``feature`` is -1 for leaves, and
``importances`` accumulates (node fraction x impurity decrease) per split
feature, i.e. raw mean-decrease-in-impurity contributions.
"""

import numpy as np
from numba import njit

NO_LIMIT = 2**31 - 1


@njit(cache=True, nogil=True, inline="always")
def _splitmix64(state):
    # Tiny deterministic RNG; state is a length-1 uint64 array.
    state[0] = state[0] + np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _rand_below(state, n):
    return np.int64(_splitmix64(state) % np.uint64(n))


@njit(cache=True, nogil=True)
def _draw_features(state, n_features, n_draw, buf):
    # Partial Fisher-Yates; returns the first n_draw entries of buf.
    for i in range(n_features):
        buf[i] = i
    if n_draw >= n_features:
        return buf[:n_features]
    for i in range(n_draw):
        j = i + _rand_below(state, n_features - i)
        buf[i], buf[j] = buf[j], buf[i]
    return buf[:n_draw]


@njit(cache=True, nogil=True)
def _node_stats(y, idx, start, end):
    s = 0.0
    for i in range(start, end):
        s += y[idx[i]]
    n = end - start
    mean = s / n
    sse = 0.0
    for i in range(start, end):
        d = y[idx[i]] - mean
        sse += d * d
    return mean, sse


@njit(cache=True, nogil=True, inline="always")
def _is_impure(sse, n, mean):
    # Rounding alone can leave sse ~ n * ulp(mean)^2 on constant targets;
    # anything below this floor counts as pure.
    floor = n * (1e-12 * (1.0 + abs(mean))) ** 2
    return sse > floor


@njit(cache=True, nogil=True)
def _best_split(X, y, idx, start, end, feats, node_mean, node_sse):
    """Best (gain, feature, threshold) over the candidate features; gain is SSE decrease."""
    best_gain = 0.0
    best_feat = np.int64(-1)
    best_thr = 0.0
    n = end - start
    vals = np.empty(n)
    targs = np.empty(n)
    for fi in range(len(feats)):
        f = feats[fi]
        for i in range(n):
            row = idx[start + i]
            vals[i] = X[row, f]
            targs[i] = y[row] - node_mean  # centered: sums stay well-conditioned
        order = np.argsort(vals, kind="mergesort")
        sum_left = 0.0
        sq_left = 0.0
        sum_total = 0.0
        sq_total = 0.0
        for i in range(n):
            sum_total += targs[i]
            sq_total += targs[i] * targs[i]
        for i in range(n - 1):
            t = targs[order[i]]
            sum_left += t
            sq_left += t * t
            v = vals[order[i]]
            v_next = vals[order[i + 1]]
            if v == v_next:
                continue
            n_left = i + 1
            n_right = n - n_left
            sum_right = sum_total - sum_left
            sse_children = (sq_left - sum_left * sum_left / n_left) + (
                sq_total - sq_left - sum_right * sum_right / n_right
            )
            gain = node_sse - sse_children
            if gain > best_gain:
                best_gain = gain
                best_feat = f
                best_thr = 0.5 * (v + v_next)
    return best_gain, best_feat, best_thr


@njit(cache=True, nogil=True)
def build_tree(X, y, max_depth, max_leaves, max_features, seed):
    """Grow a regression tree; returns (feature, threshold, left, right, value, importances)."""
    m, w = X.shape
    cap = 2 * m + 2
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    importances = np.zeros(w)
    idx = np.arange(m)
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15) + np.uint64(1)

    # Frontier of splittable leaves with their precomputed best split.
    fr_node = np.empty(cap, dtype=np.int64)
    fr_start = np.empty(cap, dtype=np.int64)
    fr_end = np.empty(cap, dtype=np.int64)
    fr_depth = np.empty(cap, dtype=np.int64)
    fr_gain = np.empty(cap)
    fr_feat = np.empty(cap, dtype=np.int64)
    fr_thr = np.empty(cap)
    fr_len = 0

    feat_buf = np.empty(w, dtype=np.int64)
    n_draw = max_features if max_features < w else w

    mean, sse = _node_stats(y, idx, 0, m)
    value[0] = mean
    n_nodes = 1
    n_leaves = 1

    if m >= 2 and _is_impure(sse, m, mean) and max_depth >= 1:
        feats = _draw_features(state, w, n_draw, feat_buf)
        gain, feat, thr = _best_split(X, y, idx, 0, m, feats, mean, sse)
        if gain > 0.0:
            fr_node[0] = 0
            fr_start[0] = 0
            fr_end[0] = m
            fr_depth[0] = 0
            fr_gain[0] = gain
            fr_feat[0] = feat
            fr_thr[0] = thr
            fr_len = 1

    while fr_len > 0 and n_leaves < max_leaves:
        best = 0
        for i in range(1, fr_len):
            if fr_gain[i] > fr_gain[best]:
                best = i
        node = fr_node[best]
        start = fr_start[best]
        end = fr_end[best]
        depth = fr_depth[best]
        gain = fr_gain[best]
        feat = fr_feat[best]
        thr = fr_thr[best]
        fr_len -= 1
        fr_node[best] = fr_node[fr_len]
        fr_start[best] = fr_start[fr_len]
        fr_end[best] = fr_end[fr_len]
        fr_depth[best] = fr_depth[fr_len]
        fr_gain[best] = fr_gain[fr_len]
        fr_feat[best] = fr_feat[fr_len]
        fr_thr[best] = fr_thr[fr_len]

        lo = start
        hi = end - 1
        while lo <= hi:
            if X[idx[lo], feat] <= thr:
                lo += 1
            else:
                idx[lo], idx[hi] = idx[hi], idx[lo]
                hi -= 1
        mid = lo

        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        n_leaves += 1
        feature[node] = feat
        threshold[node] = thr
        left[node] = left_id
        right[node] = right_id
        importances[feat] += gain / m

        for side in range(2):
            child = left_id if side == 0 else right_id
            c_start = start if side == 0 else mid
            c_end = mid if side == 0 else end
            c_mean, c_sse = _node_stats(y, idx, c_start, c_end)
            value[child] = c_mean
            if c_end - c_start >= 2 and _is_impure(c_sse, c_end - c_start, c_mean) and depth + 1 < max_depth:
                feats = _draw_features(state, w, n_draw, feat_buf)
                c_gain, c_feat, c_thr = _best_split(
                    X, y, idx, c_start, c_end, feats, c_mean, c_sse
                )
                if c_gain > 0.0:
                    fr_node[fr_len] = child
                    fr_start[fr_len] = c_start
                    fr_end[fr_len] = c_end
                    fr_depth[fr_len] = depth + 1
                    fr_gain[fr_len] = c_gain
                    fr_feat[fr_len] = c_feat
                    fr_thr[fr_len] = c_thr
                    fr_len += 1

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
        importances,
    )


@njit(cache=True, nogil=True)
def predict_tree(feature, threshold, left, right, value, X):
    q = X.shape[0]
    out = np.empty(q)
    for i in range(q):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out
