"""Regression back-ends behind a single fit/predict surface, plus sweep grids.

Five built-in learner kinds share the :func:`fit` entry point: an elastic-net
linear model solved by cyclic coordinate descent, epsilon-insensitive support
vector regression (libsvm's SMO dual solver via scikit-learn), a CART
regression tree, a bootstrap forest of subsampled trees, and squared-loss
gradient boosting.  A sixth kind, ``external_plugin``, lets callers register
any fit function with the same contract and sweep it like the built-ins.

Every fit is deterministic given (data, spec, seed), and every trained model
is immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from sklearn.svm import SVR as _LibSVR

from . import _tree
from .errors import ConfigurationError, FitError, ShapeError

KINDS = (
    "linear_elastic",
    "svr",
    "tree",
    "random_forest",
    "boosted_trees",
    "external_plugin",
)
SVR_KERNELS = ("linear", "rbf", "poly3")

_PARAM_NAMES = {
    "linear_elastic": {"alpha1", "alpha2"},
    "svr": {"kernel", "C", "epsilon"},
    "tree": {"max_depth", "max_leaves"},
    "random_forest": {"n_trees", "max_depth"},
    "boosted_trees": {"n_trees", "learning_rate", "max_depth"},
}


def _positive(params, name, strict):
    value = params.get(name)
    if value is None:
        return
    if strict and not value > 0:
        raise ConfigurationError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise ConfigurationError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class RegressorSpec:
    """A learner kind plus the hyperparameters and seed that pin its fit."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        params = dict(self.params)
        object.__setattr__(self, "params", params)
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown regressor kind {self.kind!r}")
        if self.kind == "external_plugin":
            if "name" not in params:
                raise ConfigurationError("external_plugin specs need a 'name' parameter")
            return
        unknown = set(params) - _PARAM_NAMES[self.kind]
        if unknown:
            raise ConfigurationError(f"{self.kind} does not accept parameter(s) {sorted(unknown)}")
        _positive(params, "alpha1", strict=False)
        _positive(params, "alpha2", strict=False)
        _positive(params, "C", strict=True)
        _positive(params, "epsilon", strict=False)
        _positive(params, "learning_rate", strict=True)
        if params.get("kernel") is not None and params["kernel"] not in SVR_KERNELS:
            raise ConfigurationError(f"svr kernel must be one of {SVR_KERNELS}")
        if params.get("max_depth") is not None and params["max_depth"] < 1:
            raise ConfigurationError("max_depth must be >= 1")
        if params.get("max_leaves") is not None and params["max_leaves"] < 2:
            raise ConfigurationError("max_leaves must be >= 2")
        if params.get("n_trees") is not None and params["n_trees"] < 1:
            raise ConfigurationError("n_trees must be >= 1")

    @property
    def key(self) -> tuple:
        """Hashable identity used for caching and deterministic tie-breaks."""
        return (self.kind, tuple(sorted(self.params.items())), self.seed)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}


def linear_elastic(alpha1: float = 0.0, alpha2: float = 0.0, seed: int = 0) -> RegressorSpec:
    return RegressorSpec("linear_elastic", {"alpha1": alpha1, "alpha2": alpha2}, seed)


def svr(kernel: str = "rbf", C: float = 1.0, epsilon: float = 0.1, seed: int = 0) -> RegressorSpec:
    return RegressorSpec("svr", {"kernel": kernel, "C": C, "epsilon": epsilon}, seed)


def tree(max_depth: int | None = None, max_leaves: int | None = None, seed: int = 0) -> RegressorSpec:
    return RegressorSpec("tree", {"max_depth": max_depth, "max_leaves": max_leaves}, seed)


def random_forest(n_trees: int = 100, max_depth: int | None = None, seed: int = 0) -> RegressorSpec:
    return RegressorSpec("random_forest", {"n_trees": n_trees, "max_depth": max_depth}, seed)


def boosted_trees(
    n_trees: int = 100, learning_rate: float = 0.1, max_depth: int = 3, seed: int = 0
) -> RegressorSpec:
    return RegressorSpec(
        "boosted_trees",
        {"n_trees": n_trees, "learning_rate": learning_rate, "max_depth": max_depth},
        seed,
    )


def external_plugin(name: str, seed: int = 0, **params) -> RegressorSpec:
    return RegressorSpec("external_plugin", {"name": name, **params}, seed)


class TrainedModel:
    """Base class for fitted predictors; rejects inputs of the wrong width."""

    def __init__(self, spec: RegressorSpec, n_features: int):
        self.spec = spec
        self.n_features = int(n_features)

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(np.asarray(X, dtype=float))
        if X.ndim != 2:
            raise ShapeError("prediction input must be a 2-d matrix")
        if X.shape[1] != self.n_features:
            raise ShapeError(
                f"model was trained on {self.n_features} feature(s), got {X.shape[1]}"
            )
        return self._predict(X)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ConstantModel(TrainedModel):
    """Intercept-only predictor; what fitting on zero features degrades to."""

    def __init__(self, spec, n_features, value):
        super().__init__(spec, n_features)
        self.value = float(value)

    def _predict(self, X):
        return np.full(X.shape[0], self.value)


class LinearModel(TrainedModel):
    def __init__(self, spec, weights, intercept):
        super().__init__(spec, len(weights))
        self.weights = np.asarray(weights, dtype=float)
        self.weights.setflags(write=False)
        self.intercept = float(intercept)

    def _predict(self, X):
        return X @ self.weights + self.intercept


class SVRModel(TrainedModel):
    def __init__(self, spec, estimator, scale, n_train):
        super().__init__(spec, estimator.n_features_in_)
        self._estimator = estimator
        self.scale = scale  # per-feature std for rbf, else None
        self.n_train = int(n_train)

    def _predict(self, X):
        if self.scale is not None:
            X = X / self.scale
        return self._estimator.predict(X)

    @property
    def dual_coefficients(self) -> np.ndarray:
        """alpha - alpha* for every training row (zeros off the support)."""
        theta = np.zeros(self.n_train)
        theta[self._estimator.support_] = self._estimator.dual_coef_[0]
        return theta

    @property
    def intercept(self) -> float:
        return float(self._estimator.intercept_[0])


class TreeModel(TrainedModel):
    def __init__(self, spec, n_features, nodes, importances):
        super().__init__(spec, n_features)
        self._nodes = nodes  # (feature, threshold, left, right, value)
        self.raw_importances = importances

    def _predict(self, X):
        return _tree.predict_tree(*self._nodes, X)

    @property
    def n_leaves(self) -> int:
        return int((self._nodes[0] < 0).sum())

    @property
    def max_depth_reached(self) -> int:
        feature, _, left, right, _ = self._nodes
        depth = np.zeros(len(feature), dtype=int)
        out = 0
        for node in range(len(feature)):
            if feature[node] >= 0:
                depth[left[node]] = depth[node] + 1
                depth[right[node]] = depth[node] + 1
            else:
                out = max(out, depth[node])
        return out


class ForestModel(TrainedModel):
    def __init__(self, spec, n_features, trees):
        super().__init__(spec, n_features)
        self.trees = tuple(trees)

    def _predict(self, X):
        total = np.zeros(X.shape[0])
        for t in self.trees:
            total += _tree.predict_tree(*t._nodes, X)
        return total / len(self.trees)

    @property
    def raw_importances(self) -> np.ndarray:
        """Mean over trees of raw impurity-decrease accumulations, unnormalized."""
        total = np.zeros(self.n_features)
        for t in self.trees:
            total += t.raw_importances
        return total / len(self.trees)


class BoostedModel(TrainedModel):
    def __init__(self, spec, n_features, base_value, trees, learning_rate):
        super().__init__(spec, n_features)
        self.base_value = float(base_value)
        self.trees = tuple(trees)
        self.learning_rate = float(learning_rate)

    def _predict(self, X):
        out = np.full(X.shape[0], self.base_value)
        for t in self.trees:
            out += self.learning_rate * _tree.predict_tree(*t._nodes, X)
        return out

    def staged_predict(self, X):
        """Yield predictions after the base stage and after each added tree."""
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[0], self.base_value)
        yield out.copy()
        for t in self.trees:
            out += self.learning_rate * _tree.predict_tree(*t._nodes, X)
            yield out.copy()


class PluginModel(TrainedModel):
    def __init__(self, spec, n_features, inner):
        super().__init__(spec, n_features)
        self.inner = inner

    def _predict(self, X):
        out = np.asarray(self.inner.predict(X), dtype=float)
        if out.shape != (X.shape[0],):
            raise FitError("plugin predict() must return one value per row")
        return out


def predict(model: TrainedModel, X) -> np.ndarray:
    """Evaluate a trained model on a (q, w) matrix; w must match training width."""
    return model.predict(X)


def _check_training(X, y, min_rows: int):
    X = np.ascontiguousarray(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise FitError("training features must be a 2-d matrix")
    if y.shape != (X.shape[0],):
        raise FitError("training targets must be one value per row")
    if X.shape[0] < min_rows:
        raise FitError(f"need at least {min_rows} training sample(s), got {X.shape[0]}")
    if X.size and not np.isfinite(X).all():
        raise FitError("training features contain non-finite values")
    if not np.isfinite(y).all():
        raise FitError("training targets contain non-finite values")
    return X, y


def _soft_threshold(rho: float, cut: float) -> float:
    if rho > cut:
        return rho - cut
    if rho < -cut:
        return rho + cut
    return 0.0


def _ridge_weights(Xc, yc, alpha2):
    if Xc.shape[1] == 0:
        return np.zeros(0)
    if alpha2 == 0.0:
        w, *_ = np.linalg.lstsq(Xc, yc, rcond=None)
        return w
    gram = Xc.T @ Xc + alpha2 * np.eye(Xc.shape[1])
    return np.linalg.solve(gram, Xc.T @ yc)


def _coordinate_descent(Xc, yc, w, col_sq, alpha1, alpha2, tol=1e-10, max_sweeps=10_000):
    """Cyclic soft-threshold updates on centered data until coefficients settle."""
    r = yc - Xc @ w
    cut = alpha1 / 2.0
    for _ in range(max_sweeps):
        shift = 0.0
        for j in range(len(w)):
            denom = col_sq[j] + alpha2
            old = w[j]
            if denom == 0.0:
                new = 0.0
            else:
                rho = Xc[:, j] @ r + col_sq[j] * old
                new = _soft_threshold(rho, cut) / denom
            if new != old:
                r += Xc[:, j] * (old - new)
                w[j] = new
                shift = max(shift, abs(new - old))
        if shift < tol:
            break
    return w


def fit_linear_elastic(X, y, alpha1: float = 0.0, alpha2: float = 0.0) -> LinearModel:
    """Least squares with an unpenalized intercept, l2 weight ``alpha2`` and l1 weight ``alpha1``.

    Minimizes ``sum((y - Xw - b)^2) + alpha2*||w||_2^2 + alpha1*||w||_1``.
    Pure l2 (or no) regularization is solved in closed form; any l1 part runs
    coordinate descent from the ridge warm start.
    """
    if alpha1 < 0 or alpha2 < 0:
        raise ConfigurationError("regularization weights must be non-negative")
    X, y = _check_training(X, y, min_rows=1)
    x_mean = X.mean(axis=0) if X.shape[1] else np.zeros(0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    w = _ridge_weights(Xc, yc, alpha2)
    if alpha1 > 0.0 and X.shape[1]:
        col_sq = (Xc * Xc).sum(axis=0)
        w = _coordinate_descent(Xc, yc, w, col_sq, alpha1, alpha2)
    intercept = y_mean - (x_mean @ w if len(w) else 0.0)
    spec = linear_elastic(alpha1, alpha2)
    return LinearModel(spec, w, intercept)


def elastic_net_objective(X, y, weights, intercept, alpha1, alpha2) -> float:
    """The objective :func:`fit_linear_elastic` minimizes, at the given solution."""
    X = np.asarray(X, dtype=float)
    weights = np.asarray(weights, dtype=float)
    r = np.asarray(y, dtype=float) - X @ weights - intercept
    return float(r @ r + alpha2 * weights @ weights + alpha1 * np.abs(weights).sum())


def kernel_matrix(kernel: str, Xa, Xb, n_features: int | None = None) -> np.ndarray:
    """Gram matrix of the SVR kernels on already-normalized inputs.

    For ``rbf`` the bandwidth is ``1 / n_features`` (defaults to the column
    count of ``Xa``); ``poly3`` is ``(x.z + 1)^3``.
    """
    Xa = np.asarray(Xa, dtype=float)
    Xb = np.asarray(Xb, dtype=float)
    if kernel == "linear":
        return Xa @ Xb.T
    if kernel == "poly3":
        return (Xa @ Xb.T + 1.0) ** 3
    if kernel == "rbf":
        gamma = 1.0 / (n_features if n_features else Xa.shape[1])
        sq = (Xa * Xa).sum(1)[:, None] + (Xb * Xb).sum(1)[None, :] - 2.0 * Xa @ Xb.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ConfigurationError(f"svr kernel must be one of {SVR_KERNELS}")


def fit_svr(X, y, kernel: str = "rbf", C: float = 1.0, epsilon: float = 0.1) -> SVRModel:
    """Epsilon-insensitive SVR on the chosen kernel.

    The dual problem is solved by libsvm's SMO implementation with a tight
    stopping tolerance.  For the rbf kernel, features are first normalized to
    unit variance and the bandwidth is fixed at 1/width; linear and poly3
    kernels see the raw inputs.
    """
    if C <= 0:
        raise ConfigurationError("C must be > 0")
    if epsilon < 0:
        raise ConfigurationError("epsilon must be >= 0")
    if kernel not in SVR_KERNELS:
        raise ConfigurationError(f"svr kernel must be one of {SVR_KERNELS}")
    X, y = _check_training(X, y, min_rows=2)
    if X.shape[1] == 0:
        raise FitError("svr needs at least one feature column")
    scale = None
    if kernel == "rbf":
        scale = X.std(axis=0)
        scale = np.where(scale > 0.0, scale, 1.0)
        X_in = X / scale
        estimator = _LibSVR(kernel="rbf", gamma=1.0 / X.shape[1], C=C, epsilon=epsilon, tol=1e-8)
    elif kernel == "linear":
        X_in = X
        estimator = _LibSVR(kernel="linear", C=C, epsilon=epsilon, tol=1e-8)
    else:
        X_in = X
        estimator = _LibSVR(kernel="poly", degree=3, gamma=1.0, coef0=1.0, C=C, epsilon=epsilon, tol=1e-8)
    gram_probe = X_in @ X_in.T
    if not np.isfinite(gram_probe).all():
        raise FitError("kernel inputs overflow; check feature scaling")
    estimator.fit(X_in, y)
    return SVRModel(svr(kernel, C, epsilon), estimator, scale, X.shape[0])


def svr_dual_objective(model: SVRModel, X, y) -> float:
    """Dual objective of the trained SVR at its own coefficients.

    ``X``/``y`` must be the training set the model was fitted on.  Larger is
    better; at the optimum it equals the primal objective.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if model.scale is not None:
        X = X / model.scale
    kernel = model.spec.params["kernel"]
    K = kernel_matrix(kernel, X, X, n_features=model.n_features)
    theta = model.dual_coefficients
    eps = model.spec.params["epsilon"]
    return float(-0.5 * theta @ K @ theta - eps * np.abs(theta).sum() + y @ theta)


def _as_limit(value) -> int:
    return _tree.NO_LIMIT if value is None else int(value)


def fit_tree(X, y, max_depth: int | None = None, max_leaves: int | None = None, seed: int = 0) -> TreeModel:
    """CART regression tree: best-first variance-minimizing splits, mean leaves."""
    if max_depth is not None and max_depth < 1:
        raise ConfigurationError("max_depth must be >= 1")
    if max_leaves is not None and max_leaves < 2:
        raise ConfigurationError("max_leaves must be >= 2")
    X, y = _check_training(X, y, min_rows=1)
    if X.shape[1] == 0:
        raise FitError("tree needs at least one feature column")
    *nodes, importances = _tree.build_tree(
        X, y, _as_limit(max_depth), _as_limit(max_leaves), X.shape[1], seed
    )
    return TreeModel(tree(max_depth, max_leaves, seed), X.shape[1], tuple(nodes), importances)


def fit_random_forest(X, y, n_trees: int = 100, max_depth: int | None = None, seed: int = 0) -> ForestModel:
    """Bootstrap ensemble of trees with ceil(w/3) features drawn per split.

    The prediction is the arithmetic mean of the member trees' predictions.
    """
    if n_trees < 1:
        raise ConfigurationError("n_trees must be >= 1")
    if max_depth is not None and max_depth < 1:
        raise ConfigurationError("max_depth must be >= 1")
    X, y = _check_training(X, y, min_rows=1)
    m, w = X.shape
    if w == 0:
        raise FitError("random forest needs at least one feature column")
    per_split = math.ceil(w / 3)
    rng = np.random.default_rng(seed)
    depth = _as_limit(max_depth)
    trees = []
    for _ in range(n_trees):
        rows = rng.integers(0, m, size=m)
        tree_seed = int(rng.integers(0, 2**62))
        *nodes, importances = _tree.build_tree(
            np.ascontiguousarray(X[rows]), y[rows], depth, _tree.NO_LIMIT, per_split, tree_seed
        )
        trees.append(TreeModel(tree(max_depth, None, tree_seed), w, tuple(nodes), importances))
    return ForestModel(random_forest(n_trees, max_depth, seed), w, trees)


def fit_boosted_trees(
    X, y, n_trees: int = 100, learning_rate: float = 0.1, max_depth: int = 3, seed: int = 0
) -> BoostedModel:
    """Squared-loss gradient boosting: mean base value, then trees fit to residuals."""
    if n_trees < 1:
        raise ConfigurationError("n_trees must be >= 1")
    if learning_rate <= 0:
        raise ConfigurationError("learning_rate must be > 0")
    if max_depth is not None and max_depth < 1:
        raise ConfigurationError("max_depth must be >= 1")
    X, y = _check_training(X, y, min_rows=1)
    m, w = X.shape
    if w == 0:
        raise FitError("boosted trees need at least one feature column")
    depth = _as_limit(max_depth)
    base = y.mean()
    pred = np.full(m, base)
    trees = []
    for stage in range(n_trees):
        *nodes, importances = _tree.build_tree(
            X, y - pred, depth, _tree.NO_LIMIT, w, seed + stage
        )
        member = TreeModel(tree(max_depth, None, seed + stage), w, tuple(nodes), importances)
        pred += learning_rate * _tree.predict_tree(*member._nodes, X)
        trees.append(member)
    return BoostedModel(boosted_trees(n_trees, learning_rate, max_depth, seed), w, base, trees, learning_rate)


_PLUGINS: dict[str, Callable] = {}


def register_plugin(name: str, fitter: Callable) -> None:
    """Register an external learner under ``name``.

    ``fitter(X, y, seed=..., **params)`` must return an object with a
    ``predict(X) -> (q,) array`` method.  Registered plugins participate in
    fitting, suitability evaluation and greedy selection like any built-in.
    """
    if not callable(fitter):
        raise ConfigurationError("plugin fitter must be callable")
    _PLUGINS[str(name)] = fitter


def registered_plugins() -> tuple[str, ...]:
    return tuple(sorted(_PLUGINS))


def clear_plugins() -> None:
    _PLUGINS.clear()


def fit(spec: RegressorSpec, X, y) -> TrainedModel:
    """Train the learner described by ``spec`` on (X, y).

    Fitting on a zero-width matrix returns the best constant predictor, the
    convention used when evaluating the empty feature subset.
    """
    X, y = _check_training(X, y, min_rows=1)
    if X.shape[1] == 0:
        return ConstantModel(spec, 0, y.mean())
    p = spec.params
    if spec.kind == "linear_elastic":
        return fit_linear_elastic(X, y, p.get("alpha1", 0.0), p.get("alpha2", 0.0))
    if spec.kind == "svr":
        return fit_svr(X, y, p.get("kernel", "rbf"), p.get("C", 1.0), p.get("epsilon", 0.1))
    if spec.kind == "tree":
        return fit_tree(X, y, p.get("max_depth"), p.get("max_leaves"), spec.seed)
    if spec.kind == "random_forest":
        return fit_random_forest(X, y, p.get("n_trees", 100), p.get("max_depth"), spec.seed)
    if spec.kind == "boosted_trees":
        return fit_boosted_trees(
            X, y, p.get("n_trees", 100), p.get("learning_rate", 0.1), p.get("max_depth", 3), spec.seed
        )
    if spec.kind == "external_plugin":
        name = p["name"]
        if name not in _PLUGINS:
            raise ConfigurationError(
                f"no plugin registered under {name!r}; call register_plugin() first"
            )
        extra = {k: v for k, v in p.items() if k != "name"}
        inner = _PLUGINS[name](X, y, seed=spec.seed, **extra)
        if not hasattr(inner, "predict"):
            raise FitError(f"plugin {name!r} returned an object without predict()")
        return PluginModel(spec, X.shape[1], inner)
    raise ConfigurationError(f"unknown regressor kind {spec.kind!r}")


@dataclass(frozen=True)
class HyperGrid:
    """A learner kind with the hyperparameter combinations to sweep."""

    kind: str
    entries: tuple[Mapping[str, Any], ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown regressor kind {self.kind!r}")
        if not self.entries:
            raise ConfigurationError("a hyperparameter grid cannot be empty")
        object.__setattr__(self, "entries", tuple(dict(e) for e in self.entries))
        if self.kind != "external_plugin":
            self.specs()  # eager invariant check on every entry

    def specs(self, seed: int = 0, base: Mapping[str, Any] | None = None) -> tuple[RegressorSpec, ...]:
        """Entries as ready specs; ``base`` supplies shared parameters (e.g. a plugin name)."""
        base = dict(base or {})
        return tuple(RegressorSpec(self.kind, {**base, **entry}, seed) for entry in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def default_grids(kind: str) -> HyperGrid:
    """The stock sweep for each learner family.

    linear_elastic crosses four values of each regularizer (16 entries); svr
    crosses three C values with the three kernels at epsilon 0.1 (9); the
    forest crosses three sizes with three depth caps (9); boosting crosses
    four sizes with three learning rates (12); the plugin slot sweeps C at a
    small epsilon (5).  A bare tree has no stock sweep.
    """
    if kind == "linear_elastic":
        values = (0.0, 0.1, 1.0, 5.0)
        return HyperGrid(kind, tuple({"alpha1": a1, "alpha2": a2} for a1 in values for a2 in values))
    if kind == "svr":
        return HyperGrid(
            kind,
            tuple(
                {"kernel": k, "C": c, "epsilon": 0.1}
                for c in (1.0, 5.0, 10.0)
                for k in SVR_KERNELS
            ),
        )
    if kind == "random_forest":
        return HyperGrid(
            kind,
            tuple({"n_trees": t, "max_depth": d} for t in (50, 100, 150) for d in (5, 10, 20)),
        )
    if kind == "boosted_trees":
        return HyperGrid(
            kind,
            tuple(
                {"n_trees": t, "learning_rate": lr}
                for t in (50, 100, 150, 250)
                for lr in (0.01, 0.1, 0.5)
            ),
        )
    if kind == "external_plugin":
        return HyperGrid(
            kind, tuple({"C": c, "epsilon": 0.005} for c in (0.01, 0.1, 0.3, 0.5, 1.0))
        )
    if kind == "tree":
        raise ConfigurationError(
            "bare trees have no stock sweep; set max_depth/max_leaves explicitly "
            "or use random_forest / boosted_trees"
        )
    raise ConfigurationError(f"unknown regressor kind {kind!r}")
