"""Feature-selection strategies sharing the suitability cost.

The greedy wrapper (:func:`sfs`) grows a subset one feature at a time, always
taking the candidate whose cross-validated cost is lowest, and stops as soon
as no candidate strictly improves on the incumbent or the cardinality cap is
reached.  Filter methods (:func:`filter_rank_mi`, :func:`filter_rank_anova`,
:func:`filter_rank_pca`) and the embedded forest-importance method
(:func:`embedded_rank_mdi`) instead score every feature once; combine them
with :func:`top_w` and :func:`evaluate_selection` to put their picks on the
same cost scale as the wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .data import Dataset, FeatureSubset, SubsetLike, as_subset
from .errors import ConfigurationError, EvaluationError, ValidationError
from .regressors import HyperGrid, RegressorSpec, fit, random_forest
from .suitability import SuitabilityConfig, SuitabilityEvaluator, SuitabilityRecord

TargetsLike = Union[str, Sequence[int]]
TARGET_MODES = ("label", "features", "label+features")


@dataclass(frozen=True)
class SelectionStep:
    """One accepted greedy step: which feature joined and at what cost."""

    feature: int
    cost: float
    candidates: int

    def to_dict(self) -> dict:
        return {"feature": self.feature, "cost": self.cost, "candidates": self.candidates}


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one greedy run: the subset, its trace, and the final record."""

    method: str
    selected: tuple[int, ...]
    steps: tuple[SelectionStep, ...]
    record: SuitabilityRecord
    baseline_cost: float
    regressor: RegressorSpec
    evaluations: tuple[tuple[tuple[int, ...], float], ...] = ()
    wall_time: float = 0.0


@dataclass(frozen=True)
class ImportanceVector:
    """One relevance score per feature; higher means keep sooner."""

    scores: np.ndarray
    method: str

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        if scores.ndim != 1:
            raise ValidationError("importance scores must be a vector")
        if np.isnan(scores).any():
            raise ValidationError("importance scores must not contain NaN")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return len(self.scores)


def _admissible_indices(dataset: Dataset, config: SuitabilityConfig) -> list[int]:
    if config.include_treatment:
        return list(range(dataset.n))
    banned = set(dataset.treatment_indices)
    return [i for i in range(dataset.n) if i not in banned]


def sfs(
    dataset: Dataset,
    config: SuitabilityConfig,
    regressor: RegressorSpec,
    *,
    min_improvement: float = 0.0,
    jobs: int = 1,
    method: str = "sfs",
    keep_evaluations: bool = True,
) -> SelectionResult:
    """Sequential forward selection against the suitability cost.

    Starting from the empty subset, each round evaluates every admissible
    unselected feature joined to the incumbent and accepts the lowest-cost
    candidate (ties go to the lowest index) if it strictly improves the
    incumbent cost by more than ``min_improvement`` as a fraction.  Stops when
    nothing improves or the next feature would breach the cardinality cap.
    """
    if not dataset.scaled:
        raise ValidationError("greedy selection expects a scaled dataset")
    if min_improvement < 0:
        raise ConfigurationError("min_improvement must be non-negative")
    admissible = _admissible_indices(dataset, config)
    if not admissible:
        raise ConfigurationError("no admissible features to select from")
    evaluator = SuitabilityEvaluator(dataset, config, regressor)
    incumbent = evaluator.evaluate(())
    baseline = incumbent.cost
    selected: list[int] = []
    steps: list[SelectionStep] = []
    evaluations: list[tuple[tuple[int, ...], float]] = []

    while True:
        if math.isinf(config.cardinality_cost(len(selected) + 1)):
            break
        candidates = [j for j in admissible if j not in selected]
        if not candidates:
            break
        subsets = [tuple(selected) + (j,) for j in candidates]
        if jobs and jobs > 1:
            from joblib import Parallel, delayed

            records = Parallel(n_jobs=jobs, prefer="threads")(
                delayed(evaluator.evaluate)(s) for s in subsets
            )
        else:
            records = [evaluator.evaluate(s) for s in subsets]
        if keep_evaluations:
            evaluations.extend((s, r.cost) for s, r in zip(subsets, records))
        best_pos = min(range(len(candidates)), key=lambda i: (records[i].cost, candidates[i]))
        best = records[best_pos]
        improvement = incumbent.cost - best.cost
        if improvement <= 0 or improvement <= min_improvement * abs(incumbent.cost):
            break
        selected.append(candidates[best_pos])
        incumbent = best
        steps.append(
            SelectionStep(feature=candidates[best_pos], cost=best.cost, candidates=len(candidates))
        )

    return SelectionResult(
        method=method,
        selected=tuple(selected),
        steps=tuple(steps),
        record=incumbent,
        baseline_cost=baseline,
        regressor=regressor,
        evaluations=tuple(evaluations),
    )


def _discretize(values: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width binning over the observed range; constant columns map to bin 0."""
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros(len(values), dtype=np.intp)
    scaled = (values - lo) / (hi - lo) * bins
    return np.minimum(scaled.astype(np.intp), bins - 1)


def _histogram_mi(a_bins: np.ndarray, b_bins: np.ndarray, bins: int) -> float:
    """Plug-in mutual information (nats) of two already-binned variables."""
    joint = np.zeros((bins, bins))
    np.add.at(joint, (a_bins, b_bins), 1.0)
    joint /= joint.sum()
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    nz = joint > 0
    denom = np.outer(pa, pb)
    return float(np.sum(joint[nz] * np.log(joint[nz] / denom[nz])))


def _target_columns(dataset: Dataset, targets: TargetsLike) -> tuple[list[np.ndarray], list[int | None]]:
    """Resolve a targets declaration to (column vectors, source feature index or None for label)."""
    if isinstance(targets, str):
        if targets not in TARGET_MODES:
            raise ConfigurationError(f"targets must be one of {TARGET_MODES} or explicit indices")
        vectors: list[np.ndarray] = []
        sources: list[int | None] = []
        if targets in ("label", "label+features"):
            vectors.append(dataset.labels)
            sources.append(None)
        if targets in ("features", "label+features"):
            for j in range(dataset.n):
                vectors.append(dataset.column(j))
                sources.append(j)
        return vectors, sources
    b = as_subset(targets, dataset.n)
    return [dataset.column(j) for j in b.indices], list(b.indices)


def targets_for(config: SuitabilityConfig) -> str:
    """Ranking-target mode implied by a suitability weighting."""
    label = config.include_label_target
    features = config.reconstruction_weight > 0
    if label and features:
        return "label+features"
    if features:
        return "features"
    return "label"


def filter_rank_mi(dataset: Dataset, targets: TargetsLike = "label", *, bins: int = 10) -> ImportanceVector:
    """Mutual-information relevance of each feature.

    Both variables are discretized into ``bins`` equal-width bins over their
    observed ranges.  With several targets the score is the mean over them; a
    feature is never scored against itself.
    """
    if bins < 2:
        raise ConfigurationError("need at least 2 bins")
    vectors, sources = _target_columns(dataset, targets)
    target_bins = [_discretize(v, bins) for v in vectors]
    feature_bins = [_discretize(dataset.column(i), bins) for i in range(dataset.n)]
    scores = np.zeros(dataset.n)
    for i in range(dataset.n):
        values = [
            _histogram_mi(feature_bins[i], tb, bins)
            for tb, src in zip(target_bins, sources)
            if src != i
        ]
        scores[i] = float(np.mean(values)) if values else 0.0
    return ImportanceVector(scores, "filter_mi")


def _f_statistic(values: np.ndarray, groups: np.ndarray) -> float:
    """One-way F: between-group over within-group mean square.

    Zero within-group variance with real between-group spread yields the
    infinite sentinel; an entirely constant column scores 0.
    """
    uniq = np.unique(groups)
    if len(uniq) < 2:
        raise EvaluationError("F-statistic needs at least two groups")
    grand = values.mean()
    ss_between = 0.0
    ss_within = 0.0
    for g in uniq:
        part = values[groups == g]
        mean_g = part.mean()
        ss_between += len(part) * (mean_g - grand) ** 2
        ss_within += float(((part - mean_g) ** 2).sum())
    df_between = len(uniq) - 1
    df_within = len(values) - len(uniq)
    if ss_within == 0.0 or df_within == 0:
        return math.inf if ss_between > 0.0 else 0.0
    if ss_between == 0.0:
        return 0.0
    return (ss_between / df_between) / (ss_within / df_within)


def filter_rank_anova(dataset: Dataset, targets: TargetsLike = "label", *, bins: int = 10) -> ImportanceVector:
    """One-way F-test relevance of each feature.

    Samples are grouped by exact target value while the target takes at most
    ``bins`` distinct values (the usual case for the 0-6 score label) and by
    equal-width bins otherwise.  Multi-target scores are means (infinities
    propagate), self-pairs excluded.
    """
    vectors, sources = _target_columns(dataset, targets)
    grouped = [
        v if len(np.unique(v)) <= bins else _discretize(v, bins) for v in vectors
    ]
    scores = np.zeros(dataset.n)
    for i in range(dataset.n):
        column = dataset.column(i)
        values = [
            _f_statistic(column, g) for g, src in zip(grouped, sources) if src != i
        ]
        scores[i] = float(np.mean(values)) if values else 0.0
    return ImportanceVector(scores, "filter_anova")


def filter_rank_pca(dataset: Dataset, *, components: int = 3) -> ImportanceVector:
    """Correlation-matrix principal-component relevance.

    Each feature scores ``sum_i eigenvalue_i * |loading_ij|`` over the top
    ``components`` eigenpairs of the feature correlation matrix.  Zero-variance
    features are excluded from the matrix and score 0.
    """
    if components < 1:
        raise ConfigurationError("need at least one component")
    if dataset.n < components:
        raise ConfigurationError(
            f"need at least {components} features for {components} components, have {dataset.n}"
        )
    variances = dataset.features.var(axis=0)
    active = np.flatnonzero(variances > 0.0)
    if len(active) < components:
        raise ConfigurationError(
            f"only {len(active)} features have variance; cannot extract {components} components"
        )
    corr = np.corrcoef(dataset.features[:, active], rowvar=False)
    eigenvalues, eigenvectors = np.linalg.eigh(corr)
    order = np.argsort(eigenvalues)[::-1][:components]
    scores = np.zeros(dataset.n)
    for rank in order:
        vector = eigenvectors[:, rank]
        anchor = np.argmax(np.abs(vector))
        if vector[anchor] < 0:
            vector = -vector
        scores[active] += eigenvalues[rank] * np.abs(vector)
    return ImportanceVector(scores, "filter_pca")


def embedded_rank_mdi(
    dataset: Dataset,
    targets: TargetsLike = "label",
    forest: RegressorSpec | None = None,
) -> ImportanceVector:
    """Mean-decrease-in-impurity relevance from random forests.

    Each split's (node fraction x impurity decrease) accrues to its feature,
    averaged over trees and normalized to sum 1.  For feature targets a forest
    is fitted per target on the remaining columns and the importances are
    averaged before normalizing.
    """
    spec = forest if forest is not None else random_forest()
    if spec.kind != "random_forest":
        raise ConfigurationError("embedded ranking needs a random_forest spec")
    vectors, sources = _target_columns(dataset, targets)
    totals = np.zeros(dataset.n)
    for target, src in zip(vectors, sources):
        cols = [j for j in range(dataset.n) if j != src]
        model = fit(spec, dataset.features[:, cols], target)
        totals[cols] += model.raw_importances
    totals /= len(vectors)
    total_mass = totals.sum()
    if total_mass > 0:
        totals = totals / total_mass
    return ImportanceVector(totals, "embedded_mdi")


def top_w(importance: ImportanceVector, w: int) -> FeatureSubset:
    """Indices of the ``w`` largest scores, ties broken by lowest index."""
    n = len(importance)
    if not 1 <= w <= n:
        raise ConfigurationError(f"w must be in [1, {n}], got {w}")
    order = np.argsort(-importance.scores, kind="stable")[:w]
    return FeatureSubset(tuple(int(i) for i in order))


def evaluate_selection(
    dataset: Dataset,
    subset: SubsetLike,
    config: SuitabilityConfig,
    grids: Union[Mapping[str, HyperGrid], Sequence[HyperGrid]],
    *,
    model_seed: int = 0,
    jobs: int = 1,
) -> tuple[float, dict[str, SuitabilityRecord]]:
    """Cost of a fixed subset under each learner family's best grid entry.

    For every family the grid is swept and the minimum-cost record kept (ties
    go to the earlier entry); the returned headline cost is the minimum over
    families.  The subset itself is never changed.
    """
    b = as_subset(subset, dataset.n)
    if isinstance(grids, Mapping):
        family_grids = list(grids.values())
    else:
        family_grids = list(grids)
    if not family_grids:
        raise ConfigurationError("need at least one hyperparameter grid")

    def best_for(grid: HyperGrid) -> SuitabilityRecord:
        records = []
        for spec in grid.specs(seed=model_seed):
            evaluator = SuitabilityEvaluator(dataset, config, spec)
            records.append(evaluator.evaluate(b))
        pos = min(range(len(records)), key=lambda i: (records[i].cost, i))
        return records[pos]

    if jobs and jobs > 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(best_for)(g) for g in family_grids
        )
    else:
        results = [best_for(g) for g in family_grids]
    by_family = {g.kind: r for g, r in zip(family_grids, results)}
    kinds = list(by_family)
    best_kind = min(kinds, key=lambda k: (by_family[k].cost, kinds.index(k)))
    return by_family[best_kind].cost, by_family
