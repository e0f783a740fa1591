"""Cross-validated suitability cost of a feature subset.

The cost of keeping subset ``b`` has three parts, each computed per fold on
held-out samples only: the error of predicting the score label from ``b``
(weighted by ``label_weight``), the summed error of reconstructing every
discarded feature from ``b`` (weighted by ``reconstruction_weight``), and a
cardinality charge that is zero up to ``max_features`` and infinite beyond.
The headline cost is the arithmetic mean of the per-fold costs.

Three stock weightings are available through :func:`preset`:

``mds``
    label term only; the treatment column is not selectable.
``mis``
    reconstruction term only, at most 10 features.
``mids``
    both terms with unit weights, at most 10 features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset, FoldPlan, ScalingSpec, SubsetLike, as_subset, make_folds
from .errors import ConfigurationError, EvaluationError
from .regressors import RegressorSpec, TrainedModel, fit

PRESET_NAMES = ("mds", "mis", "mids")


@dataclass(frozen=True)
class SuitabilityConfig:
    """Weights, cardinality cap and fold protocol that pin the cost function."""

    label_weight: float = 1.0
    reconstruction_weight: float = 0.0
    max_features: int | None = None
    folds: int = 4
    fold_seed: int = 0
    stratify: bool = True
    scale_per_fold: bool = False
    include_treatment: bool = True
    include_label_target: bool = True

    def __post_init__(self):
        if self.label_weight < 0 or self.reconstruction_weight < 0:
            raise ConfigurationError("suitability weights must be non-negative")
        if self.label_weight + self.reconstruction_weight <= 0:
            raise ConfigurationError("at least one suitability weight must be positive")
        if self.max_features is not None and self.max_features < 1:
            raise ConfigurationError("max_features must be >= 1 when set")
        if self.folds < 2:
            raise ConfigurationError("cross validation needs at least 2 folds")

    def cardinality_cost(self, size: int) -> float:
        """Charge for keeping ``size`` features: 0 up to the cap, infinite past it."""
        if self.max_features is not None and size > self.max_features:
            return math.inf
        return 0.0

    def to_dict(self) -> dict:
        return {
            "label_weight": self.label_weight,
            "reconstruction_weight": self.reconstruction_weight,
            "max_features": self.max_features,
            "folds": self.folds,
            "fold_seed": self.fold_seed,
            "stratify": self.stratify,
            "scale_per_fold": self.scale_per_fold,
            "include_treatment": self.include_treatment,
            "include_label_target": self.include_label_target,
        }


def preset(name: str, *, folds: int = 4, fold_seed: int = 0) -> SuitabilityConfig:
    """Stock suitability weightings: ``mds``, ``mis`` or ``mids``."""
    key = str(name).lower()
    if key == "mds":
        return SuitabilityConfig(
            label_weight=1.0,
            reconstruction_weight=0.0,
            max_features=None,
            folds=folds,
            fold_seed=fold_seed,
            include_treatment=False,
            include_label_target=True,
        )
    if key == "mis":
        return SuitabilityConfig(
            label_weight=0.0,
            reconstruction_weight=1.0,
            max_features=10,
            folds=folds,
            fold_seed=fold_seed,
            include_treatment=True,
            include_label_target=False,
        )
    if key == "mids":
        return SuitabilityConfig(
            label_weight=1.0,
            reconstruction_weight=1.0,
            max_features=10,
            folds=folds,
            fold_seed=fold_seed,
            include_treatment=True,
            include_label_target=True,
        )
    raise ConfigurationError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


@dataclass(frozen=True)
class SuitabilityRecord:
    """Per-fold cost terms for one (subset, regressor) evaluation.

    ``fold_costs[i]`` always equals
    ``label_weight * label_errors[i] + reconstruction_weight * reconstruction_errors[i]``
    plus the cardinality charge; terms whose weight is zero are stored as 0.0
    without being computed.  ``cost`` is the mean over folds.
    """

    subset: tuple[int, ...]
    regressor: RegressorSpec
    label_errors: tuple[float, ...]
    reconstruction_errors: tuple[float, ...]
    fold_costs: tuple[float, ...]
    cost: float

    def to_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "regressor": self.regressor.to_dict(),
            "label_errors": list(self.label_errors),
            "reconstruction_errors": list(self.reconstruction_errors),
            "fold_costs": list(self.fold_costs),
            "cost": self.cost,
        }


def rmse(model: TrainedModel, X, y) -> float:
    """Root-mean-square residual of ``model`` on a non-empty evaluation set."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise EvaluationError("cannot evaluate on an empty set")
    y = np.asarray(y, dtype=float)
    residual = model.predict(X) - y
    return float(np.sqrt(np.mean(residual * residual)))


def _fold_scaler(X_train) -> ScalingSpec:
    return ScalingSpec(X_train.min(axis=0), X_train.max(axis=0))


def _split_projection(dataset, subset_idx, train_idx, test_idx, scale_per_fold):
    """Train/test feature blocks for the subset columns, optionally fold-scaled."""
    cols = list(subset_idx)
    X_train = dataset.features[np.ix_(train_idx, cols)]
    X_test = dataset.features[np.ix_(test_idx, cols)]
    if scale_per_fold and cols:
        scaler = _fold_scaler(X_train)
        X_train = scaler.apply(X_train)
        X_test = scaler.apply(X_test)
    return X_train, X_test


def label_error(
    dataset: Dataset,
    subset: SubsetLike,
    train_idx,
    test_idx,
    regressor: RegressorSpec,
    *,
    scale_per_fold: bool = False,
) -> float:
    """Held-out error of predicting the label from the subset columns.

    Fits on the training rows only and scores on the held-out rows; an empty
    subset degrades to the best constant predictor.
    """
    b = as_subset(subset, dataset.n)
    X_train, X_test = _split_projection(dataset, b.indices, train_idx, test_idx, scale_per_fold)
    model = fit(regressor, X_train, dataset.labels[train_idx])
    return rmse(model, X_test, dataset.labels[test_idx])


def _fit_linear_many(X_train, T_train, X_test, alpha1, alpha2):
    """Predictions for many linear targets sharing one design matrix.

    Equivalent to fitting each target separately; the closed-form part is a
    single multi-right-hand-side solve, and any l1 part falls back to
    per-target coordinate descent over shared precomputations.
    """
    from .regressors import _coordinate_descent, _ridge_weights

    x_mean = X_train.mean(axis=0)
    t_mean = T_train.mean(axis=0)
    Xc = X_train - x_mean
    Tc = T_train - t_mean
    if Xc.shape[1] == 0:
        return np.tile(t_mean, (X_test.shape[0], 1))
    if alpha2 == 0.0:
        W, *_ = np.linalg.lstsq(Xc, Tc, rcond=None)
    else:
        gram = Xc.T @ Xc + alpha2 * np.eye(Xc.shape[1])
        W = np.linalg.solve(gram, Xc.T @ Tc)
    if alpha1 > 0.0:
        col_sq = (Xc * Xc).sum(axis=0)
        for j in range(W.shape[1]):
            W[:, j] = _coordinate_descent(Xc, Tc[:, j], W[:, j].copy(), col_sq, alpha1, alpha2)
    return (X_test - x_mean) @ W + t_mean


def reconstruction_error(
    dataset: Dataset,
    subset: SubsetLike,
    train_idx,
    test_idx,
    regressor: RegressorSpec,
    *,
    scale_per_fold: bool = False,
) -> float:
    """Summed held-out error of reconstructing each discarded feature from the subset.

    One model is fitted per discarded column; the per-column errors are summed
    in ascending column order.  Selecting everything leaves nothing to
    reconstruct and returns exactly 0.
    """
    b = as_subset(subset, dataset.n)
    others = b.complement(dataset.n).indices
    if not others:
        return 0.0
    X_train, X_test = _split_projection(dataset, b.indices, train_idx, test_idx, scale_per_fold)
    T_train = dataset.features[np.ix_(train_idx, list(others))]
    T_test = dataset.features[np.ix_(test_idx, list(others))]
    if len(test_idx) == 0:
        raise EvaluationError("cannot evaluate on an empty set")
    if regressor.kind == "linear_elastic":
        preds = _fit_linear_many(
            X_train,
            T_train,
            X_test,
            regressor.params.get("alpha1", 0.0),
            regressor.params.get("alpha2", 0.0),
        )
        residual = preds - T_test
        per_target = np.sqrt(np.mean(residual * residual, axis=0))
        return float(per_target.sum())
    total = 0.0
    for j in range(len(others)):
        model = fit(regressor, X_train, T_train[:, j])
        total += rmse(model, X_test, T_test[:, j])
    return total


def fold_cost(
    dataset: Dataset,
    subset: SubsetLike,
    train_idx,
    test_idx,
    config: SuitabilityConfig,
    regressor: RegressorSpec,
) -> float:
    """Weighted one-fold cost; infinite cardinality charge short-circuits all fitting."""
    parts = _fold_cost_parts(dataset, subset, train_idx, test_idx, config, regressor)
    return parts[0]


def _fold_cost_parts(dataset, subset, train_idx, test_idx, config, regressor):
    b = as_subset(subset, dataset.n)
    charge = config.cardinality_cost(len(b))
    if math.isinf(charge):
        return math.inf, 0.0, 0.0
    m1 = 0.0
    m2 = 0.0
    if config.label_weight > 0:
        m1 = label_error(
            dataset, b, train_idx, test_idx, regressor, scale_per_fold=config.scale_per_fold
        )
    if config.reconstruction_weight > 0:
        m2 = reconstruction_error(
            dataset, b, train_idx, test_idx, regressor, scale_per_fold=config.scale_per_fold
        )
    total = config.label_weight * m1 + config.reconstruction_weight * m2 + charge
    return total, m1, m2


class SuitabilityEvaluator:
    """Caches subset costs for one (dataset, config, regressor) triple.

    The fold plan is built once from the config; repeated evaluations of the
    same subset are served from an in-memory record cache, which is what keeps
    greedy selection from refitting accepted subsets.
    """

    def __init__(self, dataset: Dataset, config: SuitabilityConfig, regressor: RegressorSpec):
        if config.folds > dataset.m:
            raise ConfigurationError(
                f"cannot split {dataset.m} samples into {config.folds} folds"
            )
        self.dataset = dataset
        self.config = config
        self.regressor = regressor
        self.plan: FoldPlan = make_folds(
            dataset.m,
            config.folds,
            config.fold_seed,
            labels=dataset.labels if config.stratify else None,
            stratify=config.stratify,
        )
        self._splits = [
            (self.plan.train_indices(i), self.plan.test_indices(i)) for i in range(config.folds)
        ]
        self._cache: dict[tuple[int, ...], SuitabilityRecord] = {}

    def evaluate(self, subset: SubsetLike) -> SuitabilityRecord:
        b = as_subset(subset, self.dataset.n)
        key = b.indices
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        costs, m1s, m2s = [], [], []
        for train_idx, test_idx in self._splits:
            total, m1, m2 = _fold_cost_parts(
                self.dataset, b, train_idx, test_idx, self.config, self.regressor
            )
            costs.append(total)
            m1s.append(m1)
            m2s.append(m2)
        record = SuitabilityRecord(
            subset=key,
            regressor=self.regressor,
            label_errors=tuple(m1s),
            reconstruction_errors=tuple(m2s),
            fold_costs=tuple(costs),
            cost=float(np.mean(costs)),
        )
        self._cache[key] = record
        return record


def suitability(
    dataset: Dataset,
    subset: SubsetLike,
    config: SuitabilityConfig,
    regressor: RegressorSpec,
) -> SuitabilityRecord:
    """K-fold cost of keeping ``subset``: mean over folds of the weighted fold costs."""
    return SuitabilityEvaluator(dataset, config, regressor).evaluate(subset)
