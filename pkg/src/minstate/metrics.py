"""Reported fit metrics: correlation, relative RMSE, absolute errors.

These complement the suitability cost in comparison tables.  The low-level
functions raise :class:`EvaluationError` when a quantity is undefined
(constant truth vector, degenerate length); :func:`metrics_report` converts
such cases to ``None`` cells so tables can mark them instead of crashing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EvaluationError


@dataclass(frozen=True)
class MetricsReport:
    """One row of fit metrics; ``None`` marks an undefined cell.

    For multi-target evaluations the headline numbers are unweighted means
    over targets and ``per_target`` retains each target's own report.
    """

    cc: float | None
    mae: float | None
    rrmse: float | None
    rmae: float | None
    per_target: tuple[tuple[str, "MetricsReport"], ...] | None = None

    def to_dict(self) -> dict:
        out = {"cc": self.cc, "mae": self.mae, "rrmse": self.rrmse, "rmae": self.rmae}
        if self.per_target is not None:
            out["per_target"] = {name: rep.to_dict() for name, rep in self.per_target}
        return out


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.ndim != 1 or y.shape != yhat.shape:
        raise EvaluationError("truth and prediction vectors must have identical 1-d shapes")
    if y.size == 0:
        raise EvaluationError("metrics need at least one sample")
    return y, yhat


def correlation_coefficient(y, yhat) -> float:
    """Pearson correlation between truth and prediction."""
    y, yhat = _pair(y, yhat)
    if y.size < 2:
        raise EvaluationError("correlation needs at least two samples")
    dy = y - y.mean()
    dp = yhat - yhat.mean()
    denom = math.sqrt(float(dy @ dy) * float(dp @ dp))
    if denom == 0.0:
        raise EvaluationError("correlation is undefined for constant vectors")
    return float(dy @ dp) / denom


def relative_rmse(y, yhat) -> float:
    """RMSE normalized by the spread of the truth; the mean predictor scores 1."""
    y, yhat = _pair(y, yhat)
    dy = y - y.mean()
    denom = float(dy @ dy)
    if denom == 0.0:
        raise EvaluationError("relative RMSE is undefined for a constant truth vector")
    err = y - yhat
    return math.sqrt(float(err @ err) / denom)


def mae(y, yhat) -> float:
    """Mean absolute error."""
    y, yhat = _pair(y, yhat)
    return float(np.abs(y - yhat).mean())


def mae_rmae(y, yhat) -> tuple[float, float]:
    """Mean absolute error and its ratio to the mean-predictor's absolute error."""
    y, yhat = _pair(y, yhat)
    abs_err = float(np.abs(y - yhat).sum())
    denom = float(np.abs(y - y.mean()).sum())
    if denom == 0.0:
        raise EvaluationError("relative MAE is undefined for a constant truth vector")
    return abs_err / len(y), abs_err / denom


def metrics_report(y, yhat) -> MetricsReport:
    """All four metrics at once, with undefined cells as ``None``."""
    values = {}
    for name, fn in (
        ("cc", correlation_coefficient),
        ("rrmse", relative_rmse),
        ("mae", mae),
    ):
        try:
            values[name] = fn(y, yhat)
        except EvaluationError:
            values[name] = None
    try:
        values["rmae"] = mae_rmae(y, yhat)[1]
    except EvaluationError:
        values["rmae"] = None
    return MetricsReport(cc=values["cc"], mae=values["mae"], rrmse=values["rrmse"], rmae=values["rmae"])


def aggregate_multi(per_target: Sequence[tuple[str, MetricsReport]]) -> MetricsReport:
    """Unweighted mean of each metric across targets, breakdown retained.

    A metric undefined for any target is undefined in the aggregate.
    """
    if not per_target:
        raise EvaluationError("need at least one per-target report")
    fields = ("cc", "mae", "rrmse", "rmae")
    means = {}
    for f in fields:
        cells = [getattr(rep, f) for _, rep in per_target]
        means[f] = None if any(c is None for c in cells) else float(np.mean(cells))
    return MetricsReport(
        cc=means["cc"],
        mae=means["mae"],
        rrmse=means["rrmse"],
        rmae=means["rmae"],
        per_target=tuple((str(name), rep) for name, rep in per_target),
    )
