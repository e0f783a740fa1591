"""Batch orchestration: run every method on one dataset and persist the bundle.

A run sweeps each greedy wrapper over its learner family's hyperparameter
grid (keeping the lowest-cost run), ranks-and-evaluates each filter/embedded
baseline, and collects everything into one artifact bundle: a ranking table,
a method-by-feature selection matrix, per-method records and traces.  Given
identical configuration and seeds the serialized results are byte-identical;
wall-clock timings are kept out of them on purpose.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__ as _package_version
from .data import Dataset, load_csv, make_folds, scale_unit_interval
from .errors import ConfigurationError, MinstateError
from .metrics import MetricsReport, aggregate_multi, metrics_report
from .regressors import HyperGrid, RegressorSpec, default_grids, fit
from .selection import (
    SelectionResult,
    embedded_rank_mdi,
    evaluate_selection,
    filter_rank_anova,
    filter_rank_mi,
    filter_rank_pca,
    sfs,
    targets_for,
    top_w,
)
from .suitability import SuitabilityConfig, SuitabilityRecord, preset

METHODS = (
    "sfs_linear",
    "sfs_svr",
    "sfs_rf",
    "sfs_boost",
    "filter_mi",
    "filter_anova",
    "filter_pca",
    "embedded_mdi",
)
SFS_FAMILIES = {
    "sfs_linear": "linear_elastic",
    "sfs_svr": "svr",
    "sfs_rf": "random_forest",
    "sfs_boost": "boosted_trees",
}
FAMILY_KINDS = ("linear_elastic", "svr", "random_forest", "boosted_trees")
TABLE_COLUMNS = ("J", "MAE", "rRMSE", "rMAE", "CC")
RESULTS_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything a batch run needs: data location, preset, methods, seeds."""

    dataset: str
    schema: str
    preset_name: str = "mds"
    methods: tuple[str, ...] = METHODS
    folds: int = 4
    fold_seed: int = 0
    model_seed: int = 0
    select_w: int | None = None
    out_dir: str | None = None
    jobs: int = 0
    min_improvement: float = 0.0
    mi_bins: int = 10
    pooled_metrics: bool = False
    scale_per_fold: bool = False
    stratify: bool = True
    selection_count_threshold: int = 3
    grid_overrides: Mapping[str, HyperGrid] | None = None

    def __post_init__(self):
        methods = tuple(self.methods)
        if not methods:
            raise ConfigurationError("methods must not be empty")
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise ConfigurationError(f"unknown method(s) {unknown}; choose from {METHODS}")
        if len(set(methods)) != len(methods):
            raise ConfigurationError("methods must not repeat")
        object.__setattr__(self, "methods", methods)
        if self.grid_overrides is not None:
            overrides = dict(self.grid_overrides)
            bad = [k for k in overrides if k not in FAMILY_KINDS]
            if bad:
                raise ConfigurationError(f"grid overrides for unknown families: {bad}")
            object.__setattr__(self, "grid_overrides", overrides)

    def to_dict(self) -> dict:
        out = {
            "dataset": str(self.dataset),
            "schema": str(self.schema),
            "preset_name": self.preset_name,
            "methods": list(self.methods),
            "folds": self.folds,
            "fold_seed": self.fold_seed,
            "model_seed": self.model_seed,
            "select_w": self.select_w,
            "min_improvement": self.min_improvement,
            "mi_bins": self.mi_bins,
            "pooled_metrics": self.pooled_metrics,
            "scale_per_fold": self.scale_per_fold,
            "stratify": self.stratify,
            "selection_count_threshold": self.selection_count_threshold,
        }
        if self.grid_overrides:
            out["grid_overrides"] = {
                kind: [dict(e) for e in grid.entries] for kind, grid in self.grid_overrides.items()
            }
        return out


@dataclass(frozen=True)
class MethodOutcome:
    """One method's results inside a bundle; ``status`` is ``ok`` or ``failed``."""

    method: str
    status: str
    reason: str | None = None
    selected: tuple[int, ...] = ()
    cost: float | None = None
    record: SuitabilityRecord | None = None
    per_family: Mapping[str, SuitabilityRecord] | None = None
    scores: tuple[float, ...] | None = None
    metrics: MetricsReport | None = None
    selection: SelectionResult | None = None
    grid_size: int | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class RunBundle:
    """All per-method outcomes of one run plus the provenance to reproduce them."""

    run_config: RunConfig
    suitability_config: SuitabilityConfig
    feature_names: tuple[str, ...]
    feature_roles: tuple[str, ...]
    outcomes: tuple[MethodOutcome, ...]
    provenance: dict = field(default_factory=dict)
    timings: Mapping[str, float] = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    def ranking(self) -> list[MethodOutcome]:
        """Successful outcomes by ascending cost (ties by name), then failures by name."""
        good = sorted((o for o in self.outcomes if o.ok), key=lambda o: (o.cost, o.method))
        bad = sorted((o for o in self.outcomes if not o.ok), key=lambda o: o.method)
        return good + bad

    def to_results_dict(self) -> dict:
        methods = {}
        for o in self.outcomes:
            entry: dict = {"status": o.status, "reason": o.reason}
            if o.ok:
                entry.update(
                    {
                        "selected": list(o.selected),
                        "selected_names": [self.feature_names[i] for i in o.selected],
                        "cost": o.cost,
                        "record": o.record.to_dict() if o.record else None,
                        "metrics": o.metrics.to_dict() if o.metrics else None,
                        "grid_size": o.grid_size,
                    }
                )
                if o.per_family is not None:
                    entry["per_family"] = {k: r.to_dict() for k, r in o.per_family.items()}
                if o.scores is not None:
                    entry["scores"] = list(o.scores)
                if o.selection is not None:
                    entry["baseline_cost"] = o.selection.baseline_cost
                    entry["steps"] = [s.to_dict() for s in o.selection.steps]
            methods[o.method] = entry
        ranking = [
            {"method": o.method, "cost": o.cost if o.ok else None} for o in self.ranking()
        ]
        return {
            "schema_version": RESULTS_SCHEMA_VERSION,
            "run_config": self.run_config.to_dict(),
            "suitability_config": self.suitability_config.to_dict(),
            "feature_names": list(self.feature_names),
            "feature_roles": list(self.feature_roles),
            "method_order": [o.method for o in self.outcomes],
            "methods": methods,
            "ranking": ranking,
            "selection_matrix": _matrix_dict(self),
            "provenance": dict(self.provenance),
        }


def _matrix_dict(bundle: RunBundle) -> dict:
    n = len(bundle.feature_names)
    rows = {}
    for o in bundle.outcomes:
        flags = [0] * n
        for i in o.selected:
            flags[i] = 1
        rows[o.method] = flags
    counts = [0] * n
    for o in bundle.outcomes:
        if o.ok and o.method in SFS_FAMILIES:
            for i in o.selected:
                counts[i] += 1
    threshold = bundle.run_config.selection_count_threshold
    flagged = [1 if c >= threshold else 0 for c in counts]
    return {
        "features": list(bundle.feature_names),
        "rows": rows,
        "sfs_selection_counts": counts,
        "count_threshold": threshold,
        "sfs_commonly_selected": flagged,
    }


def _effective_jobs(jobs: int) -> int:
    if jobs and jobs > 0:
        return jobs
    return os.cpu_count() or 1


def _resolve_grids(config: RunConfig) -> dict[str, HyperGrid]:
    grids = {kind: default_grids(kind) for kind in FAMILY_KINDS}
    if config.grid_overrides:
        grids.update(config.grid_overrides)
    return grids


def _metric_targets(dataset: Dataset, scfg: SuitabilityConfig, subset: Sequence[int]):
    targets: list[tuple[str, np.ndarray, int | None]] = []
    if scfg.label_weight > 0:
        targets.append(("label", dataset.labels, None))
    if scfg.reconstruction_weight > 0:
        chosen = set(subset)
        for j in range(dataset.n):
            if j not in chosen:
                targets.append((dataset.feature_names[j], dataset.column(j), j))
    return targets


def _selection_metrics(
    dataset: Dataset,
    scfg: SuitabilityConfig,
    subset: Sequence[int],
    regressor: RegressorSpec,
    pooled: bool,
) -> MetricsReport | None:
    """Metrics of the chosen subset's predictor from pooled held-out predictions.

    Each sample is predicted by the fold model that held it out; per-target
    reports are aggregated by unweighted mean (default) or by pooling
    residuals across targets when ``pooled`` is set.
    """
    targets = _metric_targets(dataset, scfg, subset)
    if not targets:
        return None
    plan = make_folds(
        dataset.m,
        scfg.folds,
        scfg.fold_seed,
        labels=dataset.labels if scfg.stratify else None,
        stratify=scfg.stratify,
    )
    cols = list(subset)
    predictions = {name: np.empty(dataset.m) for name, _, _ in targets}
    for fold in range(plan.k):
        train_idx = plan.train_indices(fold)
        test_idx = plan.test_indices(fold)
        X_train = dataset.features[np.ix_(train_idx, cols)]
        X_test = dataset.features[np.ix_(test_idx, cols)]
        for name, values, _ in targets:
            model = fit(regressor, X_train, values[train_idx])
            predictions[name][test_idx] = model.predict(X_test)
    if pooled:
        truth = np.concatenate([values for _, values, _ in targets])
        guess = np.concatenate([predictions[name] for name, _, _ in targets])
        return metrics_report(truth, guess)
    reports = [(name, metrics_report(values, predictions[name])) for name, values, _ in targets]
    if len(reports) == 1:
        return reports[0][1]
    return aggregate_multi(reports)


def _run_sfs_method(method, dataset, scfg, grids, config, jobs) -> MethodOutcome:
    kind = SFS_FAMILIES[method]
    grid = grids[kind]
    specs = grid.specs(seed=config.model_seed)

    def one_run(spec: RegressorSpec) -> SelectionResult:
        return sfs(
            dataset,
            scfg,
            spec,
            min_improvement=config.min_improvement,
            jobs=1,
            method=method,
        )

    if jobs > 1 and len(specs) > 1:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=jobs, prefer="threads")(delayed(one_run)(s) for s in specs)
    else:
        results = [one_run(s) for s in specs]
    best_pos = min(range(len(results)), key=lambda i: (results[i].record.cost, i))
    best = results[best_pos]
    metrics = _selection_metrics(
        dataset, scfg, best.selected, best.regressor, config.pooled_metrics
    )
    return MethodOutcome(
        method=method,
        status="ok",
        selected=best.selected,
        cost=best.record.cost,
        record=best.record,
        metrics=metrics,
        selection=best,
        grid_size=len(specs),
    )


def _run_ranking_method(method, dataset, scfg, grids, config, jobs) -> MethodOutcome:
    targets = targets_for(scfg)
    if method == "filter_mi":
        importance = filter_rank_mi(dataset, targets, bins=config.mi_bins)
    elif method == "filter_anova":
        importance = filter_rank_anova(dataset, targets, bins=config.mi_bins)
    elif method == "filter_pca":
        importance = filter_rank_pca(dataset)
    elif method == "embedded_mdi":
        forest = RegressorSpec("random_forest", {"n_trees": 100}, config.model_seed)
        importance = embedded_rank_mdi(dataset, targets, forest)
    else:
        raise ConfigurationError(f"unknown ranking method {method!r}")
    w = config.select_w or scfg.max_features or 12
    w = min(w, dataset.n)
    subset = top_w(importance, w)
    cost, per_family = evaluate_selection(
        dataset, subset, scfg, grids, model_seed=config.model_seed, jobs=jobs
    )
    kinds = list(per_family)
    best_kind = min(kinds, key=lambda k: (per_family[k].cost, kinds.index(k)))
    best = per_family[best_kind]
    metrics = _selection_metrics(
        dataset, scfg, subset.indices, best.regressor, config.pooled_metrics
    )
    return MethodOutcome(
        method=method,
        status="ok",
        selected=subset.indices,
        cost=cost,
        record=best,
        per_family=per_family,
        scores=tuple(float(s) for s in importance.scores),
        metrics=metrics,
    )


def _provenance(config: RunConfig, scfg: SuitabilityConfig) -> dict:
    import numba
    import sklearn

    canonical = json.dumps(
        {"run": config.to_dict(), "suitability": scfg.to_dict()}, sort_keys=True
    )
    return {
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "package_version": _package_version,
        "numpy_version": np.__version__,
        "numba_version": numba.__version__,
        "sklearn_version": sklearn.__version__,
    }


def run(config: RunConfig, dataset: Dataset | None = None) -> RunBundle:
    """Execute every configured method; failures are recorded, not raised.

    ``dataset`` can be passed directly (it is scaled if needed); otherwise the
    configured CSV and schema are loaded.  Deterministic given the config and
    seeds, up to the floating behavior of the pinned library versions.
    """
    if dataset is None:
        dataset = load_csv(config.dataset, config.schema)
    if not dataset.scaled:
        dataset, _ = scale_unit_interval(dataset)
    scfg = replace(
        preset(config.preset_name, folds=config.folds, fold_seed=config.fold_seed),
        stratify=config.stratify,
        scale_per_fold=config.scale_per_fold,
    )
    grids = _resolve_grids(config)
    jobs = _effective_jobs(config.jobs)
    outcomes = []
    timings = {}
    for method in config.methods:
        started = time.perf_counter()
        try:
            if method in SFS_FAMILIES:
                outcome = _run_sfs_method(method, dataset, scfg, grids, config, jobs)
            else:
                outcome = _run_ranking_method(method, dataset, scfg, grids, config, jobs)
        except MinstateError as exc:
            outcome = MethodOutcome(method=method, status="failed", reason=str(exc))
        timings[method] = time.perf_counter() - started
        outcomes.append(outcome)
    bundle = RunBundle(
        run_config=config,
        suitability_config=scfg,
        feature_names=dataset.feature_names,
        feature_roles=dataset.feature_roles,
        outcomes=tuple(outcomes),
        provenance=_provenance(config, scfg),
        timings=timings,
    )
    if config.out_dir:
        write_bundle(bundle, config.out_dir)
    return bundle


def _fmt_cell(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "—"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.2f}"


def _table_rows(results: dict) -> list[dict]:
    methods = results["methods"]
    rows = []
    for entry in results["ranking"]:
        name = entry["method"]
        data = methods[name]
        if data["status"] != "ok":
            rows.append({"method": name, "cells": [None] * len(TABLE_COLUMNS), "reason": data["reason"]})
            continue
        metrics = data.get("metrics") or {}
        rows.append(
            {
                "method": name,
                "cells": [
                    data["cost"],
                    metrics.get("mae"),
                    metrics.get("rrmse"),
                    metrics.get("rmae"),
                    metrics.get("cc"),
                ],
                "reason": None,
            }
        )
    return rows


def render_table(results: "RunBundle | dict", fmt: str = "csv") -> str:
    """Ranking table, ascending by cost, two-decimal cells, failures footnoted."""
    if isinstance(results, RunBundle):
        results = results.to_results_dict()
    if fmt not in ("csv", "markdown"):
        raise ConfigurationError("table format must be 'csv' or 'markdown'")
    rows = _table_rows(results)
    header = ["method", *TABLE_COLUMNS]
    if fmt == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join([row["method"], *(_fmt_cell(c) for c in row["cells"])]))
        footnotes = [f"# {r['method']}: failed ({r['reason']})" for r in rows if r["reason"]]
        return "\n".join(lines + footnotes) + "\n"
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in rows:
        lines.append("| " + " | ".join([row["method"], *(_fmt_cell(c) for c in row["cells"])]) + " |")
    footnotes = [f"- `{r['method']}` failed: {r['reason']}" for r in rows if r["reason"]]
    if footnotes:
        lines += ["", *footnotes]
    return "\n".join(lines) + "\n"


def render_selection_matrix(results: "RunBundle | dict") -> str:
    """CSV of method-by-feature selection flags with greedy-consensus summary rows."""
    if isinstance(results, RunBundle):
        results = results.to_results_dict()
    matrix = results["selection_matrix"]
    names = matrix["features"]
    lines = [",".join(["method", *names])]
    for method in results["method_order"]:
        flags = matrix["rows"][method]
        lines.append(",".join([method, *(str(int(v)) for v in flags)]))
    lines.append(",".join(["sfs_selection_count", *(str(int(c)) for c in matrix["sfs_selection_counts"])]))
    threshold = matrix["count_threshold"]
    lines.append(
        ",".join(
            [f"sfs_selected_by_{threshold}_plus", *(str(int(v)) for v in matrix["sfs_commonly_selected"])]
        )
    )
    return "\n".join(lines) + "\n"


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_bundle(bundle: RunBundle, out_dir) -> Path:
    """Persist a run: config snapshot, results, tables, traces, timings."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = bundle.to_results_dict()
    _dump_json(
        {"run_config": results["run_config"], "suitability_config": results["suitability_config"]},
        out / "config.json",
    )
    _dump_json(results, out / "results.json")
    (out / "table.csv").write_text(render_table(results, "csv"), encoding="utf-8")
    (out / "table.md").write_text(render_table(results, "markdown"), encoding="utf-8")
    (out / "selection_matrix.csv").write_text(render_selection_matrix(results), encoding="utf-8")
    traces = out / "traces"
    traces.mkdir(exist_ok=True)
    for o in bundle.outcomes:
        if o.selection is not None:
            _dump_json(
                {
                    "method": o.method,
                    "selected": list(o.selected),
                    "baseline_cost": o.selection.baseline_cost,
                    "steps": [s.to_dict() for s in o.selection.steps],
                    "evaluations": [
                        {"subset": list(s), "cost": c} for s, c in o.selection.evaluations
                    ],
                },
                traces / f"{o.method}.json",
            )
    _dump_json({"seconds": dict(bundle.timings)}, out / "timings.json")
    return out


def load_results(path) -> dict:
    """Read back a results.json written by :func:`write_bundle`."""
    return json.loads(Path(path).read_text(encoding="utf-8"))
