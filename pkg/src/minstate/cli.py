"""Command-line front-end.

Verbs: ``run`` (full experiment), ``evaluate`` (cost of an explicit feature
list), ``rank`` (filter scores only), ``synth`` (generate test data), and
``report`` (re-render tables from a saved results.json).  Exit codes: 0 on
success, 1 on configuration problems, 2 when some method of a run failed.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from .data import load_csv, scale_unit_interval, synth_dataset, write_csv, write_schema
from .errors import ConfigurationError, MinstateError
from .experiment import (
    METHODS,
    RunConfig,
    load_results,
    render_selection_matrix,
    render_table,
    run,
)
from .regressors import HyperGrid, default_grids
from .selection import (
    embedded_rank_mdi,
    evaluate_selection,
    filter_rank_anova,
    filter_rank_mi,
    filter_rank_pca,
    targets_for,
)
from .suitability import preset

_RANKERS = ("mi", "anova", "pca", "mdi")


def _split_csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_grid_value(text: str):
    try:
        value = float(text)
    except ValueError:
        return text
    return int(value) if value.is_integer() and "." not in text and "e" not in text.lower() else value


def _read_config_file(path: str) -> tuple[dict, dict[str, HyperGrid]]:
    """INI-style config: a [run] section of key/values plus [grid.<family>] overrides."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    options: dict = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            options[key.replace("-", "_")] = raw.strip()
    grids: dict[str, HyperGrid] = {}
    for section in parser.sections():
        if not section.startswith("grid."):
            continue
        family = section.split(".", 1)[1]
        axes = {
            key: [_parse_grid_value(v) for v in _split_csv_list(raw)]
            for key, raw in parser.items(section)
        }
        entries = [{}]
        for key, values in axes.items():
            entries = [{**e, key: v} for e in entries for v in values]
        grids[family] = HyperGrid(family, tuple(entries))
    return options, grids


_BOOL_KEYS = {"pooled_metrics", "scale_per_fold", "stratify"}
_INT_KEYS = {"folds", "k", "fold_seed", "model_seed", "select_w", "w", "jobs", "mi_bins", "selection_count_threshold"}
_FLOAT_KEYS = {"min_improvement"}
_KEY_ALIASES = {"k": "folds", "w": "select_w", "preset": "preset_name", "out": "out_dir"}


def _coerce_option(key: str, value):
    if isinstance(value, str):
        if key in _BOOL_KEYS:
            low = value.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ConfigurationError(f"expected a boolean for {key}, got {value!r}")
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "methods":
            return tuple(_split_csv_list(value))
    return value


def _build_run_config(args) -> RunConfig:
    options: dict = {}
    grids: dict[str, HyperGrid] = {}
    if args.config:
        options, grids = _read_config_file(args.config)
    flag_values = {
        "dataset": args.dataset,
        "schema": args.schema,
        "preset": args.preset,
        "methods": args.methods,
        "k": args.k,
        "fold_seed": args.fold_seed,
        "model_seed": args.model_seed,
        "out": args.out,
        "jobs": args.jobs,
        "w": args.w,
        "min_improvement": args.min_improvement,
        "mi_bins": args.mi_bins,
        "pooled_metrics": args.pooled_metrics or None,
        "scale_per_fold": args.scale_per_fold or None,
        "stratify": False if args.no_stratify else None,
    }
    for key, value in flag_values.items():
        if value is not None:
            options[key] = value
    normalized = {}
    for key, value in options.items():
        key = _KEY_ALIASES.get(key, key)
        normalized[key] = _coerce_option(key, value)
    if "dataset" not in normalized or "schema" not in normalized:
        raise ConfigurationError("run needs --dataset and --schema (or a config file providing them)")
    if grids:
        normalized["grid_overrides"] = grids
    if "stratify" not in normalized:
        normalized["stratify"] = True
    return RunConfig(**normalized)


def _cmd_run(args) -> int:
    config = _build_run_config(args)
    bundle = run(config)
    print(render_table(bundle, args.format))
    if config.out_dir:
        print(f"bundle written to {config.out_dir}", file=sys.stderr)
    return 0 if bundle.all_ok else 2


def _load_scaled(dataset_path, schema_path):
    dataset = load_csv(dataset_path, schema_path)
    if not dataset.scaled:
        dataset, _ = scale_unit_interval(dataset)
    return dataset


def _cmd_evaluate(args) -> int:
    dataset = _load_scaled(args.dataset, args.schema)
    scfg = preset(args.preset, folds=args.k, fold_seed=args.fold_seed)
    if args.features:
        names = _split_csv_list(args.features)
        missing = [n for n in names if n not in dataset.feature_names]
        if missing:
            raise ConfigurationError(f"unknown feature name(s): {missing}")
        subset = tuple(dataset.feature_names.index(n) for n in names)
    elif args.indices:
        subset = tuple(int(i) for i in _split_csv_list(args.indices))
    else:
        raise ConfigurationError("evaluate needs --features or --indices")
    families = tuple(_split_csv_list(args.families)) if args.families else None
    grids = [default_grids(k) for k in (families or ("linear_elastic", "svr", "random_forest", "boosted_trees"))]
    cost, by_family = evaluate_selection(
        dataset, subset, scfg, grids, model_seed=args.model_seed, jobs=args.jobs or 1
    )
    payload = {
        "subset": list(subset),
        "subset_names": [dataset.feature_names[i] for i in subset],
        "cost": cost,
        "per_family": {k: r.to_dict() for k, r in by_family.items()},
    }
    print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


def _cmd_rank(args) -> int:
    dataset = _load_scaled(args.dataset, args.schema)
    scfg = preset(args.preset, folds=args.k, fold_seed=args.fold_seed)
    targets = targets_for(scfg)
    if args.method == "mi":
        importance = filter_rank_mi(dataset, targets, bins=args.mi_bins)
    elif args.method == "anova":
        importance = filter_rank_anova(dataset, targets, bins=args.mi_bins)
    elif args.method == "pca":
        importance = filter_rank_pca(dataset)
    else:
        importance = embedded_rank_mdi(dataset, targets)
    lines = ["feature,score"]
    order = sorted(range(dataset.n), key=lambda i: (-importance.scores[i], i))
    for i in order:
        lines.append(f"{dataset.feature_names[i]},{float(importance.scores[i])!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


def _cmd_synth(args) -> int:
    relevant = tuple(int(i) for i in _split_csv_list(args.relevant)) if args.relevant else ()
    dataset = synth_dataset(args.m, args.n, relevant, args.sigma, args.seed)
    out_csv = Path(args.out)
    write_csv(dataset, out_csv)
    schema_path = out_csv.with_suffix(".schema")
    write_schema(dataset, schema_path)
    print(f"wrote {out_csv} and {schema_path}", file=sys.stderr)
    return 0


def _cmd_report(args) -> int:
    results = load_results(args.results)
    print(render_table(results, args.format))
    if args.matrix:
        print(render_selection_matrix(results))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minstate",
        description="Select a minimal subset of observables by cross-validated suitability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a full selection experiment")
    runp.add_argument("--config", help="INI config file with a [run] section and [grid.*] overrides")
    runp.add_argument("--dataset", help="CSV feature table")
    runp.add_argument("--schema", help="column-role declaration file")
    runp.add_argument("--preset", choices=("mds", "mis", "mids"), help="suitability weighting")
    runp.add_argument("--methods", help="comma-separated subset of: " + ", ".join(METHODS))
    runp.add_argument("--k", type=int, help="fold count (default 4)")
    runp.add_argument("--fold-seed", type=int, dest="fold_seed")
    runp.add_argument("--model-seed", type=int, dest="model_seed")
    runp.add_argument("--out", help="output directory for the artifact bundle")
    runp.add_argument("--jobs", type=int, help="parallel workers (default: all cores)")
    runp.add_argument("--w", type=int, help="how many features filter/embedded methods keep")
    runp.add_argument("--min-improvement", type=float, dest="min_improvement")
    runp.add_argument("--mi-bins", type=int, dest="mi_bins")
    runp.add_argument("--pooled-metrics", action="store_true", dest="pooled_metrics")
    runp.add_argument("--scale-per-fold", action="store_true", dest="scale_per_fold")
    runp.add_argument("--no-stratify", action="store_true", dest="no_stratify")
    runp.add_argument("--format", choices=("csv", "markdown"), default="csv")
    runp.set_defaults(fn=_cmd_run)

    evalp = sub.add_parser("evaluate", help="suitability of an explicit feature list")
    evalp.add_argument("--dataset", required=True)
    evalp.add_argument("--schema", required=True)
    evalp.add_argument("--preset", choices=("mds", "mis", "mids"), default="mds")
    evalp.add_argument("--features", help="comma-separated feature names")
    evalp.add_argument("--indices", help="comma-separated feature indices")
    evalp.add_argument("--families", help="learner families to sweep (default: all four)")
    evalp.add_argument("--k", type=int, default=4)
    evalp.add_argument("--fold-seed", type=int, dest="fold_seed", default=0)
    evalp.add_argument("--model-seed", type=int, dest="model_seed", default=0)
    evalp.add_argument("--jobs", type=int, default=0)
    evalp.set_defaults(fn=_cmd_evaluate)

    rankp = sub.add_parser("rank", help="filter/embedded importance scores only")
    rankp.add_argument("--dataset", required=True)
    rankp.add_argument("--schema", required=True)
    rankp.add_argument("--method", choices=_RANKERS, required=True)
    rankp.add_argument("--preset", choices=("mds", "mis", "mids"), default="mds")
    rankp.add_argument("--k", type=int, default=4)
    rankp.add_argument("--fold-seed", type=int, dest="fold_seed", default=0)
    rankp.add_argument("--mi-bins", type=int, dest="mi_bins", default=10)
    rankp.add_argument("--out", help="write CSV here instead of stdout")
    rankp.set_defaults(fn=_cmd_rank)

    synthp = sub.add_parser("synth", help="generate a planted-signal dataset")
    synthp.add_argument("--m", type=int, required=True, help="sample count")
    synthp.add_argument("--n", type=int, required=True, help="feature count")
    synthp.add_argument("--relevant", help="comma-separated planted feature indices")
    synthp.add_argument("--sigma", type=float, default=0.0, help="label noise scale")
    synthp.add_argument("--seed", type=int, default=0)
    synthp.add_argument("--out", required=True, help="CSV path; a .schema file is written next to it")
    synthp.set_defaults(fn=_cmd_synth)

    reportp = sub.add_parser("report", help="re-render tables from results.json")
    reportp.add_argument("--results", required=True)
    reportp.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    reportp.add_argument("--matrix", action="store_true", help="also print the selection matrix")
    reportp.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except MinstateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
