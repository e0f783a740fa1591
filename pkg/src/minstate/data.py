"""Tabular dataset handling: ingestion, scaling, folds, projections, synthesis.

A :class:`Dataset` is an immutable feature matrix with named, role-tagged
columns and one scalar progression-score label per row.  Everything built on
top of it (fold plans, projections, synthetic data) is a pure function of its
arguments, so datasets and derived objects can be shared freely across
workers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    ConfigurationError,
    IngestionError,
    SchemaError,
    SubsetError,
    ValidationError,
)

FEATURE_ROLES = ("marker", "group", "location")
LABEL_ROLE = "label"
LABEL_MIN, LABEL_MAX = 0.0, 6.0

# Raw paw-assessment points (index) -> progression score.
_SCORE_TABLE = (0, 1, 2, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6)


def dps_from_points(total_points: int) -> int:
    """Map cumulative paw-assessment points (0-12) to a progression score (0-6)."""
    points = int(total_points)
    if points != total_points or not 0 <= points <= 12:
        raise ValidationError(f"total points must be an integer in [0, 12], got {total_points!r}")
    return _SCORE_TABLE[points]


@dataclass(frozen=True)
class FeatureSubset:
    """Ordered, duplicate-free selection of feature column indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise SubsetError(f"feature indices must be non-negative, got {idx}")
        if len(set(idx)) != len(idx):
            raise SubsetError(f"duplicate feature indices in {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, index) -> bool:
        return index in self.indices

    def complement(self, n: int) -> "FeatureSubset":
        """All indices of an ``n``-column dataset not in this subset, ascending."""
        mine = set(self.indices)
        return FeatureSubset(tuple(i for i in range(n) if i not in mine))


SubsetLike = Union[FeatureSubset, Sequence[int]]


def as_subset(subset: SubsetLike, n: int | None = None) -> FeatureSubset:
    """Normalize to a :class:`FeatureSubset`, optionally bounds-checked against ``n``."""
    if not isinstance(subset, FeatureSubset):
        subset = FeatureSubset(tuple(subset))
    if n is not None and any(i >= n for i in subset.indices):
        raise SubsetError(f"feature index out of range for {n} columns: {subset.indices}")
    return subset


@dataclass(frozen=True)
class Dataset:
    """Immutable feature table with named, role-tagged columns and a score label.

    Parameters
    ----------
    features : (m, n) array of finite reals.
    feature_names : n unique column names.
    feature_roles : n tags, each one of ``marker``, ``group`` or ``location``.
    labels : m scores in [0, 6].
    scaled : True once every feature has been mapped onto [0, 1].
    """

    features: np.ndarray
    feature_names: tuple[str, ...]
    feature_roles: tuple[str, ...]
    labels: np.ndarray
    scaled: bool = False

    def __post_init__(self):
        features = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        labels = np.asarray(self.labels, dtype=float)
        if features.ndim != 2:
            raise ValidationError("features must be a 2-d matrix")
        m, n = features.shape
        if m < 1:
            raise ValidationError("a dataset needs at least one sample")
        if labels.shape != (m,):
            raise ValidationError(f"labels must be a vector of length {m}")
        names = tuple(str(s) for s in self.feature_names)
        roles = tuple(str(s) for s in self.feature_roles)
        if len(names) != n or len(roles) != n:
            raise ValidationError("feature_names and feature_roles must match the column count")
        if len(set(names)) != n:
            raise ValidationError("feature names must be unique")
        bad = [r for r in roles if r not in FEATURE_ROLES]
        if bad:
            raise ValidationError(f"unknown feature role(s): {sorted(set(bad))}")
        if features.size and not np.isfinite(features).all():
            raise ValidationError("features contain missing or non-finite values")
        if not np.isfinite(labels).all():
            raise ValidationError("labels contain non-finite values")
        if labels.min() < LABEL_MIN or labels.max() > LABEL_MAX:
            raise ValidationError(f"labels must lie in [{LABEL_MIN:g}, {LABEL_MAX:g}]")
        if self.scaled and features.size and (features.min() < 0.0 or features.max() > 1.0):
            raise ValidationError("scaled datasets must have all features in [0, 1]")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "feature_roles", roles)

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    def role_indices(self, role: str) -> tuple[int, ...]:
        """Indices of all columns carrying ``role``."""
        return tuple(i for i, r in enumerate(self.feature_roles) if r == role)

    @property
    def treatment_indices(self) -> tuple[int, ...]:
        """Columns of the treatment-bearing ``group`` role."""
        return self.role_indices("group")

    def column(self, index: int) -> np.ndarray:
        return self.features[:, int(index)]


@dataclass(frozen=True)
class ScalingSpec:
    """Per-feature affine transform fitted so observed min -> 0 and max -> 1."""

    minimums: np.ndarray
    maximums: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.minimums, dtype=float)
        hi = np.asarray(self.maximums, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValidationError("scaling bounds must be 1-d vectors of equal length")
        if (hi < lo).any():
            raise ValidationError("scaling maximums must not be below minimums")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "minimums", lo)
        object.__setattr__(self, "maximums", hi)

    def apply(self, features: np.ndarray) -> np.ndarray:
        """Map columns with the fitted bounds; zero-variance columns map to 0."""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.minimums.shape[0]:
            raise ValidationError("feature width does not match the scaling spec")
        span = self.maximums - self.minimums
        safe = np.where(span > 0.0, span, 1.0)
        out = (features - self.minimums) / safe
        out[:, span == 0.0] = 0.0
        return out


def scale_unit_interval(dataset: Dataset) -> tuple[Dataset, ScalingSpec]:
    """Min-max scale every feature onto [0, 1].

    Zero-variance columns become identically 0.  Fitting an already scaled
    dataset is refused; re-apply the returned spec instead.
    """
    if dataset.scaled:
        raise ValidationError("dataset is already scaled")
    lo = dataset.features.min(axis=0) if dataset.n else np.zeros(0)
    hi = dataset.features.max(axis=0) if dataset.n else np.zeros(0)
    spec = ScalingSpec(lo, hi)
    scaled = Dataset(
        spec.apply(dataset.features),
        dataset.feature_names,
        dataset.feature_roles,
        dataset.labels,
        scaled=True,
    )
    return scaled, spec


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint split of sample indices into ``k`` near-equal test folds."""

    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int
    stratified: bool

    def __post_init__(self):
        if len(self.folds) != self.k:
            raise ValidationError("fold count does not match k")
        flat = [i for fold in self.folds for i in fold]
        if len(flat) != len(set(flat)):
            raise ValidationError("folds overlap")
        if sorted(flat) != list(range(len(flat))):
            raise ValidationError("folds must cover exactly the sample index range")
        sizes = [len(f) for f in self.folds]
        if max(sizes) - min(sizes) > 1:
            raise ValidationError("fold sizes may differ by at most one")

    @property
    def m(self) -> int:
        return sum(len(f) for f in self.folds)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.asarray(self.folds[fold], dtype=np.intp)

    def train_indices(self, fold: int) -> np.ndarray:
        held_out = set(self.folds[fold])
        return np.asarray([i for i in range(self.m) if i not in held_out], dtype=np.intp)


def make_folds(
    m: int,
    k: int,
    seed: int = 0,
    labels: np.ndarray | None = None,
    stratify: bool = True,
) -> FoldPlan:
    """Deterministically split ``m`` samples into ``k`` folds.

    When ``labels`` are supplied (and ``stratify`` is left on) samples are first
    bucketed into ceil(sqrt(k)) label-quantile bins and dealt from the shuffled
    bins, so each fold approximates the overall label distribution.
    """
    if k < 2:
        raise ConfigurationError("cross validation needs at least 2 folds")
    if k > m:
        raise ConfigurationError(f"cannot split {m} samples into {k} folds")
    rng = np.random.default_rng(seed)
    stratified = labels is not None and stratify
    if stratified:
        labels = np.asarray(labels, dtype=float)
        if labels.shape != (m,):
            raise ConfigurationError("labels passed for stratification must have length m")
        bins = math.isqrt(k) + (0 if math.isqrt(k) ** 2 == k else 1)
        edges = np.quantile(labels, np.linspace(0.0, 1.0, bins + 1)[1:-1])
        assignment = np.searchsorted(edges, labels, side="right")
        order = np.concatenate(
            [rng.permutation(np.flatnonzero(assignment == b)) for b in range(bins)]
        )
    else:
        order = rng.permutation(m)
    folds = tuple(tuple(sorted(int(i) for i in order[i::k])) for i in range(k))
    return FoldPlan(k=k, folds=folds, seed=seed, stratified=stratified)


def project_features(dataset: Dataset, subset: SubsetLike) -> Dataset:
    """View of ``dataset`` restricted to the columns of ``subset``, order preserved."""
    b = as_subset(subset, dataset.n)
    cols = list(b.indices)
    return Dataset(
        dataset.features[:, cols],
        tuple(dataset.feature_names[i] for i in cols),
        tuple(dataset.feature_roles[i] for i in cols),
        dataset.labels,
        scaled=dataset.scaled,
    )


def synth_dataset(
    m: int,
    n: int,
    relevant: SubsetLike = (),
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Generate a planted-signal dataset for verification.

    Features are uniform on [0, 1]; the label is the sum of the ``relevant``
    columns plus Gaussian noise, affinely rescaled onto [0, 6].  Everything is
    deterministic given ``seed``.
    """
    if noise_sigma < 0:
        raise ConfigurationError("noise_sigma must be non-negative")
    b = as_subset(relevant, n)
    rng = np.random.default_rng(seed)
    features = rng.random((m, n))
    raw = features[:, list(b.indices)].sum(axis=1)
    raw = raw + rng.normal(0.0, 1.0, m) * noise_sigma
    span = raw.max() - raw.min()
    labels = np.zeros(m) if span == 0.0 else (raw - raw.min()) / span * LABEL_MAX
    width = len(str(max(n - 1, 0)))
    names = tuple(f"f{i:0{width}d}" for i in range(n))
    return Dataset(features, names, ("marker",) * n, labels, scaled=True)


def read_schema(source: Union[str, Path, Mapping[str, str]]) -> dict[str, str]:
    """Read a column -> role mapping.

    Accepts a ready mapping or a path to a plain-text file with one
    ``column name: role`` (or ``column name = role``) entry per line;
    ``#`` starts a comment.
    """
    if isinstance(source, Mapping):
        entries = {str(k): str(v) for k, v in source.items()}
    else:
        path = Path(source)
        if not path.exists():
            raise SchemaError(f"schema file not found: {path}")
        entries = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            sep = ":" if ":" in line else "="
            if sep not in line:
                raise SchemaError(f"{path}:{lineno}: expected 'column: role', got {line!r}")
            name, role = line.split(sep, 1)
            name, role = name.strip(), role.strip()
            if not name:
                raise SchemaError(f"{path}:{lineno}: empty column name")
            if name in entries:
                raise SchemaError(f"{path}:{lineno}: duplicate schema entry for column {name!r}")
            entries[name] = role
    valid = set(FEATURE_ROLES) | {LABEL_ROLE}
    for name, role in entries.items():
        if role not in valid:
            raise SchemaError(f"column {name!r} has unknown role {role!r} (expected one of {sorted(valid)})")
    labels = [name for name, role in entries.items() if role == LABEL_ROLE]
    if len(labels) != 1:
        raise SchemaError(f"schema must declare exactly one label column, found {len(labels)}")
    return entries


def load_csv(path: Union[str, Path], schema: Union[str, Path, Mapping[str, str]]) -> Dataset:
    """Load a UTF-8, comma-separated feature table.

    The header row must name exactly the columns declared in ``schema``; every
    cell must parse as a decimal number.  The returned dataset is unscaled.
    """
    roles = read_schema(schema)
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise SchemaError(f"{path}: duplicate column name(s) in header: {dupes}")
        missing = [c for c in roles if c not in header]
        extra = [c for c in header if c not in roles]
        if missing or extra:
            raise SchemaError(
                f"{path}: header does not match schema "
                f"(missing {missing or 'nothing'}, undeclared {extra or 'nothing'})"
            )
        label_col = next(name for name, role in roles.items() if role == LABEL_ROLE)
        feature_cols = [c for c in header if c != label_col]
        rows: list[list[float]] = []
        labels: list[float] = []
        for row_num, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise IngestionError(
                    f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}"
                )
            parsed = {}
            for name, cell in zip(header, row):
                text = cell.strip()
                try:
                    value = float(text)
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {row_num}, column {name!r}: cannot parse {text!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise IngestionError(
                        f"{path}: row {row_num}, column {name!r}: non-finite value {text!r}"
                    )
                parsed[name] = value
            label = parsed[label_col]
            if not LABEL_MIN <= label <= LABEL_MAX:
                raise ValidationError(
                    f"{path}: row {row_num}: label {label:g} outside [{LABEL_MIN:g}, {LABEL_MAX:g}]"
                )
            rows.append([parsed[c] for c in feature_cols])
            labels.append(label)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return Dataset(
        np.asarray(rows, dtype=float),
        tuple(feature_cols),
        tuple(roles[c] for c in feature_cols),
        np.asarray(labels, dtype=float),
        scaled=False,
    )


def write_csv(dataset: Dataset, path: Union[str, Path], label_name: str = "score") -> None:
    """Write a dataset (and nothing else) in the format :func:`load_csv` reads."""
    if label_name in dataset.feature_names:
        raise SchemaError(f"label column name {label_name!r} collides with a feature name")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [label_name])
        for i in range(dataset.m):
            row = [repr(float(v)) for v in dataset.features[i]]
            row.append(repr(float(dataset.labels[i])))
            writer.writerow(row)


def write_schema(dataset: Dataset, path: Union[str, Path], label_name: str = "score") -> None:
    """Write the column-role declaration matching :func:`write_csv` output."""
    path = Path(path)
    lines = [f"{name}: {role}" for name, role in zip(dataset.feature_names, dataset.feature_roles)]
    lines.append(f"{label_name}: {LABEL_ROLE}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
