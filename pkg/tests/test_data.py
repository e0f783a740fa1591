import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import minstate as ms


# ---------------------------------------------------------------- score table

SCORE_TABLE = {0: 0, 1: 1, 2: 2, 3: 3, 4: 3, 5: 4, 6: 4, 7: 4, 8: 5, 9: 5, 10: 5, 11: 6, 12: 6}


@pytest.mark.parametrize("points,expected", sorted(SCORE_TABLE.items()))
def test_score_mapping(points, expected):
    assert ms.dps_from_points(points) == expected


def test_score_mapping_monotone_and_surjective():
    values = [ms.dps_from_points(p) for p in range(13)]
    assert values == sorted(values)
    assert set(values) == set(range(7))


@pytest.mark.parametrize("bad", [-1, 13, 100])
def test_score_mapping_range_error(bad):
    with pytest.raises(ms.ValidationError):
        ms.dps_from_points(bad)


# ------------------------------------------------------------------- scaling

def test_scale_three_point_column():
    d = ms.Dataset(np.array([[0.0], [50.0], [100.0]]), ("a",), ("marker",), np.zeros(3))
    scaled, spec = ms.scale_unit_interval(d)
    assert scaled.scaled
    assert np.allclose(scaled.features[:, 0], [0.0, 0.5, 1.0])
    assert np.allclose(spec.apply(d.features)[:, 0], [0.0, 0.5, 1.0])


def test_scale_constant_column_maps_to_zero():
    d = ms.Dataset(np.array([[7.0], [7.0], [7.0]]), ("a",), ("marker",), np.zeros(3))
    scaled, _ = ms.scale_unit_interval(d)
    assert np.all(scaled.features == 0.0)


def test_scale_two_point_column():
    d = ms.Dataset(np.array([[20.0], [30.0]]), ("a",), ("marker",), np.zeros(2))
    scaled, _ = ms.scale_unit_interval(d)
    assert np.allclose(scaled.features[:, 0], [0.0, 1.0])


def test_scale_already_unit_interval_is_identity():
    rng = np.random.default_rng(0)
    x = rng.random((10, 3))
    x[0] = 0.0
    x[1] = 1.0  # pin observed min/max at the interval ends
    d = ms.Dataset(x, ("a", "b", "c"), ("marker",) * 3, np.zeros(10))
    scaled, _ = ms.scale_unit_interval(d)
    assert np.allclose(scaled.features, x)


def test_scale_refuses_double_scaling():
    d = ms.synth_dataset(5, 2, seed=0)
    with pytest.raises(ms.ValidationError):
        ms.scale_unit_interval(d)


# ---------------------------------------------------------------- dataset invariants

def test_dataset_rejects_non_finite():
    with pytest.raises(ms.ValidationError):
        ms.Dataset(np.array([[np.nan]]), ("a",), ("marker",), np.zeros(1))


def test_dataset_rejects_label_out_of_range():
    with pytest.raises(ms.ValidationError):
        ms.Dataset(np.zeros((1, 1)), ("a",), ("marker",), np.array([6.5]))


def test_dataset_rejects_duplicate_names():
    with pytest.raises(ms.ValidationError):
        ms.Dataset(np.zeros((1, 2)), ("a", "a"), ("marker", "marker"), np.zeros(1))


def test_dataset_is_immutable():
    d = ms.synth_dataset(4, 2, seed=0)
    with pytest.raises(ValueError):
        d.features[0, 0] = 0.5


# --------------------------------------------------------------------- folds

def test_folds_84_by_4_gives_21_each():
    plan = ms.make_folds(84, 4, seed=0)
    assert [len(f) for f in plan.folds] == [21, 21, 21, 21]
    assert len(plan.train_indices(0)) == 63


def test_folds_leave_one_out():
    plan = ms.make_folds(10, 10, seed=1)
    assert all(len(f) == 1 for f in plan.folds)


def test_folds_deterministic():
    a = ms.make_folds(30, 4, seed=9)
    b = ms.make_folds(30, 4, seed=9)
    assert a == b
    c = ms.make_folds(30, 4, seed=10)
    assert a != c


def test_folds_rejects_bad_k():
    with pytest.raises(ms.ConfigurationError):
        ms.make_folds(5, 6, seed=0)
    with pytest.raises(ms.ConfigurationError):
        ms.make_folds(5, 1, seed=0)


@settings(deadline=None, max_examples=60)
@given(
    m=st.integers(min_value=2, max_value=120),
    k=st.integers(min_value=2, max_value=12),
    seed=st.integers(min_value=0, max_value=2**31),
    use_labels=st.booleans(),
)
def test_folds_partition_property(m, k, seed, use_labels):
    if k > m:
        k = m
    labels = np.linspace(0, 6, m) if use_labels else None
    plan = ms.make_folds(m, k, seed=seed, labels=labels)
    flat = sorted(i for fold in plan.folds for i in fold)
    assert flat == list(range(m))
    sizes = [len(f) for f in plan.folds]
    assert max(sizes) - min(sizes) <= 1


def test_stratified_folds_balance_labels():
    # half low, half high scores: every fold should see both ends
    labels = np.array([0.0] * 20 + [6.0] * 20)
    plan = ms.make_folds(40, 4, seed=3, labels=labels)
    for fold in plan.folds:
        values = labels[list(fold)]
        assert (values == 0.0).any() and (values == 6.0).any()


# --------------------------------------------------------------- projections

def test_projection_identity():
    d = ms.synth_dataset(6, 3, seed=1)
    view = ms.project_features(d, (0, 1, 2))
    assert np.array_equal(view.features, d.features)
    assert view.feature_names == d.feature_names


def test_projection_reorders_columns():
    d = ms.synth_dataset(6, 3, seed=1)
    view = ms.project_features(d, (2, 0))
    assert np.array_equal(view.features[:, 0], d.features[:, 2])
    assert np.array_equal(view.features[:, 1], d.features[:, 0])
    assert view.feature_names == (d.feature_names[2], d.feature_names[0])


def test_projection_empty_keeps_labels():
    d = ms.synth_dataset(6, 3, seed=1)
    view = ms.project_features(d, ())
    assert view.features.shape == (6, 0)
    assert np.array_equal(view.labels, d.labels)


def test_projection_composition():
    d = ms.synth_dataset(6, 4, seed=2)
    once = ms.project_features(d, (3, 1))
    twice = ms.project_features(once, (0, 1))
    assert np.array_equal(once.features, twice.features)


def test_projection_out_of_range():
    d = ms.synth_dataset(6, 3, seed=1)
    with pytest.raises(ms.SubsetError):
        ms.project_features(d, (0, 3))


def test_subset_rejects_duplicates():
    with pytest.raises(ms.SubsetError):
        ms.FeatureSubset((1, 1))


# ----------------------------------------------------------------- synthesis

def test_synth_deterministic():
    a = ms.synth_dataset(30, 5, relevant=(0, 2), noise_sigma=0.1, seed=12)
    b = ms.synth_dataset(30, 5, relevant=(0, 2), noise_sigma=0.1, seed=12)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.labels, b.labels)


def test_synth_noiseless_label_monotone_in_relevant_column():
    d = ms.synth_dataset(50, 4, relevant=(0,), noise_sigma=0.0, seed=5)
    order = np.argsort(d.features[:, 0])
    diffs = np.diff(d.labels[order])
    assert (diffs >= 0).all() and d.labels.min() == 0.0 and d.labels.max() == 6.0


def test_synth_single_feature_oracle_prefers_relevant():
    # brute force: the best single-feature linear fit must use a planted column
    d = ms.synth_dataset(100, 20, relevant=(1, 5, 9), noise_sigma=0.1, seed=0)

    def fit_rmse(j):
        x = np.c_[d.features[:, j], np.ones(d.m)]
        coef, *_ = np.linalg.lstsq(x, d.labels, rcond=None)
        return float(np.sqrt(np.mean((x @ coef - d.labels) ** 2)))

    best = min(range(d.n), key=fit_rmse)
    assert best in (1, 5, 9)


# ----------------------------------------------------------- schema and csv

def test_csv_round_trip(tmp_path):
    d = ms.synth_dataset(9, 3, relevant=(1,), noise_sigma=0.2, seed=4)
    ms.write_csv(d, tmp_path / "t.csv")
    ms.write_schema(d, tmp_path / "t.schema")
    loaded = ms.load_csv(tmp_path / "t.csv", tmp_path / "t.schema")
    assert loaded.m == 9 and loaded.n == 3
    assert not loaded.scaled
    assert np.allclose(loaded.features, d.features)
    assert np.allclose(loaded.labels, d.labels)
    assert loaded.feature_roles == d.feature_roles


def test_load_csv_paper_layout_shape(tmp_path):
    # 84 rows, 43 feature columns (group + location + 41 markers) + label
    rng = np.random.default_rng(0)
    names = ["group", "location"] + [f"mk{i}" for i in range(41)]
    roles = ["group", "location"] + ["marker"] * 41
    features = np.c_[
        rng.integers(0, 3, 84), rng.integers(1, 4, 84), rng.random((84, 41)) * 100
    ].astype(float)
    labels = rng.integers(0, 7, 84).astype(float)
    d = ms.Dataset(features, tuple(names), tuple(roles), labels)
    ms.write_csv(d, tmp_path / "cia.csv", label_name="dps")
    ms.write_schema(d, tmp_path / "cia.schema", label_name="dps")
    loaded = ms.load_csv(tmp_path / "cia.csv", tmp_path / "cia.schema")
    assert (loaded.m, loaded.n) == (84, 43)
    assert loaded.treatment_indices == (0,)


def test_load_csv_single_row(tmp_path):
    (tmp_path / "one.csv").write_text("a,b,score\n0,0,0\n")
    (tmp_path / "one.schema").write_text("a: marker\nb: marker\nscore: label\n")
    d = ms.load_csv(tmp_path / "one.csv", tmp_path / "one.schema")
    assert (d.m, d.n) == (1, 2)


def test_load_csv_names_bad_cell(tmp_path):
    (tmp_path / "bad.csv").write_text("a,b,score\n0,NA,0\n")
    (tmp_path / "bad.schema").write_text("a: marker\nb: marker\nscore: label\n")
    with pytest.raises(ms.IngestionError) as err:
        ms.load_csv(tmp_path / "bad.csv", tmp_path / "bad.schema")
    assert "row 1" in str(err.value) and "'b'" in str(err.value)


def test_load_csv_label_out_of_range(tmp_path):
    (tmp_path / "bad.csv").write_text("a,score\n0,7\n")
    (tmp_path / "bad.schema").write_text("a: marker\nscore: label\n")
    with pytest.raises(ms.ValidationError):
        ms.load_csv(tmp_path / "bad.csv", tmp_path / "bad.schema")


def test_load_csv_duplicate_header(tmp_path):
    (tmp_path / "bad.csv").write_text("a,a,score\n0,0,0\n")
    (tmp_path / "bad.schema").write_text("a: marker\nscore: label\n")
    with pytest.raises(ms.SchemaError):
        ms.load_csv(tmp_path / "bad.csv", tmp_path / "bad.schema")


def test_load_csv_header_schema_mismatch(tmp_path):
    (tmp_path / "x.csv").write_text("a,b,score\n0,0,0\n")
    (tmp_path / "x.schema").write_text("a: marker\nscore: label\n")
    with pytest.raises(ms.SchemaError):
        ms.load_csv(tmp_path / "x.csv", tmp_path / "x.schema")


def test_schema_requires_exactly_one_label(tmp_path):
    (tmp_path / "s1").write_text("a: marker\nb: marker\n")
    with pytest.raises(ms.SchemaError):
        ms.read_schema(tmp_path / "s1")
    (tmp_path / "s2").write_text("a: label\nb: label\n")
    with pytest.raises(ms.SchemaError):
        ms.read_schema(tmp_path / "s2")


def test_schema_rejects_unknown_role(tmp_path):
    (tmp_path / "s").write_text("a: widget\nscore: label\n")
    with pytest.raises(ms.SchemaError):
        ms.read_schema(tmp_path / "s")


def test_schema_accepts_equals_and_comments(tmp_path):
    (tmp_path / "s").write_text("# columns\na = marker\nscore = label\n")
    roles = ms.read_schema(tmp_path / "s")
    assert roles == {"a": "marker", "score": "label"}
