import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridaug.metrics import (
    ConfusionMatrix,
    aggregate_folds,
    fidelity_from_counts,
    fidelity_profile,
    macro_f1,
    per_class_f1,
    silhouette,
)
from hybridaug.policy import Balance, PolicySpec, augment, compute_targets
from hybridaug.reference import SIX_CLASS_COUNTS
from hybridaug.synth import gaussian_copula
from hybridaug.tabular import Dataset


def test_all_majority_prediction():
    cm = ConfusionMatrix.from_predictions([0] * 9 + [1], [0] * 10, 2)
    m, f1 = macro_f1(cm)
    assert f1[0] == pytest.approx(2 * 0.9 / 1.9)
    assert f1[1] == 0.0
    assert m == pytest.approx(0.4737, abs=5e-5)
    assert cm.accuracy() == 0.9


def test_perfect_diagonal():
    cm = ConfusionMatrix(np.diag([3, 5, 2]))
    assert macro_f1(cm)[0] == 1.0
    assert cm.accuracy() == 1.0


def test_empty_matrix_errors():
    with pytest.raises(ValueError):
        macro_f1(ConfusionMatrix(np.zeros((2, 2), int)))
    with pytest.raises(ValueError):
        ConfusionMatrix(np.zeros((2, 2), int)).accuracy()


def test_absent_class_counts_as_zero():
    cm = ConfusionMatrix.from_predictions([0, 1], [0, 1], 3)
    m, f1 = macro_f1(cm)
    assert f1.tolist() == [1.0, 1.0, 0.0]
    assert m == pytest.approx(2 / 3)


@settings(max_examples=100, deadline=None)
@given(
    data=st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=60),
    perm=st.permutations(range(4)),
)
def test_macro_f1_properties(data, perm):
    yt = np.array([a for a, _ in data])
    yp = np.array([b for _, b in data])
    cm = ConfusionMatrix.from_predictions(yt, yp, 4)
    m, f1 = macro_f1(cm)
    assert m == float(np.mean(per_class_f1(cm)))
    assert 0 <= m <= 1 and 0 <= cm.accuracy() <= 1
    assert cm.accuracy() == np.trace(cm.counts) / cm.total
    p = np.array(perm)
    assert macro_f1(ConfusionMatrix.from_predictions(p[yt], p[yp], 4))[0] == pytest.approx(m, abs=1e-12)


def test_macro_f1_matches_library_oracle():
    skm = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    yt, yp = rng.integers(0, 5, 300), rng.integers(0, 5, 300)
    ours = macro_f1(ConfusionMatrix.from_predictions(yt, yp, 5))[0]
    assert ours == pytest.approx(skm.f1_score(yt, yp, average="macro", labels=range(5), zero_division=0))


def test_fold_aggregation():
    agg = aggregate_folds([0.8, 0.9])
    assert agg.mean == pytest.approx(0.85) and agg.std == pytest.approx(0.05)
    assert str(agg) == "0.850 ± 0.050"
    assert aggregate_folds([0.7] * 5).std == 0.0
    with pytest.raises(ValueError):
        aggregate_folds([0.5])


def test_silhouette_separated_blobs():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(0, 0.05, (20, 2)), rng.normal(10, 0.05, (20, 2))])
    s, means = silhouette(X, ["a"] * 20 + ["b"] * 20)
    assert means["a"] > 0.9 and means["b"] > 0.9


def test_silhouette_degenerate_cases():
    s, _ = silhouette(np.ones((6, 2)), [0, 0, 0, 1, 1, 1])
    assert np.all(s == 0)
    s, means = silhouette(np.array([[0.0], [1.0], [1.1], [1.2]]), [0, 1, 1, 1])
    assert s[0] == 0 and means[0] == 0
    with pytest.raises(ValueError):
        silhouette(np.zeros((3, 1)), [0, 0, 0])


def test_silhouette_matches_library_oracle():
    skm = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 4))
    labels = rng.integers(0, 3, 40)
    s, _ = silhouette(X, labels, standardized=False)
    assert np.allclose(s, skm.silhouette_samples(X, labels))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 1000), n=st.integers(4, 30))
def test_silhouette_bounds(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 3, size=(n, 3)).astype(float)
    labels = np.arange(n) % 2
    s, _ = silhouette(X, labels)
    assert np.all((s >= -1) & (s <= 1))


def test_fidelity_counts_example():
    names = list(SIX_CLASS_COUNTS)
    real = list(SIX_CLASS_COUNTS.values())
    prof = fidelity_from_counts(names, real, compute_targets(real, Balance()).tolist())
    assert prof.synthetic_fraction == pytest.approx(1082 / 1482)
    assert prof.by_name("Other").ratio == pytest.approx(230 / 17)
    zero = [c for c in prof.classes if c.synthetic == 0]
    assert len(zero) == 1 and zero[0].real == max(real)


def test_fidelity_all_real():
    ds = Dataset(np.zeros((3, 1)), [0, 1, 1], ("x",), ("a", "b"))
    prof = fidelity_profile(ds)
    assert prof.synthetic_fraction == 0
    assert all(c.ratio == 0 for c in prof.classes)


def test_fidelity_survives_round_trip(tmp_path, small_standin):
    aug = augment(small_standin, PolicySpec(small=gaussian_copula(), tau=29), seed=1).dataset
    path = tmp_path / "aug.json"
    aug.save_snapshot(path)
    back = Dataset.load_snapshot(path)
    assert fidelity_profile(back).to_json() == fidelity_profile(aug).to_json()
    prof = fidelity_profile(aug)
    assert prof.by_name("A").synthetic == 0
    assert prof.by_name("C").synthetic == 18
