import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridaug.policy import (
    Balance,
    PolicyFailure,
    PolicySpec,
    Proportional,
    SingleAugmentation,
    assign_generators,
    augment,
    compute_targets,
    parse_growth,
)
from hybridaug.synth import GeneratorKind, GeneratorSpec, gaussian_copula, smote
from hybridaug.tabular import Dataset
from standin import blobs, migraine_standin


def test_assignment_boundary():
    pol = PolicySpec(tau=29)
    specs = assign_generators([28, 29, 30], pol)
    assert specs == [pol.small, pol.large, pol.large]


def test_tau_one_sends_everything_large():
    pol = PolicySpec(tau=1)
    assert all(s is pol.large for s in assign_generators([1, 5, 200], pol))


def test_targets_examples():
    assert compute_targets([247, 60, 17], Balance()).tolist() == [0, 187, 230]
    assert compute_targets([247, 60, 17], Proportional(2)).tolist() == [247, 60, 17]
    assert compute_targets([5, 1], Proportional(4)).tolist() == [15, 3]
    with pytest.raises(ValueError):
        compute_targets([], Balance())


def test_parse_growth():
    assert parse_growth("balance") == Balance()
    assert parse_growth("x3") == Proportional(3)
    assert parse_growth("proportional:4") == Proportional(4)
    with pytest.raises(ValueError):
        parse_growth("x1")
    with pytest.raises(ValueError):
        parse_growth("double")


@settings(max_examples=100, deadline=None)
@given(counts=st.lists(st.integers(1, 300), min_size=1, max_size=8), m=st.integers(2, 5))
def test_growth_postconditions(counts, m):
    counts = np.array(counts)
    bal = counts + compute_targets(counts, Balance())
    assert np.all(bal == counts.max())
    assert compute_targets(counts, Balance())[np.argmax(counts)] == 0
    prop = counts + compute_targets(counts, Proportional(m))
    assert np.all(prop == m * counts)


@settings(max_examples=100, deadline=None)
@given(counts=st.lists(st.integers(0, 100), min_size=1, max_size=8), tau=st.integers(1, 60))
def test_assignment_is_threshold(counts, tau):
    pol = PolicySpec(tau=tau, small=smote(), large=gaussian_copula())
    for n, spec in zip(counts, assign_generators(counts, pol)):
        assert spec == (pol.small if n < tau else pol.large)


def _fold():
    return migraine_standin(seed=4, counts={"big": 60, "mid": 30, "small": 12})


@pytest.mark.parametrize("growth", [Balance(), Proportional(2), Proportional(3)])
def test_augment_keeps_real_rows_and_meets_targets(growth):
    fold = _fold()
    res = augment(fold, PolicySpec(growth=growth), seed=7, fold_id=1)
    out = res.dataset
    real = out.is_real
    assert np.array_equal(out.X[real], fold.X)
    assert np.array_equal(out.y[real], fold.y)
    expected = fold.class_counts + compute_targets(fold.class_counts, growth)
    assert out.class_counts.tolist() == expected.tolist()
    assert set(out.origin_fold[~real]) <= {1}


def test_fallback_is_recorded():
    res = augment(_fold(), PolicySpec(), seed=0)
    by = {a.class_name: a for a in res.assignments}
    assert by["big"].generator is None and by["big"].synthetic == 0
    assert by["mid"].fallback and by["mid"].generator == "gaussian_copula"
    assert not by["small"].fallback and by["small"].generator == "gaussian_copula"


def test_missing_plugin_without_fallback_fails():
    with pytest.raises(PolicyFailure, match="not available"):
        augment(_fold(), PolicySpec(large_fallback=None), seed=0)


def test_copula_small_class_fails_before_generating():
    fold = migraine_standin(seed=2, counts={"big": 40, "tiny": 8})
    with pytest.raises(PolicyFailure) as err:
        augment(fold, PolicySpec(), seed=0)
    assert err.value.failures == [("tiny", "below min_samples=10")]


def test_augment_is_deterministic():
    a = augment(_fold(), PolicySpec(), seed=3).dataset
    b = augment(_fold(), PolicySpec(), seed=3).dataset
    c = augment(_fold(), PolicySpec(), seed=4).dataset
    assert a.equals(b)
    assert not a.equals(c)


def test_single_generator_and_cleaning():
    ds = blobs(20, [[0, 0], [3, 3], [0, 3]]).subset(range(50))
    res = augment(ds, SingleAugmentation(smote()), seed=1)
    assert res.dataset.class_counts.tolist() == [20, 20, 20]
    cleaned = augment(ds, SingleAugmentation(GeneratorSpec(GeneratorKind.SMOTE_ENN)), seed=1).dataset
    assert np.all(cleaned.class_counts <= 20)


def test_empty_fold_rejected():
    empty = Dataset(np.zeros((0, 1)), np.zeros(0, int), ("x",), ("a",))
    with pytest.raises(ValueError):
        augment(empty, PolicySpec(), seed=0)
