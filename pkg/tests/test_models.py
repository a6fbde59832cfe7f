import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridaug.models import (
    PRESETS,
    DecisionTreeSpec,
    ForestModel,
    KnnSpec,
    LogisticRegressionSpec,
    MlpSpec,
    RandomForestSpec,
    SvmSpec,
    TrainingError,
    TreeModel,
    balanced_class_weights,
    gradient_check,
    load_model,
    predict,
    save_model,
    spec_from_json,
    spec_to_json,
    train,
)
from hybridaug.models import svm as svm_mod
from hybridaug.models.base import sample_weights
from hybridaug.tabular import Dataset
from standin import blobs

SPECS = [
    KnnSpec(3),
    DecisionTreeSpec(),
    RandomForestSpec(n_estimators=7),
    LogisticRegressionSpec(),
    SvmSpec(kernel="rbf"),
    SvmSpec(kernel="linear", class_weight="balanced"),
    MlpSpec(layers=(8,), max_epochs=100),
]


@pytest.fixture(scope="module")
def three_blobs():
    return blobs(25, [[0, 0], [4, 0], [0, 4]], scale=0.5, seed=1)


def test_balanced_weights_examples():
    y = np.repeat(np.arange(7), [247, 60, 24, 20, 18, 17, 14])
    w = balanced_class_weights(y, 7)
    assert w[0] == pytest.approx(400 / (7 * 247))
    assert w[-1] == pytest.approx(400 / 98)
    # with weights every class carries the same total mass
    totals = np.bincount(y, weights=sample_weights(y, 7, "balanced"))
    assert np.allclose(totals, 400 / 7)


def test_absent_class_gets_zero_weight():
    assert balanced_class_weights(np.array([0, 0, 2]), 3).tolist() == pytest.approx([0.75, 0.0, 1.5])


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.kind}")
def test_every_classifier_learns_blobs(spec, three_blobs):
    model = train(spec, three_blobs, seed=0)
    acc = np.mean(model.predict(three_blobs.X) == three_blobs.y)
    assert acc >= 0.95
    cls, scores = predict(model, three_blobs.X[0])
    assert scores.shape == (3,) and cls == int(np.argmax(scores))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.kind}")
def test_deterministic_and_round_trip(spec, three_blobs, tmp_path):
    a = train(spec, three_blobs, seed=5)
    b = train(spec, three_blobs, seed=5)
    probe = three_blobs.X + 0.37
    assert np.array_equal(a.scores(probe), b.scores(probe))
    path = tmp_path / "m.json"
    save_model(a, path)
    back = load_model(path)
    assert type(back) is type(a)
    assert np.allclose(back.scores(probe), a.scores(probe), rtol=0, atol=1e-12)


@pytest.mark.parametrize("spec", SPECS[:3], ids=lambda s: f"{s.kind}")
def test_dimension_mismatch(spec, three_blobs):
    model = train(spec, three_blobs, seed=0)
    with pytest.raises(ValueError, match="expected 2 features"):
        model.predict(np.zeros((1, 3)))


def test_training_errors():
    one = Dataset(np.zeros((4, 1)), [0, 0, 0, 0], ("x",), ("a", "b"))
    with pytest.raises(TrainingError, match="single class"):
        train(KnnSpec(), one, 0)
    bad = np.array([[0.0], [np.inf]])
    with pytest.raises(TrainingError, match="non-finite"):
        train(KnnSpec(), _unsafe(bad, [0, 1]), 0)


def _unsafe(X, y):
    # Dataset refuses non-finite values, so build the training input directly
    class _D:
        pass

    d = _D()
    d.X, d.y, d.n_classes = X, np.asarray(y), 2
    return d


def test_knn_k1_memorises_training_data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 3, 40)
    y[:3] = [0, 1, 2]
    ds = Dataset(X, y, ("a", "b", "c"), ("p", "q", "r"))
    assert np.array_equal(train(KnnSpec(1), ds, 0).predict(X), y)


def test_knn_distance_tie_goes_to_lower_index():
    ds = Dataset(np.array([[1.0], [-1.0]]), [1, 0], ("x",), ("a", "b"))
    assert train(KnnSpec(1), ds, 0).predict([[0.0]]).tolist() == [1]


def test_vote_tie_goes_to_lower_class():
    ds = Dataset(np.array([[1.0], [-1.0]]), [1, 0], ("x",), ("a", "b"))
    scores = train(KnnSpec(2), ds, 0).scores(np.array([[0.0]]))
    assert scores.tolist() == [[0.5, 0.5]]
    assert train(KnnSpec(2), ds, 0).predict([[0.0]]).tolist() == [0]


def test_linear_svm_separable_margin():
    X = np.array([[0.0, 0], [0, 1], [3, 0], [3, 1]])
    y = np.array([-1.0, -1, 1, 1])
    m = svm_mod.fit_binary(X, y, C=1e6, kernel="linear", tol=1e-8)
    f = m.decision_function(X)
    assert np.all(np.sign(f) == y)
    # hard margin: support vectors sit on |f| = 1, boundary at x = 1.5
    assert np.allclose(np.abs(f), 1.0, atol=1e-5)
    assert m.decision_function(np.array([[1.5, 0.5]]))[0] == pytest.approx(0.0, abs=1e-5)


def test_forest_is_plurality_of_trees(three_blobs):
    forest = train(RandomForestSpec(n_estimators=9), three_blobs, seed=2)
    assert isinstance(forest, ForestModel)
    probe = three_blobs.X + np.random.default_rng(0).normal(0, 1.5, three_blobs.X.shape)
    votes = np.zeros((len(probe), 3))
    for t in forest.trees:
        votes[np.arange(len(probe)), t.predict(probe)] += 1
    assert np.array_equal(forest.predict(probe), np.argmax(votes, axis=1))


def test_tree_pure_leaves(three_blobs):
    tree = train(DecisionTreeSpec(), three_blobs, seed=0)
    assert isinstance(tree, TreeModel)
    assert np.array_equal(tree.predict(three_blobs.X), three_blobs.y)


def test_mlp_shift_invariance(three_blobs):
    shifted = Dataset(three_blobs.X + 1000.0, three_blobs.y, three_blobs.feature_names, three_blobs.label_vocab)
    spec = MlpSpec(layers=(8,), max_epochs=10)
    a = train(spec, three_blobs, seed=3)
    b = train(spec, shifted, seed=3)
    assert np.allclose(a.scores(three_blobs.X), b.scores(shifted.X), atol=1e-8)


def test_gradient_checks():
    ds = blobs(10, [[0, 0, 0], [2, 1, 0], [0, 2, 1]], scale=0.8, seed=4)
    assert gradient_check(LogisticRegressionSpec(C=0.5), ds) < 1e-6
    assert gradient_check(LogisticRegressionSpec(class_weight="balanced"), ds.subset(range(25))) < 1e-6
    assert gradient_check(MlpSpec(layers=(16, 8)), ds) < 1e-4
    assert gradient_check(PRESETS["mlp"], ds, max_coords=300) < 1e-4


def test_spec_json_round_trip():
    for spec in [*SPECS, *PRESETS.values()]:
        assert spec_from_json(spec_to_json(spec)) == spec
    with pytest.raises(ValueError, match="unknown classifier kind"):
        spec_from_json({"kind": "xgboost"})
    with pytest.raises(ValueError, match="hyperparameters"):
        spec_from_json({"kind": "knn", "depth": 3})


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 1000), n=st.integers(6, 30))
def test_scores_are_distributions(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    y = np.arange(n) % 3
    ds = Dataset(X, y, ("a", "b"), ("p", "q", "r"))
    for spec in (KnnSpec(3), RandomForestSpec(n_estimators=3), LogisticRegressionSpec(max_epochs=200)):
        s = train(spec, ds, seed).scores(X)
        assert np.allclose(s.sum(axis=1), 1.0)
        assert np.all(s >= 0)


# -- optional library oracles ---------------------------------------------------

def test_logistic_matches_library_oracle(three_blobs):
    lm = pytest.importorskip("sklearn.linear_model")
    ours = train(LogisticRegressionSpec(C=0.3, tol=1e-9, max_epochs=50_000), three_blobs, 0)
    ref = lm.LogisticRegression(C=0.3, tol=1e-10, max_iter=10_000).fit(three_blobs.X, three_blobs.y)
    assert np.allclose(ours.W.T, ref.coef_, atol=1e-4)
    assert np.allclose(ours.scores(three_blobs.X), ref.predict_proba(three_blobs.X), atol=1e-5)


def test_svm_matches_library_oracle():
    svc = pytest.importorskip("sklearn.svm")
    ds = blobs(20, [[0, 0], [1.5, 1.0]], scale=0.8, seed=6)
    y_pm = np.where(ds.y == 1, 1.0, -1.0)
    for kernel in ("linear", "rbf"):
        ours = svm_mod.fit_binary(ds.X, y_pm, C=2.0, kernel=kernel, gamma=0.5, tol=1e-6)
        ref = svc.SVC(C=2.0, kernel=kernel, gamma=0.5, tol=1e-8).fit(ds.X, y_pm)
        assert np.allclose(ours.decision_function(ds.X), ref.decision_function(ds.X), atol=1e-3)


def test_knn_matches_library_oracle(three_blobs):
    nb = pytest.importorskip("sklearn.neighbors")
    probe = np.random.default_rng(2).uniform(-1, 5, size=(100, 2))
    ours = train(KnnSpec(5), three_blobs, 0).predict(probe)
    ref = nb.KNeighborsClassifier(5).fit(three_blobs.X, three_blobs.y).predict(probe)
    assert np.array_equal(ours, ref)
