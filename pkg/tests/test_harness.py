import json

import numpy as np
import pytest

from hybridaug.harness import (
    OUT_OF_SCOPE,
    ConfigError,
    LeakageError,
    OutOfScope,
    check_clean_fold,
    load_config,
    parse_config,
    pivot,
    render_pivot_csv,
    render_pivot_text,
    report_bytes,
    resolve_augmentation,
    resolve_cells,
    resolve_classifier,
    run_clean,
    run_grid,
    run_leaky,
    verify_report,
    write_outputs,
)
from hybridaug.policy import PolicySpec, Proportional, SingleAugmentation
from hybridaug.synth import GeneratorKind
from hybridaug.tabular import stratified_kfold


def _config(path, **kw):
    raw = {
        "dataset": {"path": str(path)},
        "k": 3,
        "seed": 42,
        "grid": {
            "classifiers": ["knn", "decision_tree"],
            "augmentations": ["none", "smote", "hybrid"],
        },
    }
    raw.update(kw)
    return parse_config(raw)


@pytest.fixture(scope="module")
def small_csv(tmp_path_factory, small_standin):
    from hybridaug.tabular import write_csv

    p = tmp_path_factory.mktemp("h") / "small.csv"
    write_csv(small_standin, p)
    return p


@pytest.fixture(scope="module")
def clean_report(small_csv):
    return run_clean(_config(small_csv))


# -- config ---------------------------------------------------------------------

def test_json_and_toml_agree(tmp_path, small_csv):
    (tmp_path / "c.json").write_text(json.dumps({"dataset": {"path": "small.csv"}, "cells": [{"classifier": "knn"}]}))
    (tmp_path / "c.toml").write_text('[dataset]\npath = "small.csv"\n\n[[cells]]\nclassifier = "knn"\n')
    a, b = load_config(tmp_path / "c.json"), load_config(tmp_path / "c.toml")
    assert a == b
    assert a.dataset.path == str((tmp_path / "small.csv").resolve())


@pytest.mark.parametrize(
    "patch,match",
    [
        ({"k": 1}, "k must be >= 2"),
        ({"colour": "red"}, "Extra inputs"),
        ({"grid": None, "cells": []}, "no cells"),
        ({"protocol": "sloppy"}, "protocol"),
    ],
)
def test_config_rejections(small_csv, patch, match):
    with pytest.raises(ConfigError, match=match):
        _config(small_csv, **patch)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.toml")


def test_config_hash_ignores_workers(small_csv):
    cfg = _config(small_csv)
    assert cfg.config_hash() == cfg.with_overrides(workers=4).config_hash()
    assert cfg.config_hash() != cfg.with_overrides(seed=1).config_hash()


def test_augmentation_shorthand():
    assert resolve_augmentation("none") == ("none", None)
    label, aug = resolve_augmentation("hybrid:x2")
    assert isinstance(aug, PolicySpec) and aug.growth == Proportional(2)
    label, aug = resolve_augmentation("adasyn")
    assert isinstance(aug, SingleAugmentation) and aug.generator.kind is GeneratorKind.ADASYN
    assert isinstance(resolve_augmentation("ctgan")[1], OutOfScope)
    with pytest.raises(ConfigError):
        resolve_augmentation("magic")


def test_classifier_resolution():
    assert resolve_classifier("prior_rf10")[1].n_estimators == 10
    assert resolve_classifier({"kind": "knn", "n_neighbors": 3, "name": "knn3"})[0] == "knn3"
    assert isinstance(resolve_classifier("ft_transformer")[1], OutOfScope)
    assert isinstance(resolve_classifier({"kind": "xgboost", "depth": 6})[1], OutOfScope)
    with pytest.raises(ConfigError):
        resolve_classifier("perceptron")


def test_duplicate_cells_rejected(small_csv):
    cfg = _config(small_csv, grid=None, cells=[{"classifier": "knn"}, {"classifier": "knn"}])
    with pytest.raises(ConfigError, match="duplicate"):
        resolve_cells(cfg)


# -- clean protocol ---------------------------------------------------------------

def test_leakage_invariant_every_fold(clean_report, small_standin):
    plan = stratified_kfold(small_standin, 3, 42)
    assert clean_report["fold_plan"] == plan.to_json()
    ran = [c for c in clean_report["cells"] if c["status"] == "ok"]
    assert len(ran) >= 4
    for cell in ran:
        assert len(cell["folds"]) == 3
        for f in cell["folds"]:
            assert f["leakage_check"] == {"disjoint": True, "evaluated_synthetic": 0, "train_real_preserved": True}
            assert f["n_test"] == len(plan.test_indices(f["fold"]))


def test_failure_isolation(clean_report):
    by = {c["name"]: c for c in clean_report["cells"]}
    # class C has 8 training rows per fold, below the copula's minimum
    failed = by["knn|hybrid_balance"]
    assert failed["status"] == "failed"
    assert {"class": "C", "reason": "below min_samples=10"} in failed["policy_failure"]
    assert by["knn|smote"]["status"] == "ok"
    assert by["decision_tree|none"]["status"] == "ok"
    text = render_pivot_text(clean_report["pivots"]["macro_f1"])
    assert "FAILED(fold 0: C: below min_samples=10)" in text


def test_report_verifies_and_is_deterministic(clean_report, small_csv):
    assert verify_report(clean_report)
    again = run_clean(_config(small_csv))
    assert report_bytes(again) == report_bytes(clean_report)
    parallel = run_clean(_config(small_csv, workers=2))
    assert report_bytes(parallel) == report_bytes(clean_report)
    tampered = json.loads(report_bytes(clean_report))
    tampered["cells"][0]["name"] = "x"
    assert not verify_report(tampered)


def test_seed_changes_results(clean_report, small_csv):
    other = run_clean(_config(small_csv, seed=7))
    assert other["content_hash"] != clean_report["content_hash"]


def test_check_clean_fold_detects_contamination(small_standin):
    plan = stratified_kfold(small_standin, 3, 0)
    tr, te = plan.train_indices(0), plan.test_indices(0)
    assert check_clean_fold(small_standin, tr, te, small_standin.subset(tr))["disjoint"]
    with pytest.raises(LeakageError):
        check_clean_fold(small_standin, tr, te, small_standin.subset(np.concatenate([tr, te[:1]])))
    with pytest.raises(LeakageError):
        check_clean_fold(small_standin, np.concatenate([tr, te[:1]]), te, small_standin.subset(tr))


# -- out of scope, leaky, pivots --------------------------------------------------

def test_out_of_scope_cells_render(small_csv):
    cfg = _config(small_csv, grid={"classifiers": ["knn", "ft_transformer", "xgboost"], "augmentations": ["smote", "tvae"]})
    rep = run_clean(cfg)
    by = {c["name"]: c for c in rep["cells"]}
    assert by["ft_transformer|smote"]["status"] == "out_of_scope"
    assert by["knn|plugin:tvae"]["status"] == "out_of_scope"
    p = rep["pivots"]["macro_f1"]
    assert p["values"]["smote"]["xgboost"]["text"] == OUT_OF_SCOPE
    assert p["column_avg"]["xgboost"] is None
    assert OUT_OF_SCOPE in render_pivot_text(p)


def test_leaky_protocol(small_csv):
    with pytest.raises(ConfigError, match="leaky protocol needs an augmentation"):
        run_leaky(_config(small_csv))
    cfg = _config(small_csv, protocol="leaky", grid={"classifiers": ["knn"], "augmentations": ["smote"]})
    rep = run_grid(cfg)
    assert rep["protocol"] == "leaky" and "fold_plan" not in rep
    cell = rep["cells"][0]
    assert cell["pool_size"] == 90
    assert sum(f["n_test_synthetic"] for f in cell["folds"]) == 30


def test_pivot_averages_and_best():
    def cell(clf, aug, m, status="ok"):
        c = {"classifier": clf, "augmentation": aug, "status": status, "reason": "boom"}
        if status == "ok":
            c["macro_f1"] = {"mean": m, "std": 0.0}
        return c

    cells = [cell("a", "r1", 0.5), cell("b", "r1", 0.7), cell("a", "r2", 0.5), cell("b", "r2", 0, "failed")]
    p = pivot(cells)
    assert p["row_avg"] == {"r1": pytest.approx(0.6), "r2": 0.5}
    assert p["column_avg"] == {"a": 0.5, "b": 0.7}
    assert p["overall_avg"] == pytest.approx(0.55)
    assert p["best"] == {"a": "r1", "b": "r1"}
    csv = render_pivot_csv(p)
    assert csv.splitlines()[0] == "Augmenter,a,b,Avg"
    assert "FAILED(boom)" in csv


def test_write_outputs(tmp_path, clean_report):
    paths = write_outputs(clean_report, tmp_path / "out")
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == sorted(p.name for p in paths.values())
    assert json.loads(paths["json"].read_text())["content_hash"] == clean_report["content_hash"]
