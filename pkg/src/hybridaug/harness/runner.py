"""Cross-validation protocols: leakage-free, deliberately leaky, and grids of cells."""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from typing import Mapping

import numpy as np

from .. import __version__
from ..metrics import ConfusionMatrix, aggregate_folds, fidelity_profile, macro_f1
from ..models import TrainingError, spec_to_json, train
from ..policy import PolicyFailure, augment
from ..seeding import seed_derive
from ..synth import PluginConfig
from ..tabular import Dataset, FoldPlan, aggregate_labels, drop_constant_features, load_csv, stratified_kfold
from .config import Cell, ConfigError, DatasetConfig, OutOfScope, RunConfig, augmentation_to_json, resolve_cells
from .report import finalize_report, pivot

CLEAN = "clean"
LEAKY = "leaky"


class LeakageError(AssertionError):
    """A fold violated the clean-protocol isolation invariant."""


def load_dataset(cfg: DatasetConfig) -> Dataset:
    ds = load_csv(cfg.path, cfg.label_column)
    if cfg.aggregate:
        ds = aggregate_labels(ds, cfg.aggregate)
    if cfg.drop_constant:
        ds, _ = drop_constant_features(ds)
    return ds


def dataset_fingerprint(ds: Dataset) -> str:
    h = hashlib.sha256()
    h.update("\x1f".join(ds.feature_names).encode())
    h.update(b"\x1e")
    h.update("\x1f".join(ds.label_vocab).encode())
    h.update(np.ascontiguousarray(ds.X, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(ds.y, dtype="<i8").tobytes())
    return h.hexdigest()


def cell_seed(master: int, cell: Cell) -> int:
    """Seeds depend on what a cell is, not where it sits in the config."""
    return seed_derive(master, "cell", cell.key())


def check_clean_fold(ds: Dataset, train_idx: np.ndarray, test_idx: np.ndarray, train_aug: Dataset) -> dict:
    if np.intersect1d(train_idx, test_idx).size:
        raise LeakageError("training and evaluation indices overlap")
    if test_idx.min() < 0 or test_idx.max() >= len(ds) or not ds.is_real[test_idx].all():
        raise LeakageError("evaluation rows are not all original real rows")
    real = train_aug.is_real
    if real.sum() != len(train_idx) or not np.array_equal(train_aug.X[real], ds.X[train_idx]):
        raise LeakageError("real rows of the augmented training fold differ from the fold")
    return {"disjoint": True, "evaluated_synthetic": 0, "train_real_preserved": True}


def _evaluate(model, test: Dataset) -> dict:
    cm = ConfusionMatrix.from_predictions(test.y, model.predict(test.X), test.n_classes)
    macro, per_class = macro_f1(cm)
    return {
        "macro_f1": macro,
        "accuracy": cm.accuracy(),
        "per_class_f1": {name: float(v) for name, v in zip(test.label_vocab, per_class)},
        "confusion": cm.to_json(),
    }


def _cell_header(cell: Cell) -> dict:
    clf = cell.classifier
    return {
        "name": cell.name,
        "classifier": cell.classifier_label,
        "augmentation": cell.augmentation_label,
        "classifier_spec": {"out_of_scope": clf.name} if isinstance(clf, OutOfScope) else spec_to_json(clf),
        "augmentation_spec": augmentation_to_json(cell.augmentation),
    }


def _out_of_scope(cell: Cell) -> str | None:
    for part in (cell.classifier, cell.augmentation):
        if isinstance(part, OutOfScope):
            return f"{part.name}: {part.reason}"
    return None


def _finish(record: dict, folds: list[dict], protocol: str) -> dict:
    record["protocol"] = protocol
    record["folds"] = folds
    record["status"] = "ok"
    record["macro_f1"] = aggregate_folds([f["macro_f1"] for f in folds]).to_json()
    record["accuracy"] = aggregate_folds([f["accuracy"] for f in folds]).to_json()
    return record


def _failed(record: dict, folds: list[dict], protocol: str, reason: str, failures=None) -> dict:
    record.update(protocol=protocol, folds=folds, status="failed", reason=reason)
    if failures:
        record["policy_failure"] = [{"class": c, "reason": r} for c, r in failures]
    return record


def run_cell_clean(
    cell: Cell, ds: Dataset, plan: FoldPlan, master_seed: int, plugins: Mapping[str, PluginConfig] | None = None
) -> dict:
    """Augment each training fold, train, and score on the untouched held-out fold."""
    record = _cell_header(cell)
    oos = _out_of_scope(cell)
    if oos:
        record.update(protocol=CLEAN, status="out_of_scope", reason=oos)
        return record
    seed = cell_seed(master_seed, cell)
    folds = []
    for f in range(plan.k):
        tr, te = plan.train_indices(f), plan.test_indices(f)
        fold_train, test = ds.subset(tr), ds.subset(te)
        assignments = ()
        if cell.augmentation is None:
            train_aug = fold_train
        else:
            try:
                result = augment(fold_train, cell.augmentation, seed, f, plugins)
            except PolicyFailure as exc:
                return _failed(record, folds, CLEAN, f"fold {f}: {exc}", exc.failures)
            train_aug, assignments = result.dataset, result.assignments
        checks = check_clean_fold(ds, tr, te, train_aug)
        try:
            model = train(cell.classifier, train_aug, seed_derive(seed, "train", f))
        except TrainingError as exc:
            return _failed(record, folds, CLEAN, f"fold {f}: {exc}")
        folds.append(
            {
                "fold": f,
                "protocol": CLEAN,
                "n_train": len(train_aug),
                "n_test": len(test),
                **_evaluate(model, test),
                "fidelity": fidelity_profile(train_aug).to_json(),
                "assignments": [a.to_json() for a in assignments],
                "leakage_check": checks,
            }
        )
    return _finish(record, folds, CLEAN)


def run_cell_leaky(
    cell: Cell, ds: Dataset, k: int, master_seed: int, plugins: Mapping[str, PluginConfig] | None = None
) -> dict:
    """Augment the whole dataset first, then split the augmented pool into folds.

    This is the flawed protocol, kept to demonstrate how much it inflates
    scores: synthetic rows derived from evaluation rows end up on both sides.
    """
    record = _cell_header(cell)
    oos = _out_of_scope(cell)
    if oos:
        record.update(protocol=LEAKY, status="out_of_scope", reason=oos)
        return record
    seed = cell_seed(master_seed, cell)
    try:
        result = augment(ds, cell.augmentation, seed, -1, plugins)
    except PolicyFailure as exc:
        return _failed(record, [], LEAKY, f"full dataset: {exc}", exc.failures)
    pool = result.dataset
    plan = stratified_kfold(pool, k, master_seed)
    record["pool_size"] = len(pool)
    record["pool_fidelity"] = fidelity_profile(pool).to_json()
    folds = []
    for f in range(k):
        train_set, test = pool.subset(plan.train_indices(f)), pool.subset(plan.test_indices(f))
        try:
            model = train(cell.classifier, train_set, seed_derive(seed, "train", f))
        except TrainingError as exc:
            return _failed(record, folds, LEAKY, f"fold {f}: {exc}")
        folds.append(
            {
                "fold": f,
                "protocol": LEAKY,
                "n_train": len(train_set),
                "n_test": len(test),
                "n_test_synthetic": int((~test.is_real).sum()),
                **_evaluate(model, test),
                "fidelity": fidelity_profile(train_set).to_json(),
            }
        )
    return _finish(record, folds, LEAKY)


def _run_one(args):
    protocol, cell, ds, plan, k, seed, plugins = args
    if protocol == CLEAN:
        return run_cell_clean(cell, ds, plan, seed, plugins)
    return run_cell_leaky(cell, ds, k, seed, plugins)


def _execute(config: RunConfig, protocol: str, ds: Dataset | None) -> dict:
    ds = load_dataset(config.dataset) if ds is None else ds
    cells = resolve_cells(config)
    if protocol == LEAKY:
        bare = [c.name for c in cells if c.augmentation is None]
        if bare:
            raise ConfigError(f"leaky protocol needs an augmentation in every cell; missing in {bare}")
    plan = stratified_kfold(ds, config.k, config.seed)
    plugins = config.plugin_configs()
    jobs = [(protocol, c, ds, plan, config.k, config.seed, plugins) for c in cells]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    body = {
        "schema": "hybridaug.report/1",
        "protocol": protocol,
        "environment": {
            "seed": config.seed,
            "k": config.k,
            "config_hash": config.config_hash(),
            "version": __version__,
            "dataset": {
                "fingerprint": dataset_fingerprint(ds),
                "n_samples": len(ds),
                "n_features": ds.n_features,
                "classes": list(ds.label_vocab),
                "class_counts": ds.class_counts.tolist(),
            },
        },
        "cells": results,
        "pivots": {"macro_f1": pivot(results, "macro_f1"), "accuracy": pivot(results, "accuracy")},
    }
    if protocol == CLEAN:
        body["fold_plan"] = plan.to_json()
    return finalize_report(body)


def run_clean(config: RunConfig, dataset: Dataset | None = None) -> dict:
    return _execute(config, CLEAN, dataset)


def run_leaky(config: RunConfig, dataset: Dataset | None = None) -> dict:
    return _execute(config, LEAKY, dataset)


def run_grid(config: RunConfig, dataset: Dataset | None = None) -> dict:
    """Every cell under one shared fold plan, with classifier x augmenter pivots."""
    return _execute(config, config.protocol, dataset)

