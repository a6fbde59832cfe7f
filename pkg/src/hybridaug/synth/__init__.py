"""Per-class synthetic sample generators behind one interface."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..tabular import Dataset
from .base import (
    CLEANING,
    INTERPOLATING,
    SMOTE_FAMILY,
    Feasibility,
    FittedGenerator,
    GenerationInfeasible,
    GeneratorKind,
    GeneratorSpec,
    SpecError,
    gaussian_copula,
    plugin,
    preflight,
    smote,
)
from .cleaning import clean_resample, enn_mask, tomek_links, tomek_mask
from .copula import GaussianCopulaGenerator, fit_gaussian_copula
from .external import PluginConfig, PluginGenerator, parse_plugins
from .interpolation import SmoteGenerator, fit_smote_variant

__all__ = [
    "CLEANING",
    "INTERPOLATING",
    "SMOTE_FAMILY",
    "Feasibility",
    "FittedGenerator",
    "GaussianCopulaGenerator",
    "GenerationInfeasible",
    "GeneratorKind",
    "GeneratorSpec",
    "PluginConfig",
    "PluginGenerator",
    "SmoteGenerator",
    "SpecError",
    "clean_resample",
    "enn_mask",
    "fit_gaussian_copula",
    "fit_generator",
    "fit_smote_variant",
    "gaussian_copula",
    "parse_plugins",
    "plugin",
    "preflight",
    "smote",
    "tomek_links",
    "tomek_mask",
]


def fit_generator(
    spec: GeneratorSpec,
    fold: Dataset,
    target_class: int,
    fold_id: int = -1,
    plugins: Mapping[str, PluginConfig] | None = None,
) -> FittedGenerator:
    """Fit ``spec`` for one class of a training fold.

    Cleaning variants (SMOTE-ENN, SMOTE-Tomek) act on the whole fold and are
    not per-class generators; use :func:`clean_resample` for them.
    """
    if spec.kind in CLEANING:
        raise SpecError(f"{spec.kind.value} resamples whole folds; use clean_resample")
    n_k = int(np.sum(fold.y == target_class))
    feas = preflight(spec, n_k, plugins)
    if not feas:
        raise GenerationInfeasible(feas.reason)
    if spec.kind in INTERPOLATING:
        return fit_smote_variant(spec, fold, target_class, fold_id)
    rows = fold.X[fold.y == target_class]
    if spec.kind is GeneratorKind.GAUSSIAN_COPULA:
        return fit_gaussian_copula(rows, spec, class_label=target_class, schema=fold, fold_id=fold_id)
    return PluginGenerator(spec, target_class, fold, rows, plugins[spec.plugin], fold_id)
