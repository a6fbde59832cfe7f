"""Run configuration: schema, JSON/TOML loading and resolution into runnable cells.

A config names a dataset, fold count, master seed, protocol and a list of
cells.  Each cell pairs a classifier (a preset name or an inline spec) with an
optional augmentation.  A ``grid`` block expands into the cross product of its
classifiers and augmentations and is appended to ``cells``.

Augmentations may be written as short strings::

    "none"                       no augmentation
    "smote", "adasyn", ...       one generator for every class, Balance growth
    "smote:x2"                   same with Proportional x2 growth
    "ctgan", "tvae"              external plug-in generator
    "hybrid", "hybrid:x4"        threshold policy with default generators

or as tables with ``generator`` or ``policy`` plus ``growth``.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..models import PRESETS, SPEC_TYPES, ClassifierSpec, spec_from_json, spec_to_json
from ..policy import Augmentation, PolicySpec, SingleAugmentation, parse_growth
from ..synth import GeneratorKind, GeneratorSpec, PluginConfig, plugin

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# classifier families the toolkit deliberately does not implement
OUT_OF_SCOPE_CLASSIFIERS = frozenset({"xgboost", "ft_transformer", "tabnet", "gandalf", "dnn", "ann"})
PLUGIN_GENERATORS = frozenset({"ctgan", "tvae"})


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DatasetConfig(_Strict):
    path: str
    label_column: str = "Type"
    aggregate: Optional[dict[str, str]] = None
    drop_constant: bool = False


class GeneratorConfig(_Strict):
    kind: str
    k_neighbors: int = 5
    m_neighbors: int = 10
    enn_neighbors: int = 3
    min_samples: int = 10
    out_step: float = 0.5
    plugin: Optional[str] = None
    options: dict[str, Any] = Field(default_factory=dict)

    def to_spec(self) -> GeneratorSpec:
        data = self.model_dump()
        if data["kind"] in PLUGIN_GENERATORS:
            data["plugin"], data["kind"] = data["kind"], GeneratorKind.PLUGIN.value
        try:
            return GeneratorSpec(**data)
        except ValueError as exc:
            raise ConfigError(f"generator {self.kind!r}: {exc}") from None


class PolicyConfig(_Strict):
    tau: int = 29
    small: GeneratorConfig = GeneratorConfig(kind="gaussian_copula")
    large: GeneratorConfig = GeneratorConfig(kind="plugin", plugin="ctgan")
    large_fallback: Optional[GeneratorConfig] = GeneratorConfig(kind="gaussian_copula")


class AugmentationConfig(_Strict):
    generator: Optional[GeneratorConfig] = None
    policy: Optional[PolicyConfig] = None
    growth: str = "balance"

    @model_validator(mode="after")
    def _one_of(self):
        if (self.generator is None) == (self.policy is None):
            raise ValueError("augmentation needs exactly one of 'generator' or 'policy'")
        return self


AugmentationField = Union[None, str, AugmentationConfig]
ClassifierField = Union[str, dict[str, Any]]


class CellConfig(_Strict):
    classifier: ClassifierField
    augmentation: AugmentationField = None
    name: Optional[str] = None  # column label; defaults to the classifier name


class GridConfig(_Strict):
    classifiers: list[ClassifierField]
    augmentations: list[AugmentationField]


class PluginEntry(_Strict):
    command: list[str]
    timeout: float = 600.0
    env: dict[str, str] = Field(default_factory=dict)


class RunConfig(_Strict):
    dataset: DatasetConfig
    k: int = 5
    seed: int = 42
    protocol: Literal["clean", "leaky"] = "clean"
    cells: list[CellConfig] = Field(default_factory=list)
    grid: Optional[GridConfig] = None
    plugins: dict[str, PluginEntry] = Field(default_factory=dict)
    workers: int = 1

    @field_validator("k")
    @classmethod
    def _k(cls, v):
        if v < 2:
            raise ValueError("k must be >= 2")
        return v

    @model_validator(mode="after")
    def _nonempty(self):
        if not self.all_cells():
            raise ValueError("config defines no cells")
        return self

    def all_cells(self) -> list[CellConfig]:
        cells = list(self.cells)
        if self.grid is not None:
            cells += [
                CellConfig(classifier=c, augmentation=a)
                for a in self.grid.augmentations
                for c in self.grid.classifiers
            ]
        return cells

    def plugin_configs(self) -> dict[str, PluginConfig]:
        return {n: PluginConfig(tuple(p.command), p.timeout, dict(p.env)) for n, p in self.plugins.items()}

    def config_hash(self) -> str:
        """Hash of every setting that can change results (``workers`` excluded)."""
        body = self.model_dump(mode="json", exclude={"workers"})
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        data = self.model_dump()
        for key, value in kw.items():
            if value is None:
                continue
            if key == "dataset_path":
                data["dataset"]["path"] = str(value)
            else:
                data[key] = value
        return RunConfig.model_validate(data)


def load_config(path: str | Path) -> RunConfig:
    """Parse a ``.json`` or ``.toml`` run config; relative dataset paths resolve against the file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    try:
        raw = tomllib.loads(text) if path.suffix.lower() == ".toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    ds = raw.get("dataset")
    if isinstance(ds, dict) and "path" in ds and not Path(ds["path"]).is_absolute():
        ds["path"] = str((path.parent / ds["path"]).resolve())
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- resolution ----------------------------------------------------------------

@dataclass(frozen=True)
class OutOfScope:
    """Placeholder for a cell the toolkit reports but does not run."""

    name: str
    reason: str


@dataclass(frozen=True)
class Cell:
    classifier_label: str
    augmentation_label: str
    classifier: ClassifierSpec | OutOfScope
    augmentation: Augmentation | OutOfScope | None

    @property
    def name(self) -> str:
        return f"{self.classifier_label}|{self.augmentation_label}"

    def key(self) -> str:
        """Canonical description used to derive the cell's seed."""
        clf = (
            {"out_of_scope": self.classifier.name}
            if isinstance(self.classifier, OutOfScope)
            else spec_to_json(self.classifier)
        )
        return json.dumps({"classifier": clf, "augmentation": augmentation_to_json(self.augmentation)}, sort_keys=True)


def augmentation_to_json(aug) -> Any:
    if aug is None:
        return None
    if isinstance(aug, OutOfScope):
        return {"out_of_scope": aug.name}
    if isinstance(aug, SingleAugmentation):
        return {"generator": aug.generator.to_json(), "growth": aug.growth.label}
    return {
        "policy": {
            "tau": aug.tau,
            "small": aug.small.to_json(),
            "large": aug.large.to_json(),
            "large_fallback": aug.large_fallback.to_json() if aug.large_fallback else None,
        },
        "growth": aug.growth.label,
    }


def resolve_classifier(field: ClassifierField) -> tuple[str, ClassifierSpec | OutOfScope]:
    if isinstance(field, str):
        if field in PRESETS:
            return field, PRESETS[field]
        if field in OUT_OF_SCOPE_CLASSIFIERS:
            return field, OutOfScope(field, "classifier family not implemented")
        if field in SPEC_TYPES:
            return field, SPEC_TYPES[field]()
        raise ConfigError(f"unknown classifier {field!r}")
    obj = dict(field)
    label = obj.pop("name", None)
    kind = obj.get("kind")
    if kind in OUT_OF_SCOPE_CLASSIFIERS:
        return label or kind, OutOfScope(kind, "classifier family not implemented")
    try:
        spec = spec_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"classifier {field!r}: {exc}") from None
    return label or kind, spec


def _parse_shorthand(text: str):
    base, _, growth = text.partition(":")
    growth_mode = parse_growth(growth or "balance")
    if base == "hybrid":
        return PolicySpec(growth=growth_mode)
    if base in PLUGIN_GENERATORS:
        return SingleAugmentation(plugin(base), growth_mode)
    try:
        return SingleAugmentation(GeneratorSpec(GeneratorKind(base)), growth_mode)
    except ValueError:
        raise ConfigError(f"unknown augmentation {text!r}") from None


def resolve_augmentation(field: AugmentationField, plugins: dict | None = None) -> tuple[str, Any]:
    """Turn a config entry into ``(label, Augmentation | OutOfScope | None)``.

    A single plug-in generator whose plug-in is not configured is out of
    scope: it is reported, never approximated by another generator.
    """
    if field is None or field == "none":
        return "none", None
    if isinstance(field, str):
        aug = _parse_shorthand(field)
    else:
        try:
            growth = parse_growth(field.growth)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if field.generator is not None:
            aug = SingleAugmentation(field.generator.to_spec(), growth)
        else:
            p = field.policy
            try:
                aug = PolicySpec(
                    tau=p.tau,
                    small=p.small.to_spec(),
                    large=p.large.to_spec(),
                    growth=growth,
                    large_fallback=p.large_fallback.to_spec() if p.large_fallback else None,
                )
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    label = aug.label
    if (
        isinstance(aug, SingleAugmentation)
        and aug.generator.kind is GeneratorKind.PLUGIN
        and aug.generator.plugin not in (plugins or {})
    ):
        return label, OutOfScope(aug.generator.plugin, "plug-in generator not configured")
    return label, aug


def resolve_cells(config: RunConfig) -> list[Cell]:
    plugins = config.plugin_configs()
    cells = []
    seen = set()
    for cc in config.all_cells():
        clf_label, clf = resolve_classifier(cc.classifier)
        aug_label, aug = resolve_augmentation(cc.augmentation, plugins)
        if cc.name:
            clf_label = cc.name
        cell = Cell(clf_label, aug_label, clf, aug)
        if cell.name in seen:
            raise ConfigError(f"duplicate cell {cell.name!r}")
        seen.add(cell.name)
        cells.append(cell)
    return cells
