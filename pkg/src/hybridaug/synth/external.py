"""File-exchange contract for external generators (e.g. CTGAN, TVAE).

The toolkit writes a request JSON, runs the plug-in command with the request
and response paths appended as the last two arguments, and reads back a
response JSON::

    request:  {"feature_names": [...], "class_rows": [[...], ...],
               "n": 100, "seed": 123, "options": {...}}
    response: {"rows": [[...], ...]}          # exactly n rows of d numbers
"""

from __future__ import annotations

import json
import os
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import jsonschema
import numpy as np

from ..tabular import Dataset
from .base import FittedGenerator, GenerationInfeasible, GeneratorSpec


@dataclass(frozen=True)
class PluginConfig:
    command: tuple[str, ...]
    timeout: float = 600.0
    env: Mapping[str, str] = field(default_factory=dict)


def response_schema(n: int, d: int) -> dict:
    return {
        "type": "object",
        "required": ["rows"],
        "properties": {
            "rows": {
                "type": "array",
                "minItems": n,
                "maxItems": n,
                "items": {
                    "type": "array",
                    "minItems": d,
                    "maxItems": d,
                    "items": {"type": "number"},
                },
            }
        },
    }


class PluginGenerator(FittedGenerator):
    def __init__(self, spec: GeneratorSpec, class_label: int, schema: Dataset, rows: np.ndarray, config: PluginConfig, fold_id: int = -1):
        super().__init__(spec, class_label, schema, fold_id)
        self.rows = np.asarray(rows, dtype=np.float64)
        self.config = config

    def request(self, n: int, seed: int) -> dict:
        return {
            "feature_names": list(self._schema.feature_names),
            "class_rows": self.rows.tolist(),
            "n": int(n),
            "seed": int(seed),
            "options": dict(self.spec.options),
        }

    def sample_matrix(self, n: int, seed: int) -> np.ndarray:
        d = self.rows.shape[1]
        with tempfile.TemporaryDirectory(prefix="hybridaug-plugin-") as tmp:
            req = Path(tmp) / "request.json"
            resp = Path(tmp) / "response.json"
            req.write_text(json.dumps(self.request(n, seed)))
            try:
                proc = subprocess.run(
                    [*self.config.command, str(req), str(resp)],
                    capture_output=True,
                    text=True,
                    timeout=self.config.timeout,
                    env=None if not self.config.env else {**os.environ, **self.config.env},
                )
            except subprocess.TimeoutExpired:
                raise GenerationInfeasible(f"plugin {self.spec.plugin!r} timed out after {self.config.timeout}s") from None
            except OSError as exc:
                raise GenerationInfeasible(f"plugin {self.spec.plugin!r} could not start: {exc}") from None
            if proc.returncode != 0:
                raise GenerationInfeasible(
                    f"plugin {self.spec.plugin!r} exited with {proc.returncode}: {proc.stderr.strip()[:200]}"
                )
            try:
                payload = json.loads(resp.read_text())
                jsonschema.validate(payload, response_schema(n, d))
            except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
                raise GenerationInfeasible(f"plugin {self.spec.plugin!r} returned an invalid response: {exc}") from None
        out = np.asarray(payload["rows"], dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise GenerationInfeasible(f"plugin {self.spec.plugin!r} returned non-finite values")
        return out


def parse_plugins(raw: Mapping[str, Mapping] | None) -> dict[str, PluginConfig]:
    out = {}
    for name, cfg in (raw or {}).items():
        cmd = cfg["command"]
        if isinstance(cmd, str) or not isinstance(cmd, Sequence):
            raise ValueError(f"plugin {name!r}: command must be a list of strings")
        out[name] = PluginConfig(tuple(cmd), float(cfg.get("timeout", 600.0)), dict(cfg.get("env", {})))
    return out
