"""Job configuration: JSON files merged with command-line flags, validated before any work."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..decompose import SolverOptions


class ConfigError(ValueError):
    pass


_COMMON = {"seed": int, "out": str}
_GRID = {"grid": (int, list, dict), "dim": int}
SCHEMAS: dict[str, dict[str, Any]] = {
    "verify": {**_COMMON, "only": (list, str), "fault": dict, "suites": dict},
    "gen-tuple": {**_COMMON, **_GRID, "q": int, "h": int, "max_retries": int},
    "decompose": {**_COMMON, **_GRID, "sigma": dict, "q": int, "opts": dict, "tol": float},
    "dbar": {**_COMMON, **_GRID, "beta": dict, "q": int, "opts": dict, "tol": float},
    "realize": {**_COMMON, **_GRID, "sigma": dict, "q": int, "opts": dict, "tol": float},
    "lemma": {**_COMMON, "mode": str, "n": int, "q": int, "trials": int, "subsets": list,
              "max_subsets": int, "mc_m": int, "mc_q": int, "mc_trials": int},
    "bounds": {"m": int, "k": int, "out": str},
}


@dataclass
class JobConfig:
    command: str
    values: dict = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def grid_mn(self, default_m: int = 4, default_n: int = 16) -> tuple[int, int]:
        g = self.values.get("grid", default_n)
        m = self.values.get("dim", default_m)
        if isinstance(g, dict):
            extra = set(g) - {"m", "n"}
            if extra:
                raise ConfigError(f"unknown grid keys {sorted(extra)}")
            return int(g.get("m", m)), int(g["n"])
        if isinstance(g, list):
            if not g or len(set(g)) != 1:
                raise ConfigError("grid must have the same number of points on every axis")
            return len(g), int(g[0])
        return int(m), int(g)

    def solver_options(self) -> SolverOptions:
        opts = dict(self.values.get("opts") or {})
        if "tol" in self.values:
            opts["residual_target"] = float(self.values["tol"])
        try:
            return SolverOptions.from_dict(opts)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def _check_type(key: str, value, expected) -> None:
    types = expected if isinstance(expected, tuple) else (expected,)
    if float in types and isinstance(value, int) and not isinstance(value, bool):
        return
    if isinstance(value, bool) or not isinstance(value, types):
        names = "/".join(t.__name__ for t in types)
        raise ConfigError(f"config key {key!r} must be {names}, got {type(value).__name__}")


def load_config(command: str, path: str | None, flags: dict) -> JobConfig:
    """Merge a JSON config file with flags (flags win) and validate against the command schema."""
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    values: dict = {}
    if path:
        try:
            values = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config must be a JSON object")
    values.update({k: v for k, v in flags.items() if v is not None})
    schema = SCHEMAS[command]
    unknown = set(values) - set(schema)
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {sorted(unknown)}")
    for key, value in values.items():
        _check_type(key, value, schema[key])
    return JobConfig(command, values)
