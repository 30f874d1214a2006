"""Run configuration: built-in defaults < TOML file < command-line flags."""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .linalg import Tolerance

DEFAULTS: dict[str, Any] = {
    "grid": 360,
    "window": 16,
    "max_degree": 4,
    "budget": None,
    "seed": 0,
    "threads": 1,
    "tolerance": {"algebraic": 1e-10, "spectral": 1e-8, "grid": 1e-3},
}


def load_toml(path: str | Path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def merge(defaults: dict, *layers: dict) -> dict:
    """Later layers win; ``None`` values never override."""
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in defaults.items()}
    for layer in layers:
        for k, v in layer.items():
            if v is None:
                continue
            if isinstance(v, dict) and isinstance(out.get(k), dict):
                out[k] = merge(out[k], v)
            else:
                out[k] = v
    return out


def resolve(config_path: str | None, flags: dict) -> dict:
    file_layer = load_toml(config_path) if config_path else {}
    unknown = set(file_layer) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return merge(DEFAULTS, file_layer, flags)


def tolerance_of(cfg: dict) -> Tolerance:
    t = cfg["tolerance"]
    return Tolerance(float(t["algebraic"]), float(t["spectral"]), float(t["grid"]))
