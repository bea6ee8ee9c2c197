"""Experiment configuration files: TOML key/value with strict validation.

Precedence is command-line flags > config file > built-in defaults.
Unknown keys are rejected so stale configs fail loudly.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ExperimentConfig:
    side: int = 5
    on_site: float = 1.0
    hopping: float = 1.0
    coupling_cap: float = 1.0
    fermions: int = 5
    encoding: str = "compact"
    strategy: str = "subcircuit"
    error_model: str = "per_time"
    order: str = "auto"  # "auto" or an integer literal
    eps_target: float = 0.1
    total_time: float = 7.0
    convention: str = "synthesized"
    q: float = 1e-4
    noise_mode: str = "per_gate"
    q_grid: list = field(default_factory=list)
    trials: int = 10_000
    seed: int | None = None
    threads: int = 1
    output: str | None = None

    def resolved_order(self):
        return "auto" if self.order == "auto" else int(self.order)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "order" in raw:
        raw["order"] = str(raw["order"])
    return ExperimentConfig(**raw)
