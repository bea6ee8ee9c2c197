"""Pydantic request/response models of the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class SynthRequest(BaseModel):
    pauli: str = Field(description="Pauli label, e.g. 'ZZZ'")
    delta: float
    coefficient: float = 1.0
    strategy: str = "auto"


class SynthResponse(BaseModel):
    method: str
    runtime_cost: float
    depth_cost: int
    verification_error: float | None
    flags: list[str]
    sequence: dict


class BoundsRequest(BaseModel):
    order: int
    n_layers: int
    lam: float
    total_time: float
    deltas: list[float]
    n_terms: int = 1
    n_clash: int = 0
    series_order: int | None = None
    family: str = "all"  # one family name or "all"


class BoundPoint(BaseModel):
    order: int
    family: str
    delta: float
    epsilon: float


class BoundsResponse(BaseModel):
    points: list[BoundPoint]


class LatticeParams(BaseModel):
    side: int = 5
    on_site: float = 1.0
    hopping: float = 1.0
    coupling_cap: float = 1.0
    fermions: int = 5


class CostRequest(BaseModel):
    lattice: LatticeParams = LatticeParams()
    encoding: str = "compact"
    strategy: str = "subcircuit"
    error_model: str = "per_time"
    order: int | str = "auto"
    eps_target: float = 0.1
    total_time: float = 7.0
    convention: str = "synthesized"


class CostResponse(BaseModel):
    encoding: str
    strategy: str
    error_model: str
    order: int
    delta0: float
    steps: int
    cost: float
    bound_family: str
    convention: str
    feasible: bool
    bound_estimate: float | None
    breakdown: dict


class TableRequest(BaseModel):
    side: int = 5
    total_time: float = 7.0
    eps_target: float = 0.1
    fermions: int = 5
    coupling_cap: float = 1.0


class NoiseRequest(BaseModel):
    lattice: LatticeParams = LatticeParams(side=3, fermions=2)
    strategy: str = "subcircuit"
    error_model: str = "per_time"
    order: int = 2
    eps_target: float = 0.1
    total_time: float = 4.0
    q: float = 1e-4
    mode: str = "per_gate"
    trials: int = 10_000
    seed: int
    threads: int = 1


class NoiseResponse(BaseModel):
    trials: int
    clean: float
    analytic_clean: float
    fractions: dict
    post_selection_overhead: float
    accepted_fraction: float
    undetected_error_fraction: float
    seed: int
    schedule_volume: int


class SimulateRequest(BaseModel):
    side: int = 2
    encoding: str = "compact"
    order: int = 2
    total_time: float = 1.0
    deltas: list[float]
    on_site: float = 1.0
    hopping: float = 1.0
    fermions: int = 2


class SimulatePoint(BaseModel):
    side: int
    encoding: str
    order: int
    total_time: float
    delta: float
    epsilon: float
    norm_method: str


class SimulateResponse(BaseModel):
    points: list[SimulatePoint]


class EncodeRequest(BaseModel):
    lattice: LatticeParams = LatticeParams(side=2, fermions=2)
    encoding: str = "compact"
    three_layers: bool = False
