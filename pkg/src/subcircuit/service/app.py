"""FastAPI application exposing the toolkit's pipelines.

The handlers are plain functions over the pydantic models so the CLI can
call them in-process; the app simply routes to them.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..encodings import FermiHubbardSpec, encode, layers_to_json, regroup_three_layers_checked
from ..errors import SubcircuitError
from ..exactsim import numeric_epsilon
from ..costs import build_schedule, simulation_cost, table_benchmark
from ..noise import NoiseModel, run_monte_carlo
from ..pauli import PauliString, PauliTerm
from ..synthesis import sequence_to_json, synthesize
from ..trotter import BoundQuery, FAMILIES, evaluate_bound, tightest_bound
from .models import (
    BoundPoint,
    BoundsRequest,
    BoundsResponse,
    CostRequest,
    CostResponse,
    EncodeRequest,
    NoiseRequest,
    NoiseResponse,
    SimulatePoint,
    SimulateRequest,
    SimulateResponse,
    SynthRequest,
    SynthResponse,
    TableRequest,
)


def _spec(lattice) -> FermiHubbardSpec:
    return FermiHubbardSpec(
        side=lattice.side,
        on_site=lattice.on_site,
        hopping=lattice.hopping,
        coupling_cap=lattice.coupling_cap,
        fermion_count=lattice.fermions,
    )


def handle_synth(req: SynthRequest) -> SynthResponse:
    target = PauliTerm(PauliString(req.pauli), req.coefficient)
    rep = synthesize(target, req.delta, req.strategy)
    return SynthResponse(
        method=rep.method,
        runtime_cost=rep.runtime_cost,
        depth_cost=rep.depth_cost,
        verification_error=rep.verification_error,
        flags=list(rep.flags),
        sequence=json.loads(sequence_to_json(rep.sequence)),
    )


def handle_bounds(req: BoundsRequest) -> BoundsResponse:
    points = []
    for delta in req.deltas:
        q = BoundQuery(
            req.order, req.n_layers, req.lam, req.total_time, delta,
            req.n_terms, req.n_clash, req.series_order,
        )
        if req.family == "tightest":
            res = tightest_bound(q)
            points.append(
                BoundPoint(order=req.order, family=res.family, delta=delta,
                           epsilon=res.epsilon)
            )
            continue
        families = FAMILIES if req.family == "all" else (req.family,)
        for fam in families:
            res = evaluate_bound(q, fam)
            points.append(
                BoundPoint(order=req.order, family=fam, delta=delta,
                           epsilon=res.epsilon)
            )
    return BoundsResponse(points=points)


def handle_cost(req: CostRequest) -> CostResponse:
    rep = simulation_cost(
        _spec(req.lattice),
        req.encoding,
        req.strategy,
        req.error_model,
        req.eps_target,
        req.total_time,
        order=req.order,
        convention=req.convention,
    )
    return CostResponse(
        encoding=rep.encoding,
        strategy=rep.strategy,
        error_model=rep.error_model,
        order=rep.order,
        delta0=rep.delta0,
        steps=rep.steps,
        cost=rep.cost,
        bound_family=rep.bound_family,
        convention=rep.convention,
        feasible=rep.feasible,
        bound_estimate=rep.bound_estimate,
        breakdown=rep.breakdown,
    )


def handle_table(req: TableRequest) -> dict:
    return table_benchmark(
        side=req.side,
        total_time=req.total_time,
        eps_target=req.eps_target,
        fermions=req.fermions,
        coupling_cap=req.coupling_cap,
    )


def handle_noise(req: NoiseRequest) -> NoiseResponse:
    spec = _spec(req.lattice)
    cost = simulation_cost(
        spec, "compact", req.strategy, req.error_model, req.eps_target,
        req.total_time, order=req.order,
    )
    schedule = build_schedule(
        spec, "compact", req.strategy, cost.order, cost.delta0, cost.steps
    )
    summary = run_monte_carlo(
        schedule, NoiseModel(req.q, req.mode), req.trials, req.seed,
        spec=spec, threads=req.threads,
    )
    return NoiseResponse(
        trials=summary.trials,
        clean=summary.clean,
        analytic_clean=summary.analytic_clean,
        fractions=summary.fractions,
        post_selection_overhead=summary.post_selection_overhead,
        accepted_fraction=summary.accepted_fraction,
        undetected_error_fraction=summary.undetected_error_fraction,
        seed=summary.seed,
        schedule_volume=schedule.volume,
    )


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    spec = FermiHubbardSpec(
        side=req.side, on_site=req.on_site, hopping=req.hopping,
        fermion_count=req.fermions,
    )
    layout, layers = encode(spec, req.encoding)
    from ..trotter import build_formula

    formula = build_formula(req.order, len(layers))
    points = []
    for delta in req.deltas:
        pt = numeric_epsilon(
            formula, layers, layout.total_qubits, req.total_time, delta,
            side=req.side, encoding=req.encoding,
        )
        points.append(
            SimulatePoint(
                side=pt.side, encoding=pt.encoding, order=pt.order,
                total_time=pt.total_time, delta=pt.delta, epsilon=pt.epsilon,
                norm_method=pt.norm_method,
            )
        )
    return SimulateResponse(points=points)


def handle_encode(req: EncodeRequest) -> dict:
    spec = _spec(req.lattice)
    if req.three_layers:
        layers = regroup_three_layers_checked(spec, req.encoding)
        from ..encodings import build_layout

        layout = build_layout(spec, req.encoding)
    else:
        layout, layers = encode(spec, req.encoding)
    return json.loads(layers_to_json(spec, layout, layers))


def create_app() -> FastAPI:
    app = FastAPI(title="subcircuit", version=__version__)

    def wrap(handler, req):
        try:
            return handler(req)
        except SubcircuitError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest):
        return wrap(handle_synth, req)

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds(req: BoundsRequest):
        return wrap(handle_bounds, req)

    @app.post("/cost", response_model=CostResponse)
    def cost(req: CostRequest):
        return wrap(handle_cost, req)

    @app.post("/table")
    def table(req: TableRequest):
        return wrap(handle_table, req)

    @app.post("/noise", response_model=NoiseResponse)
    def noise(req: NoiseRequest):
        return wrap(handle_noise, req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        return wrap(handle_simulate, req)

    @app.post("/encode")
    def encode_route(req: EncodeRequest):
        return wrap(handle_encode, req)

    return app
