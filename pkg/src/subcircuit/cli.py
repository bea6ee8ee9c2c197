"""Command-line entry point.

A thin client over the service layer: every subcommand builds the same
request models the HTTP API accepts and either invokes the handlers
in-process (default) or posts them to a running server via ``--server``.
Randomized commands require an explicit ``--seed`` or record the one they
generate.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

from .config import ExperimentConfig, load_config
from .service import models as m
from .service.app import (
    handle_bounds,
    handle_cost,
    handle_encode,
    handle_noise,
    handle_simulate,
    handle_synth,
    handle_table,
)

CSV_HEADER = "# schema=1"


def _emit(args, payload, csv_text=None):
    if getattr(args, "csv", False) and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(payload, indent=2, default=float)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _post(server, route, model):
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}{route}", json=model.model_dump(),
                      timeout=600.0)
    resp.raise_for_status()
    return resp.json()


def _call(args, route, handler, model):
    if args.server:
        return _post(args.server, route, model)
    result = handler(model)
    if hasattr(result, "model_dump"):
        return result.model_dump()
    return result


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    for name in (
        "side", "on_site", "hopping", "coupling_cap", "fermions", "encoding",
        "strategy", "error_model", "order", "eps_target", "total_time",
        "convention", "q", "noise_mode", "trials", "seed", "threads",
        "output",
    ):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg


def _lattice(cfg) -> m.LatticeParams:
    return m.LatticeParams(
        side=cfg.side, on_site=cfg.on_site, hopping=cfg.hopping,
        coupling_cap=cfg.coupling_cap, fermions=cfg.fermions,
    )


def cmd_synth(args):
    req = m.SynthRequest(
        pauli=args.pauli, delta=args.delta, coefficient=args.coefficient,
        strategy=args.strategy or "auto",
    )
    out = _call(args, "/synth", handle_synth, req)
    _emit(args, out)
    err = out.get("verification_error")
    return 0 if err is None or err <= 1e-9 else 1


def cmd_bounds(args):
    cfg = _config(args)
    deltas = [float(x) for x in args.deltas.split(",")]
    req = m.BoundsRequest(
        order=int(cfg.resolved_order()) if cfg.order != "auto" else args.order_fallback,
        n_layers=args.layers, lam=args.lam, total_time=cfg.total_time,
        deltas=deltas, n_terms=args.terms, n_clash=args.clash,
        family=args.family,
    )
    out = _call(args, "/bounds", handle_bounds, req)
    lines = [CSV_HEADER, "order,family,delta,epsilon"]
    for p in out["points"]:
        lines.append(f"{p['order']},{p['family']},{p['delta']},{p['epsilon']}")
    _emit(args, out, "\n".join(lines))
    return 0


def cmd_cost(args):
    cfg = _config(args)
    req = m.CostRequest(
        lattice=_lattice(cfg), encoding=cfg.encoding, strategy=cfg.strategy,
        error_model=cfg.error_model, order=cfg.resolved_order(),
        eps_target=cfg.eps_target, total_time=cfg.total_time,
        convention=cfg.convention,
    )
    if args.dry_run:
        out = _call(args, "/cost", handle_cost, req)
        plan = {k: out[k] for k in
                ("encoding", "strategy", "error_model", "order", "delta0",
                 "steps", "bound_family", "feasible")}
        _emit(args, {"plan": plan})
        return 0
    out = _call(args, "/cost", handle_cost, req)
    _emit(args, out)
    return 0 if out["feasible"] else 1


def cmd_table(args):
    cfg = _config(args)
    req = m.TableRequest(
        side=cfg.side, total_time=cfg.total_time, eps_target=cfg.eps_target,
        fermions=cfg.fermions, coupling_cap=cfg.coupling_cap,
    )
    out = _call(args, "/table", handle_table, req)
    from .costs import benchmark_csv

    _emit(args, out, benchmark_csv(out))
    return 0


def cmd_noise(args):
    cfg = _config(args)
    seed = cfg.seed
    generated = False
    if seed is None:
        seed = secrets.randbits(32)
        generated = True
    req = m.NoiseRequest(
        lattice=_lattice(cfg), strategy=cfg.strategy,
        error_model=cfg.error_model,
        order=2 if cfg.order == "auto" else int(cfg.order),
        eps_target=cfg.eps_target, total_time=cfg.total_time, q=cfg.q,
        mode=cfg.noise_mode, trials=cfg.trials, seed=seed,
        threads=max(1, cfg.threads),
    )
    out = _call(args, "/noise", handle_noise, req)
    if generated:
        out["generated_seed"] = seed
    _emit(args, out)
    return 0


def cmd_simulate(args):
    cfg = _config(args)
    deltas = [float(x) for x in args.deltas.split(",")]
    req = m.SimulateRequest(
        side=cfg.side, encoding=cfg.encoding,
        order=2 if cfg.order == "auto" else int(cfg.order),
        total_time=cfg.total_time, deltas=deltas, on_site=cfg.on_site,
        hopping=cfg.hopping, fermions=cfg.fermions,
    )
    out = _call(args, "/simulate", handle_simulate, req)
    lines = [CSV_HEADER, "side,encoding,order,total_time,delta,epsilon,norm_method"]
    for p in out["points"]:
        lines.append(
            f"{p['side']},{p['encoding']},{p['order']},{p['total_time']},"
            f"{p['delta']},{p['epsilon']},{p['norm_method']}"
        )
    _emit(args, out, "\n".join(lines))
    return 0


def cmd_encode(args):
    cfg = _config(args)
    req = m.EncodeRequest(
        lattice=_lattice(cfg), encoding=cfg.encoding,
        three_layers=args.three_layers,
    )
    out = _call(args, "/encode", handle_encode, req)
    _emit(args, out)
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_common(p):
    p.add_argument("--config", help="TOML experiment config")
    p.add_argument("--server", help="base URL of a running service")
    p.add_argument("--output", help="write result to a file")
    p.add_argument("--json", action="store_true", help="force JSON output")
    p.add_argument("--csv", action="store_true", help="CSV output where applicable")
    p.add_argument("--threads", type=int)
    for name, typ in (
        ("side", int), ("on-site", float), ("hopping", float),
        ("coupling-cap", float), ("fermions", int), ("encoding", str),
        ("strategy", str), ("error-model", str), ("order", str),
        ("eps-target", float), ("total-time", float), ("convention", str),
        ("q", float), ("noise-mode", str), ("trials", int), ("seed", int),
    ):
        p.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subcircuit",
        description="Pulse-level synthesis, Trotter bounds, costs and noise "
        "analysis for encoded Fermi-Hubbard simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="compile one Pauli exponential")
    p.add_argument("--pauli", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--coefficient", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bounds", help="Trotter error bound sweep (CSV)")
    p.add_argument("--deltas", required=True, help="comma separated")
    p.add_argument("--layers", type=int, default=5)
    p.add_argument("--lam", type=float, default=5.0)
    p.add_argument("--terms", type=int, default=1)
    p.add_argument("--clash", type=int, default=0)
    p.add_argument("--family", default="all")
    p.add_argument("--order-fallback", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("cost", help="simulation cost report")
    p.add_argument("--dry-run", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("table", help="benchmark cost tables")
    _add_common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("noise", help="syndrome-tracking Monte Carlo")
    _add_common(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("simulate", help="numeric Trotter error points (CSV)")
    p.add_argument("--deltas", required=True, help="comma separated")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("encode", help="dump encoded interaction layers")
    p.add_argument("--three-layers", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface diagnostics, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
