"""Stochastic depolarizing-noise analysis with syndrome tracking.

Noise model: after every Trotter-layer slot each qubit is hit by a
depolarizing channel, with probability ``q`` per slot (per-gate mode) or
``min(1, q * slot duration)`` (per-time mode); X, Y, Z each occur with a
third of the error probability.  Errors are mapped to stabilizer-syndrome
bit flips through a data-driven table for the compact encoding (main-text
convention: vertex-Z errors are undetectable fermionic phase noise, all
face errors and vertex X/Y are detectable).  Syndrome bits accumulate
mod 2, so flips can cancel; a single final readout of all stabilizers
plus a global parity bit decides the run's classification:

* ``clean``                 - no net error;
* ``detectable``            - some syndrome bit still set at readout;
* ``undetectable_phase``    - only phase-noise errors occurred, no bit
                              was ever flipped;
* ``undetectable_nonphase`` - bits were flipped but all cancelled;
* ``intra_decomposition``   - at least one error landed inside a gate
                              decomposition (standard strategy only; the
                              short-pulse strategy commutes such errors
                              to the slot boundary with an O(sqrt(t))
                              residual charged separately).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .costs import CompiledSchedule, build_schedule, simulation_cost
from .encodings import FermiHubbardSpec, build_layout, _has_face_ancilla
from .errors import UnsupportedEncodingError

BINS = ("detectable", "undetectable_phase", "undetectable_nonphase",
        "intra_decomposition")

_TRIAL_CHUNK = 20_000


# ---------------------------------------------------------------------------
# Syndrome map
# ---------------------------------------------------------------------------

DEFAULT_SYNDROME_TABLE = [
    # Main-text error mapping: vertex Z = undetectable phase noise.
    {"qubit_class": "vertex", "pauli": "X", "syndrome_bits": ["face", "parity"],
     "phase_noise": False},
    {"qubit_class": "vertex", "pauli": "Y", "syndrome_bits": ["face", "parity"],
     "phase_noise": False},
    {"qubit_class": "vertex", "pauli": "Z", "syndrome_bits": [],
     "phase_noise": True},
    {"qubit_class": "face", "pauli": "X", "syndrome_bits": ["face"],
     "phase_noise": False},
    {"qubit_class": "face", "pauli": "Y", "syndrome_bits": ["face", "parity"],
     "phase_noise": False},
    {"qubit_class": "face", "pauli": "Z", "syndrome_bits": ["face"],
     "phase_noise": False},
]


def packaged_syndrome_table():
    """The error-mapping table shipped with the package.

    Swapping in an alternative convention (e.g. the appendix variant with
    face-Z as the phase-noise channel) is a one-file edit of
    ``data/syndrome_map_compact.json``.
    """
    from importlib import resources

    path = resources.files("subcircuit").joinpath(
        "data/syndrome_map_compact.json"
    )
    return load_syndrome_table(path.read_text())


def syndrome_table_json() -> str:
    return json.dumps(DEFAULT_SYNDROME_TABLE, indent=2)


def load_syndrome_table(text: str):
    table = json.loads(text)
    for row in table:
        for key in ("qubit_class", "pauli", "syndrome_bits", "phase_noise"):
            if key not in row:
                raise ValueError(f"syndrome table row missing {key!r}")
    return table


@dataclass(frozen=True)
class SyndromeMap:
    """Per-(qubit, Pauli) syndrome-bit masks for one compact layout.

    Bit 0 is the global parity; one bit per face ancilla follows.  The
    ``face`` slot of the table resolves to the qubit's own bit for face
    qubits and to the nearest ancilla face's bit for vertex qubits.
    """

    n_bits: int
    masks: np.ndarray  # (n_qubits, 3) uint64, paulis ordered X, Y, Z
    phase: np.ndarray  # (n_qubits, 3) bool


def build_syndrome_map(spec: FermiHubbardSpec, table=None) -> SyndromeMap:
    layout = build_layout(spec, "compact")
    if table is None:
        try:
            table = packaged_syndrome_table()
        except (FileNotFoundError, ModuleNotFoundError):
            table = DEFAULT_SYNDROME_TABLE
    rows = {(r["qubit_class"], r["pauli"]): r for r in table}
    L = spec.side
    face_bit: dict[int, int] = {}
    next_bit = 1  # bit 0 = global parity
    for s in (0, 1):
        for fr in range(L - 1):
            for fc in range(L - 1):
                if _has_face_ancilla(fr, fc):
                    face_bit[layout.face(s, fr, fc)] = next_bit
                    next_bit += 1

    def nearest_face_bit(s, r, c):
        for fr in (r - 1, r):
            for fc in (c - 1, c):
                if 0 <= fr < L - 1 and 0 <= fc < L - 1 and _has_face_ancilla(fr, fc):
                    return face_bit[layout.face(s, fr, fc)]
        return None

    n_qubits = layout.total_qubits
    masks = np.zeros((n_qubits, 3), dtype=np.uint64)
    phase = np.zeros((n_qubits, 3), dtype=bool)
    own_face = {}
    for s in (0, 1):
        for r in range(L):
            for c in range(L):
                own_face[layout.vertex(s, r, c)] = nearest_face_bit(s, r, c)
    for q in range(n_qubits):
        cls = "face" if q in face_bit else "vertex"
        for k, pauli in enumerate("XYZ"):
            row = rows[(cls, pauli)]
            mask = 0
            for slot in row["syndrome_bits"]:
                if slot == "parity":
                    mask |= 1
                elif slot == "face":
                    bit = face_bit[q] if cls == "face" else own_face[q]
                    if bit is not None:
                        mask |= 1 << bit
                else:
                    raise ValueError(f"unknown syndrome slot {slot!r}")
            masks[q, k] = mask
            phase[q, k] = row["phase_noise"]
    return SyndromeMap(next_bit, masks, phase)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    q: float
    mode: str = "per_gate"  # or per_time

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.mode not in ("per_gate", "per_time"):
            raise ValueError("mode must be per_gate or per_time")


@dataclass(frozen=True)
class NoiseSummary:
    trials: int
    clean: float
    fractions: dict
    confidence: dict
    post_selection_overhead: float
    accepted_fraction: float
    commuted_events_mean: float
    commuted_residual: float
    seed: int
    analytic_clean: float

    @property
    def undetected_error_fraction(self) -> float:
        """The error budget consumer: undetectable non-phase plus
        intra-decomposition runs."""
        return (
            self.fractions["undetectable_nonphase"]
            + self.fractions["intra_decomposition"]
        )


def _slot_probability(slot, model: NoiseModel) -> float:
    if model.mode == "per_gate":
        return model.q
    return min(1.0, model.q * slot.duration)


def analytic_clean_probability(
    schedule: CompiledSchedule, model: NoiseModel
) -> float:
    logp = 0.0
    for slot in schedule.slots:
        p = _slot_probability(slot, model)
        if p >= 1.0:
            return 0.0
        logp += slot.repeats * schedule.n_qubits * math.log1p(-p)
    return math.exp(logp)


def _wilson(successes: int, total: int, z: float = 1.96):
    if total == 0:
        return 0.0, 1.0
    ph = successes / total
    den = 1 + z**2 / total
    center = (ph + z**2 / (2 * total)) / den
    half = z * math.sqrt(ph * (1 - ph) / total + z**2 / (4 * total**2)) / den
    return max(0.0, center - half), min(1.0, center + half)


def _run_chunk(seed, chunk_index, n, classes, nq, commute_out,
               flat_masks, flat_phase, event_log=None, trial_base=0):
    rng = np.random.default_rng(np.random.Philox(key=[seed, chunk_index]))
    syndrome = np.zeros(n, dtype=np.uint64)
    any_bit = np.zeros(n, dtype=bool)
    any_phase = np.zeros(n, dtype=bool)
    any_intra = np.zeros(n, dtype=bool)
    commuted = np.zeros(n, dtype=np.int64)
    for p, depth, positions in classes:
        if p == 0.0 or positions == 0:
            continue
        k = rng.binomial(positions, p, size=n)
        total = int(k.sum())
        if total == 0:
            continue
        trial_of = np.repeat(np.arange(n), k)
        qubits = rng.integers(0, nq, size=total)
        paulis = rng.integers(0, 3, size=total)
        # Position 0 is the slot boundary; 1..depth are inside the
        # decomposition's pulse layers.
        pos = rng.integers(0, depth + 1, size=total)
        intra = pos > 0
        if commute_out:
            commuted_evt = intra
            intra = np.zeros_like(intra)
        else:
            commuted_evt = np.zeros_like(intra)
        masks = flat_masks[qubits * 3 + paulis]
        phase_evt = flat_phase[qubits * 3 + paulis]
        if event_log is not None:
            for i in range(total):
                event_log.write(json.dumps({
                    "trial": trial_base + int(trial_of[i]),
                    "qubit": int(qubits[i]),
                    "pauli": "XYZ"[int(paulis[i])],
                    "intra": bool(pos[i] > 0),
                }) + "\n")
        apply = ~intra  # intra errors are not mapped through the table
        np.bitwise_xor.at(syndrome, trial_of[apply], masks[apply])
        np.logical_or.at(any_bit, trial_of[apply & (masks != 0)], True)
        np.logical_or.at(any_phase, trial_of[apply & phase_evt], True)
        np.logical_or.at(any_intra, trial_of[intra], True)
        np.add.at(commuted, trial_of, commuted_evt.astype(np.int64))
    had_event = any_bit | any_phase | any_intra
    is_clean = ~had_event
    bin_intra = any_intra & ~is_clean
    bin_detect = ~bin_intra & (syndrome != 0)
    bin_nonphase = ~bin_intra & ~bin_detect & any_bit
    bin_phase = ~bin_intra & ~bin_detect & ~any_bit & any_phase
    return {
        "clean": int(is_clean.sum()),
        "intra_decomposition": int(bin_intra.sum()),
        "detectable": int(bin_detect.sum()),
        "undetectable_nonphase": int(bin_nonphase.sum()),
        "undetectable_phase": int(bin_phase.sum()),
        "accepted": int((syndrome == 0).sum()),
        "commuted": int(commuted.sum()),
    }


def run_monte_carlo(
    schedule: CompiledSchedule,
    model: NoiseModel,
    trials: int,
    seed: int,
    syndrome_map: SyndromeMap | None = None,
    spec: FermiHubbardSpec | None = None,
    threads: int = 1,
    event_log=None,
) -> NoiseSummary:
    """Sample error histories and classify each trial into the four bins.

    Defined for compact-encoding schedules only (the syndrome table is
    compact-specific).  Deterministic given (seed, trials) regardless of
    ``threads``: trials are processed in fixed chunks, each keyed by its
    own counter-based generator, and chunk tallies merge by addition.
    ``event_log`` optionally streams one JSON line per sampled error (its
    use forces single-threaded chunk order).
    """
    if schedule.encoding != "compact":
        raise UnsupportedEncodingError("syndrome tracking requires compact")
    if syndrome_map is None:
        if spec is None:
            spec = FermiHubbardSpec(side=schedule.side)
        syndrome_map = build_syndrome_map(spec)
    nq = schedule.n_qubits
    classes = [
        (_slot_probability(s, model), s.depth, s.repeats * nq)
        for s in schedule.slots
    ]
    commute_out = schedule.strategy == "subcircuit"
    max_pulse = max((s.duration / max(s.depth, 1) for s in schedule.slots),
                    default=0.0)
    kappa = 2 * math.sqrt(2 * max_pulse)

    flat_masks = syndrome_map.masks.reshape(-1)
    flat_phase = syndrome_map.phase.reshape(-1)
    chunks = []
    done = 0
    while done < trials:
        n = min(_TRIAL_CHUNK, trials - done)
        chunks.append((len(chunks), n))
        done += n

    def work(chunk):
        index, n = chunk
        return _run_chunk(seed, index, n, classes, nq, commute_out,
                          flat_masks, flat_phase, event_log,
                          index * _TRIAL_CHUNK)

    if threads > 1 and len(chunks) > 1 and event_log is None:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(work, chunks))
    else:
        tallies = [work(c) for c in chunks]

    counts = {b: sum(t[b] for t in tallies) for b in BINS}
    clean_count = sum(t["clean"] for t in tallies)
    accepted = sum(t["accepted"] for t in tallies)
    commuted_total = sum(t["commuted"] for t in tallies)

    fractions = {b: counts[b] / trials for b in BINS}
    confidence = {b: _wilson(counts[b], trials) for b in BINS}
    confidence["clean"] = _wilson(clean_count, trials)
    acc_frac = accepted / trials
    overhead = math.inf if accepted == 0 else trials / accepted
    commuted_mean = commuted_total / trials
    return NoiseSummary(
        trials=trials,
        clean=clean_count / trials,
        fractions=fractions,
        confidence=confidence,
        post_selection_overhead=overhead,
        accepted_fraction=acc_frac,
        commuted_events_mean=commuted_mean,
        commuted_residual=commuted_mean * kappa,
        seed=seed,
        analytic_clean=analytic_clean_probability(schedule, model),
    )


@dataclass(frozen=True)
class InjectedEvent:
    slot_index: int
    qubit: int
    pauli: str  # X, Y or Z
    intra: bool = False


def classify_injection(
    schedule: CompiledSchedule,
    events: list[InjectedEvent],
    syndrome_map: SyndromeMap | None = None,
    spec: FermiHubbardSpec | None = None,
) -> str:
    """Deterministic single-run classification for a fixed event list."""
    if syndrome_map is None:
        if spec is None:
            spec = FermiHubbardSpec(side=schedule.side)
        syndrome_map = build_syndrome_map(spec)
    commute_out = schedule.strategy == "subcircuit"
    syndrome = 0
    any_bit = any_phase = any_intra = False
    for e in events:
        intra = e.intra and not commute_out
        if intra:
            any_intra = True
            continue
        k = "XYZ".index(e.pauli)
        mask = int(syndrome_map.masks[e.qubit, k])
        syndrome ^= mask
        if mask:
            any_bit = True
        if syndrome_map.phase[e.qubit, k]:
            any_phase = True
    if not (any_bit or any_phase or any_intra):
        return "clean"
    if any_intra:
        return "intra_decomposition"
    if syndrome != 0:
        return "detectable"
    if any_bit:
        return "undetectable_nonphase"
    return "undetectable_phase"


# ---------------------------------------------------------------------------
# Analytic bounds and searches
# ---------------------------------------------------------------------------


def trivial_bound(volume: float, q: float | None = None,
                  eps_target: float | None = None) -> float:
    """Zero-error bound: eps = 1-(1-q)^V, or its inverse q(V, eps)."""
    if volume < 0:
        raise ValueError("volume must be nonnegative")
    if (q is None) == (eps_target is None):
        raise ValueError("pass exactly one of q, eps_target")
    if q is not None:
        if volume == 0:
            return 0.0
        return 1.0 - (1.0 - q) ** volume
    if volume == 0:
        return 1.0
    return 1.0 - (1.0 - eps_target) ** (1.0 / volume)


def max_q_search(
    schedule: CompiledSchedule,
    eps_target: float,
    trials: int,
    seed: int = 0,
    mode: str = "per_gate",
    eps_trotter: float = 0.0,
    q_floor: float = 1e-8,
    q_ceiling: float = 0.5,
) -> dict:
    """Largest q whose undetected-error fraction stays below the target.

    Coarse factor-sqrt(10) log grid, refined to factor 10^(1/8); the
    fraction is judged by its 95% Wilson upper bound.  The combined error
    sqrt(eps_trotter^2 + eps_s^2) is reported for the winner.
    """
    if not 0 < eps_target < 1:
        raise ValueError("eps_target must be in (0, 1)")

    def admissible(q):
        summary = run_monte_carlo(schedule, NoiseModel(q, mode), trials, seed)
        bad = (
            summary.fractions["undetectable_nonphase"]
            + summary.fractions["intra_decomposition"]
        )
        n_bad = round(bad * trials)
        upper = _wilson(n_bad, trials)[1]
        return upper <= eps_target, summary

    coarse = 10 ** np.arange(
        math.log10(q_floor), math.log10(q_ceiling) + 0.25, 0.5
    )
    best_q, best_summary, flags = None, None, []
    for q in coarse:
        ok, summary = admissible(float(q))
        if ok:
            best_q, best_summary = float(q), summary
        else:
            break
    if best_q is None:
        return {"q_max": q_floor, "flags": ["at_grid_floor"], "summary": None}
    fine = best_q * 10 ** (np.arange(1, 4) / 8.0)
    for q in fine:
        if q > q_ceiling:
            break
        ok, summary = admissible(float(q))
        if not ok:
            break
        best_q, best_summary = float(q), summary
    eps_s = best_summary.undetected_error_fraction
    combined = math.sqrt(eps_trotter**2 + eps_s**2)
    return {
        "q_max": best_q,
        "flags": flags,
        "summary": best_summary,
        "eps_s": eps_s,
        "combined_error": combined,
    }


def feasible_time_table(
    side: int,
    q_values,
    eps_target: float = 0.1,
    encodings=("compact", "vc"),
    strategies=("standard", "subcircuit"),
    error_models=("per_time", "per_gate"),
    mitigation_options=(False, True),
    fermions: int = 5,
    overhead_cap: float = 1e4,
    t_ceiling: float = 1024.0,
    order: int | str = "auto",
    splits=(0.15, 0.3, 0.5, 0.7, 0.85, 0.95),
) -> list[dict]:
    """Largest feasible simulation time per configuration row.

    Feasibility at time T: there is a Trotter split eps_t <= eps_target
    with combined error sqrt(eps_t^2 + eps_s^2 (+ eps_c^2)) <= eps_target,
    where eps_s uses the zero-error (trivial) stochastic bound on the
    compiled volume - with mitigation, only >= 2 simultaneous errors count
    (first-order non-phase errors are detected and post-selected away) -
    and eps_c is the commuting-out residual.  Mitigation rows enforce the
    post-selection overhead cap and exist only for the short-pulse
    strategy in the compact encoding.
    """
    spec = FermiHubbardSpec(side=side, fermion_count=min(fermions, 2 * side**2))
    rows = []

    def eps_components(model, enc, strat, mitig, q, T, split):
        cost = simulation_cost(
            spec, enc, strat, model, split * eps_target, T, order=order
        )
        if not cost.feasible:
            return None
        sched = build_schedule(
            spec, enc, strat, cost.order, cost.delta0, cost.steps
        )
        mdl = NoiseModel(q, "per_time" if model == "per_time" else "per_gate")
        clean = analytic_clean_probability(sched, mdl)
        p_any = 1.0 - clean
        eps_t = split * eps_target
        if not mitig:
            return eps_t, p_any, 0.0, 1.0, cost
        # Expected error count over the volume; >= 2 needed to slip past
        # post-selection undetected (to first order).
        mean = sum(
            _slot_probability(s, mdl) * s.repeats * sched.n_qubits
            for s in sched.slots
        )
        p_two = max(0.0, 1.0 - math.exp(-mean) * (1.0 + mean))
        max_pulse = max(
            (s.duration / max(s.depth, 1) for s in sched.slots), default=0.0
        )
        eps_c = mean * 2 * math.sqrt(2 * max_pulse)
        overhead = math.inf if clean == 0 else 1.0 / clean
        return eps_t, p_two, eps_c, overhead, cost

    for model in error_models:
        for enc in encodings:
            for strat in strategies:
                for mitig in mitigation_options:
                    if mitig and (strat != "subcircuit" or enc != "compact"):
                        continue
                    for q in q_values:

                        def feasible(T):
                            for split in splits:
                                parts = eps_components(
                                    model, enc, strat, mitig, q, T, split
                                )
                                if parts is None:
                                    continue
                                eps_t, eps_s, eps_c, overhead, cost = parts
                                total = math.sqrt(
                                    eps_t**2 + eps_s**2 + eps_c**2
                                )
                                if total <= eps_target and overhead <= overhead_cap:
                                    return cost
                            return None

                        lo, hi = 0.0, None
                        t = 0.25
                        best_cost = None
                        while t <= t_ceiling:
                            cost = feasible(t)
                            if cost is None:
                                hi = t
                                break
                            lo, best_cost = t, cost
                            t *= 2
                        if hi is not None and lo > 0:
                            for _ in range(10):
                                mid = 0.5 * (lo + hi)
                                cost = feasible(mid)
                                if cost is None:
                                    hi = mid
                                else:
                                    lo, best_cost = mid, cost
                        rows.append({
                            "error_model": model,
                            "encoding": enc,
                            "decomposition": strat,
                            "mitigation": mitig,
                            "q": q,
                            "t_target": lo,
                            "delta0": None if best_cost is None else best_cost.delta0,
                            "steps": None if best_cost is None else best_cost.steps,
                            "cost": None if best_cost is None else best_cost.cost,
                        })
    return rows
