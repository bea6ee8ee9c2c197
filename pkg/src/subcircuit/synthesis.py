"""Lowering of multi-qubit Pauli exponentials to two-qubit pulse sequences.

The target is always exp(i*t*P) for a weight-k Pauli P.  Available
primitives are arbitrary single-qubit rotations (free in both cost
models) and two-qubit pulses exp(i*s*(sigma x sigma')) with a continuous,
signed pulse time s.  Three exact lowering routes are implemented:

* conjugation - nested pi/4 conjugations down to one short pulse, cost
  (k-2)*pi/2 + |t|;
* the four-pulse identity for weight-3 targets, cost <= 2*sqrt(2t);
* the five-factor identity for weight-4 targets (an inner weight-3 gate
  per factor), cost <= 7*t^(1/3) for t below ``DEPTH5_AUTO_LIMIT``.

All routes are verified against dense matrices; pulse-time formulas use
the atan2(y, x) reading of the two-argument arctangent, pinned by those
checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SynthesisValidityError
from .pauli import (
    DenseUnitary,
    PauliString,
    PauliTerm,
    distance_up_to_phase,
    embed,
    pauli_exponential,
)

# Letter pairs (M, N) with M*N = i*L, used to split a target across a bond.
_SPLIT = {"Z": ("X", "Y"), "X": ("Y", "Z"), "Y": ("Z", "X")}

# phi = (PHI_COEFF * t)^(1/3) minimizes the five-factor cost expansion.
PHI_COEFF = (3 + 2 * math.sqrt(2)) / 4

# Validity ceiling of the 7*t^(1/3) bound for the automatic phi choice.
DEPTH5_AUTO_LIMIT = 0.33

VERIFY_QUBIT_CAP = 10


@dataclass(frozen=True)
class Pulse:
    """One pulse exp(i*time*P) with P two-local on ``pair``.

    Single-qubit rotations ride along as one-element pairs; they carry no
    cost in either model but are needed to reproduce the unitary.
    """

    pair: tuple[int, ...]
    letters: str
    time: float

    @property
    def is_rotation(self) -> bool:
        return len(self.pair) == 1

    def term(self, n_qubits: int) -> PauliTerm:
        return PauliTerm(embed(self.letters, self.pair, n_qubits), 1.0)


@dataclass(frozen=True)
class PulseSequence:
    """Alternating single-qubit / two-qubit layers, single-qubit implicit.

    ``layers[k]`` holds the non-overlapping pulses of two-qubit layer k in
    application order (layers[0] acts first).  Single-qubit basis changes
    are absorbed into the pulse letters and recovered on export.
    """

    n_qubits: int
    layers: tuple[tuple[Pulse, ...], ...]

    def __post_init__(self):
        for layer in self.layers:
            seen: set[int] = set()
            for p in layer:
                if set(p.pair) & seen:
                    raise ValueError("overlapping pulses in one layer")
                seen |= set(p.pair)

    @property
    def runtime_cost(self) -> float:
        """Sum over layers of the largest absolute two-qubit pulse time."""
        total = 0.0
        for layer in self.layers:
            times = [abs(p.time) for p in layer if not p.is_rotation]
            if times:
                total += max(times)
        return total

    @property
    def depth_cost(self) -> int:
        """Number of two-qubit layers (single-qubit layers are free)."""
        return sum(
            1
            for layer in self.layers
            if any(not p.is_rotation for p in layer)
        )

    @property
    def pulses(self) -> tuple[Pulse, ...]:
        return tuple(p for layer in self.layers for p in layer)


def normalize_time(t: float) -> float:
    """Fold a pulse time into (-pi, pi]; exp(i t ZZ) has period 2*pi."""
    t = math.fmod(t, 2 * math.pi)
    if t > math.pi:
        t -= 2 * math.pi
    elif t <= -math.pi:
        t += 2 * math.pi
    return t


def sequence_unitary(seq: PulseSequence) -> DenseUnitary:
    u = np.eye(2**seq.n_qubits, dtype=complex)
    for layer in seq.layers:
        for p in layer:
            u = pauli_exponential(p.term(seq.n_qubits), p.time).entries @ u
    return DenseUnitary(u)


def sequence_to_json(seq: PulseSequence) -> str:
    doc = {
        "n_qubits": seq.n_qubits,
        "layers": [
            [
                {
                    "pair": list(p.pair),
                    "time": repr(p.time),
                    "generator": "ZZ",
                    "basis": list(p.letters),
                }
                for p in layer
            ]
            for layer in seq.layers
        ],
    }
    return json.dumps(doc, indent=2)


def sequence_from_json(text: str) -> PulseSequence:
    doc = json.loads(text)
    layers = tuple(
        tuple(
            Pulse(tuple(p["pair"]), "".join(p["basis"]), float(p["time"]))
            for p in layer
        )
        for layer in doc["layers"]
    )
    return PulseSequence(doc["n_qubits"], layers)


@dataclass(frozen=True)
class SynthesisReport:
    sequence: PulseSequence
    method: str
    runtime_cost: float
    depth_cost: int
    verification_error: float | None
    flags: tuple[str, ...] = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# Exact pulse-time formulas
# ---------------------------------------------------------------------------


def depth4_times(t: float) -> tuple[float, float, int]:
    """Pulse times (t1, t2, form) of the four-factor identity at target t.

    Form 0 covers t in [0, pi/2] u [pi, 3pi/2] with
    U = e^{i t1 h1} e^{i t2 h2} e^{i t2 h1} e^{i t1 h2}; form 1 covers the
    complementary ranges with the sign-flipped variant.  The branch with
    t1 <= 0 <= t2 near 0 is taken (signs pinned by the dense checks).
    """
    t = math.fmod(t, 2 * math.pi)
    if t < 0:
        t += 2 * math.pi
    s, c = math.sin(t), math.cos(t)
    s2 = math.sin(2 * t)
    if s2 >= 0:  # [0, pi/2] u [pi, 3pi/2]
        root = math.sqrt(s2)
        t1 = 0.5 * math.atan2(-root / (s + c), 1.0 / (s + c))
        t2 = 0.5 * math.atan2(root, c - s)
        return t1, t2, 0
    root = math.sqrt(-s2)
    t1 = 0.5 * math.atan2(root / (c - s), 1.0 / (c - s))
    t2 = 0.5 * math.atan2(root, s + c)
    return t1, t2, 1


def depth5_times(t: float, phi: float) -> tuple[float, float]:
    """Pulse times (t1, t2) of the five-factor identity at target t.

    Requires cos(2t) >= cos(4*phi); the positive branch is used, giving
    t1 <= 0 <= t2 for small t.
    """
    disc = math.cos(2 * t) - math.cos(4 * phi)
    if disc < -1e-15:
        raise SynthesisValidityError(
            f"discriminant cos(2t)-cos(4phi) = {disc:.3e} < 0; adjust phi"
        )
    disc = max(disc, 0.0)
    csc2p = 1.0 / math.sin(2 * phi)
    sec = 1.0 / math.cos(t)
    x1 = math.sqrt(2) * sec * csc2p * math.sqrt(disc)
    y1 = -2 * math.tan(t) * (math.cos(2 * phi) * csc2p)
    t1 = 0.5 * math.atan2(y1, x1)
    x2 = csc2p * math.sqrt(disc) / math.sqrt(2)
    y2 = math.sin(t) * csc2p
    t2 = math.atan2(y2, x2)
    return t1, t2


def depth3_times(theta: float, t: float) -> tuple[float, float]:
    """Pulse times for U = e^{i t1 h1} e^{i t2 h2} e^{i t1 h1} producing
    evolution under cos(theta) h1 + sin(theta) h2 for time t."""
    root = math.sqrt(max(1.0 - (math.sin(theta) * math.sin(t)) ** 2, 0.0))
    t1 = 0.5 * math.atan2(math.cos(theta) * math.sin(t) / root, math.cos(t) / root)
    t2 = math.atan2(math.sin(theta) * math.sin(t), root)
    return t1, t2


# ---------------------------------------------------------------------------
# Virtual factors: weight-w Pauli rotations prior to final lowering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Factor:
    letters: str
    support: tuple[int, ...]
    time: float


def _split_bond(letters: str, support: tuple[int, ...]):
    """h1 = L_a M_b on the first bond and the residual N_b R, such that
    -i h1 h2 equals the target Pauli."""
    a_letter, b_letter = letters[0], letters[1]
    m, n = _SPLIT[b_letter]
    h1 = _Factor(a_letter + m, support[:2], 0.0)
    h2 = _Factor(n + letters[2:], support[1:], 0.0)
    return h1, h2


def _conjugation_factors(letters: str, support, t: float) -> list[_Factor]:
    """Nested pi/4-conjugation factors, application order."""
    if len(letters) <= 2:
        return [_Factor(letters, support, t)]
    h1, h2 = _split_bond(letters, support)
    inner = _conjugation_factors(h2.letters, h2.support, t)
    wrap = _Factor(h1.letters, h1.support, math.pi / 4)
    return [replace(wrap)] + inner + [replace(wrap, time=-math.pi / 4)]


def _depth4_factors(letters: str, support, t: float) -> list[_Factor]:
    t1, t2, form = depth4_times(t)
    h1, h2 = _split_bond(letters, support)
    sign = 1.0 if form == 0 else -1.0
    # Application order (rightmost operator factor first).
    return [
        _Factor(h2.letters, h2.support, sign * t1),
        _Factor(h1.letters, h1.support, sign * t2),
        _Factor(h2.letters, h2.support, t2),
        _Factor(h1.letters, h1.support, t1),
    ]


def _depth5_factors(letters: str, support, t: float, phi: float) -> list[_Factor]:
    t1, t2 = depth5_times(t, phi)
    h1, h2 = _split_bond(letters, support)
    return [
        _Factor(h2.letters, h2.support, t1),
        _Factor(h1.letters, h1.support, phi),
        _Factor(h2.letters, h2.support, t2),
        _Factor(h1.letters, h1.support, -phi),
        _Factor(h2.letters, h2.support, t1),
    ]


def _negate_via_conjugation(factors: list[_Factor], support) -> list[_Factor]:
    """Flip the implemented target time by a free single-qubit conjugation.

    Conjugating by a Pauli that anticommutes with the target on qubit
    ``support[0]`` negates every factor acting there with an anticommuting
    letter, at zero cost.
    """
    a = support[0]
    out = []
    for f in factors:
        if a in f.support:
            la = f.letters[f.support.index(a)]
            if la != "I":
                out.append(replace(f, time=-f.time))
                continue
        out.append(f)
    return out


def _lower_subcircuit(letters: str, support, t: float) -> list[_Factor]:
    """Recursive lowering of a weight-k factor to two-local factors."""
    k = len(letters)
    if t == 0.0:
        return []
    if k <= 2:
        return [_Factor(letters, support, t)]
    if t < 0:
        pos = _lower_subcircuit(letters, support, -t)
        return _negate_via_conjugation(pos, support)
    if k == 3:
        return _depth4_factors(letters, support, t)
    if t > DEPTH5_AUTO_LIMIT:
        raise SynthesisValidityError(
            f"t={t} beyond the automatic-phi validity range for weight {k}"
        )
    phi = (PHI_COEFF * t) ** (1.0 / (k - 1))
    factors = _depth5_factors(letters, support, t, phi)
    out: list[_Factor] = []
    for f in factors:
        if len(f.letters) > 2:
            out.extend(_lower_subcircuit(f.letters, f.support, f.time))
        else:
            out.append(f)
    return out


def _factors_to_sequence(factors: list[_Factor], n_qubits: int) -> PulseSequence:
    layers = []
    for f in factors:
        if abs(f.time) < 1e-300:
            continue
        layers.append((Pulse(tuple(f.support), f.letters, normalize_time(f.time)),))
    return PulseSequence(n_qubits, tuple(layers))


def _compress(term: PauliTerm) -> tuple[str, tuple[int, ...]]:
    sup = term.string.support
    return "".join(term.string.letters[q] for q in sup), sup


def _verify(seq: PulseSequence, target: PauliTerm, angle: float) -> float | None:
    """Distance of the compiled unitary from exp(i*angle*P), computed on
    the target's support register (pulses never leave it)."""
    support = target.string.support
    if not support:
        support = (0,)
    if len(support) > VERIFY_QUBIT_CAP:
        return None
    pos = {q: k for k, q in enumerate(support)}
    local_layers = []
    for layer in seq.layers:
        local_layers.append(
            tuple(
                Pulse(tuple(pos[q] for q in p.pair), p.letters, p.time)
                for p in layer
            )
        )
    local = PulseSequence(len(support), tuple(local_layers))
    u = sequence_unitary(local)
    letters = "".join(target.string.letters[q] for q in support)
    ref = pauli_exponential(PauliTerm(PauliString(letters), 1.0), angle)
    return distance_up_to_phase(u, ref)


def _report(factors, n_qubits, target, angle, method, flags=()):
    seq = _factors_to_sequence(factors, n_qubits)
    err = _verify(seq, target, angle)
    return SynthesisReport(
        seq, method, seq.runtime_cost, seq.depth_cost, err, tuple(flags)
    )


# ---------------------------------------------------------------------------
# Public decomposition entry points
# ---------------------------------------------------------------------------


def conjugation_decompose(target: PauliTerm, delta: float) -> SynthesisReport:
    """Nested-conjugation lowering; runtime (k-2)*pi/2 + |delta*c|."""
    angle = delta * target.coefficient
    letters, support = _compress(target)
    if len(letters) < 2:
        return _report([], target.n_qubits, target, angle, "conjugation")
    factors = _conjugation_factors(letters, support, angle)
    return _report(factors, target.n_qubits, target, angle, "conjugation")


def cnot_conjugation_decompose(target: PauliTerm, delta: float) -> SynthesisReport:
    """Conjugation all the way to fixed pi/4 pulses plus free rotations.

    This is the standard-gate-set reference: a weight-k rotation costs
    (k-1)*pi/2 of pulse time in 2(k-1) pulses, independent of delta.
    """
    angle = delta * target.coefficient
    letters, support = _compress(target)
    if len(letters) < 2:
        return _report([], target.n_qubits, target, angle, "conjugation_cnot")
    # Extend by one conjugation so the data-dependent rotation is 1-local.
    factors = _conjugation_factors(letters, support, angle)
    mid = len(factors) // 2
    leaf = factors[mid]
    h1, h2 = _split_bond(leaf.letters, leaf.support)
    expanded = (
        factors[:mid]
        + [
            replace(h1, time=math.pi / 4),
            _Factor(h2.letters, h2.support, leaf.time),  # 1-local, free
            replace(h1, time=-math.pi / 4),
        ]
        + factors[mid + 1 :]
    )
    return _report(expanded, target.n_qubits, target, angle, "conjugation_cnot")


def depth4_decompose(h1: PauliTerm, h2: PauliTerm, t: float) -> SynthesisReport:
    """Four-factor lowering of exp(i t H) with H = [h1, h2]/(2i).

    ``h1`` and ``h2`` must anticommute and square to the identity (unit
    coefficients); each factor is itself lowered if not two-local.
    """
    _require_anticommuting(h1, h2)
    t1, t2, form = depth4_times(t)
    sign = 1.0 if form == 0 else -1.0
    pieces = [
        (h2, sign * t1),
        (h1, sign * t2),
        (h2, t2),
        (h1, t1),
    ]
    factors = []
    for term_, time_ in pieces:
        letters, support = _compress(term_)
        factors.extend(_lower_subcircuit(letters, support, time_))
    n = h1.n_qubits
    target = _commutator_target(h1, h2)
    return _report(factors, n, target, t, "depth4")


def depth5_decompose(
    h1: PauliTerm, h2: PauliTerm, t: float, phi: float | None = None
) -> SynthesisReport:
    """Five-factor lowering of exp(i t H), H = [h1, h2]/(2i).

    With ``phi=None`` the cost-optimal phi = (PHI_COEFF*t)^(1/3) is used,
    valid for t <= DEPTH5_AUTO_LIMIT.
    """
    _require_anticommuting(h1, h2)
    flags = []
    if phi is None:
        if t > DEPTH5_AUTO_LIMIT:
            raise SynthesisValidityError(
                f"t={t} beyond automatic-phi range (<= {DEPTH5_AUTO_LIMIT}); "
                "pass phi explicitly or fall back to conjugation"
            )
        phi = (PHI_COEFF * t) ** (1 / 3) if t > 0 else 0.0
        flags.append("auto_phi")
    t1, t2 = depth5_times(t, phi) if t != 0 or phi != 0 else (0.0, 0.0)
    pieces = [(h2, t1), (h1, phi), (h2, t2), (h1, -phi), (h2, t1)]
    factors = []
    for term_, time_ in pieces:
        letters, support = _compress(term_)
        factors.extend(_lower_subcircuit(letters, support, time_))
    target = _commutator_target(h1, h2)
    return _report(factors, h1.n_qubits, target, t, "depth5", flags)


def depth3_decompose(
    h1: PauliTerm, h2: PauliTerm, theta: float, t: float
) -> SynthesisReport:
    """Three-factor synthesis of exp(i t (cos(theta) h1 + sin(theta) h2))."""
    _require_anticommuting(h1, h2)
    t1, t2 = depth3_times(theta, t)
    factors = []
    for term_, time_ in ((h1, t1), (h2, t2), (h1, t1)):
        letters, support = _compress(term_)
        factors.extend(_lower_subcircuit(letters, support, time_))
    n = h1.n_qubits
    seq = _factors_to_sequence(factors, n)
    err = None
    if n <= VERIFY_QUBIT_CAP:
        u = sequence_unitary(seq)
        h = math.cos(theta) * h1.matrix() + math.sin(theta) * h2.matrix()
        from scipy.linalg import expm

        ref = DenseUnitary(expm(1j * t * h))
        err = distance_up_to_phase(u, ref)
    return SynthesisReport(seq, "depth3", seq.runtime_cost, seq.depth_cost, err)


def _require_anticommuting(h1: PauliTerm, h2: PauliTerm):
    from .pauli import anticommutes

    if not anticommutes(h1.string, h2.string):
        raise SynthesisValidityError("h1 and h2 must anticommute")
    if abs(abs(h1.coefficient) - 1) > 1e-12 or abs(abs(h2.coefficient) - 1) > 1e-12:
        raise SynthesisValidityError("h1 and h2 must carry unit coefficients")


def _commutator_target(h1: PauliTerm, h2: PauliTerm) -> PauliTerm:
    from .pauli import pauli_product

    phase, string = pauli_product(h1.string, h2.string)
    coeff = (phase / 1j).real * h1.coefficient * h2.coefficient
    return PauliTerm(string, float(coeff))


def synthesize(
    target: PauliTerm,
    delta: float,
    strategy: str = "auto",
    min_pulse_time: float = 0.0,
) -> SynthesisReport:
    """Compile exp(i*delta*c*P) into a pulse sequence.

    ``standard`` uses the conjugation route, ``subcircuit`` the short-pulse
    identities (falling back to conjugation, flagged, outside their
    validity range), ``auto`` whichever has the smaller runtime.  Pulses
    shorter than the hardware floor ``min_pulse_time`` are flagged, never
    silently clamped.
    """
    if strategy == "auto":
        std = synthesize(target, delta, "standard", min_pulse_time)
        sub = synthesize(target, delta, "subcircuit", min_pulse_time)
        rep = sub if sub.runtime_cost < std.runtime_cost else std
        return rep
    angle = delta * target.coefficient
    letters, support = _compress(target)
    k = len(letters)
    if k == 0 or angle == 0.0:
        rep = _report([], target.n_qubits, target, angle, strategy)
    elif strategy == "standard":
        if k == 1:
            rep = _report([], target.n_qubits, target, angle, "conjugation")
        else:
            rep = conjugation_decompose(target, delta)
    elif strategy != "subcircuit":
        raise ValueError(f"unknown strategy {strategy!r}")
    elif k <= 2:
        factors = [_Factor(letters, support, angle)]
        rep = _report(factors, target.n_qubits, target, angle, "pulse")
    else:
        try:
            factors = _lower_subcircuit(letters, support, angle)
            method = "depth4" if k == 3 else "depth5"
            rep = _report(factors, target.n_qubits, target, angle, method)
        except SynthesisValidityError:
            rep = conjugation_decompose(target, delta)
            rep = replace(rep, flags=rep.flags + ("subcircuit_fallback",))
    if min_pulse_time > 0.0 and any(
        not p.is_rotation and abs(p.time) < min_pulse_time
        for p in rep.sequence.pulses
    ):
        rep = replace(rep, flags=rep.flags + ("below_min_pulse_time",))
    return rep


def subcircuit_cost_bound(weight: int, t: float) -> float:
    """Analytic runtime bound of the short-pulse lowering of Z^(x)weight."""
    t = abs(t)
    if weight <= 1:
        return 0.0
    if weight == 2:
        return t
    if weight == 3:
        return 2 * math.sqrt(2 * t)
    if weight == 4:
        return 7 * t ** (1 / 3)
    return 7 * weight * t ** (1.0 / (weight - 1))  # loose generic envelope


def crossover_delta(weight: int) -> float:
    """Target time below which the short-pulse route beats conjugation."""
    from scipy.optimize import brentq

    conj = lambda t: (weight - 2) * math.pi / 2 + t

    def gap(t):
        return subcircuit_cost_bound(weight, t) - conj(t)

    hi = DEPTH5_AUTO_LIMIT if weight >= 4 else math.pi / 2
    if gap(hi) < 0:
        return hi
    return float(brentq(gap, 1e-12, hi))


# ---------------------------------------------------------------------------
# Optimality search over short gate sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParetoPoint:
    cost: float
    error: float
    generators: tuple[tuple[tuple[int, int], str], ...]
    times: tuple[float, ...]


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[ParetoPoint, ...]
    zero_error_cost: float | None
    partial: bool
    seed: int


def _skeletons(k: int, length: int):
    """Two-local generator sequences modulo qubit permutation and mirror."""
    import itertools

    pairs = list(itertools.combinations(range(k), 2))
    letters = [a + b for a in "XYZ" for b in "XYZ"]
    gens = [(p, l) for p in pairs for l in letters]
    perms = list(itertools.permutations(range(k)))

    def relabel(seq, perm):
        out = []
        for (a, b), l in seq:
            na, nb = perm[a], perm[b]
            if na > nb:
                na, nb = nb, na
                l = l[::-1]
            out.append(((na, nb), l))
        return tuple(out)

    seen = set()
    for seq in itertools.product(gens, repeat=length):
        if any(seq[i] == seq[i + 1] for i in range(length - 1)):
            continue  # adjacent equal generators merge
        support = set()
        for (a, b), _ in seq:
            support |= {a, b}
        if len(support) < k:
            continue
        canon = min(
            min(relabel(seq, perm), relabel(seq[::-1], perm)) for perm in perms
        )
        if canon in seen:
            continue
        seen.add(canon)
        yield seq


def optimality_search(
    k: int,
    length: int,
    target_time: float,
    budget: int = 200_000,
    seed: int = 7,
    grid_points: int = 9,
    n_bins: int = 64,
    extra_times=(),
    skeletons=None,
) -> ParetoFront:
    """Grid/random search for cheap approximate syntheses of exp(i T Z^k).

    Enumerates canonical two-local gate skeletons of the given length and
    searches pulse-time tuples in [-pi/2, pi/2]^length (the target time and
    +-pi/4 are always included in the grid).  Returns binned (error, cost)
    minima; ``zero_error_cost`` is the cheapest tuple reproducing the
    target to 1e-9.  ``skeletons`` restricts the scan to an explicit list
    of ((pair, letters), ...) sequences.
    """
    if k > 3 or length > 5:
        raise ValueError("search is desk-scale: k <= 3 and length <= 5")
    rng = np.random.default_rng(seed)
    dim = 2**k
    target = pauli_exponential(
        PauliTerm(PauliString("Z" * k), 1.0), target_time
    ).entries

    base = np.linspace(-math.pi / 2, math.pi / 2, grid_points)
    extra = np.array(
        [target_time, -target_time, math.pi / 4, -math.pi / 4]
        + [s * t for t in extra_times for s in (1, -1)]
    )
    axis = np.unique(np.concatenate([base, extra]))

    max_cost = length * math.pi / 2
    bin_edges = np.linspace(0.0, max_cost, n_bins + 1)
    best_err = np.full(n_bins, np.inf)
    best_point: list[ParetoPoint | None] = [None] * n_bins
    zero_cost = math.inf
    zero_point = None
    partial = False
    evaluated = 0

    from .pauli import pauli_matrix

    skeleton_iter = _skeletons(k, length) if skeletons is None else skeletons
    for skel in skeleton_iter:
        mats = []
        for (a, b), l in skel:
            letters = ["I"] * k
            letters[a], letters[b] = l[0], l[1]
            mats.append(pauli_matrix("".join(letters)))

        n_tuples = len(axis) ** length
        if evaluated + n_tuples > budget:
            remaining = budget - evaluated
            if remaining <= 0:
                partial = True
                break
            tuples = axis[rng.integers(0, len(axis), size=(remaining, length))]
            partial = True
        else:
            grids = np.meshgrid(*([axis] * length), indexing="ij")
            tuples = np.stack([g.ravel() for g in grids], axis=1)
        evaluated += len(tuples)

        # Product over subsets: U = prod_j (cos t_j I + i sin t_j G_j),
        # expanded once per skeleton into 2^length fixed matrices.
        subset_mats = np.empty((2**length, dim, dim), dtype=complex)
        for mask in range(2**length):
            m = np.eye(dim, dtype=complex)
            for j in range(length - 1, -1, -1):  # application order
                if (mask >> j) & 1:
                    m = mats[j] @ m
            subset_mats[mask] = m
        cos_t, sin_t = np.cos(tuples), np.sin(tuples)
        coeffs = np.ones((len(tuples), 2**length), dtype=complex)
        for j in range(length):
            bit = (np.arange(2**length) >> j) & 1
            coeffs *= np.where(bit, 1j * sin_t[:, j : j + 1], cos_t[:, j : j + 1])
        units = coeffs @ subset_mats.reshape(2**length, dim * dim)
        diffs = units - target.ravel()
        fro = np.linalg.norm(diffs, axis=1)
        costs = np.abs(tuples).sum(axis=1)

        bins = np.clip(np.digitize(costs, bin_edges) - 1, 0, n_bins - 1)
        for b in np.unique(bins):
            sel = bins == b
            i = np.argmin(fro[sel])
            idx = np.nonzero(sel)[0][i]
            if fro[idx] < best_err[b]:
                u = units[idx].reshape(dim, dim)
                err2 = float(np.linalg.norm(u - target, 2))
                if err2 < best_err[b]:
                    best_err[b] = err2
                    best_point[b] = ParetoPoint(
                        float(costs[idx]), err2, skel, tuple(tuples[idx])
                    )
        near = np.nonzero(fro <= 1e-8)[0]
        for idx in near:
            if costs[idx] < zero_cost:
                u = units[idx].reshape(dim, dim)
                err2 = float(np.linalg.norm(u - target, 2))
                if err2 <= 1e-9:
                    zero_cost = float(costs[idx])
                    zero_point = ParetoPoint(
                        zero_cost, err2, skel, tuple(tuples[idx])
                    )

    points = tuple(p for p in best_point if p is not None)
    return ParetoFront(
        points,
        None if zero_point is None else zero_cost,
        partial,
        seed,
    )
