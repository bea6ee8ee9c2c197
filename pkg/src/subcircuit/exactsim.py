"""Ground-truth evolution for small instances.

Exact and Trotterized propagators for layered Hamiltonians, operator-norm
Trotter errors, numeric step-size optimization and the step-size
extrapolation fit.  Dense matrices are used up to ``DENSE_CAP`` qubits;
beyond that states are propagated matrix-free and norms estimated by
power iteration on D†D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityLimitError, FitRankError
from .pauli import PauliTerm, pauli_matrix
from .trotter import ProductFormula

DENSE_CAP = 12
MATRIX_FREE_CAP = 22


# ---------------------------------------------------------------------------
# State-vector term application (matrix-free)
# ---------------------------------------------------------------------------


from functools import lru_cache


@lru_cache(maxsize=4096)
def _term_action_cached(letters: str):
    """(flip_mask, phase_vector) such that P|x> = phase[x] |x ^ flip>."""
    n_qubits = len(letters)
    dim = 1 << n_qubits
    flip = 0
    phase = np.ones(dim, dtype=complex)
    idx = np.arange(dim)
    for q, letter in enumerate(letters):
        if letter == "I":
            continue
        bitpos = n_qubits - 1 - q  # qubit 0 = leftmost tensor factor
        bit = (idx >> bitpos) & 1
        if letter == "X":
            flip ^= 1 << bitpos
        elif letter == "Y":
            flip ^= 1 << bitpos
            # Y|0> = i|1>, Y|1> = -i|0>; phase depends on the source bit.
            phase = phase * np.where(bit, -1j, 1j)
        else:  # Z
            phase = phase * np.where(bit, -1.0, 1.0)
    phase.setflags(write=False)
    return flip, phase


def _term_action(term: PauliTerm, n_qubits: int):
    assert term.n_qubits == n_qubits
    return _term_action_cached(term.string.letters)


def apply_pauli_term(state: np.ndarray, term: PauliTerm, n_qubits: int) -> np.ndarray:
    flip, phase = _term_action(term, n_qubits)
    out = (phase * state)[np.arange(len(state)) ^ flip]
    return term.coefficient * out


def apply_term_exponential(
    state: np.ndarray, term: PauliTerm, angle: float, n_qubits: int
) -> np.ndarray:
    """exp(-i*angle*c*P)|state> via the closed form for Pauli strings."""
    theta = angle * term.coefficient
    flip, phase = _term_action(term, n_qubits)
    moved = (phase * state)[np.arange(len(state)) ^ flip]
    return math.cos(theta) * state - 1j * math.sin(theta) * moved


def apply_layer_exponential(state, layer, angle: float, n_qubits: int):
    """Layer terms commute, so the layer exponential is their product."""
    for t in layer.terms:
        state = apply_term_exponential(state, t, angle, n_qubits)
    return state


# ---------------------------------------------------------------------------
# Dense propagators
# ---------------------------------------------------------------------------


def layer_matrix(layer, n_qubits: int) -> np.ndarray:
    h = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
    for t in layer.terms:
        h += t.coefficient * pauli_matrix(t.string.letters)
    return h


def hamiltonian_matrix(layers, n_qubits: int) -> np.ndarray:
    h = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
    for layer in layers:
        h += layer_matrix(layer, n_qubits)
    return h


def exact_unitary(layers, n_qubits: int, total_time: float) -> np.ndarray:
    """Dense exp(-i H T) by eigendecomposition."""
    if n_qubits > DENSE_CAP:
        raise CapacityLimitError(f"{n_qubits} qubits beyond dense cap {DENSE_CAP}")
    h = hamiltonian_matrix(layers, n_qubits)
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * total_time * vals)) @ vecs.conj().T


def _apply_term_exponential_left(u: np.ndarray, term_, theta: float, n_qubits):
    """exp(-i*theta*P) @ u via the permutation action of P on rows."""
    flip, phase = _term_action(term_, n_qubits)
    perm = np.arange(u.shape[0]) ^ flip
    moved = phase[perm, None] * u[perm, :]
    return math.cos(theta) * u - 1j * math.sin(theta) * moved


def layer_exponential_matrix(layer, n_qubits: int, angle: float) -> np.ndarray:
    """Dense exp(-i*angle*H_layer) as a product of term exponentials."""
    u = np.eye(1 << n_qubits, dtype=complex)
    for t in layer.terms:
        u = _apply_term_exponential_left(u, t, angle * t.coefficient, n_qubits)
    return u


def trotter_step_matrix(formula: ProductFormula, layers, n_qubits: int, delta: float):
    if n_qubits > DENSE_CAP:
        raise CapacityLimitError(f"{n_qubits} qubits beyond dense cap {DENSE_CAP}")
    dim = 1 << n_qubits
    u = np.eye(dim, dtype=complex)
    for direction, coeff in formula.stage_coeffs:
        order = layers if direction > 0 else list(reversed(layers))
        for layer in order:
            angle = float(coeff) * delta
            for t in layer.terms:
                u = _apply_term_exponential_left(
                    u, t, angle * t.coefficient, n_qubits
                )
    return u


def trotter_apply(formula, layers, n_qubits, delta, state):
    """One Trotter step applied matrix-free to a state vector."""
    for direction, coeff in formula.stage_coeffs:
        order = layers if direction > 0 else list(reversed(layers))
        for layer in order:
            state = apply_layer_exponential(state, layer, float(coeff) * delta, n_qubits)
    return state


def exact_apply(layers, n_qubits, total_time, state):
    """exp(-i H T)|state>, dense below the cap, else Krylov matrix-free."""
    if n_qubits <= DENSE_CAP:
        return exact_unitary(layers, n_qubits, total_time) @ state
    if n_qubits > MATRIX_FREE_CAP:
        raise CapacityLimitError(f"{n_qubits} qubits beyond matrix-free cap")
    from scipy.sparse.linalg import LinearOperator, expm_multiply

    dim = 1 << n_qubits
    terms = [t for layer in layers for t in layer.terms]

    def matvec(v):
        out = np.zeros(dim, dtype=complex)
        for t in terms:
            out += apply_pauli_term(v, t, n_qubits)
        return -1j * total_time * out

    op = LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    return expm_multiply(op, state.astype(complex))


# ---------------------------------------------------------------------------
# Numeric Trotter error
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericErrorPoint:
    side: int
    encoding: str
    order: int
    total_time: float
    delta: float
    epsilon: float
    norm_method: str


def operator_norm(matrix: np.ndarray) -> float:
    """Spectral norm via the Gram matrix (faster than a full SVD here)."""
    gram = matrix.conj().T @ matrix
    top = float(np.linalg.eigvalsh(gram)[-1])
    return math.sqrt(max(top, 0.0))


def trotter_error_dense(formula, layers, n_qubits, total_time, delta) -> float:
    steps = max(1, round(total_time / delta))
    u = exact_unitary(layers, n_qubits, total_time)
    step = trotter_step_matrix(formula, layers, n_qubits, delta)
    p = np.linalg.matrix_power(step, steps)
    return operator_norm(u - p)


def trotter_error_matrix_free(
    formula, layers, n_qubits, total_time, delta, seed=0, restarts=3, tol=1e-6
) -> float:
    """Power iteration on D†D with D = U(T) - P(delta)^steps, matrix-free."""
    steps = max(1, round(total_time / delta))
    dim = 1 << n_qubits

    def apply_u(v):
        return exact_apply(layers, n_qubits, total_time, v)

    def apply_p(v):
        for _ in range(steps):
            v = trotter_apply(formula, layers, n_qubits, delta, v)
        return v

    def apply_d_dagger_d(v):
        dv = apply_u(v) - apply_p(v)
        # D† x = U†x - (P^steps)†x; adjoints via negative times.
        ux = exact_apply(layers, n_qubits, -total_time, dv)
        pv = dv
        for _ in range(steps):
            pv = trotter_apply_adjoint(formula, layers, n_qubits, delta, pv)
        return ux - pv

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(400):
            w = apply_d_dagger_d(v)
            new = float(np.real(np.vdot(v, w)))
            nw = np.linalg.norm(w)
            if nw == 0:
                break
            v = w / nw
            if abs(new - lam) <= tol * max(new, 1e-30):
                lam = new
                break
            lam = new
        best = max(best, lam)
    return math.sqrt(max(best, 0.0))


def trotter_apply_adjoint(formula, layers, n_qubits, delta, state):
    for direction, coeff in reversed(formula.stage_coeffs):
        order = list(reversed(layers)) if direction > 0 else layers
        for layer in order:
            state = apply_layer_exponential(
                state, layer, -float(coeff) * delta, n_qubits
            )
    return state


def numeric_epsilon(
    formula, layers, n_qubits, total_time, delta, side=0, encoding=""
) -> NumericErrorPoint:
    if n_qubits <= DENSE_CAP:
        eps = trotter_error_dense(formula, layers, n_qubits, total_time, delta)
        method = "dense_svd"
    else:
        eps = trotter_error_matrix_free(formula, layers, n_qubits, total_time, delta)
        method = "power_iteration"
    return NumericErrorPoint(
        side, encoding, formula.order, total_time, delta, eps, method
    )


def numeric_delta0(
    formula, layers, n_qubits, total_time, eps_target, rel_tol=1e-4
) -> float:
    """Largest delta with numeric error <= target, by bracketed bisection."""

    def eps(d):
        return numeric_epsilon(formula, layers, n_qubits, total_time, d).epsilon

    hi = total_time
    while eps(hi) > eps_target and hi > 1e-8:
        hi /= 2
    if hi <= 1e-8:
        return hi
    lo = hi
    hi = min(2 * hi, total_time)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if eps(mid) <= eps_target:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Step-size extrapolation fit
# ---------------------------------------------------------------------------


def fit_extrapolation(points):
    """Fit delta0 = (a0 + b0/T^(1/p)) * (a1 + b1/Lambda^((p+1)/p)).

    ``points`` is a list of (order, total_time, lam, delta0).  The product
    form has a scale gauge; it is fixed by a1 = 1.  Returns the parameter
    tuple (a0, b0, a1, b1) and the residual RMS.
    """
    if len(points) < 8:
        raise FitRankError("need at least 8 points across T and Lambda")
    orders = {p for p, *_ in points}
    if len(orders) != 1:
        raise FitRankError("fit one formula order at a time")
    p = orders.pop()
    x = np.array([1.0 / t ** (1.0 / p) for _, t, _, _ in points])
    y = np.array([1.0 / lam ** ((p + 1.0) / p) for _, _, lam, _ in points])
    z = np.array([d for *_, d in points])
    design = np.stack([np.ones_like(x), x, y, x * y], axis=1)
    if np.linalg.matrix_rank(design) < 4:
        raise FitRankError("design matrix is rank deficient; vary T and Lambda")
    coeffs, *_ = np.linalg.lstsq(design, z, rcond=None)
    a, b, c, d = coeffs  # a0*a1, b0*a1, a0*b1, b0*b1
    # Nearest rank-one factorization of [[a, c], [b, d]] fixes the gauge.
    m = np.array([[a, c], [b, d]])
    u, s, vt = np.linalg.svd(m)
    left = u[:, 0] * s[0]
    right = vt[0]
    if right[0] == 0:
        raise FitRankError("degenerate factorization")
    scale = right[0]
    a0, b0 = left * scale
    a1, b1 = right / scale
    pred = (a0 + b0 * x) * (a1 + b1 * y)
    rms = float(np.sqrt(np.mean((pred - z) ** 2)))
    return (float(a0), float(b0), float(a1), float(b1)), rms


def extrapolate_delta0(params, order, total_time, lam) -> float:
    a0, b0, a1, b1 = params
    x = 1.0 / total_time ** (1.0 / order)
    y = 1.0 / lam ** ((order + 1.0) / order)
    return (a0 + b0 * x) * (a1 + b1 * y)
