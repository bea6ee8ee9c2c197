"""Exact Pauli-string algebra and small dense unitaries.

This module is the verification oracle for the rest of the package: gate
decompositions, encodings and product formulas are all checked against
dense matrices built here.  Qubit 0 is the *leftmost* tensor factor, both
in string labels ("IZX" puts Z on qubit 1) and in Kronecker products.
Dense matrices are capped at ``DENSE_QUBIT_CAP`` qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityLimitError, DimensionMismatchError

PAULI_LETTERS = "IXYZ"

DENSE_QUBIT_CAP = 14

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Paulis, e.g. ``PauliString("XZY")``.

    Squares to the identity and is Hermitian; the qubit count is implied by
    the label length.
    """

    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in PAULI_LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli label {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity tensor factors."""
        return sum(1 for c in self.letters if c != "I")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")

    def __str__(self) -> str:
        return self.letters

    def matrix(self) -> np.ndarray:
        return pauli_matrix(self.letters)


@dataclass(frozen=True)
class PauliTerm:
    """A Pauli string with a real coefficient."""

    string: PauliString
    coefficient: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")

    @property
    def n_qubits(self) -> int:
        return self.string.n_qubits

    def matrix(self) -> np.ndarray:
        return self.coefficient * self.string.matrix()

    def __str__(self) -> str:
        return f"{self.coefficient:+g}*{self.string}"


def term(letters: str, coefficient: float = 1.0) -> PauliTerm:
    """Shorthand constructor, ``term("XZY", -0.5)``."""
    return PauliTerm(PauliString(letters), coefficient)


def embed(letters_on_support: str, support: tuple[int, ...], n_qubits: int) -> PauliString:
    """Place ``letters_on_support[k]`` on qubit ``support[k]``, identity elsewhere."""
    if len(letters_on_support) != len(support):
        raise DimensionMismatchError("support/letters length mismatch")
    out = ["I"] * n_qubits
    for q, c in zip(support, letters_on_support):
        if out[q] != "I":
            raise ValueError(f"qubit {q} assigned twice")
        out[q] = c
    return PauliString("".join(out))


def restrict_to_support(terms) -> tuple[list[PauliTerm], tuple[int, ...]]:
    """Re-express terms on the compact register of their joint support.

    Returns the rewritten terms and the original qubit indices in register
    order; useful for dense checks of terms living on a large layout.
    """
    support = sorted({q for t in terms for q in t.string.support})
    pos = {q: k for k, q in enumerate(support)}
    out = []
    for t in terms:
        letters = ["I"] * len(support)
        for q in t.string.support:
            letters[pos[q]] = t.string.letters[q]
        out.append(PauliTerm(PauliString("".join(letters)), t.coefficient))
    return out, tuple(support)


def commutes(a: PauliString, b: PauliString) -> bool:
    """Whether two Pauli strings commute.

    They commute iff the number of positions where both letters are
    non-identity and different is even.
    """
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"length mismatch: {a.n_qubits} vs {b.n_qubits}"
        )
    clashes = sum(
        1
        for x, y in zip(a.letters, b.letters)
        if x != "I" and y != "I" and x != y
    )
    return clashes % 2 == 0


def anticommutes(a: PauliString, b: PauliString) -> bool:
    return not commutes(a, b)


def pauli_product(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product a*b as ``(phase, string)`` with phase in {1, -1, i, -i}."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError("length mismatch")
    table = {
        ("I", "I"): (1, "I"),
        ("X", "X"): (1, "I"),
        ("Y", "Y"): (1, "I"),
        ("Z", "Z"): (1, "I"),
        ("X", "Y"): (1j, "Z"),
        ("Y", "X"): (-1j, "Z"),
        ("Y", "Z"): (1j, "X"),
        ("Z", "Y"): (-1j, "X"),
        ("Z", "X"): (1j, "Y"),
        ("X", "Z"): (-1j, "Y"),
    }
    phase = 1 + 0j
    out = []
    for x, y in zip(a.letters, b.letters):
        if x == "I":
            out.append(y)
        elif y == "I":
            out.append(x)
        else:
            p, c = table[(x, y)]
            phase *= p
            out.append(c)
    return phase, PauliString("".join(out))


@lru_cache(maxsize=4096)
def pauli_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli string (qubit 0 leftmost Kronecker factor)."""
    n = len(letters)
    if n > DENSE_QUBIT_CAP:
        raise CapacityLimitError(
            f"{n} qubits exceeds dense cap of {DENSE_QUBIT_CAP}"
        )
    m = _SINGLE[letters[0]]
    for c in letters[1:]:
        m = np.kron(m, _SINGLE[c])
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class DenseUnitary:
    """Dense complex matrix together with its dimension.

    Construction does not verify unitarity (that is an invariant asserted
    in tests via :func:`unitarity_defect`).
    """

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "DenseUnitary":
        return DenseUnitary(self.entries.conj().T)

    def __matmul__(self, other: "DenseUnitary") -> "DenseUnitary":
        return DenseUnitary(self.entries @ other.entries)


def identity(n_qubits: int) -> DenseUnitary:
    return DenseUnitary(np.eye(2**n_qubits, dtype=complex))


def unitarity_defect(u: DenseUnitary) -> float:
    """Spectral-norm deviation of U†U from the identity."""
    d = u.entries.conj().T @ u.entries - np.eye(u.dim)
    return float(np.linalg.norm(d, 2))


def pauli_exponential(t: PauliTerm, theta: float = 1.0) -> DenseUnitary:
    """exp(i*theta*c*P) = cos(theta*c)*I + i*sin(theta*c)*P.

    Valid because every Pauli string squares to the identity.
    """
    angle = theta * t.coefficient
    n = t.n_qubits
    if n > DENSE_QUBIT_CAP:
        raise CapacityLimitError(f"{n} qubits exceeds dense cap")
    p = pauli_matrix(t.string.letters)
    return DenseUnitary(
        np.cos(angle) * np.eye(2**n, dtype=complex) + 1j * np.sin(angle) * p
    )


def distance_up_to_phase(u: DenseUnitary, v: DenseUnitary) -> float:
    """min over alpha of the spectral norm of ``u - e^{i alpha} v``."""
    return phase_aligned_distance(u, v)[0]


def phase_aligned_distance(
    u: DenseUnitary, v: DenseUnitary
) -> tuple[float, complex, bool]:
    """Phase-optimized spectral distance.

    Returns ``(distance, phase, used_grid)``.  The optimal global phase is
    tr(v†u)/|tr(v†u)| when the trace is nonzero; otherwise the phase is
    found by a sampled grid with local refinement and ``used_grid`` is set.
    """
    if u.dim != v.dim:
        raise DimensionMismatchError("dimension mismatch")
    tr = np.trace(v.entries.conj().T @ u.entries)
    if abs(tr) > 1e-12 * u.dim:
        phase = tr / abs(tr)
        dist = float(np.linalg.norm(u.entries - phase * v.entries, 2))
        return dist, phase, False
    # Trace-orthogonal case: the first-order optimum is undefined, scan.
    alphas = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
    dists = [
        float(np.linalg.norm(u.entries - np.exp(1j * a) * v.entries, 2))
        for a in alphas
    ]
    k = int(np.argmin(dists))
    lo, hi = alphas[k] - 2 * np.pi / 256, alphas[k] + 2 * np.pi / 256
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(
        lambda a: float(np.linalg.norm(u.entries - np.exp(1j * a) * v.entries, 2)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best = min(dists[k], float(res.fun))
    return best, np.exp(1j * float(res.x)), True
