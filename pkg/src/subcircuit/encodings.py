"""Encoded Fermi-Hubbard Hamiltonians as qubit interaction layers.

Two local fermion-to-qubit encodings are supported: the face-ancilla
("compact", max weight 3) and the vertex-ancilla ("vc", max weight 4)
encoding, both on an L x L lattice with open boundaries and one qubit grid
per spin sector.  The encoded Hamiltonian is split into five mutually
non-commuting layers H1..H5 (two alternating horizontal hopping layers,
two vertical ones, one on-site layer); within a layer all terms commute
and distinct interactions act on disjoint qubits.

Vertex qubits are enumerated in serpentine (boustrophedon) row-major
order, per spin sector; ancilla qubits follow the vertex block of their
sector.  Interaction coefficients carry the bare coupling strengths; the
per-step Trotter angle is applied downstream.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedEncodingError
from .pauli import PauliString, PauliTerm, commutes, embed

COMPACT = "compact"
VC = "vc"


@dataclass(frozen=True)
class FermiHubbardSpec:
    """Problem parameters: lattice side, couplings and fermion number."""

    side: int
    on_site: float = 1.0
    hopping: float = 1.0
    coupling_cap: float = 1.0
    fermion_count: int = 0

    def __post_init__(self):
        if self.side < 2:
            raise ValueError("side must be >= 2")
        if self.coupling_cap <= 0:
            raise ValueError("coupling cap must be positive")
        if abs(self.on_site) > self.coupling_cap + 1e-12 or abs(
            self.hopping
        ) > self.coupling_cap + 1e-12:
            raise ValueError("couplings exceed the stated cap")
        if not 0 <= self.fermion_count <= 2 * self.side**2:
            raise ValueError("fermion count out of range")

    @property
    def n_sites(self) -> int:
        return self.side**2

    @property
    def n_modes(self) -> int:
        return 2 * self.side**2


def _has_face_ancilla(fr: int, fc: int) -> bool:
    # Checkerboard faces, anchored so the single face of L=2 carries one.
    return (fr + fc) % 2 == 0


@dataclass(frozen=True)
class QubitLayout:
    """Qubit index assignment for one encoding on an L x L lattice."""

    encoding: str
    side: int
    total_qubits: int
    _vertex: dict = field(repr=False)
    _face: dict = field(repr=False)
    _vc_ancilla: dict = field(repr=False)

    def vertex(self, sector: int, r: int, c: int) -> int:
        return self._vertex[(sector, r, c)]

    def face(self, sector: int, fr: int, fc: int) -> int | None:
        """Index of the face ancilla, or None on faces without one."""
        return self._face.get((sector, fr, fc))

    def vc_ancilla(self, sector: int, r: int, c: int) -> int:
        return self._vc_ancilla[(sector, r, c)]

    @property
    def vertex_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self._vertex.values()))

    @property
    def ancilla_qubits(self) -> tuple[int, ...]:
        anc = set(self._face.values()) | set(self._vc_ancilla.values())
        return tuple(sorted(anc))

    def qubit_class(self, q: int) -> str:
        return "vertex" if q in set(self._vertex.values()) else "face"


def _serpentine(r: int, c: int, side: int) -> int:
    return r * side + (c if r % 2 == 0 else side - 1 - c)


def build_layout(spec: FermiHubbardSpec, encoding: str) -> QubitLayout:
    L = spec.side
    vertex, face, vc_anc = {}, {}, {}
    if encoding == COMPACT:
        faces = [
            (fr, fc)
            for fr in range(L - 1)
            for fc in range(L - 1)
            if _has_face_ancilla(fr, fc)
        ]
        per_sector = L * L + len(faces)
        for s in (0, 1):
            base = s * per_sector
            for r in range(L):
                for c in range(L):
                    vertex[(s, r, c)] = base + _serpentine(r, c, L)
            for k, (fr, fc) in enumerate(sorted(faces)):
                face[(s, fr, fc)] = base + L * L + k
        total = 2 * per_sector
    elif encoding == VC:
        per_sector = 2 * L * L
        for s in (0, 1):
            base = s * per_sector
            for r in range(L):
                for c in range(L):
                    idx = _serpentine(r, c, L)
                    vertex[(s, r, c)] = base + idx
                    vc_anc[(s, r, c)] = base + L * L + idx
        total = 2 * per_sector
    else:
        raise UnsupportedEncodingError(f"unknown encoding {encoding!r}")
    return QubitLayout(encoding, L, total, vertex, face, vc_anc)


@dataclass(frozen=True)
class Interaction:
    """One encoded Hamiltonian interaction: a few commuting Pauli summands
    acting on a common small qubit set."""

    terms: tuple[PauliTerm, ...]
    kind: str  # "hop_h" | "hop_v" | "on_site" | "square"

    @property
    def qubits(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.terms:
            out |= set(t.string.support)
        return frozenset(out)

    @property
    def max_weight(self) -> int:
        return max(t.string.weight for t in self.terms)


@dataclass(frozen=True)
class InteractionLayer:
    """A Trotter layer: mutually commuting interactions, usually disjoint."""

    label: str
    interactions: tuple[Interaction, ...]
    disjoint: bool
    identity_offset: float = 0.0  # scalar (phase) part dropped from the terms

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return tuple(t for i in self.interactions for t in i.terms)

    @property
    def n_terms(self) -> int:
        return len(self.terms)


def _hop_layer_h(r: int, c: int) -> str:
    return "H1" if (r + c) % 2 == 0 else "H2"


def _hop_layer_v(r: int, c: int) -> str:
    return "H3" if (r + c) % 2 == 0 else "H4"


def _compact_edge_terms(spec, layout, s, edge) -> Interaction:
    """Terms for one hopping edge in the compact encoding.

    Horizontal edges couple through the adjacent checkerboard face with a Y,
    vertical ones with an X and a parity sign; boundary edges next to no
    ancilla face reduce to the bare weight-2 form.
    """
    (r1, c1), (r2, c2) = edge
    L = spec.side
    n = layout.total_qubits
    i, j = layout.vertex(s, r1, c1), layout.vertex(s, r2, c2)
    half = spec.hopping / 2.0
    if r1 == r2:  # horizontal, c2 = c1 + 1
        cand = [(r1 - 1, c1), (r1, c1)]
        kind = "hop_h"
        face_letter = "Y"
        sign = 1.0
    else:  # vertical, r2 = r1 + 1
        cand = [(r1, c1 - 1), (r1, c1)]
        kind = "hop_v"
        face_letter = "X"
        sign = 1.0
    f = None
    for fr, fc in cand:
        if 0 <= fr < L - 1 and 0 <= fc < L - 1 and _has_face_ancilla(fr, fc):
            f = layout.face(s, fr, fc)
            if r1 != r2:
                # Face right of a vertical edge -> +1, face to its left -> -1.
                sign = 1.0 if (fr, fc) == (r1, c1) else -1.0
            break
    if f is None:
        terms = (
            PauliTerm(embed("XX", (i, j), n), half),
            PauliTerm(embed("YY", (i, j), n), half),
        )
    else:
        terms = (
            PauliTerm(embed("XX" + face_letter, (i, j, f), n), sign * half),
            PauliTerm(embed("YY" + face_letter, (i, j, f), n), sign * half),
        )
    return Interaction(terms, kind)


def _vc_edge_terms(spec, layout, s, edge) -> Interaction:
    (r1, c1), (r2, c2) = edge
    n = layout.total_qubits
    i, j = layout.vertex(s, r1, c1), layout.vertex(s, r2, c2)
    ia, ja = layout.vc_ancilla(s, r1, c1), layout.vc_ancilla(s, r2, c2)
    half = spec.hopping / 2.0
    if r1 == r2:
        terms = (
            PauliTerm(embed("XZX", (i, ia, j), n), half),
            PauliTerm(embed("YZY", (i, ia, j), n), half),
        )
        kind = "hop_h"
    else:
        terms = (
            PauliTerm(embed("XYYX", (i, ia, j, ja), n), half),
            PauliTerm(embed("YYXX", (i, ia, j, ja), n), -half),
        )
        kind = "hop_v"
    return Interaction(terms, kind)


def _on_site_interaction(spec, layout, r, c) -> Interaction:
    n = layout.total_qubits
    up, dn = layout.vertex(0, r, c), layout.vertex(1, r, c)
    quarter = spec.on_site / 4.0
    terms = (
        PauliTerm(embed("Z", (up,), n), -quarter),
        PauliTerm(embed("Z", (dn,), n), -quarter),
        PauliTerm(embed("ZZ", (up, dn), n), quarter),
    )
    return Interaction(terms, "on_site")


def _edges(side: int):
    horizontal, vertical = [], []
    for r in range(side):
        for c in range(side - 1):
            horizontal.append(((r, c), (r, c + 1)))
    for r in range(side - 1):
        for c in range(side):
            vertical.append(((r, c), (r + 1, c)))
    return horizontal, vertical


def encode(
    spec: FermiHubbardSpec, encoding: str
) -> tuple[QubitLayout, list[InteractionLayer]]:
    """Encode the Fermi-Hubbard Hamiltonian into five interaction layers.

    Returns the qubit layout and layers [H1, H2, H3, H4, H5]; H1/H2 are the
    alternating horizontal hopping layers, H3/H4 the vertical ones and H5
    the on-site layer.  The on-site identity component u/4 per site is
    accumulated into the layer's ``identity_offset`` instead of a term.
    """
    layout = build_layout(spec, encoding)
    edge_terms = _compact_edge_terms if encoding == COMPACT else _vc_edge_terms
    horizontal, vertical = _edges(spec.side)
    buckets: dict[str, list[Interaction]] = {f"H{k}": [] for k in range(1, 6)}
    for s in (0, 1):
        for edge in horizontal:
            (r, c), _ = edge
            buckets[_hop_layer_h(r, c)].append(edge_terms(spec, layout, s, edge))
        for edge in vertical:
            (r, c), _ = edge
            if encoding == COMPACT:
                label = _hop_layer_v(r, c)
            else:
                # Alternating rows: odd top-row edges first layer.
                label = "H3" if r % 2 == 1 else "H4"
            buckets[label].append(edge_terms(spec, layout, s, edge))
    for r in range(spec.side):
        for c in range(spec.side):
            buckets["H5"].append(_on_site_interaction(spec, layout, r, c))

    layers = []
    for k in range(1, 6):
        label = f"H{k}"
        offset = spec.n_sites * spec.on_site / 4.0 if label == "H5" else 0.0
        layers.append(
            InteractionLayer(label, tuple(buckets[label]), True, offset)
        )
    return layout, layers


# ---------------------------------------------------------------------------
# Three-layer regrouping (compact encoding only)
# ---------------------------------------------------------------------------


def _square_interaction(spec, layout, s, fr, fc) -> Interaction:
    """The four hopping edges around ancilla face (fr, fc), as one group."""
    edges = [
        ((fr, fc), (fr, fc + 1)),  # top horizontal
        ((fr + 1, fc), (fr + 1, fc + 1)),  # bottom horizontal
        ((fr, fc), (fr + 1, fc)),  # left vertical
        ((fr, fc + 1), (fr + 1, fc + 1)),  # right vertical
    ]
    terms = []
    for e in edges:
        terms.extend(_compact_edge_terms(spec, layout, s, e).terms)
    return Interaction(tuple(terms), "square")


def square_parts(spec, layout, s, fr, fc) -> tuple[list[PauliTerm], ...]:
    """The (a1, a2, b1, b2) regrouping of one square.

    Each part is a normalized pair of anticommuting Pauli summands; within
    the square only {a1, b2} and {a2, b1} fail to commute.  Corner order:
    1 = (fr, fc), 2 = (fr, fc+1), 3 = (fr+1, fc+1), 4 = (fr+1, fc).
    """
    n = layout.total_qubits
    v1 = layout.vertex(s, fr, fc)
    v2 = layout.vertex(s, fr, fc + 1)
    v3 = layout.vertex(s, fr + 1, fc + 1)
    v4 = layout.vertex(s, fr + 1, fc)
    a = layout.face(s, fr, fc)
    half = spec.hopping / 2.0
    a1 = [
        PauliTerm(embed("XXY", (v1, v2, a), n), half),
        PauliTerm(embed("XXX", (v2, v3, a), n), -half),
    ]
    a2 = [
        PauliTerm(embed("YYX", (v1, v4, a), n), half),
        PauliTerm(embed("YYY", (v4, v3, a), n), half),
    ]
    b1 = [
        PauliTerm(embed("YYY", (v1, v2, a), n), half),
        PauliTerm(embed("YYX", (v2, v3, a), n), -half),
    ]
    b2 = [
        PauliTerm(embed("XXX", (v1, v4, a), n), half),
        PauliTerm(embed("XXY", (v4, v3, a), n), half),
    ]
    return a1, a2, b1, b2


def regroup_three_layers(spec: FermiHubbardSpec) -> list[InteractionLayer]:
    """Regroup the compact-encoded Hamiltonian into 3 Trotter layers.

    H0 collects the on-site terms; H1/H2 each hold a disjoint set of
    four-edge squares around alternating ancilla faces plus the leftover
    boundary edges.  Terms within a square do not all commute, so the
    hopping layers carry ``disjoint=False``.
    """
    layout = build_layout(spec, COMPACT)
    L = spec.side
    on_site = [
        _on_site_interaction(spec, layout, r, c)
        for r in range(L)
        for c in range(L)
    ]
    squares: dict[str, list[Interaction]] = {"H1": [], "H2": []}
    covered: set = set()
    for fr in range(L - 1):
        for fc in range(L - 1):
            if not _has_face_ancilla(fr, fc):
                continue
            label = "H1" if fr % 2 == 0 else "H2"
            squares[label].append(_square_interaction(spec, layout, 0, fr, fc))
            squares[label].append(_square_interaction(spec, layout, 1, fr, fc))
            for e in (
                ((fr, fc), (fr, fc + 1)),
                ((fr + 1, fc), (fr + 1, fc + 1)),
                ((fr, fc), (fr + 1, fc)),
                ((fr, fc + 1), (fr + 1, fc + 1)),
            ):
                covered.add(e)
    horizontal, vertical = _edges(L)
    strays = [e for e in horizontal + vertical if e not in covered]
    for e in strays:
        for s in (0, 1):
            inter = _compact_edge_terms(spec, layout, s, e)
            placed = False
            for label in ("H1", "H2"):
                support = set().union(*(i.qubits for i in squares[label]))
                if not (inter.qubits & support):
                    squares[label].append(inter)
                    placed = True
                    break
            if not placed:
                raise AssertionError(f"stray edge {e} fits neither layer")
    offset = spec.n_sites * spec.on_site / 4.0
    return [
        InteractionLayer("H0", tuple(on_site), True, offset),
        InteractionLayer("H1", tuple(squares["H1"]), False),
        InteractionLayer("H2", tuple(squares["H2"]), False),
    ]


def regroup_three_layers_checked(spec, encoding):
    if encoding != COMPACT:
        raise UnsupportedEncodingError("three-layer regrouping is compact-only")
    return regroup_three_layers(spec)


# ---------------------------------------------------------------------------
# Layer norm bounds and structure statistics
# ---------------------------------------------------------------------------


def lambda_bound(spec: FermiHubbardSpec, layer: InteractionLayer) -> float:
    """Norm bound of one layer restricted to the fermion-number sector.

    Hopping layers use |t| * min(n, modes - n, |pairs|); the on-site layer
    is bounded (conservatively, via its diagonal form) by
    |u| * min(floor(n/2), sites).
    """
    n = spec.fermion_count
    if all(i.kind == "on_site" for i in layer.interactions):
        return abs(spec.on_site) * min(n // 2, spec.n_sites)
    pairs = len(layer.interactions)
    return abs(spec.hopping) * min(n, spec.n_modes - n, pairs)


def lambda_parameter(spec: FermiHubbardSpec, layers) -> float:
    """Global layer-norm bound: maximum of the per-layer bounds."""
    return max(lambda_bound(spec, layer) for layer in layers)


def layer_norm_unrestricted(layer: InteractionLayer) -> float:
    """Exact operator norm of a layer on the full qubit space.

    Interactions are disjoint, so eigenvalues add; per interaction the
    terms commute and the extremal joint eigenvalue is found by brute
    force over its (small) support.
    """
    total = 0.0
    for inter in layer.interactions:
        support = sorted(inter.qubits)
        pos = {q: k for k, q in enumerate(support)}
        best = 0.0
        for signs in itertools.product((1, -1), repeat=len(support)):
            val = 0.0
            for t in inter.terms:
                prod = t.coefficient
                for q in t.string.support:
                    prod *= signs[pos[q]]
                val += prod
            best = max(best, abs(val))
        total += best
    return total


def layer_statistics(layers) -> tuple[int, int]:
    """(N, n_tilde) for the commutator-aware Trotter bounds.

    N is the largest per-layer count of expanded Pauli summands; n_tilde
    is the largest number of summands in one layer failing to commute
    with a fixed summand of another layer, found by exact enumeration.
    """
    n_cap = max(layer.n_terms for layer in layers)
    worst = 0
    for a, b in itertools.permutations(layers, 2):
        for t in a.terms:
            clashes = sum(
                1 for u in b.terms if not commutes(t.string, u.string)
            )
            worst = max(worst, clashes)
    return n_cap, worst


# ---------------------------------------------------------------------------
# Fock-space oracle for the hopping-layer norm bound
# ---------------------------------------------------------------------------


def hopping_matrix(modes: int, pairs) -> np.ndarray:
    """Dense a†_i a_j + a†_j a_i summed over pairs, in the occupation basis.

    Independent of any qubit encoding; used as the brute-force oracle for
    the sector norm bound.
    """
    dim = 1 << modes
    h = np.zeros((dim, dim))
    for i, j in pairs:
        lo, hi = min(i, j), max(i, j)
        for x in range(dim):
            occ_j = (x >> j) & 1
            occ_i = (x >> i) & 1
            if occ_j == 1 and occ_i == 0:
                y = x ^ (1 << i) ^ (1 << j)
                between = sum((x >> k) & 1 for k in range(lo + 1, hi))
                sign = -1.0 if between % 2 else 1.0
                h[y, x] += sign
                h[x, y] += sign
    return h


def sector_extreme(h: np.ndarray, modes: int, n: int) -> float:
    """max |<psi|H|psi>| over the n-fermion sector."""
    idx = [x for x in range(1 << modes) if bin(x).count("1") == n]
    if not idx:
        return 0.0
    sub = h[np.ix_(idx, idx)]
    vals = np.linalg.eigvalsh(sub)
    return float(max(abs(vals[0]), abs(vals[-1])))


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------


def layers_to_json(spec, layout, layers) -> str:
    """Serialize encoded layers; see README for the schema.

    Qubit enumeration is the serpentine row-major order documented on
    :func:`build_layout`.
    """
    doc = {
        "encoding": layout.encoding,
        "side": layout.side,
        "total_qubits": layout.total_qubits,
        "layers": [
            {
                "label": layer.label,
                "disjoint": layer.disjoint,
                "identity_offset": layer.identity_offset,
                "terms": [
                    {
                        "pauli": "".join(
                            t.string.letters[q] for q in t.string.support
                        ),
                        "qubits": list(t.string.support),
                        "coeff": t.coefficient,
                    }
                    for t in layer.terms
                ],
            }
            for layer in layers
        ],
    }
    return json.dumps(doc, indent=2)
