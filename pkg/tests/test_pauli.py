import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from subcircuit.errors import DimensionMismatchError
from subcircuit.pauli import (
    DenseUnitary,
    PauliString,
    PauliTerm,
    commutes,
    distance_up_to_phase,
    pauli_exponential,
    pauli_matrix,
    pauli_product,
    phase_aligned_distance,
    restrict_to_support,
    term,
    unitarity_defect,
)

labels = st.text(alphabet="IXYZ", min_size=1, max_size=6)


class TestCommutes:
    def test_single_anticommuting_site(self):
        assert not commutes(PauliString("XZX"), PauliString("ZII"))

    def test_identical_strings_commute(self):
        assert commutes(PauliString("ZZ"), PauliString("ZZ"))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            commutes(PauliString("XX"), PauliString("X"))

    @given(labels, labels)
    @settings(max_examples=60)
    def test_symmetric_and_matches_matrices(self, a, b):
        n = min(len(a), len(b))
        pa, pb = PauliString(a[:n]), PauliString(b[:n])
        assert commutes(pa, pb) == commutes(pb, pa)
        if n <= 4:
            ma, mb = pauli_matrix(pa.letters), pauli_matrix(pb.letters)
            assert commutes(pa, pb) == np.allclose(ma @ mb, mb @ ma)

    @given(labels)
    @settings(max_examples=30)
    def test_self_commutes(self, a):
        assert commutes(PauliString(a), PauliString(a))


class TestPauliAlgebra:
    def test_square_to_identity(self):
        for label in ("X", "ZZ", "XYZ", "YIZX"):
            m = pauli_matrix(label)
            assert np.allclose(m @ m, np.eye(m.shape[0]))

    @given(labels, labels)
    @settings(max_examples=40)
    def test_product_phase(self, a, b):
        n = min(len(a), len(b), 4)
        pa, pb = PauliString(a[:n]), PauliString(b[:n])
        phase, out = pauli_product(pa, pb)
        lhs = pauli_matrix(pa.letters) @ pauli_matrix(pb.letters)
        assert np.allclose(lhs, phase * pauli_matrix(out.letters))


class TestExponential:
    def test_zero_angle_is_identity(self):
        u = pauli_exponential(term("Z"), 0.0)
        assert np.allclose(u.entries, np.eye(2))

    def test_diagonal_zz(self):
        u = pauli_exponential(term("ZZ"), math.pi / 4)
        diag = np.diag(u.entries)
        expected = np.exp(1j * math.pi / 4 * np.array([1, -1, -1, 1]))
        assert np.allclose(diag, expected)
        assert np.allclose(u.entries, np.diag(diag))

    def test_against_generic_matrix_exponential(self, rng):
        for _ in range(100):
            n = rng.integers(1, 5)
            label = "".join(rng.choice(list("IXYZ"), size=n))
            if set(label) == {"I"}:
                label = "Z" + label[1:]
            coeff = rng.uniform(-2, 2)
            theta = rng.uniform(-3, 3)
            t = term(label, coeff)
            u = pauli_exponential(t, theta)
            ref = expm(1j * theta * coeff * pauli_matrix(label))
            assert np.linalg.norm(u.entries - ref, 2) <= 1e-12

    def test_inverse_property(self, rng):
        for _ in range(20):
            n = rng.integers(1, 5)
            label = "".join(rng.choice(list("IXYZ"), size=n))
            theta = rng.uniform(-3, 3)
            u = pauli_exponential(term(label), theta)
            v = pauli_exponential(term(label), -theta)
            assert np.linalg.norm((u @ v).entries - np.eye(2**n), 2) <= 1e-12

    def test_unitarity(self, rng):
        u = pauli_exponential(term("XZY", 0.7), 1.3)
        assert unitarity_defect(u) <= 1e-12


class TestDistance:
    def test_identical(self):
        u = pauli_exponential(term("XZ"), 0.3)
        assert distance_up_to_phase(u, u) <= 1e-12

    def test_phase_invariance(self):
        u = pauli_exponential(term("XZ"), 0.3)
        v = DenseUnitary(np.exp(1j * math.pi / 3) * u.entries)
        assert distance_up_to_phase(u, v) <= 1e-12

    def test_identity_vs_x_closed_form(self):
        # Phase optimization of ||I - e^{ia}X|| gives sqrt(2) at a = pi/2
        # (the traceless overlap forces the sampled-grid fallback).
        u = DenseUnitary(np.eye(2, dtype=complex))
        v = DenseUnitary(pauli_matrix("X").copy())
        dist, _, used_grid = phase_aligned_distance(u, v)
        assert used_grid
        assert abs(dist - math.sqrt(2)) <= 1e-6

    def test_pseudo_metric_on_sampled_triples(self, rng):
        mats = []
        for _ in range(6):
            h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            h = h + h.conj().T
            mats.append(DenseUnitary(expm(1j * h)))
        for a in mats:
            for b in mats:
                dab = distance_up_to_phase(a, b)
                assert dab >= -1e-12
                assert abs(dab - distance_up_to_phase(b, a)) <= 1e-9
                for c in mats:
                    dac = distance_up_to_phase(a, c)
                    dcb = distance_up_to_phase(c, b)
                    assert dab <= dac + dcb + 1e-10


def test_restrict_to_support():
    terms = [term("IZIX", 0.5), term("IYII", -1.0)]
    small, support = restrict_to_support(terms)
    assert support == (1, 3)
    assert small[0].string.letters == "ZX"
    assert small[1].string.letters == "YI"


def test_string_weight_and_parse():
    p = PauliString("IZX")
    assert p.n_qubits == 3
    assert p.weight == 2
    assert str(p) == "IZX"
    with pytest.raises(ValueError):
        PauliString("ABC")
    with pytest.raises(ValueError):
        PauliTerm(p, float("nan"))
