import math

import numpy as np
import pytest
from scipy.linalg import expm

from subcircuit.encodings import FermiHubbardSpec, encode
from subcircuit.errors import FitRankError
from subcircuit.exactsim import (
    apply_term_exponential,
    exact_apply,
    exact_unitary,
    extrapolate_delta0,
    fit_extrapolation,
    hamiltonian_matrix,
    layer_exponential_matrix,
    numeric_delta0,
    numeric_epsilon,
    trotter_apply,
    trotter_error_dense,
    trotter_error_matrix_free,
    trotter_step_matrix,
)
from subcircuit.pauli import pauli_matrix, term
from subcircuit.trotter import build_formula


class ToyLayer:
    """Minimal stand-in exposing .terms like an InteractionLayer."""

    def __init__(self, terms):
        self.terms = tuple(terms)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


class TestPropagators:
    def test_term_exponential_matches_dense(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 5))
            label = "".join(rng.choice(list("IXYZ"), size=n))
            c = float(rng.uniform(-1.5, 1.5))
            angle = float(rng.uniform(-2, 2))
            state = random_state(n, rng)
            out = apply_term_exponential(state, term(label, c), angle, n)
            ref = expm(-1j * angle * c * pauli_matrix(label)) @ state
            assert np.linalg.norm(out - ref) <= 1e-12

    def test_two_qubit_toy_exact(self, rng):
        layers = [ToyLayer([term("XX", 0.7)]), ToyLayer([term("ZI", 0.4),
                                                         term("IZ", -0.3)])]
        u = exact_unitary(layers, 2, 1.3)
        h = 0.7 * pauli_matrix("XX") + 0.4 * pauli_matrix("ZI") \
            - 0.3 * pauli_matrix("IZ")
        assert np.linalg.norm(u - expm(-1j * 1.3 * h), 2) <= 1e-12

    def test_time_zero_identity(self):
        layers = [ToyLayer([term("XX", 0.5)])]
        assert np.allclose(exact_unitary(layers, 2, 0.0), np.eye(4))

    def test_single_commuting_layer_closed_form(self):
        layer = ToyLayer([term("ZZI", 0.3), term("IIZ", -0.8)])
        u = exact_unitary([layer], 3, 0.9)
        v = layer_exponential_matrix(layer, 3, 0.9)
        assert np.linalg.norm(u - v, 2) <= 1e-12

    def test_unitarity_preserved(self, rng):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        formula = build_formula(2, 5)
        state = random_state(10, rng)
        out = trotter_apply(formula, layers, 10, 0.05, state)
        assert abs(np.linalg.norm(out) - 1.0) <= 1e-10
        out2 = exact_apply(layers, 10, 0.7, state)
        assert abs(np.linalg.norm(out2) - 1.0) <= 1e-10

    def test_second_order_time_symmetry(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        formula = build_formula(2, 5)
        fwd = trotter_step_matrix(formula, layers, 10, 0.1)
        bwd = trotter_step_matrix(formula, layers, 10, -0.1)
        assert np.linalg.norm(fwd @ bwd - np.eye(1 << 10), 2) <= 1e-10

    def test_matrix_free_step_matches_dense(self, rng):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        formula = build_formula(2, 5)
        state = random_state(10, rng)
        dense = trotter_step_matrix(formula, layers, 10, 0.07) @ state
        free = trotter_apply(formula, layers, 10, 0.07, state)
        assert np.linalg.norm(dense - free) <= 1e-10


class TestNumericError:
    def test_epsilon_below_two(self):
        layers = [ToyLayer([term("XI", 1.0)]), ToyLayer([term("ZZ", 1.0)])]
        formula = build_formula(1, 2)
        for d in (0.5, 1.0, 2.0):
            pt = numeric_epsilon(formula, layers, 2, 4.0, d)
            assert 0.0 <= pt.epsilon <= 2.0 + 1e-12

    def test_monotone_in_delta_2x2(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        formula = build_formula(2, 5)
        eps = [
            numeric_epsilon(formula, layers, 10, 1.0, d).epsilon
            for d in (0.05, 0.1, 0.2, 0.5)
        ]
        assert eps == sorted(eps)

    def test_power_iteration_matches_dense(self):
        layers = [ToyLayer([term("XXI", 0.9)]), ToyLayer([term("IZZ", 0.8),
                                                          term("ZII", -0.4)])]
        formula = build_formula(2, 2)
        dense = trotter_error_dense(formula, layers, 3, 1.0, 0.25)
        free = trotter_error_matrix_free(
            formula, layers, 3, 1.0, 0.25, seed=5, tol=1e-10
        )
        assert free == pytest.approx(dense, rel=1e-2)

    def test_asymptotic_slope_matches_order(self):
        layers = [ToyLayer([term("X", 1.0)]), ToyLayer([term("Z", 1.0)])]
        for p, grid in ((1, (0.2, 0.1, 0.05)), (2, (0.4, 0.2, 0.1)),
                        (4, (0.4, 0.28, 0.2, 0.14))):
            formula = build_formula(p, 2)
            eps = [
                numeric_epsilon(formula, layers, 1, d, d).epsilon for d in grid
            ]
            slope = np.polyfit(np.log(grid), np.log(eps), 1)[0]
            assert slope == pytest.approx(p + 1, abs=0.05)

    def test_numeric_delta0_consistency(self):
        layers = [ToyLayer([term("XX", 1.0)]), ToyLayer([term("ZI", 1.0),
                                                         term("IZ", 1.0)])]
        formula = build_formula(2, 2)
        target = 0.02
        d0 = numeric_delta0(formula, layers, 2, 1.0, target)
        eps_at = numeric_epsilon(formula, layers, 2, 1.0, d0).epsilon
        eps_above = numeric_epsilon(formula, layers, 2, 1.0, 1.02 * d0).epsilon
        assert eps_at <= target * (1 + 1e-6)
        assert eps_above > target


class TestFit:
    def _synthetic(self, params, p):
        pts = []
        for t in (1.0, 2.0, 4.0, 8.0):
            for lam in (2.0, 3.0, 5.0):
                pts.append((p, t, lam, extrapolate_delta0(params, p, t, lam)))
        return pts

    def test_parameter_recovery(self):
        true = (0.02, 0.31, 1.0, 2.7)  # gauge a1 = 1
        pts = self._synthetic(true, 2)
        fitted, rms = fit_extrapolation(pts)
        assert rms <= 1e-12
        for a, b in zip(fitted, true):
            assert a == pytest.approx(b, abs=1e-6)

    def test_prediction_monotone_in_time(self):
        params = (0.01, 0.5, 1.0, 1.5)
        pred = [extrapolate_delta0(params, 2, t, 5.0) for t in (1, 2, 4, 8, 16)]
        assert pred == sorted(pred, reverse=True)  # b0 > 0

    def test_rank_deficiency_detected(self):
        pts = [(2, 1.0, 5.0, 0.1)] * 10  # no spread in T or Lambda
        with pytest.raises(FitRankError):
            fit_extrapolation(pts)

    def test_residual_reported(self, rng):
        true = (0.02, 0.31, 1.0, 2.7)
        pts = [
            (2, t, lam, extrapolate_delta0(true, 2, t, lam) + rng.normal(0, 1e-4))
            for t in (1.0, 2.0, 4.0, 8.0)
            for lam in (2.0, 3.0, 5.0)
        ]
        _, rms = fit_extrapolation(pts)
        assert 0 < rms < 1e-3


def test_hamiltonian_matrix_hermitian():
    spec = FermiHubbardSpec(side=2, fermion_count=2)
    _, layers = encode(spec, "compact")
    h = hamiltonian_matrix(layers, 10)
    assert np.allclose(h, h.conj().T)
