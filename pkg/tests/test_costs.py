import math

import pytest

from subcircuit.costs import (
    CompiledSchedule,
    asymptotic_cost,
    build_schedule,
    compiled_cost,
    interaction_depth,
    interaction_runtime,
    max_interaction_cost,
    prefactor_standard,
    prefactor_subcircuit,
    simulation_cost,
    slot_depth,
    slot_runtime,
    summand_depth,
    summand_runtime,
)
from subcircuit.encodings import FermiHubbardSpec, encode
from subcircuit.synthesis import synthesize
from subcircuit.pauli import term
from subcircuit.trotter import build_formula


class TestPrimitiveCosts:
    def test_standard_summands_angle_free(self):
        assert summand_runtime(3, 0.2, "standard") == pytest.approx(math.pi)
        assert summand_runtime(4, 0.0, "standard") == pytest.approx(3 * math.pi / 2)
        assert summand_runtime(1, 1.0, "standard") == 0.0

    def test_subcircuit_summands_match_synthesis(self):
        for w, t in ((2, 0.3), (3, 0.12), (4, 0.07)):
            rep = synthesize(term("Z" * w), t, "subcircuit")
            assert summand_runtime(w, t, "subcircuit") == pytest.approx(
                rep.runtime_cost, abs=1e-12
            )

    def test_depth_counts_match_synthesis(self):
        # Per-gate accounting uses the minimum-depth route per strategy:
        # conjugation with a direct pulse leaf (subcircuit gate set) or
        # compiled all the way to fixed pi/4 pulses (standard gate set).
        from subcircuit.synthesis import cnot_conjugation_decompose

        for w in (2, 3, 4):
            pulse_leaf = synthesize(term("Z" * w), 0.1, "standard")
            if w > 2:
                assert summand_depth(w, "subcircuit") == pulse_leaf.depth_cost
            else:
                assert summand_depth(2, "subcircuit") == 1
            cnot = cnot_conjugation_decompose(term("Z" * w), 0.1)
            assert summand_depth(w, "standard") == cnot.depth_cost

    def test_weight4_fallback_beyond_validity(self):
        cost = summand_runtime(4, 0.5, "subcircuit")
        assert cost == pytest.approx(math.pi + 0.5)


class TestMaxInteractionCost:
    def test_standard_constants(self):
        for tau in (0.0, 0.3, 2.0):
            assert max_interaction_cost("compact", "standard", tau)[0] == \
                pytest.approx(2 * math.pi)
            assert max_interaction_cost("vc", "standard", tau)[0] == \
                pytest.approx(3 * math.pi)

    def test_zero_tau_subcircuit(self):
        bound, measured = max_interaction_cost("compact", "subcircuit", 0.0)
        assert bound == 0.0 and measured == 0.0

    def test_compact_subcircuit_example(self):
        tau = 0.01 * 0.5 * 1.0  # delta * B_2 * r
        bound, measured = max_interaction_cost("compact", "subcircuit", tau)
        assert bound == pytest.approx(4 * math.sqrt(0.005))
        assert measured <= bound + 1e-12

    def test_vc_subcircuit_measured_below_bound(self):
        for tau in (1e-4, 1e-3, 1e-2, 0.1):
            bound, measured = max_interaction_cost("vc", "subcircuit", tau)
            assert measured <= bound + 1e-12


class TestSimulationCost:
    def test_zero_time(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        rep = simulation_cost(spec, "compact", "subcircuit", "per_time", 0.1, 0.0)
        assert rep.cost == 0.0 and rep.steps == 0

    def test_per_gate_recount_against_sequences(self):
        # Depth accounting must equal a recount over emitted sequences
        # (minimum-depth route per gate set: pulse-leaf conjugation).
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        formula = build_formula(2, 5)
        delta0, steps = 0.05, 3
        cost, _ = compiled_cost(
            layers, formula, delta0, steps, "subcircuit", "per_gate",
            "synthesized",
        )
        recount = 0
        for _, coeff in formula.stage_coeffs:
            tau = abs(float(coeff)) * delta0
            for layer in layers:
                depths = []
                for inter in layer.interactions:
                    d = 0
                    for t in inter.terms:
                        rep = synthesize(
                            term(t.string.letters, 1.0),
                            tau * abs(t.coefficient),
                            "standard",
                        )
                        d += rep.depth_cost
                    depths.append(d)
                recount += max(depths)
        assert cost == steps * recount

    def test_monotone_in_eps_and_time(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        costs_eps = [
            simulation_cost(
                spec, "compact", "subcircuit", "per_time", e, 1.0, order=2
            ).cost
            for e in (0.02, 0.05, 0.1, 0.2)
        ]
        assert costs_eps == sorted(costs_eps, reverse=True)
        costs_t = [
            simulation_cost(
                spec, "compact", "subcircuit", "per_time", 0.1, t, order=2
            ).cost
            for t in (0.5, 1.0, 2.0, 4.0)
        ]
        assert costs_t == sorted(costs_t)

    def test_subcircuit_beats_standard_below_crossover(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        sub = simulation_cost(
            spec, "compact", "subcircuit", "per_time", 0.1, 1.0, order=2
        )
        std = simulation_cost(
            spec, "compact", "standard", "per_time", 0.1, 1.0, order=2
        )
        assert sub.cost < std.cost
        assert sub.delta0 == pytest.approx(std.delta0)

    def test_auto_order_reports_winner(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        rep = simulation_cost(
            spec, "compact", "subcircuit", "per_time", 0.1, 1.0, order="auto"
        )
        assert rep.order in (1, 2, 4)
        fixed = simulation_cost(
            spec, "compact", "subcircuit", "per_time", 0.1, 1.0, order=rep.order
        )
        assert rep.cost == pytest.approx(fixed.cost)

    def test_provenance_fields(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        rep = simulation_cost(
            spec, "compact", "subcircuit", "per_time", 0.1, 1.0, order=2
        )
        assert rep.bound_family in (
            "basic", "explicit_sum", "commutator", "taylor_of_taylor"
        )
        assert rep.feasible and rep.steps == math.ceil(1.0 / rep.delta0)
        assert rep.bound_estimate is not None
        assert "per_layer" in rep.breakdown


class TestAsymptotics:
    def test_subcircuit_compact_p1_prefactor(self):
        assert prefactor_subcircuit(1, "compact") == pytest.approx(4.0)

    def test_standard_vc_p1_prefactor(self):
        assert prefactor_standard(1, "vc") == pytest.approx(3 * math.pi)

    def test_envelope_over_time_sweep(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        for t in (1.0, 2.0, 4.0):
            asym = asymptotic_cost(spec, "compact", "subcircuit", 0.1, t, 2)
            sim = simulation_cost(
                spec, "compact", "subcircuit", "per_time", 0.1, t, order=2
            ).cost
            assert 0.01 * asym <= sim <= 100 * asym


class TestSchedule:
    def test_aggregated_slots(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        sched = build_schedule(spec, "compact", "subcircuit", 2, 0.05, 4)
        assert isinstance(sched, CompiledSchedule)
        assert sched.n_slots == 4 * 2 * 5  # steps x stages x layers
        assert sched.volume == sched.n_slots * 10
        assert sched.total_runtime > 0

    def test_slot_functions_on_layers(self):
        spec = FermiHubbardSpec(side=2, fermion_count=2)
        _, layers = encode(spec, "compact")
        for layer in layers:
            r = slot_runtime(layer, 0.01, "subcircuit", "synthesized")
            d = slot_depth(layer, "subcircuit")
            assert r >= 0 and d >= 1
            assert r == max(
                interaction_runtime(i, 0.01, "subcircuit", "synthesized")
                for i in layer.interactions
            )
            assert d == max(
                interaction_depth(i, "subcircuit") for i in layer.interactions
            )
