"""Sampling, exact distributions, and marginalization."""

import numpy as np
import pytest

from oracles import tv_distance
from qassert.errors import CapacityError
from qassert.examples import build_qft
from qassert.assertions import AssertionDirective
from qassert.sampling import MeasurementDistribution, exact_distribution, marginalize, sample
from qassert.sim import Circuit, GateOp, Measurement


def bell():
    return Circuit(2, 0, [GateOp("h", (0,)), GateOp("cx", (1,), controls=(0,))])


def xx_circuit():
    return Circuit(2, 0, [GateOp("x", (0,)), GateOp("x", (1,))])


class TestSample:
    def test_bell_supports_only_00_and_11(self):
        dist = sample(bell(), shots=1000, seed=7)
        assert set(dist.counts) <= {"00", "11"}
        assert sum(dist.counts.values()) == 1000

    def test_deterministic_state_all_shots_one_key(self):
        for seed in (0, 1, 99):
            dist = sample(xx_circuit(), shots=1000, seed=seed)
            assert dist.counts == {"11": 1000}

    def test_hadamard_frequency_matches_exact(self):
        circuit = Circuit(1, 0, [GateOp("h", (0,))])
        dist = sample(circuit, shots=10000, seed=1)
        exact = exact_distribution(circuit)
        assert exact["1"] == pytest.approx(0.5, abs=1e-12)
        assert 0.48 <= dist.counts["1"] / 10000 <= 0.52

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            sample(bell(), shots=0, seed=0)

    def test_determinism(self):
        a = sample(bell(), shots=500, seed=123)
        b = sample(bell(), shots=500, seed=123)
        assert a.counts == b.counts

    def test_mid_circuit_measurement_path(self):
        circuit = Circuit(1, 1, [GateOp("h", (0,)), Measurement(0, 0),
                                 GateOp("x", (0,), classical_condition=0)])
        # measure then conditionally flip: every shot ends in |0>
        dist = sample(circuit, shots=200, seed=5)
        assert dist.counts == {"0": 200}

    def test_no_zero_count_keys(self):
        dist = sample(bell(), shots=50, seed=3)
        assert all(count > 0 for count in dist.counts.values())


class TestMeasurementDistribution:
    def test_rejects_count_mismatch(self):
        with pytest.raises(ValueError):
            MeasurementDistribution(1, 10, {"0": 5})

    def test_rejects_bad_key(self):
        with pytest.raises(ValueError):
            MeasurementDistribution(2, 1, {"0x": 1})

    def test_rejects_zero_count(self):
        with pytest.raises(ValueError):
            MeasurementDistribution(1, 1, {"0": 1, "1": 0})


class TestExactDistribution:
    def test_bell(self):
        dist = exact_distribution(bell())
        assert set(dist) == {"00", "11"}
        assert dist["00"] == pytest.approx(0.5, abs=1e-12)
        assert dist["11"] == pytest.approx(0.5, abs=1e-12)

    def test_uniform_three_qubits(self):
        circuit = Circuit(3, 0, [GateOp("h", (q,)) for q in range(3)])
        dist = exact_distribution(circuit)
        assert len(dist) == 8
        for p in dist.values():
            assert p == pytest.approx(0.125, abs=1e-12)

    def test_qft_of_basis_state_is_uniform(self):
        circuit = build_qft("10000")
        directive_positions = [i for i, item in enumerate(circuit.items)
                               if isinstance(item, AssertionDirective)]
        after_transform = directive_positions[2]
        dist = exact_distribution(circuit, upto=after_transform)
        assert len(dist) == 32
        for p in dist.values():
            assert p == pytest.approx(1.0 / 32.0, abs=1e-9)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)

    def test_branches_on_measurement(self):
        circuit = Circuit(1, 1, [GateOp("h", (0,)), Measurement(0, 0),
                                 GateOp("x", (0,), classical_condition=0)])
        dist = exact_distribution(circuit)
        assert dist["0"] == pytest.approx(1.0, abs=1e-12)

    def test_too_many_measurements_raises(self):
        items = [GateOp("h", (0,))]
        items += [Measurement(0, i) for i in range(17)]
        circuit = Circuit(1, 17, items)
        with pytest.raises(CapacityError):
            exact_distribution(circuit)

    def test_probabilities_sum_to_one(self):
        circuit = teleport = Circuit(2, 1, [
            GateOp("rx", (0,), angle=1.234),
            Measurement(0, 0),
            GateOp("x", (1,), classical_condition=0),
            GateOp("h", (0,)),
        ])
        dist = exact_distribution(teleport)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


class TestMarginalize:
    def test_single_qubit(self):
        dist = MeasurementDistribution(2, 1000, {"00": 600, "11": 400})
        marg = marginalize(dist, [0])
        assert marg.counts == {"0": 600, "1": 400}

    def test_other_qubit(self):
        dist = MeasurementDistribution(2, 1000, {"01": 250, "10": 750})
        marg = marginalize(dist, [1])
        assert marg.counts == {"1": 250, "0": 750}

    def test_identity(self):
        dist = MeasurementDistribution(2, 100, {"00": 30, "01": 20, "10": 25, "11": 25})
        marg = marginalize(dist, [0, 1])
        assert marg.counts == dist.counts

    def test_reorder(self):
        dist = MeasurementDistribution(2, 10, {"01": 10})
        marg = marginalize(dist, [1, 0])
        assert marg.counts == {"10": 10}

    def test_duplicate_index_rejected(self):
        dist = MeasurementDistribution(2, 10, {"00": 10})
        with pytest.raises(ValueError):
            marginalize(dist, [0, 0])

    def test_invalid_index_rejected(self):
        dist = MeasurementDistribution(2, 10, {"00": 10})
        with pytest.raises(ValueError):
            marginalize(dist, [2])

    def test_total_preserved(self):
        dist = sample(bell(), shots=777, seed=2)
        assert marginalize(dist, [1]).shots == 777
        assert sum(marginalize(dist, [1]).counts.values()) == 777


class TestConvergence:
    def test_total_variation_shrinks_with_shots(self):
        # Seed ladder: the empirical distribution at 10,000 shots must be
        # closer to exact than at 100 shots for at least 9 of 10 seeds.
        circuit = bell()
        exact = exact_distribution(circuit)
        improved = 0
        for seed in range(10):
            tv_small = tv_distance(sample(circuit, shots=100, seed=seed).counts,
                                   100, exact)
            tv_large = tv_distance(sample(circuit, shots=10000, seed=seed).counts,
                                   10000, exact)
            improved += tv_large < tv_small
        assert improved >= 9

    def test_trajectory_and_state_sampling_agree(self):
        # Same measurement-free circuit through both sampling paths.
        circuit = bell()
        by_state = sample(circuit, shots=10000, seed=11)
        by_trajectory = sample(circuit, shots=10000, seed=22, force_trajectory=True)
        tv = 0.5 * sum(
            abs(by_state.counts.get(k, 0) - by_trajectory.counts.get(k, 0)) / 10000
            for k in set(by_state.counts) | set(by_trajectory.counts))
        assert tv < 0.05
