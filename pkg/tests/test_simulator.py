#!/usr/bin/env python3

"""
test_simulator
==============

Tests for the tableau and Pauli-frame simulators.
"""

# Import third-party libraries
import unittest

import numpy as np

# Import the library being test and auxiliary libraries
import foldsurf
from foldsurf import Coord, MidCycleLabel, Pauli, RoundKind, SparsePauli, Timestamp
from foldsurf.simulator import rotation_map


def morphed_generators(layout):
    """
    Generators expected at half-cycle of a plain round of an X-memory: the
    unrotated code on data and bulk ancillas, its logical X, and single-qubit
    stabilizers on the boundary ancillas.
    """

    d = layout.distance
    live = set(layout.half_cycle_qubits)
    offsets = [(1, 0), (-1, 0), (0, 1), (0, -1)]

    def check(x2, y2, pauli):
        support = [Coord(x2 + dx, y2 + dy) for dx, dy in offsets]
        return SparsePauli.uniform([q for q in support if q in live], pauli)

    generators = [
        check(x2, y2, Pauli.X) for x2 in range(1, 2 * d - 2, 2) for y2 in range(0, 2 * d - 1, 2)
    ]
    generators += [
        check(x2, y2, Pauli.Z) for x2 in range(0, 2 * d - 1, 2) for y2 in range(1, 2 * d - 2, 2)
    ]
    generators.append(layout.logical_x)
    for ancilla in layout.boundary_ancillas:
        generators.append(SparsePauli.single(ancilla, layout.ancilla_basis(ancilla)))

    return generators


def logical_y(layout):
    support = {q: Pauli.X for q in layout.data if q.x2 == 0}
    support.update({q: Pauli.Z for q in layout.data if q.y2 == 0})
    support[Coord(0, 0)] = Pauli.Y

    return SparsePauli(support)


class TestTableau(unittest.TestCase):
    """
    Class for `foldsurf` tests related to the stabilizer tableau.
    """

    def setUp(self):
        self.a, self.b = Coord(0, 0), Coord(2, 0)

    def test_bell_state(self):
        tableau = foldsurf.Tableau([self.a, self.b])
        tableau.h(self.a)
        tableau.cx(self.a, self.b)

        xx = SparsePauli.uniform([self.a, self.b], Pauli.X)
        zz = SparsePauli.uniform([self.a, self.b], Pauli.Z)
        yy = SparsePauli.uniform([self.a, self.b], Pauli.Y)
        assert tableau.expectation(xx) == 1
        assert tableau.expectation(zz) == 1
        assert tableau.expectation(yy) == -1
        assert tableau.expectation(yy.negated()) == 1
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.Z)) == 0

        assert tableau.measure_z(self.a, 1) == (1, True)
        assert tableau.measure_z(self.b) == (1, False)

    def test_phase_gates(self):
        tableau = foldsurf.Tableau([self.a])
        tableau.h(self.a)
        tableau.s(self.a)
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.Y)) == 1

        tableau.sdag(self.a)
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.X)) == 1

        tableau.pauli(SparsePauli.single(self.a, Pauli.Z))
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.X)) == -1

    def test_resets(self):
        tableau = foldsurf.Tableau([self.a])
        tableau.h(self.a)
        tableau.reset_z(self.a)
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.Z)) == 1
        tableau.reset_x(self.a)
        assert tableau.expectation(SparsePauli.single(self.a, Pauli.X)) == 1
        assert tableau.measure_x(self.a) == (0, False)

    def test_canonical_form(self):
        qubits = [self.a, self.b]
        xx = SparsePauli.uniform(qubits, Pauli.X)
        zz = SparsePauli.uniform(qubits, Pauli.Z)
        yy = SparsePauli.uniform(qubits, Pauli.Y)

        assert foldsurf.canonical_form([xx, zz], qubits) == foldsurf.canonical_form(
            [xx, yy.negated()], qubits
        )
        assert foldsurf.canonical_form([xx, zz], qubits) != foldsurf.canonical_form(
            [xx, yy], qubits
        )
        assert foldsurf.canonical_form(
            [xx, zz], qubits, signed=False
        ) == foldsurf.canonical_form([xx, yy], qubits, signed=False)


class TestCircuitStates(unittest.TestCase):
    """
    Class for `foldsurf` tests related to noiseless circuit states.
    """

    def test_half_cycle_morphing(self):
        for d in [3, 5]:
            circuit = foldsurf.build_x_memory(d, 2)
            layout = circuit.layout
            found = foldsurf.stabilizer_group_at(
                circuit, Timestamp(2, MidCycleLabel.HalfCycle), signed=False
            )
            expected = foldsurf.canonical_form(
                morphed_generators(layout), layout.qubits, signed=False
            )
            assert found == expected

    def test_fold_applies_logical_s(self):
        circuit = foldsurf.build_rounds(3, [RoundKind.SSE])
        layout = circuit.layout
        end = Timestamp(1, MidCycleLabel.EndCycle)
        tableau = foldsurf.reference_run(circuit, snapshots=[end]).snapshots[end]

        assert tableau.expectation(logical_y(layout)) != 0
        assert tableau.expectation(layout.logical_x) == 0
        assert tableau.expectation(layout.logical_z) == 0

        circuit = foldsurf.build_rounds(3, [RoundKind.SSE, RoundKind.SSE])
        end = Timestamp(2, MidCycleLabel.EndCycle)
        tableau = foldsurf.reference_run(circuit, snapshots=[end]).snapshots[end]

        assert tableau.expectation(layout.logical_x) != 0
        assert tableau.expectation(logical_y(layout)) == 0

    def test_memory_keeps_logical_x(self):
        circuit = foldsurf.build_x_memory(3, 3)
        end = Timestamp(3, MidCycleLabel.EndCycle)
        tableau = foldsurf.reference_run(circuit, snapshots=[end]).snapshots[end]
        assert tableau.expectation(circuit.layout.logical_x) == 1
        for ancilla in circuit.layout.ancilla_x:
            assert tableau.expectation(circuit.layout.stabilizer(ancilla)) != 0

    def test_detector_parities(self):
        circuit = foldsurf.build_s2(3, 1, 2)
        detectors = foldsurf.enumerate_detectors(circuit)
        observable, _ = foldsurf.logical_observable(circuit)

        for seed in [None, 3, 11]:
            run = foldsurf.reference_run(circuit, seed=seed)
            for det in detectors:
                parity = sum(run.record[meas] for meas in det.measurements) % 2
                assert parity == det.reference_parity
            logical = sum(run.record[meas] for meas in observable.measurements) % 2
            assert logical == observable.reference_value

    def test_rotation(self):
        for d in [3, 5, 7]:
            layout = foldsurf.build_layout(d)
            assert foldsurf.rotated_stabilizer_check(layout)

            mapping = rotation_map(layout)
            assert sorted(mapping.values()) == sorted(layout.qubits)
            assert mapping[Coord(0, 0)] == Coord(0, 2 * layout.center)


class TestFrameSimulator(unittest.TestCase):
    """
    Class for `foldsurf` tests related to Pauli-frame sampling.
    """

    def setUp(self):
        self.circuit = foldsurf.build_x_memory(3, 3)
        self.detectors = foldsurf.enumerate_detectors(self.circuit)
        self.observable, _ = foldsurf.logical_observable(self.circuit)

    def test_noiseless(self):
        simulator = foldsurf.FrameSimulator(self.circuit, self.detectors, self.observable)
        det_bits, logical = simulator.sample(50, seed=1)

        assert det_bits.shape == (50, len(self.detectors))
        assert not det_bits.any()
        assert np.all(logical == self.observable.reference_value)

    def test_reproducible_shots(self):
        noisy = foldsurf.apply_noise(self.circuit, 0.02)
        simulator = foldsurf.FrameSimulator(noisy, self.detectors, self.observable)

        det_all, obs_all = simulator.sample(40, seed=7)
        det_tail, obs_tail = simulator.sample(20, seed=7, first_shot=20)
        det_small, obs_small = simulator.sample(40, seed=7, batch=6)

        assert np.array_equal(det_all[20:], det_tail)
        assert np.array_equal(obs_all[20:], obs_tail)
        assert np.array_equal(det_all, det_small)
        assert np.array_equal(obs_all, obs_small)
        assert det_all.any()

        other, _ = simulator.sample(40, seed=8)
        assert not np.array_equal(det_all, other)

    def test_injected_faults(self):
        simulator = foldsurf.FrameSimulator(self.circuit, self.detectors, self.observable)
        ts = Timestamp(2, MidCycleLabel.PostReset)

        # a Z on a data qubit flips the X checks around it in the next round
        det_bits, obs = simulator.inject([(ts, SparsePauli.single(Coord(2, 2), Pauli.Z))])
        flipped = {self.detectors[idx].coordinate for idx in np.nonzero(det_bits[0])[0]}
        assert flipped == {(1, 1, 3), (3, 3, 3)}
        assert obs[0] == 0

        # a Z chain across the patch flips the logical and no detector
        chain = SparsePauli.uniform([Coord(2 * x, 0) for x in range(3)], Pauli.Z)
        det_bits, obs = simulator.inject([(ts, chain)])
        assert not det_bits.any()
        assert obs[0] == 1

    def test_shot_records(self):
        noisy = foldsurf.apply_noise(self.circuit, 0.05)
        shots = foldsurf.sample_shots(noisy, self.detectors, self.observable, 10, seed=2)
        assert len(shots) == 10
        for shot in shots:
            assert shot.defects == set(np.nonzero(shot.detector_bits)[0].tolist())


if __name__ == "__main__":
    # Explicitly creating and running a test suite allows to profile
    suite = unittest.TestSuite()
    for case in [TestTableau, TestCircuitStates, TestFrameSimulator]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    unittest.TextTestRunner(verbosity=2).run(suite)
