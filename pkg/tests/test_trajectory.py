#!/usr/bin/env python3

"""
test_trajectory
===============

Tests for stabilizer trajectories and detector enumeration.
"""

# Import third-party libraries
import unittest

# Import the library being test and auxiliary libraries
import foldsurf
from foldsurf import (
    Coord,
    DetectorClass,
    DetectorError,
    MeasurementLocation,
    Pauli,
    ResetLocation,
    SparsePauli,
    Timestamp,
    TrajectoryStatus,
)
from foldsurf.circuit import Instruction, InstructionKind
from foldsurf.model import MidCycleLabel
from foldsurf.trajectory import detectors_independent, propagate_layer, step_measure_reset


class TestPropagation(unittest.TestCase):
    """
    Class for `foldsurf` tests related to Clifford conjugation.
    """

    def setUp(self):
        self.a, self.b = Coord(0, 0), Coord(1, 1)
        self.ts = Timestamp(1, MidCycleLabel.HalfCycle)

    def test_cx(self):
        layer = [Instruction(InstructionKind.CX, (self.a, self.b), self.ts)]

        tests = [
            ({self.a: Pauli.X}, {self.a: Pauli.X, self.b: Pauli.X}),
            ({self.b: Pauli.Z}, {self.a: Pauli.Z, self.b: Pauli.Z}),
            ({self.b: Pauli.X}, {self.b: Pauli.X}),
            ({self.a: Pauli.Z}, {self.a: Pauli.Z}),
        ]
        for before, after in tests:
            assert propagate_layer(SparsePauli(before), layer) == SparsePauli(after)

    def test_single_qubit(self):
        def apply(kind, pauli):
            layer = [Instruction(kind, (self.a,), self.ts)]
            return propagate_layer(SparsePauli.single(self.a, pauli), layer)

        assert apply(InstructionKind.H, Pauli.X) == SparsePauli.single(self.a, Pauli.Z)
        assert apply(InstructionKind.H, Pauli.Y) == SparsePauli.single(self.a, Pauli.Y, -1)
        assert apply(InstructionKind.S, Pauli.X) == SparsePauli.single(self.a, Pauli.Y)
        assert apply(InstructionKind.S, Pauli.Y) == SparsePauli.single(self.a, Pauli.X, -1)
        assert apply(InstructionKind.Sdag, Pauli.X) == SparsePauli.single(self.a, Pauli.Y, -1)
        assert apply(InstructionKind.Idle, Pauli.Z) == SparsePauli.single(self.a, Pauli.Z)

    def test_cz(self):
        layer = [Instruction(InstructionKind.CZ, (self.a, self.b), self.ts)]
        state = SparsePauli({self.a: Pauli.X, self.b: Pauli.X})

        # XX -> (XZ)(ZX) = (-iY)(iY) = YY
        assert propagate_layer(state, layer) == SparsePauli({self.a: Pauli.Y, self.b: Pauli.Y})

    def test_rejects_non_unitary(self):
        layer = [Instruction(InstructionKind.MeasZ, (self.a,), self.ts)]
        with self.assertRaises(ValueError):
            propagate_layer(SparsePauli.single(self.a, Pauli.Z), layer)

    def test_measure_reset_step(self):
        meas_z = MeasurementLocation(Pauli.Z, self.a, 1)
        state = SparsePauli({self.a: Pauli.Z, self.b: Pauli.X})

        step = step_measure_reset(state, [meas_z], outcomes={meas_z: 1})
        assert step.absorbed == [meas_z]
        assert step.state == SparsePauli.single(self.b, Pauli.X, -1)

        meas_x = MeasurementLocation(Pauli.X, self.a, 1)
        step = step_measure_reset(state, [meas_x])
        assert step.state is None and step.annihilated_by == meas_x

        reset = ResetLocation(Pauli.X, Coord(2, 2), 2)
        step = step_measure_reset(state, resets=[reset], generating=frozenset([reset]))
        assert step.state[Coord(2, 2)] == Pauli.X


class TestTrajectories(unittest.TestCase):
    """
    Class for `foldsurf` tests related to trajectories of the memory circuit.
    """

    def test_z_pair(self):
        circuit = foldsurf.build_x_memory(3, 3)
        ancilla = Coord(3, 1)
        resets = [ResetLocation(Pauli.Z, ancilla, 1), ResetLocation(Pauli.Z, ancilla, 2)]
        trajectory = foldsurf.propagate_trajectory(circuit, resets)

        assert trajectory.status == TrajectoryStatus.FullyAbsorbed
        assert trajectory.measurements == {
            MeasurementLocation(Pauli.Z, ancilla, 1),
            MeasurementLocation(Pauli.Z, ancilla, 2),
        }
        assert trajectory.reference_parity == 0

        # before the first reset the region is empty
        assert trajectory.at(Timestamp(0, MidCycleLabel.PostReset)).is_identity
        half = trajectory.at(Timestamp(2, MidCycleLabel.HalfCycle))
        assert half is not None and half.weight >= 2

    def test_annihilated(self):
        circuit = foldsurf.build_x_memory(3, 3)
        # a single Z reset on an X-initialized data qubit meets the X readout
        trajectory = foldsurf.propagate_trajectory(
            circuit, [ResetLocation(Pauli.X, Coord(2, 2), 0), ResetLocation(Pauli.Z, Coord(3, 1), 1)]
        )
        assert trajectory.status == TrajectoryStatus.Annihilated
        assert trajectory.annihilated_by is not None

    def test_unknown_reset(self):
        circuit = foldsurf.build_x_memory(3, 2)
        with self.assertRaises(DetectorError):
            foldsurf.propagate_trajectory(circuit, [ResetLocation(Pauli.Z, Coord(1, 1), 1)])
        with self.assertRaises(DetectorError):
            foldsurf.propagate_trajectory(circuit, [])

    def test_logical_observable(self):
        circuit = foldsurf.build_x_memory(5, 3)
        observable, trajectory = foldsurf.logical_observable(circuit)

        assert trajectory.status == TrajectoryStatus.FullyAbsorbed
        assert observable.reference_value == 0
        assert observable.measurements == {
            MeasurementLocation(Pauli.X, Coord(0, 2 * y), circuit.final_round) for y in range(5)
        }


class TestDetectors(unittest.TestCase):
    """
    Class for `foldsurf` tests related to detector enumeration.
    """

    def test_memory_counts(self):
        for d, rounds in [(3, 1), (3, 4), (5, 3)]:
            circuit = foldsurf.build_x_memory(d, rounds)
            detectors = foldsurf.enumerate_detectors(circuit)
            n_anc = (d * d - 1) // 2

            z_dets = [det for det in detectors if det.basis_class == DetectorClass.ZDet]
            x_dets = [det for det in detectors if det.basis_class == DetectorClass.XDet]
            assert len(z_dets) == n_anc * (rounds - 1)
            assert len(x_dets) == n_anc * (rounds + 1)
            assert [det.id for det in detectors] == list(range(len(detectors)))
            assert {det.shape for det in detectors} <= {"pair", "init", "final"}
            assert all(det.reference_parity == 0 for det in detectors)

    def test_sorted_by_coordinate(self):
        detectors = foldsurf.enumerate_detectors(foldsurf.build_x_memory(3, 3))
        keys = [det.sort_key() for det in detectors]
        assert keys == sorted(keys)
        assert detectors[0].coordinate[2] == 1
        assert detectors[-1].shape == "final"
        assert detectors[-1].coordinate[2] == 2 * 3 + 1

    def test_independence(self):
        circuit = foldsurf.build_x_memory(3, 3)
        assert detectors_independent(circuit, foldsurf.enumerate_detectors(circuit))

        circuit = foldsurf.build_s2(3, 1, 2)
        assert detectors_independent(circuit, foldsurf.enumerate_detectors(circuit))

    def test_fold_detectors(self):
        circuit = foldsurf.build_s2(3, 1, 2)
        detectors = foldsurf.enumerate_detectors(circuit)
        rounds = len(circuit.se_rounds)
        assert len(detectors) == 8 * rounds

        extended = [det for det in detectors if det.shape not in ("pair", "init", "final")]
        assert extended

        for det in detectors:
            if det.basis_class == DetectorClass.ZDet:
                assert det.shape == "pair"
            elif det.shape.startswith("pair"):
                x_meas = [m for m in det.measurements if m.basis == Pauli.X]
                assert len(det.measurements) <= 3
                assert len(x_meas) == 2
                assert len({m.coord for m in x_meas}) == 1

    def test_detecting_region(self):
        circuit = foldsurf.build_s2(3, 1, 2)
        detectors = foldsurf.enumerate_detectors(circuit)
        for det in detectors[:: max(1, len(detectors) // 10)]:
            region = foldsurf.detecting_region(det, circuit)
            assert region.measurements == det.measurements


if __name__ == "__main__":
    # Explicitly creating and running a test suite allows to profile
    suite = unittest.TestSuite()
    for case in [TestPropagation, TestTrajectories, TestDetectors]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    unittest.TextTestRunner(verbosity=2).run(suite)
