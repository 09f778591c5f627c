#!/usr/bin/env python3

"""
test_circuit
============

Tests for the layout and circuit builders of the `foldsurf` package.
"""

# Import third-party libraries
import unittest

# Import the library being test and auxiliary libraries
import foldsurf
from foldsurf import (
    CircuitError,
    Coord,
    InstructionKind,
    MidCycleLabel,
    NoiseKind,
    Pauli,
    RoundKind,
    Timestamp,
)


class TestLayout(unittest.TestCase):
    """
    Class for `foldsurf` tests related to layouts.
    """

    def test_distance_three(self):
        layout = foldsurf.build_layout(3)

        assert len(layout.data) == 9
        assert set(layout.ancilla_x) == {Coord(1, 1), Coord(3, 3), Coord(3, -1), Coord(1, 5)}
        assert set(layout.ancilla_z) == {Coord(3, 1), Coord(1, 3), Coord(-1, 1), Coord(5, 3)}
        assert len(layout.half_cycle_qubits) == 13
        assert set(layout.boundary_ancillas) == {
            Coord(3, -1),
            Coord(1, 5),
            Coord(-1, 1),
            Coord(5, 3),
        }

    def test_counts(self):
        for d in [3, 5, 7, 9]:
            layout = foldsurf.build_layout(d)
            assert len(layout.data) == d * d
            assert len(layout.ancilla_x) == len(layout.ancilla_z) == (d * d - 1) // 2
            assert len(layout.half_cycle_qubits) == 2 * d * d - 2 * d + 1
            assert len(layout.boundary_ancillas) == 2 * d - 2

            weights = sorted(len(layout.stabilizer_support[a]) for a in layout.ancillas)
            assert weights.count(2) == 2 * (d - 1)
            assert weights.count(4) == (d - 1) ** 2

    def test_stabilizers_commute(self):
        layout = foldsurf.build_layout(5)
        stabilizers = [layout.stabilizer(a) for a in layout.ancillas]
        for a in stabilizers:
            for b in stabilizers:
                assert a.commutes(b)
            assert a.commutes(layout.logical_x)
            assert a.commutes(layout.logical_z)

        assert not layout.logical_x.commutes(layout.logical_z)
        assert layout.logical_x.weight == layout.logical_z.weight == 5

    def test_fold_targets(self):
        layout = foldsurf.build_layout(3)
        phases = dict(layout.fold_phase_targets)
        assert phases == {
            Coord(0, 0): InstructionKind.S,
            Coord(2, 2): InstructionKind.S,
            Coord(4, 4): InstructionKind.S,
            Coord(1, 1): InstructionKind.Sdag,
            Coord(3, 3): InstructionKind.Sdag,
        }
        assert len(layout.fold_cz_pairs) == 4
        for a, b in layout.fold_cz_pairs:
            assert b == a.mirrored()
            assert not layout.is_boundary(a) and not layout.is_boundary(b)

    def test_invalid_distance(self):
        for d in [1, 2, 4]:
            with self.assertRaises(CircuitError):
                foldsurf.build_layout(d)


class TestCircuits(unittest.TestCase):
    """
    Class for `foldsurf` tests related to the circuit families.
    """

    def test_x_memory(self):
        circuit = foldsurf.build_x_memory(3)
        assert circuit.round_kinds == tuple(
            [RoundKind.Init] + [RoundKind.ISE] * 6 + [RoundKind.FinalMeas]
        )
        assert circuit.se_rounds == tuple(range(1, 7))
        assert circuit.final_round == 7
        assert len(circuit.layers) == 1 + 6 * 6 + 1
        assert len(circuit.measurements()) == 8 * 6 + 9
        assert len(circuit.resets()) == 9 + 8 * 6

        # every live qubit is touched exactly once per layer of a round
        for ts, layer in circuit.layers:
            if ts.round in circuit.se_rounds:
                touched = [q for instr in layer for q in instr.targets]
                assert sorted(touched) == sorted(circuit.layout.qubits)

    def test_s2(self):
        circuit = foldsurf.build_s2(3, 2, 4)
        kinds = [str(kind) for kind in circuit.round_kinds]
        assert kinds == ["Init"] + ["ISE"] * 2 + ["SSE"] + ["ISE"] * 4 + ["SSE"] + ["ISE"] * 2 + [
            "FinalMeas"
        ]
        assert circuit.sse_rounds == (3, 8)

        layer_map = circuit.layer_map()
        fold = layer_map[Timestamp(3, MidCycleLabel.PostS)]
        kinds = [instr.kind for instr in fold]
        assert kinds.count(InstructionKind.S) == 3
        assert kinds.count(InstructionKind.Sdag) == 2
        assert kinds.count(InstructionKind.CZ) == 4
        assert Timestamp(4, MidCycleLabel.PostS) not in layer_map

    def test_build_rounds(self):
        circuit = foldsurf.build_rounds(3, [RoundKind.ISE, RoundKind.SSE])
        assert circuit.sse_rounds == (2,)

        with self.assertRaises(CircuitError):
            foldsurf.build_rounds(3, [RoundKind.Init])

    def test_invalid_parameters(self):
        with self.assertRaises(CircuitError):
            foldsurf.build_x_memory(3, 0)
        with self.assertRaises(CircuitError):
            foldsurf.build_s2(3, 0, 2)
        with self.assertRaises(CircuitError):
            foldsurf.build_s2(3, 2, 0)


class TestNoise(unittest.TestCase):
    """
    Class for `foldsurf` tests related to circuit-level noise.
    """

    def test_channel_counts(self):
        rounds = 4
        circuit = foldsurf.apply_noise(foldsurf.build_x_memory(3, rounds), 1e-3)
        counts = {}
        for channel in circuit.channels:
            counts[channel.kind] = counts.get(channel.kind, 0) + 1

        assert counts[NoiseKind.Depolarize2] == 24 * rounds
        assert counts[NoiseKind.FlipMeasure] == 8 * rounds + 9
        assert counts[NoiseKind.FlipReset] == 8 * rounds + 9
        assert counts[NoiseKind.PreRoundDepolarize1] == 9 * rounds
        assert [channel.id for channel in circuit.channels] == list(range(len(circuit.channels)))
        assert circuit.noise_strength == 1e-3

    def test_channel_placement(self):
        circuit = foldsurf.apply_noise(foldsurf.build_x_memory(3, 2), 1e-3)
        for channel in circuit.channels:
            if channel.kind == NoiseKind.FlipMeasure:
                assert channel.timestamp.label == MidCycleLabel.PreMeasure
            elif channel.kind in (NoiseKind.FlipReset, NoiseKind.PreRoundDepolarize1):
                assert channel.timestamp.label == MidCycleLabel.PostReset

        flips = {
            channel.targets[0]: channel.flip
            for channel in circuit.channels
            if channel.kind == NoiseKind.FlipMeasure and channel.timestamp.round == 1
        }
        assert flips[Coord(1, 1)] == Pauli.Z
        assert flips[Coord(3, 1)] == Pauli.X

    def test_components(self):
        circuit = foldsurf.apply_noise(foldsurf.build_x_memory(3, 2), 0.03)
        for channel in circuit.channels:
            components = channel.components()
            total = sum(prob for _, prob in components)
            assert abs(total - 0.03) < 1e-12
            if channel.kind == NoiseKind.Depolarize2:
                assert len(components) == 15

    def test_noise_bounds(self):
        circuit = foldsurf.build_x_memory(3, 2)
        assert foldsurf.apply_noise(circuit, 0.0).channels == ()
        with self.assertRaises(CircuitError):
            foldsurf.apply_noise(circuit, 0.5)
        with self.assertRaises(CircuitError):
            foldsurf.apply_noise(circuit, -0.1)


if __name__ == "__main__":
    # Explicitly creating and running a test suite allows to profile
    suite = unittest.TestSuite()
    for case in [TestLayout, TestCircuits, TestNoise]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    unittest.TextTestRunner(verbosity=2).run(suite)
