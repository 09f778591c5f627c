#!/usr/bin/env python3

"""
test_parser
===========

Tests for the text formats of the `foldsurf` package.
"""

# Import third-party libraries
import unittest

import numpy as np

# Import the library being test and auxiliary libraries
import foldsurf
from foldsurf import FormatError
from foldsurf.parser import _decode_bits, _encode_bits


class TestCircuitText(unittest.TestCase):
    """
    Class for `foldsurf` tests related to the circuit text format.
    """

    def test_round_trip(self):
        circuits = [
            foldsurf.build_x_memory(3, 2),
            foldsurf.apply_noise(foldsurf.build_s2(3, 1, 1), 1e-3),
        ]
        for circuit in circuits:
            text = foldsurf.format_circuit(circuit)
            restored = foldsurf.read_circuit(text)

            assert restored == circuit
            assert foldsurf.format_circuit(restored) == text

    def test_layout(self):
        circuit = foldsurf.apply_noise(foldsurf.build_x_memory(3, 1), 0.002)
        lines = foldsurf.format_circuit(circuit).splitlines()

        assert lines[0] == "DISTANCE 3"
        assert lines[1] == "ROUNDS Init ISE FinalMeas"
        assert lines[2] == "STRENGTH 0.002"
        assert lines[3] == "ResetX 0,0 @ PostReset:0"
        assert "CX 1,1 0,0 @ AfterLayer1:1" in lines
        assert "MeasZ -1,1 @ EndCycle:1" in lines
        assert lines[-1].startswith("NOISE ")
        assert "NOISE FlipMeasure 0.002 0,0 @ PreMeasure:2" in lines

    def test_comments_and_blanks(self):
        text = foldsurf.format_circuit(foldsurf.build_x_memory(3, 1))
        commented = "# a memory circuit\n\n" + text.replace("\n", "\n\n", 2)
        assert foldsurf.read_circuit(commented) == foldsurf.read_circuit(text)

    def test_digest(self):
        circuit = foldsurf.build_x_memory(3, 2)
        digest = foldsurf.circuit_digest(circuit)

        assert len(digest) == 64
        assert digest == foldsurf.circuit_digest(foldsurf.read_circuit(foldsurf.format_circuit(circuit)))
        assert digest != foldsurf.circuit_digest(foldsurf.apply_noise(circuit, 1e-3))

    def test_errors(self):
        header = "DISTANCE 3\nROUNDS Init ISE FinalMeas\n"
        tests = [
            "ROUNDS Init ISE FinalMeas\n",
            "DISTANCE three\n",
            header + "ResetX 0,0 @ Nowhere:0\n",
            header + "Swap 0,0 @ PostReset:0\n",
            "DISTANCE 3\nROUNDS Init Mystery FinalMeas\n",
            header + "CX 0,0 @ AfterLayer1:1\n",
            header + "NOISE FlipMeasure 0.1 0,0 @ PreMeasure:1\n",
            header + "NOISE Depolarize1 2.5 0,0 @ PostReset:1\n",
        ]
        for text in tests:
            with self.assertRaises(FormatError):
                foldsurf.read_circuit(text)

    def test_line_number(self):
        text = "DISTANCE 3\nROUNDS Init ISE FinalMeas\nCX 1,1 @@ 2\n"
        try:
            foldsurf.read_circuit(text)
        except FormatError as exc:
            assert str(exc).startswith("line 3:")
        else:
            raise AssertionError("malformed line was accepted")


class TestListings(unittest.TestCase):
    """
    Class for `foldsurf` tests related to detector and DEM listings.
    """

    def test_detectors(self):
        circuit = foldsurf.build_x_memory(3, 2)
        detectors = foldsurf.enumerate_detectors(circuit)
        lines = foldsurf.format_detectors(detectors).splitlines()

        assert len(lines) == len(detectors)
        assert all(line.startswith("DET ") for line in lines)
        fields = lines[0].split()
        assert fields[3] == "1" and fields[4] == ":"
        assert fields[5] == "M"

    def test_dem(self):
        circuit = foldsurf.apply_noise(foldsurf.build_x_memory(3, 2), 1e-3)
        hypergraph = foldsurf.build_hypergraph(circuit)
        lines = foldsurf.format_dem(hypergraph).splitlines()

        assert len(lines) == len(hypergraph.edges)
        for line, edge in zip(lines, hypergraph.edges):
            fields = line.split()
            assert fields[0] == "EDGE"
            assert abs(float(fields[1]) - edge.probability) < 1e-12
            assert fields[4] == f"L:{int(edge.logical_flip)}"


class TestShots(unittest.TestCase):
    """
    Class for `foldsurf` tests related to the shot dump.
    """

    def test_encoding(self):
        tests = [
            ([0] * 16, "0*4."),
            ([1, 0, 0, 0, 0, 0, 0, 0, 1], "808"),
            ([1] * 8 + [0] * 4, "ff0"),
            ([1] * 12, "f*3."),
            ([], ""),
        ]
        for bits, digits in tests:
            assert _encode_bits(bits) == digits

        assert _decode_bits("808", 9).tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 1]
        with self.assertRaises(FormatError):
            _decode_bits("80", 9)

    def test_round_trip(self):
        rng = np.random.default_rng(17)
        det_bits = (rng.random((12, 37)) < 0.1).astype(np.uint8)
        det_bits[3] = 0
        logical = rng.integers(0, 2, size=12).astype(np.uint8)

        text = foldsurf.format_shots(det_bits, logical, "ab" * 32, seed=42)
        assert text.splitlines()[0] == f"# circuit={'ab' * 8} seed=42 detectors=37"
        assert text.splitlines()[4] == f"0*10. {logical[3]}"

        header, bits, bits_logical = foldsurf.read_shots(text)
        assert header == {"circuit": "ab" * 8, "seed": 42, "detectors": 37}
        assert np.array_equal(bits, det_bits)
        assert np.array_equal(bits_logical, logical)

    def test_sampled_shots(self):
        spec = foldsurf.ExperimentSpec(family=foldsurf.Family.XMemory, d=3, p=0.01, rounds=2, shots=20, seed=3)
        experiment = foldsurf.CompiledExperiment.compile(spec)
        det_bits, logical = experiment.sample(0, 20)
        digest = foldsurf.circuit_digest(experiment.circuit)

        header, bits, bits_logical = foldsurf.read_shots(
            foldsurf.format_shots(det_bits, logical, digest, spec.seed)
        )
        assert digest.startswith(header["circuit"])
        assert np.array_equal(bits, det_bits)
        assert np.array_equal(bits_logical, logical)

    def test_errors(self):
        with self.assertRaises(FormatError):
            foldsurf.read_shots("")
        with self.assertRaises(FormatError):
            foldsurf.read_shots("0*4. 1\n")

        header = "# circuit=abcd seed=1 detectors=8\n"
        for record in ["00", "0g 1", "00 2", "000 1"]:
            with self.assertRaises(FormatError):
                foldsurf.read_shots(header + record + "\n")

        header_only = foldsurf.read_shots(header)
        assert header_only[1].shape == (0, 8)


if __name__ == "__main__":
    # Explicitly creating and running a test suite allows to profile
    suite = unittest.TestSuite()
    for case in [TestCircuitText, TestListings, TestShots]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    unittest.TextTestRunner(verbosity=2).run(suite)
