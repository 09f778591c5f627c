#!/usr/bin/env python3

"""
test_harness
============

Tests for experiment orchestration and the command-line utility.
"""

# Import third-party libraries
import csv
import json
import math
import os
import tempfile
import unittest
from pathlib import Path

from scipy.stats import binom

# Import the library being test and auxiliary libraries
import foldsurf
from foldsurf import CircuitError, ExperimentSpec, Family
from foldsurf.__main__ import main
from foldsurf.harness import CSV_COLUMNS, expand_experiment


class TestIntervals(unittest.TestCase):
    """
    Class for `foldsurf` tests related to likelihood intervals and seeds.
    """

    def test_edges(self):
        mle, low, high = foldsurf.likelihood_interval(0, 100)
        assert mle == 0.0 and low == 0.0
        assert abs(high - (1.0 - 1000 ** (-1 / 100))) < 1e-12

        mle, low, high = foldsurf.likelihood_interval(5, 5)
        assert mle == 1.0 and high == 1.0
        assert abs(low - 1000 ** (-1 / 5)) < 1e-12

        assert foldsurf.likelihood_interval(0, 0) == (0.0, 0.0, 1.0)
        with self.assertRaises(ValueError):
            foldsurf.likelihood_interval(7, 5)

    def test_bracket(self):
        for errors, shots in [(1, 10), (10, 100), (37, 5000)]:
            mle, low, high = foldsurf.likelihood_interval(errors, shots)
            assert low < mle < high
            peak = binom.logpmf(errors, shots, mle)
            for bound in (low, high):
                assert abs(peak - binom.logpmf(errors, shots, bound) - math.log(1000)) < 1e-6

    def test_derive_seed(self):
        spec = ExperimentSpec(family=Family.XMemory, d=3, p=1e-3)
        seed = foldsurf.derive_seed(7, spec)

        assert seed == foldsurf.derive_seed(7, ExperimentSpec(family="xmemory", d=3, p=1e-3, seed=99))
        assert seed != foldsurf.derive_seed(8, spec)
        assert seed != foldsurf.derive_seed(7, ExperimentSpec(family=Family.XMemory, d=3, p=2e-3))
        assert 0 <= seed < 2 ** 63


class TestSpecs(unittest.TestCase):
    """
    Class for `foldsurf` tests related to experiment specifications.
    """

    def test_defaults(self):
        memory = ExperimentSpec(family=Family.XMemory, d=5, p=1e-3)
        assert memory.rounds == 10
        assert memory.n_pad is None and memory.n_m is None

        s2 = ExperimentSpec(family="s2", d=5, p=1e-3)
        assert s2.family == Family.S2
        assert (s2.n_pad, s2.n_m) == (3, 6)

    def test_invalid(self):
        for kwargs in [{"d": 4}, {"d": 1}, {"p": 0.5}, {"p": -0.1}, {"shots": -1}]:
            values = {"family": Family.XMemory, "d": 3, "p": 1e-3, **kwargs}
            with self.assertRaises(CircuitError):
                ExperimentSpec(**values)
        with self.assertRaises(ValueError):
            ExperimentSpec(family=Family.XMemory, d=3, p=1e-3, decoder="union-find")

    def test_expand(self):
        entry = {"family": "s2", "d": [3, 5], "p": [1e-3, 2e-3], "n_m": "d+1"}
        defaults = {"shots": 200, "max_errors": None, "decoder": "vtb"}
        specs = expand_experiment(entry, defaults)

        assert len(specs) == 4
        assert [spec.n_m for spec in specs] == [4, 4, 6, 6]
        assert all(spec.decoder == "vtb" and spec.shots == 200 for spec in specs)

    def test_load_config(self):
        data = {
            "master_seed": 11,
            "workers": 2,
            "shots": 500,
            "experiments": [
                {"family": "xmemory", "d": [3, 5], "p": 1e-3},
                {"family": "s2", "d": 3, "p": [1e-3, 2e-3], "decoder": "vtb-pr"},
            ],
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "sweep.json"
            path.write_text(json.dumps(data), encoding="utf-8")
            config = foldsurf.load_sweep_config(path)

        assert config.master_seed == 11 and config.workers == 2
        assert len(config.specs) == 4
        assert [spec.rounds for spec in config.specs[:2]] == [6, 10]
        assert all(spec.shots == 500 for spec in config.specs)
        assert config.specs[-1].decoder == "vtb-pr"

    def test_resources(self):
        resources = Path(__file__).parent.parent / "resources"
        sizes = {
            "memory_threshold.json": 42,
            "s2_versus_memory.json": 36,
            "s2_spacing.json": 36,
            "refinement_ordering.json": 54,
        }
        for name, size in sizes.items():
            config = foldsurf.load_sweep_config(resources / name)
            assert len(config.specs) == size

        config = foldsurf.load_sweep_config(resources / "refinement_ordering.json")
        assert all(spec.n_pad == 2 and spec.n_m == spec.d + 1 for spec in config.specs)
        assert {spec.decoder for spec in config.specs} == {"plain", "vtb-pr", "vtb-fr"}


class TestRuns(unittest.TestCase):
    """
    Class for `foldsurf` tests related to running experiments.
    """

    def test_noiseless(self):
        spec = ExperimentSpec(family=Family.XMemory, d=3, p=0.0, rounds=2, shots=50)
        row = foldsurf.run_experiment(spec, chunk_shots=20)

        assert row.shots_taken == 50
        assert row.logical_errors == 0
        assert row.ler_mle == 0.0

    def test_workers(self):
        spec = ExperimentSpec(family=Family.XMemory, d=3, p=0.02, rounds=2, shots=300, seed=5)
        single = foldsurf.run_experiment(spec, workers=1, chunk_shots=100)
        pooled = foldsurf.run_experiment(spec, workers=2, chunk_shots=100)

        assert single.shots_taken == pooled.shots_taken == 300
        assert single.logical_errors == pooled.logical_errors

    def test_early_stop(self):
        spec = ExperimentSpec(
            family=Family.XMemory, d=3, p=0.05, rounds=2, shots=2000, seed=2, max_errors=1
        )
        row = foldsurf.run_experiment(spec, chunk_shots=100)

        assert row.logical_errors >= 1
        assert row.shots_taken % 100 == 0 and row.shots_taken < 2000

    def test_sweep(self):
        specs = [
            ExperimentSpec(family=Family.XMemory, d=3, p=0.0, rounds=2, shots=40),
            ExperimentSpec(family=Family.S2, d=3, p=0.0, n_pad=1, n_m=2, shots=40),
        ]
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "sweep.csv"
            rows = foldsurf.sweep(specs, out=out, master_seed=3)
            with open(out, newline="") as handler:
                reader = csv.DictReader(handler)
                assert reader.fieldnames == CSV_COLUMNS
                records = list(reader)

        assert len(rows) == len(records) == 2
        assert [record["family"] for record in records] == ["xmemory", "s2"]
        assert records[1]["n_m"] == "2" and records[0]["n_m"] == ""
        assert all(record["errors"] == "0" for record in records)
        assert rows[0].spec.seed == foldsurf.derive_seed(3, specs[0])

    def test_verify(self):
        specs = [
            ExperimentSpec(family=Family.XMemory, d=3, p=0.0, rounds=2, seed=1),
            ExperimentSpec(family=Family.S2, d=3, p=1e-3, n_pad=1, n_m=2, seed=4),
        ]
        for spec in specs:
            report = foldsurf.verify_circuit(spec, shots=16)
            assert report.passed, report.to_lines()
            assert all(line.startswith("ok ") for line in report.to_lines())


class TestCommandLine(unittest.TestCase):
    """
    Class for `foldsurf` tests related to the command-line utility.
    """

    def test_build_and_sample(self):
        with tempfile.TemporaryDirectory() as tmp:
            circuit_file = Path(tmp) / "circuit.txt"
            shots_file = Path(tmp) / "shots.txt"
            decoded_file = Path(tmp) / "decoded.txt"

            args = ["--rounds", "2", "-p", "0.001", "--shots", "25", "--seed", "9"]
            assert main(["build", "--out", str(circuit_file)] + args) == 0
            assert main(["sample", "--out", str(shots_file)] + args) == 0
            assert (
                main(["decode", "--shots-file", str(shots_file), "--out", str(decoded_file)] + args)
                == 0
            )

            circuit = foldsurf.read_circuit(circuit_file.read_text(encoding="utf-8"))
            header, det_bits, _ = foldsurf.read_shots(shots_file.read_text(encoding="utf-8"))
            decoded = decoded_file.read_text(encoding="utf-8")

        assert foldsurf.circuit_digest(circuit).startswith(header["circuit"])
        assert det_bits.shape == (25, header["detectors"])
        assert decoded.startswith("shots=25 errors=")

    def test_aod_plan(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "plan.txt"
            assert main(["aod-plan", "-d", "5", "--out", str(out)]) == 0
            lines = out.read_text(encoding="utf-8").splitlines()

        assert all(line.startswith("BATCH ") for line in lines[:-1])
        assert lines[-1].endswith("violations=0 accepted=1")


class TestMetadata(unittest.TestCase):
    """
    Class for `foldsurf` tests related to package metadata.
    """

    def test_authors(self):
        root = Path(__file__).parent.parent
        setup_text = (root / "setup.py").read_text(encoding="utf-8")
        authors_text = (root / "AUTHORS.md").read_text(encoding="utf-8")

        assert foldsurf.__author__ == "foldsurf developers"
        assert f'author="{foldsurf.__author__}"' in setup_text
        assert foldsurf.__author__ in authors_text
        assert "author_email" not in setup_text
        assert f'version="{foldsurf.__version__}"' in setup_text


@unittest.skipUnless(os.environ.get("FOLDSURF_SLOW"), "set FOLDSURF_SLOW to run")
class TestScaling(unittest.TestCase):
    """
    Class for `foldsurf` tests comparing logical error rates across distances.
    """

    def test_memory_below_threshold(self):
        rates = []
        for d in [3, 5]:
            spec = ExperimentSpec(family=Family.XMemory, d=d, p=1e-3, shots=20000, seed=d)
            rates.append(foldsurf.run_experiment(spec, workers=2))

        assert rates[1].ler_mle < rates[0].ler_mle
        assert rates[1].ci_low <= rates[1].ler_mle <= rates[1].ci_high


if __name__ == "__main__":
    # Explicitly creating and running a test suite allows to profile
    suite = unittest.TestSuite()
    for case in [TestIntervals, TestSpecs, TestRuns, TestCommandLine, TestMetadata, TestScaling]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(case))
    unittest.TextTestRunner(verbosity=2).run(suite)
