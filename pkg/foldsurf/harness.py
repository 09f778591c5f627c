"""
Experiment orchestration: experiment specifications, Monte Carlo runs with
early stopping, likelihood intervals, sweeps written incrementally to CSV,
and oracle verification of a circuit family.
"""

import csv
import enum
import hashlib
import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.stats import binom

from .circuit import Circuit, apply_noise, build_s2, build_x_memory
from .common import LIKELIHOOD_FACTOR, CircuitError, FoldSurfError, NondeterminismError
from .dem import DecodingHypergraph, build_hypergraph, effect_via_frame
from .pipeline import DecoderConfig, DecodingGraphs, decode_batch
from .simulator import FrameSimulator, reference_run
from .trajectory import detectors_independent, enumerate_detectors

logger = logging.getLogger(__name__)

# Shots per work unit; early stopping is checked between units
CHUNK_SHOTS = 1000

CSV_COLUMNS = [
    "family",
    "d",
    "p",
    "n_pad",
    "n_m",
    "rounds",
    "decoder",
    "shots",
    "errors",
    "ler",
    "ci_low",
    "ci_high",
    "seed",
    "wall_seconds",
]

# Noise strength used when verifying a noiseless spec
VERIFY_STRENGTH = 1e-3


class Family(enum.Enum):
    XMemory = "xmemory"
    S2 = "s2"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One experiment: a circuit family with its parameters, a noise strength,
    a decoder and a shot budget.

    `rounds` applies to X-memory (default `2 * d`); `n_pad` (default
    `ceil(d / 2)`) and `n_m` (default `d + 1`) apply to S-2.
    """

    family: Family
    d: int
    p: float
    rounds: Optional[int] = None
    n_pad: Optional[int] = None
    n_m: Optional[int] = None
    decoder: str = "plain"
    shots: int = 1000
    seed: int = 0
    max_errors: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.family, str):
            object.__setattr__(self, "family", Family(self.family))
        if self.d < 3 or self.d % 2 == 0:
            raise CircuitError(f"distance must be odd and >= 3, got {self.d}")
        if not 0.0 <= self.p < 0.5:
            raise CircuitError(f"noise strength must be in [0, 0.5), got {self.p}")
        if self.shots < 0:
            raise CircuitError(f"negative shot count {self.shots}")
        if self.family == Family.XMemory:
            if self.rounds is None:
                object.__setattr__(self, "rounds", 2 * self.d)
            object.__setattr__(self, "n_pad", None)
            object.__setattr__(self, "n_m", None)
        else:
            if self.n_pad is None:
                object.__setattr__(self, "n_pad", math.ceil(self.d / 2))
            if self.n_m is None:
                object.__setattr__(self, "n_m", self.d + 1)
            object.__setattr__(self, "rounds", 2 * self.n_pad + self.n_m + 2)
        DecoderConfig.from_name(self.decoder)

    def canonical(self) -> Dict[str, object]:
        """
        The fields that define the experiment, seed excluded.
        """

        values = asdict(self)
        values["family"] = str(self.family)
        values.pop("seed")
        return values

    def label(self) -> str:
        if self.family == Family.XMemory:
            shape = f"rounds={self.rounds}"
        else:
            shape = f"n_pad={self.n_pad} n_m={self.n_m}"
        return f"{self.family} d={self.d} {shape} p={self.p} {self.decoder}"

    def build_circuit(self) -> Circuit:
        if self.family == Family.XMemory:
            circuit = build_x_memory(self.d, self.rounds)
        else:
            circuit = build_s2(self.d, self.n_pad, self.n_m)
        return apply_noise(circuit, self.p)


@dataclass
class ResultRow:
    spec: ExperimentSpec
    shots_taken: int
    logical_errors: int
    ler_mle: float
    ci_low: float
    ci_high: float
    wall_seconds: float = 0.0

    def to_dict(self) -> Dict[str, object]:
        spec = self.spec
        return {
            "family": str(spec.family),
            "d": spec.d,
            "p": spec.p,
            "n_pad": "" if spec.n_pad is None else spec.n_pad,
            "n_m": "" if spec.n_m is None else spec.n_m,
            "rounds": spec.rounds,
            "decoder": spec.decoder,
            "shots": self.shots_taken,
            "errors": self.logical_errors,
            "ler": f"{self.ler_mle:.6e}",
            "ci_low": f"{self.ci_low:.6e}",
            "ci_high": f"{self.ci_high:.6e}",
            "seed": spec.seed,
            "wall_seconds": f"{self.wall_seconds:.3f}",
        }


def likelihood_interval(
    errors: int, shots: int, factor: float = LIKELIHOOD_FACTOR
) -> Tuple[float, float, float]:
    """
    Maximum likelihood estimate of a binomial rate and the interval of rates
    whose likelihood is within `factor` of the maximum.

    Returns
    -------
    estimate : tuple
        `(mle, low, high)`.
    """

    if shots <= 0:
        return 0.0, 0.0, 1.0
    if not 0 <= errors <= shots:
        raise ValueError(f"{errors} errors out of {shots} shots")

    mle = errors / shots
    bound = 1.0 / factor
    if errors == 0:
        return 0.0, 0.0, 1.0 - bound ** (1.0 / shots)
    if errors == shots:
        return 1.0, bound ** (1.0 / shots), 1.0

    target = binom.logpmf(errors, shots, mle) - math.log(factor)

    def excess(q):
        return binom.logpmf(errors, shots, q) - target

    low = brentq(excess, 1e-300, mle)
    high = brentq(excess, mle, 1.0 - 1e-15)

    return mle, low, high


def derive_seed(master_seed: int, spec: ExperimentSpec) -> int:
    """
    Per-experiment seed from a master seed and the experiment's definition.
    """

    payload = json.dumps(
        {"master_seed": master_seed, "spec": spec.canonical()}, sort_keys=True
    )
    digest = hashlib.sha256(payload.encode("utf-8")).digest()

    return int.from_bytes(digest[:8], "big") >> 1


@dataclass
class CompiledExperiment:
    """
    Read-only artifacts shared by every shot of an experiment.
    """

    spec: ExperimentSpec
    circuit: Circuit
    hypergraph: DecodingHypergraph
    graphs: DecodingGraphs
    simulator: FrameSimulator
    config: DecoderConfig

    @classmethod
    def compile(cls, spec: ExperimentSpec) -> "CompiledExperiment":
        try:
            circuit = spec.build_circuit()
            detectors = enumerate_detectors(circuit)
            hypergraph = build_hypergraph(circuit, detectors)
            graphs = DecodingGraphs(hypergraph)
            simulator = FrameSimulator(circuit, detectors, hypergraph.observable)
        except FoldSurfError as exc:
            raise type(exc)(f"{spec.label()}: {exc}") from exc

        logger.info(
            "Compiled %s: %s detectors, %s edges", spec.label(), len(detectors), len(hypergraph.edges)
        )
        return cls(spec, circuit, hypergraph, graphs, simulator, DecoderConfig.from_name(spec.decoder))

    def sample(self, first_shot: int, shots: int):
        return self.simulator.sample(shots, self.spec.seed, first_shot=first_shot)

    def count_errors(self, first_shot: int, shots: int) -> int:
        det_bits, logical = self.sample(first_shot, shots)
        flips = logical ^ np.uint8(self.hypergraph.observable.reference_value)
        try:
            results = decode_batch(det_bits, self.graphs, self.config)
        except FoldSurfError as exc:
            raise type(exc)(f"{self.spec.label()}, shots from {first_shot}: {exc}") from exc

        return sum(int(res.logical_correction != bool(flip)) for res, flip in zip(results, flips))


# Per-process artifacts of a worker pool
_WORKER: Dict[str, CompiledExperiment] = {}


def _init_worker(spec: ExperimentSpec):
    _WORKER["experiment"] = CompiledExperiment.compile(spec)


def _count_chunk(chunk: Tuple[int, int]) -> int:
    first_shot, shots = chunk
    return _WORKER["experiment"].count_errors(first_shot, shots)


def _chunks(total: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(size, total - start)) for start in range(0, total, size)]


def run_experiment(
    spec: ExperimentSpec, workers: int = 1, chunk_shots: int = CHUNK_SHOTS
) -> ResultRow:
    """
    Sample and decode the shots of an experiment.

    Shots are processed in chunks; with `max_errors` set, counting stops
    after the first chunk at which the running error count reaches it. The
    outcome depends only on the spec, not on the number of workers.

    Parameters
    ----------
    spec : ExperimentSpec
        The experiment.
    workers : int
        Number of worker processes; 1 runs in-process.
    chunk_shots : int
        Shots per chunk.

    Returns
    -------
    row : ResultRow
    """

    start = time.perf_counter()
    chunks = _chunks(spec.shots, chunk_shots)
    shots_taken, errors = 0, 0

    def _accumulate(counts: Iterable[int], batch: Sequence[Tuple[int, int]]) -> bool:
        nonlocal shots_taken, errors
        for (_, size), count in zip(batch, counts):
            shots_taken += size
            errors += count
            if spec.max_errors is not None and errors >= spec.max_errors:
                return True
        return False

    if workers <= 1:
        experiment = CompiledExperiment.compile(spec)
        for chunk in chunks:
            if _accumulate([experiment.count_errors(*chunk)], [chunk]):
                break
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(spec,)
        ) as pool:
            for idx in range(0, len(chunks), workers):
                wave = chunks[idx:idx + workers]
                if _accumulate(pool.map(_count_chunk, wave), wave):
                    break

    mle, low, high = likelihood_interval(errors, shots_taken)
    row = ResultRow(
        spec=spec,
        shots_taken=shots_taken,
        logical_errors=errors,
        ler_mle=mle,
        ci_low=low,
        ci_high=high,
        wall_seconds=time.perf_counter() - start,
    )
    logger.info(
        "%s: %s errors in %s shots (ler=%.3e)", spec.label(), errors, shots_taken, mle
    )

    return row


def sweep(
    specs: Sequence[ExperimentSpec],
    out: Optional[Path] = None,
    workers: int = 1,
    master_seed: Optional[int] = None,
) -> List[ResultRow]:
    """
    Run a list of experiments, writing each row to `out` as soon as it is
    done. A failing experiment is logged and skipped.

    With `master_seed`, every spec's seed is derived from it and the spec.
    """

    rows = []
    handler = open(out, "w", newline="") if out else None
    try:
        writer = None
        if handler:
            writer = csv.DictWriter(handler, fieldnames=CSV_COLUMNS)
            writer.writeheader()

        for spec in specs:
            if master_seed is not None:
                spec = replace(spec, seed=derive_seed(master_seed, spec))
            try:
                row = run_experiment(spec, workers=workers)
            except FoldSurfError as exc:
                logger.error("Experiment %s failed: %s", spec.label(), exc)
                continue

            rows.append(row)
            if writer:
                writer.writerow(row.to_dict())
                handler.flush()
    finally:
        if handler:
            handler.close()

    return rows


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def expand_experiment(entry: Dict[str, object], defaults: Dict[str, object]) -> List[ExperimentSpec]:
    """
    Expand one experiment entry of a sweep config into specs; list-valued
    fields span a grid and `n_m` may be the literal `"d+1"`.
    """

    values = {**defaults, **entry}
    keys = ["d", "p", "rounds", "n_pad", "n_m", "decoder"]
    grids = [_as_list(values.get(key)) for key in keys]

    specs = []
    for combo in itertools.product(*grids):
        fields = dict(zip(keys, combo))
        if fields["n_m"] == "d+1":
            fields["n_m"] = fields["d"] + 1
        specs.append(
            ExperimentSpec(
                family=Family(values["family"]),
                shots=values.get("shots", 1000),
                max_errors=values.get("max_errors"),
                **fields,
            )
        )

    return specs


@dataclass
class SweepConfig:
    specs: List[ExperimentSpec]
    master_seed: int = 0
    workers: int = 1


def load_sweep_config(path) -> SweepConfig:
    """
    Read a JSON sweep file.
    """

    with open(path, encoding="utf-8") as handler:
        data = json.load(handler)

    defaults = {
        "shots": data.get("shots", 1000),
        "max_errors": data.get("max_errors"),
        "decoder": data.get("decoder", "plain"),
    }
    specs = []
    for entry in data.get("experiments", []):
        specs += expand_experiment(entry, defaults)

    return SweepConfig(
        specs=specs, master_seed=data.get("master_seed", 0), workers=data.get("workers", 1)
    )


@dataclass
class VerificationReport:
    spec: ExperimentSpec
    checks: Dict[str, bool] = field(default_factory=dict)
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_lines(self) -> List[str]:
        lines = [f"{'ok' if ok else 'FAIL'} {name}" for name, ok in self.checks.items()]
        return lines + self.messages


def verify_circuit(spec: ExperimentSpec, shots: int = 64) -> VerificationReport:
    """
    Check a circuit family against its oracles: noiseless determinism of
    every detector and of the observable on the tableau and on the frame
    sampler, equality of region-based and frame-based effects over the total
    error set, decomposition coverage and detector independence.
    """

    report = VerificationReport(spec)
    if spec.p == 0.0:
        spec = replace(spec, p=VERIFY_STRENGTH)
    circuit = spec.build_circuit()
    detectors = enumerate_detectors(circuit)
    hypergraph = build_hypergraph(circuit, detectors)
    observable = hypergraph.observable

    # Tableau determinism with random outcomes forced at random
    wanted = set(observable.measurements)
    for det in detectors:
        wanted |= det.measurements
    try:
        run = reference_run(circuit, seed=spec.seed, deterministic=wanted)
        parity_ok = all(
            sum(run.record[m] for m in det.measurements) % 2 == det.reference_parity
            for det in detectors
        ) and sum(run.record[m] for m in observable.measurements) % 2 == observable.reference_value
    except NondeterminismError as exc:
        parity_ok = False
        report.messages.append(str(exc))
    report.checks["tableau determinism"] = parity_ok

    noiseless = FrameSimulator(circuit.without_noise(), detectors, observable)
    det_bits, logical = noiseless.sample(shots, spec.seed)
    report.checks["frame determinism"] = bool(
        not det_bits.any() and (logical == observable.reference_value).all()
    )

    frame_effects = effect_via_frame(hypergraph.locations, circuit, detectors, observable, noiseless)
    mismatches = [
        loc.id
        for loc, a, b in zip(hypergraph.locations, hypergraph.effects, frame_effects)
        if a != b
    ]
    report.checks["region/frame effects"] = not mismatches
    if mismatches:
        report.messages.append(f"effects differ for error locations {mismatches[:10]}")

    uncovered = []
    for loc, effect in zip(hypergraph.locations, hypergraph.effects):
        combined = None
        for edge_id in hypergraph.decomposition[loc.id]:
            part = hypergraph.edges[edge_id].effect
            combined = part if combined is None else combined ^ part
        if (combined is None and not effect.is_trivial) or (combined is not None and combined != effect):
            uncovered.append(loc.id)
    report.checks["decomposition coverage"] = not uncovered
    if uncovered:
        report.messages.append(f"decompositions differ for error locations {uncovered[:10]}")

    report.checks["detector independence"] = detectors_independent(circuit, detectors)

    logger.info("Verified %s: %s", spec.label(), "passed" if report.passed else "failed")

    return report
