"""
Stabilizer simulation: a CHP-style tableau used as a reference oracle and a
vectorized Pauli-frame sampler used for production shots.

Both simulators index qubits by their position in `Layout.qubits` (sorted
coordinates), which also fixes the column order of canonical forms.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .circuit import (
    SINGLE_QUBIT_TERMS,
    TWO_QUBIT_TERMS,
    Circuit,
    InstructionKind,
    Layout,
    NoiseKind,
)
from .common import NondeterminismError
from .model import Coord, MeasurementLocation, Pauli, SparsePauli, Timestamp
from .trajectory import Detector, Observable

logger = logging.getLogger(__name__)

# Shots processed together by the frame simulator
DEFAULT_BATCH = 256


def _g_sum(x1, z1, x2, z2) -> int:
    # Power of i picked up when multiplying row 1 into row 2 (CHP `g` summed)
    x1, z1 = x1.astype(np.int64), z1.astype(np.int64)
    x2, z2 = x2.astype(np.int64), z2.astype(np.int64)
    g = np.where(
        (x1 == 1) & (z1 == 1),
        z2 - x2,
        np.where(
            (x1 == 1) & (z1 == 0),
            z2 * (2 * x2 - 1),
            np.where((x1 == 0) & (z1 == 1), x2 * (1 - 2 * z2), 0),
        ),
    )
    return int(g.sum())


def _rowsum(xs, zs, rs, h: int, i: int):
    # Row h <- row i * row h, with the sign of the product
    total = 2 * int(rs[h]) + 2 * int(rs[i]) + _g_sum(xs[i], zs[i], xs[h], zs[h])
    rs[h] = 0 if total % 4 == 0 else 1
    xs[h] ^= xs[i]
    zs[h] ^= zs[i]


def _row_reduce(xs, zs, rs) -> int:
    # Gaussian elimination over GF(2) on [X | Z] columns, signs tracked by rowsum
    n_rows, n_qubits = xs.shape
    rank = 0
    for col in range(2 * n_qubits):
        bits = xs[:, col] if col < n_qubits else zs[:, col - n_qubits]
        candidates = np.nonzero(bits[rank:])[0]
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            for arr in (xs, zs, rs):
                arr[[rank, pivot]] = arr[[pivot, rank]]
        bits = xs[:, col] if col < n_qubits else zs[:, col - n_qubits]
        for row in np.nonzero(bits)[0]:
            if row != rank:
                _rowsum(xs, zs, rs, int(row), rank)
        rank += 1
        if rank == n_rows:
            break

    return rank


def _row_to_pauli(x_row, z_row, sign_bit, qubits: Sequence[Coord]) -> SparsePauli:
    support = {
        qubits[idx]: Pauli(int(x_row[idx]) + 2 * int(z_row[idx]))
        for idx in np.nonzero(x_row | z_row)[0]
    }
    return SparsePauli(support, -1 if sign_bit else 1)


def canonical_form(
    generators: Iterable[SparsePauli], qubits: Sequence[Coord], signed: bool = True
) -> Tuple[str, ...]:
    """
    Return the canonical generator strings of the group spanned by
    `generators`.

    Parameters
    ----------
    generators : iterable of SparsePauli
        Mutually commuting operators.
    qubits : list of Coord
        Column order of the elimination.
    signed : bool
        Whether signs take part in the comparison.

    Returns
    -------
    canonical : tuple of str
        Row-reduced generators; two generating sets span the same group iff
        their canonical forms are equal.
    """

    generators = list(generators)
    index = {q: idx for idx, q in enumerate(qubits)}
    xs = np.zeros((len(generators), len(qubits)), dtype=np.uint8)
    zs = np.zeros_like(xs)
    rs = np.zeros(len(generators), dtype=np.uint8)
    for row, gen in enumerate(generators):
        for coord, pauli in gen.support.items():
            xs[row, index[coord]] = int(pauli.has_x)
            zs[row, index[coord]] = int(pauli.has_z)
        rs[row] = 1 if gen.sign == -1 else 0

    rank = _row_reduce(xs, zs, rs)
    rows = [_row_to_pauli(xs[i], zs[i], rs[i], qubits) for i in range(rank)]
    if not signed:
        rows = [row.unsigned() for row in rows]

    return tuple(str(row) for row in rows)


class Tableau:
    """
    Stabilizer tableau (destabilizer rows first, then stabilizer rows) of a
    pure state on `len(qubits)` qubits, initialized to all-zeros.
    """

    def __init__(self, qubits: Sequence[Coord]):
        self.qubits = tuple(qubits)
        self.index = {q: idx for idx, q in enumerate(self.qubits)}
        n = len(self.qubits)
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)
        self.x[:n, :] = np.eye(n, dtype=np.uint8)
        self.z[n:, :] = np.eye(n, dtype=np.uint8)

    def copy(self) -> "Tableau":
        other = Tableau.__new__(Tableau)
        other.qubits = self.qubits
        other.index = self.index
        other.n = self.n
        other.x, other.z, other.r = self.x.copy(), self.z.copy(), self.r.copy()
        return other

    def h(self, q: Coord):
        a = self.index[q]
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, q: Coord):
        a = self.index[q]
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def sdag(self, q: Coord):
        self.s(q)
        self.pauli(SparsePauli.single(q, Pauli.Z))

    def cx(self, control: Coord, target: Coord):
        a, b = self.index[control], self.index[target]
        self.r ^= self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1)
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def cz(self, qa: Coord, qb: Coord):
        self.h(qb)
        self.cx(qa, qb)
        self.h(qb)

    def pauli(self, fault: SparsePauli):
        """
        Apply a Pauli operator to the state.
        """

        for coord, pauli in fault.support.items():
            a = self.index[coord]
            if pauli.has_x:
                self.r ^= self.z[:, a]
            if pauli.has_z:
                self.r ^= self.x[:, a]

    def _vector(self, operator: SparsePauli):
        x = np.zeros(self.n, dtype=np.uint8)
        z = np.zeros(self.n, dtype=np.uint8)
        for coord, pauli in operator.support.items():
            x[self.index[coord]] = int(pauli.has_x)
            z[self.index[coord]] = int(pauli.has_z)
        return x, z

    def _stabilizer_product(self, x, z) -> Tuple[np.ndarray, np.ndarray, int]:
        # Product of the stabilizers whose destabilizers anticommute with (x, z)
        n = self.n
        xs = np.zeros((1, n), dtype=np.uint8)
        zs = np.zeros((1, n), dtype=np.uint8)
        rs = np.zeros(1, dtype=np.uint8)
        for i in range(n):
            if (np.sum(self.x[i] & z) + np.sum(self.z[i] & x)) % 2:
                row_x = np.vstack([xs, self.x[i + n][None, :]])
                row_z = np.vstack([zs, self.z[i + n][None, :]])
                row_r = np.array([rs[0], self.r[i + n]], dtype=np.uint8)
                _rowsum(row_x, row_z, row_r, 0, 1)
                xs, zs, rs = row_x[:1], row_z[:1], row_r[:1]

        return xs[0], zs[0], int(rs[0])

    def expectation(self, operator: SparsePauli) -> int:
        """
        Return +1 or -1 if the state is an eigenstate of `operator` with that
        eigenvalue, and 0 if the outcome of measuring it would be random.
        """

        x, z = self._vector(operator)
        n = self.n
        anti = (self.x[n:] @ z + self.z[n:] @ x) % 2
        if np.any(anti):
            return 0

        px, pz, sign_bit = self._stabilizer_product(x, z)
        if not (np.array_equal(px, x) and np.array_equal(pz, z)):
            raise NondeterminismError("tableau is not a pure stabilizer state")

        value = -1 if sign_bit else 1
        return value * operator.sign

    def measure_z(self, q: Coord, outcome: int = 0) -> Tuple[int, bool]:
        """
        Measure in the Z basis; a random outcome is set to `outcome`.

        Returns
        -------
        outcome : int
            The measured bit.
        random : bool
            Whether the outcome was random.
        """

        a = self.index[q]
        n = self.n
        stab = np.nonzero(self.x[n:, a])[0]
        if stab.size:
            p = n + int(stab[0])
            for i in np.nonzero(self.x[:, a])[0]:
                if i != p:
                    _rowsum(self.x, self.z, self.r, int(i), p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            self.r[p] = outcome
            return outcome, True

        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        z[a] = 1
        _, _, sign_bit = self._stabilizer_product(x, z)
        return sign_bit, False

    def measure_x(self, q: Coord, outcome: int = 0) -> Tuple[int, bool]:
        self.h(q)
        result = self.measure_z(q, outcome)
        self.h(q)
        return result

    def reset_z(self, q: Coord):
        bit, _ = self.measure_z(q)
        if bit:
            self.pauli(SparsePauli.single(q, Pauli.X))

    def reset_x(self, q: Coord):
        self.h(q)
        self.reset_z(q)
        self.h(q)

    def stabilizers(self) -> List[SparsePauli]:
        n = self.n
        return [
            _row_to_pauli(self.x[i], self.z[i], self.r[i], self.qubits)
            for i in range(n, 2 * n)
        ]

    def canonical(self, signed: bool = True) -> Tuple[str, ...]:
        return canonical_form(self.stabilizers(), self.qubits, signed=signed)


@dataclass
class ReferenceRun:
    """
    Result of a tableau run: outcomes by measurement location, the set of
    measurements whose outcome was random, and the requested snapshots.
    """

    record: Dict[MeasurementLocation, int]
    random: Set[MeasurementLocation]
    snapshots: Dict[Timestamp, Tableau] = field(default_factory=dict)


def reference_run(
    circuit: Circuit,
    snapshots: Iterable[Timestamp] = (),
    seed: Optional[int] = None,
    deterministic: Iterable[MeasurementLocation] = (),
    faults: Sequence[Tuple[Timestamp, SparsePauli]] = (),
) -> ReferenceRun:
    """
    Run a circuit on the stabilizer tableau, ignoring its noise channels.

    Parameters
    ----------
    circuit : Circuit
        The circuit to run.
    snapshots : list of Timestamp
        Checkpoints at which a copy of the tableau is kept.
    seed : int
        Seed for random measurement outcomes; when `None` every random
        outcome is 0.
    deterministic : list of MeasurementLocation
        Measurements that must not be random; a `NondeterminismError` is
        raised otherwise.
    faults : list of (Timestamp, SparsePauli)
        Pauli faults applied after the layer at their timestamp.

    Returns
    -------
    run : ReferenceRun
    """

    rng = np.random.default_rng(seed) if seed is not None else None
    wanted = set(snapshots)
    expected = set(deterministic)
    pending: Dict[Timestamp, List[SparsePauli]] = {}
    for ts, fault in faults:
        pending.setdefault(ts, []).append(fault)

    tableau = Tableau(circuit.layout.qubits)
    layer_map = circuit.layer_map()
    run = ReferenceRun(record={}, random=set())

    for ts in circuit.timestamps():
        for instr in layer_map.get(ts, ()):
            kind = instr.kind
            if kind == InstructionKind.Idle:
                continue
            if kind == InstructionKind.H:
                tableau.h(instr.targets[0])
            elif kind == InstructionKind.S:
                tableau.s(instr.targets[0])
            elif kind == InstructionKind.Sdag:
                tableau.sdag(instr.targets[0])
            elif kind == InstructionKind.CX:
                tableau.cx(*instr.targets)
            elif kind == InstructionKind.CZ:
                tableau.cz(*instr.targets)
            elif kind == InstructionKind.ResetX:
                tableau.reset_x(instr.targets[0])
            elif kind == InstructionKind.ResetZ:
                tableau.reset_z(instr.targets[0])
            else:
                forced = int(rng.integers(2)) if rng is not None else 0
                measure = (
                    tableau.measure_x if kind == InstructionKind.MeasX else tableau.measure_z
                )
                bit, random = measure(instr.targets[0], forced)
                loc = MeasurementLocation(kind.basis, instr.targets[0], ts.round)
                if random:
                    if loc in expected:
                        raise NondeterminismError(f"random outcome for {loc}")
                    run.random.add(loc)
                run.record[loc] = bit

        for fault in pending.get(ts, ()):
            tableau.pauli(fault)

        if ts in wanted:
            run.snapshots[ts] = tableau.copy()

    logger.debug(
        "Reference run: %s measurements, %s random", len(run.record), len(run.random)
    )

    return run


def stabilizer_group_at(
    circuit: Circuit, timestamp: Timestamp, signed: bool = True
) -> Tuple[str, ...]:
    """
    Canonical generators of the stabilizer group at a checkpoint of a
    noiseless run.
    """

    run = reference_run(circuit, snapshots=[timestamp])
    return run.snapshots[timestamp].canonical(signed=signed)


def rotation_map(layout: Layout) -> Dict[Coord, Coord]:
    """
    Qubit relabeling of a quarter-turn of the patch about its center.
    """

    c2 = 2 * layout.center
    return {q: Coord(q.y2, c2 - q.x2) for q in layout.qubits}


def rotated_stabilizer_check(layout: Layout) -> bool:
    """
    Check that transversal H followed by a quarter-turn relabeling maps the
    code's stabilizer group onto itself.
    """

    mapping = rotation_map(layout)
    original = [layout.stabilizer(a) for a in layout.ancillas]
    swapped = {Pauli.X: Pauli.Z, Pauli.Z: Pauli.X, Pauli.Y: Pauli.Y}
    transformed = [
        SparsePauli({mapping[q]: swapped[p] for q, p in gen.support.items()})
        for gen in original
    ]

    data = sorted(layout.data)
    return canonical_form(original, data, signed=False) == canonical_form(
        transformed, data, signed=False
    )


@dataclass
class ShotRecord:
    """
    One sampled shot: detector bits indexed by detector id, and the logical
    observable's value.
    """

    detector_bits: np.ndarray
    logical_bit: int

    @property
    def defects(self) -> Set[int]:
        return {int(idx) for idx in np.nonzero(self.detector_bits)[0]}


# X and Z bits of depolarizing components, in sampling order
_SINGLE_X = np.array([int(p.has_x) for p in SINGLE_QUBIT_TERMS], dtype=np.uint8)
_SINGLE_Z = np.array([int(p.has_z) for p in SINGLE_QUBIT_TERMS], dtype=np.uint8)
_TWO_XA = np.array([int(pa.has_x) for pa, _ in TWO_QUBIT_TERMS], dtype=np.uint8)
_TWO_ZA = np.array([int(pa.has_z) for pa, _ in TWO_QUBIT_TERMS], dtype=np.uint8)
_TWO_XB = np.array([int(pb.has_x) for _, pb in TWO_QUBIT_TERMS], dtype=np.uint8)
_TWO_ZB = np.array([int(pb.has_z) for _, pb in TWO_QUBIT_TERMS], dtype=np.uint8)


@dataclass
class _NoiseGroup:
    kind: str
    channels: np.ndarray
    probabilities: np.ndarray
    targets: np.ndarray
    flip_x: np.ndarray = None
    flip_z: np.ndarray = None


@dataclass
class _Step:
    timestamp: Timestamp
    gates: Dict[InstructionKind, np.ndarray]
    measured: Dict[InstructionKind, Tuple[np.ndarray, np.ndarray]]
    noise: List[_NoiseGroup]


class FrameSimulator:
    """
    Pauli-frame sampler for a noisy circuit.

    Frames are `(n_qubits, shots)` bit arrays of X and Z flips relative to the
    noiseless reference; measurement flips are XORed into detector parities
    and the logical parity. Each shot draws one uniform per channel from its
    own counter-based stream keyed by `(seed, shot index)`.
    """

    def __init__(
        self, circuit: Circuit, detectors: Sequence[Detector], observable: Observable
    ):
        self.circuit = circuit
        self.detectors = list(detectors)
        self.observable = observable
        self.qubits = circuit.layout.qubits
        self.index = {q: idx for idx, q in enumerate(self.qubits)}

        measurements = circuit.measurements()
        self.meas_index = {meas: idx for idx, meas in enumerate(measurements)}
        self.n_meas = len(measurements)

        self.det_matrix = np.zeros((len(self.detectors), self.n_meas), dtype=np.int32)
        for det in self.detectors:
            for meas in det.measurements:
                self.det_matrix[det.id, self.meas_index[meas]] = 1
        self.obs_rows = np.array(
            sorted(self.meas_index[meas] for meas in observable.measurements), dtype=np.int64
        )

        self.n_channels = len(circuit.channels)
        self.steps = self._compile()

    def _compile(self) -> List[_Step]:
        layer_map = self.circuit.layer_map()
        by_ts: Dict[Timestamp, list] = {}
        for channel in self.circuit.channels:
            by_ts.setdefault(channel.timestamp, []).append(channel)

        steps = []
        for ts in self.circuit.timestamps():
            gates: Dict[InstructionKind, list] = {}
            measured: Dict[InstructionKind, Tuple[list, list]] = {}
            for instr in layer_map.get(ts, ()):
                kind = instr.kind
                if kind == InstructionKind.Idle:
                    continue
                targets = [self.index[q] for q in instr.targets]
                if kind.is_measurement:
                    loc = MeasurementLocation(kind.basis, instr.targets[0], ts.round)
                    qs, rows = measured.setdefault(kind, ([], []))
                    qs.append(targets[0])
                    rows.append(self.meas_index[loc])
                else:
                    gates.setdefault(kind, []).append(targets)

            noise = []
            channels = by_ts.get(ts, [])
            for label, kinds in (
                ("single", (NoiseKind.Depolarize1, NoiseKind.PreRoundDepolarize1)),
                ("two", (NoiseKind.Depolarize2,)),
                ("flip", (NoiseKind.FlipMeasure, NoiseKind.FlipReset)),
            ):
                chosen = [ch for ch in channels if ch.kind in kinds]
                if not chosen:
                    continue
                group = _NoiseGroup(
                    kind=label,
                    channels=np.array([ch.id for ch in chosen], dtype=np.int64),
                    probabilities=np.array([ch.probability for ch in chosen]),
                    targets=np.array(
                        [[self.index[q] for q in ch.targets] for ch in chosen], dtype=np.int64
                    ),
                )
                if label == "flip":
                    group.flip_x = np.array([int(ch.flip.has_x) for ch in chosen], dtype=np.uint8)
                    group.flip_z = np.array([int(ch.flip.has_z) for ch in chosen], dtype=np.uint8)
                noise.append(group)

            steps.append(
                _Step(
                    timestamp=ts,
                    gates={k: np.array(v, dtype=np.int64) for k, v in gates.items()},
                    measured={
                        k: (np.array(qs, dtype=np.int64), np.array(rows, dtype=np.int64))
                        for k, (qs, rows) in measured.items()
                    },
                    noise=noise,
                )
            )

        return steps

    def _uniforms(self, seed: int, first_shot: int, shots: int) -> np.ndarray:
        draws = np.empty((self.n_channels, shots))
        for col in range(shots):
            stream = np.random.Generator(
                np.random.Philox(np.random.SeedSequence([seed, first_shot + col]))
            )
            draws[:, col] = stream.random(self.n_channels)
        return draws

    @staticmethod
    def _apply_gates(fx, fz, gates: Dict[InstructionKind, np.ndarray]):
        for kind, targets in gates.items():
            if kind == InstructionKind.H:
                q = targets[:, 0]
                fx[q], fz[q] = fz[q], fx[q]
            elif kind in (InstructionKind.S, InstructionKind.Sdag):
                q = targets[:, 0]
                fz[q] ^= fx[q]
            elif kind == InstructionKind.CX:
                c, t = targets[:, 0], targets[:, 1]
                fx[t] ^= fx[c]
                fz[c] ^= fz[t]
            elif kind == InstructionKind.CZ:
                a, b = targets[:, 0], targets[:, 1]
                fz[a] ^= fx[b]
                fz[b] ^= fx[a]
            elif kind.is_reset:
                q = targets[:, 0]
                fx[q] = 0
                fz[q] = 0

    @staticmethod
    def _apply_noise(fx, fz, group: _NoiseGroup, draws: np.ndarray):
        u = draws[group.channels]
        p = group.probabilities[:, None]
        hit = u < p
        if group.kind == "flip":
            q = group.targets[:, 0]
            np.bitwise_xor.at(fx, q, (hit & group.flip_x[:, None].astype(bool)).astype(np.uint8))
            np.bitwise_xor.at(fz, q, (hit & group.flip_z[:, None].astype(bool)).astype(np.uint8))
            return

        n_terms = 3 if group.kind == "single" else 15
        with np.errstate(divide="ignore", invalid="ignore"):
            comp = np.minimum((u / p * n_terms).astype(np.int64), n_terms - 1)
        comp = np.where(hit, comp, 0)
        mask = hit.astype(np.uint8)
        if group.kind == "single":
            q = group.targets[:, 0]
            np.bitwise_xor.at(fx, q, _SINGLE_X[comp] & mask)
            np.bitwise_xor.at(fz, q, _SINGLE_Z[comp] & mask)
        else:
            a, b = group.targets[:, 0], group.targets[:, 1]
            np.bitwise_xor.at(fx, a, _TWO_XA[comp] & mask)
            np.bitwise_xor.at(fz, a, _TWO_ZA[comp] & mask)
            np.bitwise_xor.at(fx, b, _TWO_XB[comp] & mask)
            np.bitwise_xor.at(fz, b, _TWO_ZB[comp] & mask)

    def _run_batch(
        self,
        shots: int,
        draws: Optional[np.ndarray],
        injected: Optional[Sequence[Tuple[Timestamp, SparsePauli]]],
    ) -> Tuple[np.ndarray, np.ndarray]:
        n_q = len(self.qubits)
        fx = np.zeros((n_q, shots), dtype=np.uint8)
        fz = np.zeros((n_q, shots), dtype=np.uint8)
        record = np.zeros((self.n_meas, shots), dtype=np.uint8)

        injections: Dict[Timestamp, List[Tuple[int, SparsePauli]]] = {}
        for col, (ts, fault) in enumerate(injected or ()):
            injections.setdefault(ts, []).append((col, fault))

        for step in self.steps:
            self._apply_gates(fx, fz, step.gates)
            for kind, (qs, rows) in step.measured.items():
                record[rows] = fx[qs] if kind == InstructionKind.MeasZ else fz[qs]
            if draws is not None:
                for group in step.noise:
                    self._apply_noise(fx, fz, group, draws)
            for col, fault in injections.get(step.timestamp, ()):
                for coord, pauli in fault.support.items():
                    q = self.index[coord]
                    fx[q, col] ^= int(pauli.has_x)
                    fz[q, col] ^= int(pauli.has_z)

        det_bits = ((self.det_matrix @ record.astype(np.int32)) % 2).astype(np.uint8)
        obs_bits = (record[self.obs_rows].sum(axis=0) % 2).astype(np.uint8)

        return det_bits.T, obs_bits

    def sample(
        self, shots: int, seed: int, first_shot: int = 0, batch: int = DEFAULT_BATCH
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Sample noisy shots.

        Returns
        -------
        detector_bits : numpy.ndarray
            `(shots, n_detectors)` array of detector bits.
        logical_bits : numpy.ndarray
            `(shots,)` array of logical observable values (reference included).
        """

        det_parts, obs_parts = [], []
        for start in range(0, shots, batch):
            size = min(batch, shots - start)
            draws = self._uniforms(seed, first_shot + start, size) if self.n_channels else None
            dets, obs = self._run_batch(size, draws, None)
            det_parts.append(dets)
            obs_parts.append(obs)

        if not det_parts:
            return (
                np.zeros((0, len(self.detectors)), dtype=np.uint8),
                np.zeros(0, dtype=np.uint8),
            )

        logical = np.concatenate(obs_parts) ^ np.uint8(self.observable.reference_value)
        return np.concatenate(det_parts), logical

    def inject(
        self, faults: Sequence[Tuple[Timestamp, SparsePauli]]
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Propagate one fault per column through the noiseless circuit and return
        the detector and logical flips it causes.
        """

        if not faults:
            return np.zeros((0, len(self.detectors)), dtype=np.uint8), np.zeros(0, dtype=np.uint8)
        return self._run_batch(len(faults), None, faults)


def sample_shots(
    circuit: Circuit,
    detectors: Sequence[Detector],
    observable: Observable,
    n_shots: int,
    seed: int,
    first_shot: int = 0,
) -> List[ShotRecord]:
    """
    Sample `n_shots` shots of a noisy circuit as `ShotRecord`s; shot `k` is
    reproducible from `(seed, first_shot + k)` alone.
    """

    simulator = FrameSimulator(circuit, detectors, observable)
    det_bits, logical = simulator.sample(n_shots, seed, first_shot=first_shot)

    return [
        ShotRecord(detector_bits=det_bits[idx].copy(), logical_bit=int(logical[idx]))
        for idx in range(n_shots)
    ]
