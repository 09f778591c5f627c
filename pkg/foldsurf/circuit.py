"""
Builders for rotated-surface-code layouts, syndrome-extraction rounds, the
X-memory and S-2 circuit families, and their circuit-level noise.
"""

import enum
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .common import CircuitError
from .model import (
    Coord,
    MeasurementLocation,
    MidCycleLabel,
    Pauli,
    ResetLocation,
    SparsePauli,
    Timestamp,
)

logger = logging.getLogger(__name__)

# CNOT offsets from an ancilla to its data qubits, one per CNOT layer
NW, NE, SW, SE = (-1, -1), (1, -1), (-1, 1), (1, 1)
X_SCHEDULE = (NW, NE, SW, SE)
Z_SCHEDULE = (NW, SW, NE, SE)

CNOT_LABELS = (
    MidCycleLabel.AfterLayer1,
    MidCycleLabel.HalfCycle,
    MidCycleLabel.WaningCrescent,
    MidCycleLabel.PreMeasure,
)


class InstructionKind(enum.Enum):
    ResetX = "ResetX"
    ResetZ = "ResetZ"
    MeasX = "MeasX"
    MeasZ = "MeasZ"
    H = "H"
    S = "S"
    Sdag = "Sdag"
    CX = "CX"
    CZ = "CZ"
    Idle = "Idle"

    @property
    def is_reset(self) -> bool:
        return self in (InstructionKind.ResetX, InstructionKind.ResetZ)

    @property
    def is_measurement(self) -> bool:
        return self in (InstructionKind.MeasX, InstructionKind.MeasZ)

    @property
    def is_unitary(self) -> bool:
        return not (self.is_reset or self.is_measurement)

    @property
    def arity(self) -> int:
        return 2 if self in (InstructionKind.CX, InstructionKind.CZ) else 1

    @property
    def basis(self) -> Pauli:
        """
        Basis of a reset or measurement.
        """

        if self in (InstructionKind.ResetX, InstructionKind.MeasX):
            return Pauli.X
        if self in (InstructionKind.ResetZ, InstructionKind.MeasZ):
            return Pauli.Z
        raise ValueError(f"{self.value} has no basis")

    def __str__(self) -> str:
        return self.value


class RoundKind(enum.Enum):
    Init = "Init"
    ISE = "ISE"
    SSE = "SSE"
    FinalMeas = "FinalMeas"

    @property
    def is_se(self) -> bool:
        return self in (RoundKind.ISE, RoundKind.SSE)

    def __str__(self) -> str:
        return self.value


class NoiseKind(enum.Enum):
    Depolarize1 = "Depolarize1"
    Depolarize2 = "Depolarize2"
    FlipMeasure = "FlipMeasure"
    FlipReset = "FlipReset"
    PreRoundDepolarize1 = "PreRoundDepolarize1"

    def __str__(self) -> str:
        return self.value


# Order of channels sharing a timestamp in enumerations and text output
NOISE_ORDER = {kind: idx for idx, kind in enumerate(NoiseKind)}

# Pauli components of depolarizing channels, in the order used by samplers
SINGLE_QUBIT_TERMS = (Pauli.X, Pauli.Y, Pauli.Z)
TWO_QUBIT_TERMS = tuple(
    (pa, pb)
    for pa in (Pauli.I, Pauli.X, Pauli.Y, Pauli.Z)
    for pb in (Pauli.I, Pauli.X, Pauli.Y, Pauli.Z)
    if (pa, pb) != (Pauli.I, Pauli.I)
)


@dataclass(frozen=True)
class Layout:
    """
    Qubit layout and syndrome-extraction schedule of a distance-d rotated
    surface code.

    `schedule` maps every ancilla to its four CNOT slots (`None` where the
    neighbor is missing); `stabilizer_support` lists the present data qubits
    in CNOT order.
    """

    distance: int
    data: Tuple[Coord, ...]
    ancilla_x: Tuple[Coord, ...]
    ancilla_z: Tuple[Coord, ...]
    schedule: Mapping[Coord, Tuple[Optional[Coord], ...]]
    stabilizer_support: Mapping[Coord, Tuple[Coord, ...]]
    fold_phase_targets: Tuple[Tuple[Coord, InstructionKind], ...]
    fold_cz_pairs: Tuple[Tuple[Coord, Coord], ...]

    @property
    def center(self) -> int:
        """
        Doubled coordinate of the patch center along each axis.
        """

        return self.distance - 1

    @cached_property
    def ancillas(self) -> Tuple[Coord, ...]:
        return tuple(sorted(self.ancilla_x + self.ancilla_z))

    @cached_property
    def qubits(self) -> Tuple[Coord, ...]:
        return tuple(sorted(self.data + self.ancilla_x + self.ancilla_z))

    def is_x_ancilla(self, coord: Coord) -> bool:
        return coord in self._x_set

    @cached_property
    def _x_set(self):
        return frozenset(self.ancilla_x)

    def ancilla_basis(self, coord: Coord) -> Pauli:
        return Pauli.X if coord in self._x_set else Pauli.Z

    def is_boundary(self, coord: Coord) -> bool:
        top = 2 * self.distance - 1
        return coord.is_ancilla and (coord.x2 in (-1, top) or coord.y2 in (-1, top))

    @cached_property
    def half_cycle_qubits(self) -> Tuple[Coord, ...]:
        """
        Qubits carrying the unrotated code at half-cycle: data and bulk ancillas.
        """

        return tuple(q for q in self.qubits if not self.is_boundary(q))

    @property
    def boundary_ancillas(self) -> Tuple[Coord, ...]:
        return tuple(q for q in self.ancillas if self.is_boundary(q))

    def stabilizer(self, ancilla: Coord) -> SparsePauli:
        """
        The data-qubit stabilizer measured by an ancilla.
        """

        return SparsePauli.uniform(
            self.stabilizer_support[ancilla], self.ancilla_basis(ancilla)
        )

    @property
    def logical_x(self) -> SparsePauli:
        # left data column
        return SparsePauli.uniform([q for q in self.data if q.x2 == 0], Pauli.X)

    @property
    def logical_z(self) -> SparsePauli:
        # top data row
        return SparsePauli.uniform([q for q in self.data if q.y2 == 0], Pauli.Z)


def _ancilla_kind(coord: Coord) -> Pauli:
    return Pauli.X if (coord.x2 - coord.y2) % 4 == 0 else Pauli.Z


def build_layout(d: int) -> Layout:
    """
    Build the layout of a distance-`d` rotated surface code.

    Parameters
    ----------
    d : int
        Code distance; must be odd and at least 3.

    Returns
    -------
    layout : Layout
        Data and ancilla coordinates, CNOT schedule and fold-layer targets.
    """

    if not isinstance(d, int) or d < 3 or d % 2 == 0:
        raise CircuitError(f"distance must be an odd integer >= 3, got {d!r}")

    data = tuple(sorted(Coord(2 * x, 2 * y) for x in range(d) for y in range(d)))
    data_set = frozenset(data)

    ancilla_x, ancilla_z = [], []
    for i in range(-1, d):
        for j in range(-1, d):
            coord = Coord(2 * i + 1, 2 * j + 1)
            kind = _ancilla_kind(coord)
            on_row_edge = j in (-1, d - 1)
            on_col_edge = i in (-1, d - 1)
            if on_row_edge and on_col_edge:
                continue
            if on_row_edge and kind != Pauli.X:
                continue
            if on_col_edge and kind != Pauli.Z:
                continue
            (ancilla_x if kind == Pauli.X else ancilla_z).append(coord)

    schedule = {}
    support = {}
    for ancilla in ancilla_x + ancilla_z:
        offsets = X_SCHEDULE if _ancilla_kind(ancilla) == Pauli.X else Z_SCHEDULE
        slots = tuple(
            q if q in data_set else None
            for q in (ancilla.shifted(*offset) for offset in offsets)
        )
        schedule[ancilla] = slots
        support[ancilla] = tuple(q for q in slots if q is not None)

    # Fold layer on the half-cycle code: phase gates on the main diagonal,
    # alternating S (data) and S-dagger (ancillas), and CZ on mirrored pairs
    top = 2 * d - 1
    half_cycle = sorted(
        q
        for q in list(data) + ancilla_x + ancilla_z
        if not (q.is_ancilla and (q.x2 in (-1, top) or q.y2 in (-1, top)))
    )
    phase_targets = tuple(
        (q, InstructionKind.S if q.is_data else InstructionKind.Sdag)
        for q in half_cycle
        if q.x2 == q.y2
    )
    cz_pairs = tuple((q, q.mirrored()) for q in half_cycle if q.x2 < q.y2)

    layout = Layout(
        distance=d,
        data=data,
        ancilla_x=tuple(sorted(ancilla_x)),
        ancilla_z=tuple(sorted(ancilla_z)),
        schedule=schedule,
        stabilizer_support=support,
        fold_phase_targets=phase_targets,
        fold_cz_pairs=cz_pairs,
    )

    logger.debug(
        "Layout d=%s: %s data, %s X ancillas, %s Z ancillas",
        d,
        len(data),
        len(ancilla_x),
        len(ancilla_z),
    )

    return layout


@dataclass(frozen=True)
class Instruction:
    kind: InstructionKind
    targets: Tuple[Coord, ...]
    timestamp: Timestamp

    def __post_init__(self):
        if len(self.targets) != self.kind.arity:
            raise CircuitError(
                f"{self.kind.value} takes {self.kind.arity} target(s), got {len(self.targets)}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{self.kind.value} with repeated targets {self.targets}")

    def sort_key(self):
        return (self.timestamp, self.kind.value, self.targets)

    def __str__(self) -> str:
        coords = " ".join(str(target) for target in self.targets)
        return f"{self.kind.value} {coords} @ {self.timestamp}"


@dataclass(frozen=True)
class NoiseChannel:
    """
    A noise channel acting after the layer at `timestamp`.

    For flip channels `flip` is the Pauli applied with probability
    `probability` (the one anticommuting with the reset or measured basis).
    """

    id: int
    kind: NoiseKind
    probability: float
    targets: Tuple[Coord, ...]
    timestamp: Timestamp
    flip: Optional[Pauli] = None

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise CircuitError(f"channel probability {self.probability} outside [0, 1]")
        if self.kind == NoiseKind.Depolarize2 and len(self.targets) != 2:
            raise CircuitError("Depolarize2 needs exactly two targets")
        if self.kind != NoiseKind.Depolarize2 and len(self.targets) != 1:
            raise CircuitError(f"{self.kind.value} needs exactly one target")

    def components(self) -> List[Tuple[SparsePauli, float]]:
        """
        Return the Pauli faults of the channel and their probabilities.
        """

        if self.kind == NoiseKind.Depolarize2:
            a, b = self.targets
            return [
                (SparsePauli({a: pa, b: pb}), self.probability / 15)
                for pa, pb in TWO_QUBIT_TERMS
            ]
        if self.kind in (NoiseKind.Depolarize1, NoiseKind.PreRoundDepolarize1):
            return [
                (SparsePauli.single(self.targets[0], pauli), self.probability / 3)
                for pauli in SINGLE_QUBIT_TERMS
            ]

        return [(SparsePauli.single(self.targets[0], self.flip), self.probability)]

    def sort_key(self):
        return (self.timestamp, NOISE_ORDER[self.kind], self.targets)


Layer = Tuple[Timestamp, Tuple[Instruction, ...]]


@dataclass(frozen=True)
class Circuit:
    """
    Layered circuit: `layers` is sorted by timestamp and holds one entry per
    physical layer; `round_kinds[i]` describes round `i`; `channels` is empty
    for a noiseless circuit.
    """

    layout: Layout
    layers: Tuple[Layer, ...]
    round_kinds: Tuple[RoundKind, ...]
    channels: Tuple[NoiseChannel, ...] = field(default=())
    noise_strength: float = 0.0

    @property
    def rounds(self) -> int:
        return len(self.round_kinds)

    @property
    def distance(self) -> int:
        return self.layout.distance

    @property
    def se_rounds(self) -> Tuple[int, ...]:
        return tuple(i for i, kind in enumerate(self.round_kinds) if kind.is_se)

    @property
    def sse_rounds(self) -> Tuple[int, ...]:
        return tuple(i for i, kind in enumerate(self.round_kinds) if kind == RoundKind.SSE)

    @property
    def final_round(self) -> int:
        return len(self.round_kinds) - 1

    def instructions(self) -> List[Instruction]:
        return [instr for _, layer in self.layers for instr in layer]

    def timestamps(self) -> List[Timestamp]:
        """
        Every checkpoint of every round, in order.
        """

        return [
            Timestamp(rnd, label)
            for rnd in range(self.rounds)
            for label in MidCycleLabel
        ]

    def layer_map(self) -> Dict[Timestamp, Tuple[Instruction, ...]]:
        return dict(self.layers)

    def measurements(self) -> List[MeasurementLocation]:
        """
        All measurement locations, in the order outcomes are recorded.
        """

        return [
            MeasurementLocation(instr.kind.basis, instr.targets[0], instr.timestamp.round)
            for instr in self.instructions()
            if instr.kind.is_measurement
        ]

    def resets(self) -> List[ResetLocation]:
        return [
            ResetLocation(instr.kind.basis, instr.targets[0], instr.timestamp.round)
            for instr in self.instructions()
            if instr.kind.is_reset
        ]

    def without_noise(self) -> "Circuit":
        return replace(self, channels=(), noise_strength=0.0)


def _timestamp(rnd: int, label: MidCycleLabel) -> Timestamp:
    return Timestamp(rnd, label)


def _with_idles(
    live: Sequence[Coord], busy: List[Instruction], timestamp: Timestamp
) -> Tuple[Instruction, ...]:
    # Every live qubit not acted upon in a layer idles
    used = {target for instr in busy for target in instr.targets}
    idles = [
        Instruction(InstructionKind.Idle, (q,), timestamp) for q in live if q not in used
    ]
    return tuple(sorted(busy + idles, key=Instruction.sort_key))


def _se_layers(layout: Layout, rnd: int, fold: bool) -> List[Layer]:
    live = layout.qubits
    layers = []

    # Ancilla resets, data idle
    ts = _timestamp(rnd, MidCycleLabel.PostReset)
    resets = [
        Instruction(
            InstructionKind.ResetX if layout.is_x_ancilla(a) else InstructionKind.ResetZ,
            (a,),
            ts,
        )
        for a in layout.ancillas
    ]
    layers.append((ts, _with_idles(live, resets, ts)))

    for slot, label in enumerate(CNOT_LABELS):
        if label == MidCycleLabel.WaningCrescent and fold:
            ts = _timestamp(rnd, MidCycleLabel.PostS)
            gates = [
                Instruction(kind, (q,), ts) for q, kind in layout.fold_phase_targets
            ] + [Instruction(InstructionKind.CZ, pair, ts) for pair in layout.fold_cz_pairs]
            layers.append((ts, _with_idles(live, gates, ts)))

        ts = _timestamp(rnd, label)
        gates = []
        for ancilla in layout.ancillas:
            target = layout.schedule[ancilla][slot]
            if target is None:
                continue
            if layout.is_x_ancilla(ancilla):
                gates.append(Instruction(InstructionKind.CX, (ancilla, target), ts))
            else:
                gates.append(Instruction(InstructionKind.CX, (target, ancilla), ts))
        layers.append((ts, _with_idles(live, gates, ts)))

    # Ancilla measurements, data idle
    ts = _timestamp(rnd, MidCycleLabel.EndCycle)
    measurements = [
        Instruction(
            InstructionKind.MeasX if layout.is_x_ancilla(a) else InstructionKind.MeasZ,
            (a,),
            ts,
        )
        for a in layout.ancillas
    ]
    layers.append((ts, _with_idles(live, measurements, ts)))

    return layers


def build_ise_round(layout: Layout, i: int) -> List[Layer]:
    """
    Build the layers of a plain syndrome-extraction round with index `i`.
    """

    return _se_layers(layout, i, fold=False)


def build_sse_round(layout: Layout, i: int) -> List[Layer]:
    """
    Build the layers of a syndrome-extraction round with index `i` carrying
    the fold-transversal S layer at half-cycle.
    """

    return _se_layers(layout, i, fold=True)


def _assemble(layout: Layout, se_kinds: Sequence[RoundKind]) -> Circuit:
    kinds = [RoundKind.Init] + list(se_kinds) + [RoundKind.FinalMeas]
    layers: List[Layer] = []

    ts = _timestamp(0, MidCycleLabel.PostReset)
    layers.append(
        (ts, tuple(Instruction(InstructionKind.ResetX, (q,), ts) for q in layout.data))
    )
    for rnd, kind in enumerate(se_kinds, start=1):
        if kind == RoundKind.SSE:
            layers += build_sse_round(layout, rnd)
        else:
            layers += build_ise_round(layout, rnd)

    ts = _timestamp(len(kinds) - 1, MidCycleLabel.EndCycle)
    layers.append(
        (ts, tuple(Instruction(InstructionKind.MeasX, (q,), ts) for q in layout.data))
    )

    return Circuit(layout=layout, layers=tuple(layers), round_kinds=tuple(kinds))


def build_rounds(d: int, se_kinds: Sequence[RoundKind]) -> Circuit:
    """
    Build a circuit with an arbitrary sequence of syndrome-extraction rounds
    between X-basis initialization and readout.
    """

    if not se_kinds or any(not kind.is_se for kind in se_kinds):
        raise CircuitError(f"expected a non-empty list of ISE/SSE rounds, got {se_kinds}")

    return _assemble(build_layout(d), se_kinds)


def build_x_memory(d: int, total_rounds: Optional[int] = None) -> Circuit:
    """
    Build an X-memory circuit.

    Parameters
    ----------
    d : int
        Code distance.
    total_rounds : int
        Number of syndrome-extraction rounds; defaults to `2 * d`.

    Returns
    -------
    circuit : Circuit
        X-basis initialization, `total_rounds` plain rounds and a transversal
        X-basis readout.
    """

    layout = build_layout(d)
    if total_rounds is None:
        total_rounds = 2 * d
    if total_rounds < 1:
        raise CircuitError(f"total_rounds must be >= 1, got {total_rounds}")

    circuit = _assemble(layout, [RoundKind.ISE] * total_rounds)
    logger.info("Built X-memory circuit d=%s rounds=%s", d, total_rounds)

    return circuit


def build_s2(d: int, n_pad: int, n_m: int) -> Circuit:
    """
    Build an S-2 circuit: two S-SE rounds separated by `n_m` plain rounds and
    padded by `n_pad` plain rounds on each side.
    """

    layout = build_layout(d)
    if n_pad < 1 or n_m < 1:
        raise CircuitError(f"n_pad and n_m must be >= 1, got {n_pad} and {n_m}")

    kinds = (
        [RoundKind.ISE] * n_pad
        + [RoundKind.SSE]
        + [RoundKind.ISE] * n_m
        + [RoundKind.SSE]
        + [RoundKind.ISE] * n_pad
    )
    circuit = _assemble(layout, kinds)
    logger.info("Built S-2 circuit d=%s n_pad=%s n_m=%s", d, n_pad, n_m)

    return circuit


def apply_noise(circuit: Circuit, p: float) -> Circuit:
    """
    Attach circuit-level depolarizing noise of strength `p`.

    Every gate (idles included) is followed by a depolarizing channel of its
    arity, every reset and measurement gets a flip channel, and every data
    qubit is depolarized at the start of each syndrome-extraction round.
    Zero-probability channels are not listed.
    """

    if not 0.0 <= p < 0.5:
        raise CircuitError(f"noise strength must be in [0, 0.5), got {p}")

    circuit = circuit.without_noise()
    if p == 0.0:
        return circuit

    pending = []
    for ts, layer in circuit.layers:
        for instr in layer:
            kind = instr.kind
            if kind.is_reset:
                flip = Pauli.Z if kind.basis == Pauli.X else Pauli.X
                pending.append((NoiseKind.FlipReset, instr.targets, ts, flip))
            elif kind.is_measurement:
                flip = Pauli.Z if kind.basis == Pauli.X else Pauli.X
                before = Timestamp(ts.round, MidCycleLabel.PreMeasure)
                pending.append((NoiseKind.FlipMeasure, instr.targets, before, flip))
            elif kind.arity == 2:
                pending.append((NoiseKind.Depolarize2, instr.targets, ts, None))
            else:
                pending.append((NoiseKind.Depolarize1, instr.targets, ts, None))

    for rnd in circuit.se_rounds:
        ts = Timestamp(rnd, MidCycleLabel.PostReset)
        for q in circuit.layout.data:
            pending.append((NoiseKind.PreRoundDepolarize1, (q,), ts, None))

    pending.sort(key=lambda item: (item[2], NOISE_ORDER[item[0]], item[1]))
    channels = tuple(
        NoiseChannel(idx, kind, p, targets, ts, flip)
        for idx, (kind, targets, ts, flip) in enumerate(pending)
    )

    logger.info("Attached %s noise channels at p=%s", len(channels), p)

    return replace(circuit, channels=channels, noise_strength=p)
