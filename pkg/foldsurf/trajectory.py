"""
Stabilizer trajectories and detector enumeration.

A trajectory follows the stabilizer generated by a set of reset locations
through the circuit: unitary layers conjugate it, measurements in the basis it
holds absorb it, and measurements in an anticommuting basis annihilate it.
A trajectory that is fully absorbed defines a detector (its absorbing
measurements) and is that detector's detecting region.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit, Instruction, InstructionKind
from .common import DetectorError, gf2_rank
from .model import (
    Coord,
    MeasurementLocation,
    MidCycleLabel,
    Pauli,
    ResetLocation,
    SparsePauli,
    Timestamp,
    _phase_exponent,
)

logger = logging.getLogger(__name__)


# Single-qubit Clifford images as (Pauli, power of i)
_SINGLE_QUBIT_IMAGES = {
    InstructionKind.H: {Pauli.X: (Pauli.Z, 0), Pauli.Z: (Pauli.X, 0), Pauli.Y: (Pauli.Y, 2)},
    InstructionKind.S: {Pauli.X: (Pauli.Y, 0), Pauli.Y: (Pauli.X, 2), Pauli.Z: (Pauli.Z, 0)},
    InstructionKind.Sdag: {Pauli.X: (Pauli.Y, 2), Pauli.Y: (Pauli.X, 0), Pauli.Z: (Pauli.Z, 0)},
}

# Images of the generators X_a, Z_a, X_b, Z_b of two-qubit gates
_TWO_QUBIT_GENERATORS = {
    InstructionKind.CX: (
        (Pauli.X, Pauli.X),
        (Pauli.Z, Pauli.I),
        (Pauli.I, Pauli.X),
        (Pauli.Z, Pauli.Z),
    ),
    InstructionKind.CZ: (
        (Pauli.X, Pauli.Z),
        (Pauli.Z, Pauli.I),
        (Pauli.Z, Pauli.X),
        (Pauli.I, Pauli.Z),
    ),
}


def _two_qubit_table(generators) -> Dict[Tuple[Pauli, Pauli], Tuple[Pauli, Pauli, int]]:
    img_xa, img_za, img_xb, img_zb = generators
    table = {}
    for pa in Pauli:
        for pb in Pauli:
            # P = i^(xz) X^x Z^z on each qubit
            exponent = int(pa.has_x and pa.has_z) + int(pb.has_x and pb.has_z)
            acc = [Pauli.I, Pauli.I]
            factors = []
            if pa.has_x:
                factors.append(img_xa)
            if pa.has_z:
                factors.append(img_za)
            if pb.has_x:
                factors.append(img_xb)
            if pb.has_z:
                factors.append(img_zb)
            for factor in factors:
                for idx in range(2):
                    exponent += _phase_exponent(acc[idx], factor[idx])
                    acc[idx] = Pauli(acc[idx] ^ factor[idx])
            table[(pa, pb)] = (acc[0], acc[1], exponent % 4)

    return table


_TWO_QUBIT_IMAGES = {
    kind: _two_qubit_table(generators) for kind, generators in _TWO_QUBIT_GENERATORS.items()
}


def _conjugate(support: Dict[Coord, Pauli], instr: Instruction) -> int:
    # Conjugate `support` in place and return the power of i picked up
    kind = instr.kind
    if kind == InstructionKind.Idle:
        return 0

    if kind.arity == 1:
        q = instr.targets[0]
        pauli = support.get(q, Pauli.I)
        if pauli == Pauli.I:
            return 0
        image, exponent = _SINGLE_QUBIT_IMAGES[kind][pauli]
        support[q] = image
        return exponent

    a, b = instr.targets
    pa, pb = support.get(a, Pauli.I), support.get(b, Pauli.I)
    if pa == Pauli.I and pb == Pauli.I:
        return 0
    qa, qb, exponent = _TWO_QUBIT_IMAGES[kind][(pa, pb)]
    for coord, pauli in ((a, qa), (b, qb)):
        if pauli == Pauli.I:
            support.pop(coord, None)
        else:
            support[coord] = pauli

    return exponent


def propagate_layer(state: SparsePauli, layer: Sequence[Instruction]) -> SparsePauli:
    """
    Conjugate a Pauli operator through a layer of unitary instructions.

    Parameters
    ----------
    state : SparsePauli
        The operator before the layer.
    layer : list of Instruction
        Unitary instructions acting on distinct qubits.

    Returns
    -------
    state : SparsePauli
        The operator after the layer.
    """

    support = dict(state.support)
    exponent = 0 if state.sign == 1 else 2
    for instr in layer:
        if not instr.kind.is_unitary:
            raise ValueError(f"{instr.kind.value} is not a unitary instruction")
        exponent += _conjugate(support, instr)

    return SparsePauli(support, 1 if exponent % 4 == 0 else -1)


class TrajectoryStatus(enum.Enum):
    Live = "Live"
    FullyAbsorbed = "FullyAbsorbed"
    Annihilated = "Annihilated"


@dataclass
class StepResult:
    """
    Outcome of a measurement/reset layer on a trajectory state; `state` is
    `None` when the trajectory was annihilated.
    """

    state: Optional[SparsePauli]
    absorbed: List[MeasurementLocation] = field(default_factory=list)
    annihilated_by: Optional[object] = None


def step_measure_reset(
    state: SparsePauli,
    measurements: Iterable[MeasurementLocation] = (),
    resets: Iterable[ResetLocation] = (),
    outcomes: Optional[Dict[MeasurementLocation, int]] = None,
    generating: FrozenSet[ResetLocation] = frozenset(),
) -> StepResult:
    """
    Apply the measurements and resets of one layer to a trajectory state.

    A measurement whose basis matches the state's restriction absorbs it (the
    measured Pauli is multiplied off, with sign `(-1)^s` for outcome `s`); an
    anticommuting restriction annihilates the trajectory. Resets in
    `generating` multiply in their basis Pauli; other resets annihilate the
    trajectory if it acts on the reset qubit.
    """

    outcomes = outcomes or {}
    support = dict(state.support)
    sign = state.sign
    result = StepResult(state=None)

    for meas in measurements:
        restriction = support.get(meas.coord, Pauli.I)
        if restriction == Pauli.I:
            continue
        if restriction != meas.basis:
            result.annihilated_by = meas
            return result
        del support[meas.coord]
        if outcomes.get(meas, 0):
            sign = -sign
        result.absorbed.append(meas)

    for reset in resets:
        restriction = support.get(reset.coord, Pauli.I)
        if restriction != Pauli.I:
            result.annihilated_by = reset
            return result
        if reset in generating:
            support[reset.coord] = reset.basis

    result.state = SparsePauli(support, sign)
    return result


@dataclass
class StabilizerTrajectory:
    """
    Stabilizer generated by `origin`, recorded at every checkpoint from the
    earliest reset until it is absorbed, annihilated or no longer followed.
    """

    origin: FrozenSet[ResetLocation]
    states: Dict[Timestamp, SparsePauli]
    status: TrajectoryStatus
    absorbed: Tuple[MeasurementLocation, ...]
    reference_parity: int = 0
    annihilated_by: Optional[object] = None

    def at(self, timestamp: Timestamp) -> Optional[SparsePauli]:
        """
        State at a timestamp: identity outside the recorded span, `None` after
        annihilation.
        """

        if timestamp in self.states:
            return self.states[timestamp]
        if self.status == TrajectoryStatus.Annihilated and self.states:
            if timestamp > max(self.states):
                return None

        return SparsePauli()

    @property
    def measurements(self) -> FrozenSet[MeasurementLocation]:
        return frozenset(self.absorbed)


def propagate_trajectory(
    circuit: Circuit,
    resets: Iterable[ResetLocation],
    until_round: Optional[int] = None,
) -> StabilizerTrajectory:
    """
    Follow the stabilizer generated by `resets` through a circuit.

    Propagation stops once the stabilizer is reduced to the identity at the
    end of a round no earlier than the last generating reset, when it is
    annihilated, or after round `until_round`.
    """

    origin = frozenset(resets)
    if not origin:
        raise DetectorError("a trajectory needs at least one reset location")

    known = set(circuit.resets())
    for reset in origin:
        if reset not in known:
            raise DetectorError(f"{reset} is not a reset of the circuit")

    first_round = min(reset.round for reset in origin)
    last_reset_round = max(reset.round for reset in origin)
    layer_map = circuit.layer_map()

    support: Dict[Coord, Pauli] = {}
    exponent = 0
    states: Dict[Timestamp, SparsePauli] = {}
    absorbed: List[MeasurementLocation] = []

    for ts in circuit.timestamps():
        if ts.round < first_round:
            continue
        if until_round is not None and ts.round > until_round:
            break

        layer = layer_map.get(ts, ())
        kinds = {instr.kind for instr in layer}
        if any(kind.is_reset or kind.is_measurement for kind in kinds):
            meas = [
                MeasurementLocation(instr.kind.basis, instr.targets[0], ts.round)
                for instr in layer
                if instr.kind.is_measurement
            ]
            rsts = [
                ResetLocation(instr.kind.basis, instr.targets[0], ts.round)
                for instr in layer
                if instr.kind.is_reset
            ]
            step = step_measure_reset(
                SparsePauli(support, 1 if exponent == 0 else -1),
                meas,
                rsts,
                generating=origin,
            )
            if step.state is None:
                return StabilizerTrajectory(
                    origin,
                    states,
                    TrajectoryStatus.Annihilated,
                    tuple(absorbed + step.absorbed),
                    annihilated_by=step.annihilated_by,
                )
            absorbed += step.absorbed
            support = dict(step.state.support)
            exponent = 0 if step.state.sign == 1 else 2
        else:
            for instr in layer:
                exponent += _conjugate(support, instr)
            exponent %= 4
            if exponent % 2:
                raise DetectorError(f"non-Hermitian trajectory state at {ts}")

        state = SparsePauli(support, 1 if exponent == 0 else -1)
        states[ts] = state

        if (
            ts.label == MidCycleLabel.EndCycle
            and ts.round >= last_reset_round
            and state.is_identity
        ):
            return StabilizerTrajectory(
                origin,
                states,
                TrajectoryStatus.FullyAbsorbed,
                tuple(absorbed),
                reference_parity=0 if state.sign == 1 else 1,
            )

    return StabilizerTrajectory(origin, states, TrajectoryStatus.Live, tuple(absorbed))


class DetectorClass(enum.Enum):
    ZDet = "ZDet"
    XDet = "XDet"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Detector:
    """
    A set of measurements with a fixed noiseless parity.

    `coordinate` is (x2, y2, t2) with t2 = 2i + 1 for the earlier round i of
    the comparison; `reference_parity` is the noiseless parity of the
    measurements, which the syndrome is taken relative to.
    """

    id: int
    measurements: FrozenSet[MeasurementLocation]
    coordinate: Tuple[int, int, int]
    basis_class: DetectorClass
    generating_resets: FrozenSet[ResetLocation]
    reference_parity: int = 0
    shape: str = "pair"

    def sort_key(self):
        x2, y2, t2 = self.coordinate
        return (t2, self.basis_class.value, y2, x2)


@dataclass(frozen=True)
class Observable:
    """
    The logical observable: final data measurements along the logical X
    representative, with its noiseless reference value.
    """

    measurements: FrozenSet[MeasurementLocation]
    generating_resets: FrozenSet[ResetLocation]
    reference_value: int


def _detector_shape(trajectory: StabilizerTrajectory, extra: bool) -> str:
    has_z = any(m.basis == Pauli.Z for m in trajectory.absorbed)
    return "pair" + ("+rz" if extra else "") + ("+mz" if has_z else "")


def _x_detector_ok(trajectory: StabilizerTrajectory, ancilla: Coord, rounds) -> bool:
    if trajectory.status != TrajectoryStatus.FullyAbsorbed:
        return False
    x_meas = sorted(
        (m for m in trajectory.absorbed if m.basis == Pauli.X), key=MeasurementLocation.sort_key
    )
    z_meas = [m for m in trajectory.absorbed if m.basis == Pauli.Z]
    return (
        len(x_meas) == 2
        and all(m.coord == ancilla for m in x_meas)
        and tuple(m.round for m in x_meas) == tuple(rounds)
        and len(z_meas) <= 1
    )


def _residual_support(trajectory: StabilizerTrajectory) -> List[Coord]:
    if not trajectory.states:
        return []
    last = trajectory.states[max(trajectory.states)]
    return list(last.support)


def _pair_x_detector(circuit: Circuit, ancilla: Coord, i: int, j: int):
    base = {ResetLocation(Pauli.X, ancilla, i), ResetLocation(Pauli.X, ancilla, j)}
    trajectory = propagate_trajectory(circuit, base, until_round=j)
    if _x_detector_ok(trajectory, ancilla, (i, j)):
        return trajectory, False

    # One extra Z reset in the later round, searched nearest first
    residual = _residual_support(trajectory) or [ancilla]
    layout = circuit.layout

    def distance(coord: Coord) -> int:
        return min(abs(coord.x2 - q.x2) + abs(coord.y2 - q.y2) for q in residual)

    for candidate in sorted(layout.ancilla_z, key=lambda c: (distance(c), c)):
        resets = base | {ResetLocation(Pauli.Z, candidate, j)}
        trajectory = propagate_trajectory(circuit, resets, until_round=j)
        if _x_detector_ok(trajectory, ancilla, (i, j)):
            return trajectory, True

    raise DetectorError(
        f"no X detector for ancilla {ancilla} between rounds {i} and {j}"
    )


def _make_detector(trajectory, coordinate, basis_class, shape) -> Detector:
    return Detector(
        id=-1,
        measurements=trajectory.measurements,
        coordinate=coordinate,
        basis_class=basis_class,
        generating_resets=trajectory.origin,
        reference_parity=trajectory.reference_parity,
        shape=shape,
    )


def enumerate_detectors(circuit: Circuit) -> List[Detector]:
    """
    Enumerate all detectors of a circuit.

    Z detectors compare consecutive Z-ancilla measurements. X detectors
    compare consecutive X-ancilla measurements, extended where a fold layer
    intervenes by the single extra Z reset that makes the trajectory fully
    absorbed; time-boundary X detectors tie the first and last rounds to the
    transversal data initialization and readout.

    Parameters
    ----------
    circuit : Circuit
        A circuit from `build_x_memory` or `build_s2`.

    Returns
    -------
    detectors : list of Detector
        Detectors sorted by coordinate, with ids matching their position.
    """

    layout = circuit.layout
    se_rounds = circuit.se_rounds
    if not se_rounds:
        raise DetectorError("circuit has no syndrome-extraction rounds")
    first, last = se_rounds[0], se_rounds[-1]
    final = circuit.final_round

    found = []
    for ancilla in layout.ancilla_z:
        for i, j in zip(se_rounds, se_rounds[1:]):
            resets = {ResetLocation(Pauli.Z, ancilla, i), ResetLocation(Pauli.Z, ancilla, j)}
            trajectory = propagate_trajectory(circuit, resets, until_round=j)
            expected = {
                MeasurementLocation(Pauli.Z, ancilla, i),
                MeasurementLocation(Pauli.Z, ancilla, j),
            }
            if (
                trajectory.status != TrajectoryStatus.FullyAbsorbed
                or set(trajectory.absorbed) != expected
            ):
                raise DetectorError(
                    f"Z ancilla {ancilla} between rounds {i} and {j} does not form a detector"
                )
            coordinate = (ancilla.x2, ancilla.y2, 2 * i + 1)
            found.append(_make_detector(trajectory, coordinate, DetectorClass.ZDet, "pair"))

    for ancilla in layout.ancilla_x:
        plaquette = layout.stabilizer_support[ancilla]

        # Initialization boundary
        resets = {ResetLocation(Pauli.X, q, 0) for q in plaquette}
        resets.add(ResetLocation(Pauli.X, ancilla, first))
        trajectory = propagate_trajectory(circuit, resets, until_round=first)
        if trajectory.status != TrajectoryStatus.FullyAbsorbed or set(
            trajectory.absorbed
        ) != {MeasurementLocation(Pauli.X, ancilla, first)}:
            raise DetectorError(f"no initialization detector for {ancilla}")
        coordinate = (ancilla.x2, ancilla.y2, 1)
        found.append(_make_detector(trajectory, coordinate, DetectorClass.XDet, "init"))

        for i, j in zip(se_rounds, se_rounds[1:]):
            trajectory, extra = _pair_x_detector(circuit, ancilla, i, j)
            coordinate = (ancilla.x2, ancilla.y2, 2 * i + 1)
            found.append(
                _make_detector(
                    trajectory,
                    coordinate,
                    DetectorClass.XDet,
                    _detector_shape(trajectory, extra),
                )
            )

        # Readout boundary
        trajectory = propagate_trajectory(
            circuit, {ResetLocation(Pauli.X, ancilla, last)}, until_round=final
        )
        expected = {MeasurementLocation(Pauli.X, ancilla, last)} | {
            MeasurementLocation(Pauli.X, q, final) for q in plaquette
        }
        if (
            trajectory.status != TrajectoryStatus.FullyAbsorbed
            or set(trajectory.absorbed) != expected
        ):
            raise DetectorError(f"no readout detector for {ancilla}")
        coordinate = (ancilla.x2, ancilla.y2, 2 * last + 1)
        found.append(_make_detector(trajectory, coordinate, DetectorClass.XDet, "final"))

    found.sort(key=Detector.sort_key)
    detectors = [
        Detector(
            id=idx,
            measurements=det.measurements,
            coordinate=det.coordinate,
            basis_class=det.basis_class,
            generating_resets=det.generating_resets,
            reference_parity=det.reference_parity,
            shape=det.shape,
        )
        for idx, det in enumerate(found)
    ]

    _check_coverage(circuit, detectors)

    logger.info(
        "Enumerated %s detectors (%s Z, %s X)",
        len(detectors),
        sum(det.basis_class == DetectorClass.ZDet for det in detectors),
        sum(det.basis_class == DetectorClass.XDet for det in detectors),
    )

    return detectors


def _check_coverage(circuit: Circuit, detectors: Sequence[Detector]):
    covered = set()
    for det in detectors:
        covered |= det.measurements

    # Z outcomes of a single syndrome round are random and compared to nothing
    single_round = len(circuit.se_rounds) == 1
    for meas in circuit.measurements():
        if meas.coord.is_data:
            continue
        if meas.basis == Pauli.Z and single_round:
            continue
        if meas not in covered:
            raise DetectorError(f"measurement {meas} belongs to no detector")


def detecting_region(detector: Detector, circuit: Circuit) -> StabilizerTrajectory:
    """
    Return the detecting region of a detector: the trajectory generated by its
    resets, which must be fully absorbed by exactly its measurements.
    """

    trajectory = propagate_trajectory(circuit, detector.generating_resets)
    if (
        trajectory.status != TrajectoryStatus.FullyAbsorbed
        or trajectory.measurements != detector.measurements
    ):
        raise DetectorError(f"detector {detector.id} is not realized by its resets")

    return trajectory


def logical_observable(circuit: Circuit) -> Tuple[Observable, StabilizerTrajectory]:
    """
    Build the logical observable from the data resets on the logical X column.
    """

    column = circuit.layout.logical_x
    resets = {ResetLocation(Pauli.X, q, 0) for q in column}
    trajectory = propagate_trajectory(circuit, resets)
    if trajectory.status != TrajectoryStatus.FullyAbsorbed:
        raise DetectorError(
            f"logical trajectory ended as {trajectory.status.value} "
            f"({trajectory.annihilated_by})"
        )

    observable = Observable(
        measurements=trajectory.measurements,
        generating_resets=trajectory.origin,
        reference_value=trajectory.reference_parity,
    )

    return observable, trajectory


def detector_matrix(
    detectors: Sequence[Detector], measurements: Sequence[MeasurementLocation]
):
    """
    Incidence matrix (detectors x measurements) over GF(2), as a numpy array.
    """

    index = {meas: idx for idx, meas in enumerate(measurements)}
    matrix = np.zeros((len(detectors), len(measurements)), dtype=np.uint8)
    for row, det in enumerate(detectors):
        for meas in det.measurements:
            matrix[row, index[meas]] = 1

    return matrix


def detectors_independent(circuit: Circuit, detectors: Sequence[Detector]) -> bool:
    """
    Whether the detectors are linearly independent over GF(2).
    """

    matrix = detector_matrix(detectors, circuit.measurements())
    return gf2_rank(matrix) == len(detectors)
