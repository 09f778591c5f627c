"""
Detector error model: effects of Pauli error locations on detectors and on
the logical observable, the decoding hypergraph of retained edges, and the
decomposition of every error location into those edges.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .circuit import Circuit
from .common import DecompositionError, weight_from_probability, xor_probs
from .model import Coord, Pauli, SparsePauli, Timestamp
from .simulator import FrameSimulator
from .trajectory import (
    Detector,
    DetectorClass,
    Observable,
    StabilizerTrajectory,
    detecting_region,
    enumerate_detectors,
    logical_observable,
)

logger = logging.getLogger(__name__)

# Region key of the logical observable in a `RegionIndex`
LOGICAL = -1

# Endpoint bound of the edge criterion, per detector class
MAX_ENDPOINTS = 2


@dataclass(frozen=True)
class ErrorLocation:
    """
    A single Pauli fault acting after the layer at `timestamp`.
    """

    id: int
    timestamp: Timestamp
    fault: SparsePauli
    probability: float
    parent_channel: int


@dataclass(frozen=True)
class ErrorEffect:
    """
    Detectors triggered by a fault, split by class, and whether it flips the
    logical observable.
    """

    dx: FrozenSet[int] = frozenset()
    dz: FrozenSet[int] = frozenset()
    logical_flip: bool = False

    def __xor__(self, other: "ErrorEffect") -> "ErrorEffect":
        return ErrorEffect(
            self.dx ^ other.dx, self.dz ^ other.dz, self.logical_flip != other.logical_flip
        )

    @property
    def is_trivial(self) -> bool:
        return not self.dx and not self.dz and not self.logical_flip

    @property
    def detectors(self) -> FrozenSet[int]:
        return self.dx | self.dz

    def signature(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], bool]:
        return tuple(sorted(self.dz)), tuple(sorted(self.dx)), self.logical_flip

    def meets_edge_criterion(self) -> bool:
        return len(self.dx) <= MAX_ENDPOINTS and len(self.dz) <= MAX_ENDPOINTS


class RegionIndex:
    """
    Detecting regions indexed by (timestamp, qubit) for effect lookups.
    """

    def __init__(
        self,
        detectors: Sequence[Detector],
        regions: Dict[int, StabilizerTrajectory],
        observable_region: StabilizerTrajectory,
    ):
        self.classes = {det.id: det.basis_class for det in detectors}
        self._index: Dict[Tuple[Timestamp, Coord], List[Tuple[int, Pauli]]] = defaultdict(list)

        for key, region in list(regions.items()) + [(LOGICAL, observable_region)]:
            for ts, state in region.states.items():
                for coord, pauli in state.support.items():
                    self._index[(ts, coord)].append((key, pauli))

    def effect(self, timestamp: Timestamp, fault: SparsePauli) -> ErrorEffect:
        flipped = set()
        for coord, pauli in fault.support.items():
            for key, region_pauli in self._index.get((timestamp, coord), ()):
                if pauli.anticommutes(region_pauli):
                    flipped ^= {key}

        logical = LOGICAL in flipped
        flipped.discard(LOGICAL)
        dx = frozenset(k for k in flipped if self.classes[k] == DetectorClass.XDet)
        dz = frozenset(k for k in flipped if self.classes[k] == DetectorClass.ZDet)

        return ErrorEffect(dx=dx, dz=dz, logical_flip=logical)


def effect_via_regions(error: ErrorLocation, regions: RegionIndex) -> ErrorEffect:
    """
    Compute the effect of an error location from the detecting regions: a
    detector is triggered iff its region at the error's timestamp
    anticommutes with the fault.
    """

    return regions.effect(error.timestamp, error.fault)


def effect_via_frame(
    errors: Sequence[ErrorLocation],
    circuit: Circuit,
    detectors: Sequence[Detector],
    observable: Observable,
    simulator: Optional[FrameSimulator] = None,
) -> List[ErrorEffect]:
    """
    Compute the effects of error locations by injecting each fault into the
    noiseless circuit and propagating a Pauli frame to the measurements.
    """

    simulator = simulator or FrameSimulator(circuit.without_noise(), detectors, observable)
    det_bits, obs_bits = simulator.inject([(err.timestamp, err.fault) for err in errors])

    classes = {det.id: det.basis_class for det in detectors}
    effects = []
    for row, flip in zip(det_bits, obs_bits):
        triggered = [int(idx) for idx in row.nonzero()[0]]
        effects.append(
            ErrorEffect(
                dx=frozenset(k for k in triggered if classes[k] == DetectorClass.XDet),
                dz=frozenset(k for k in triggered if classes[k] == DetectorClass.ZDet),
                logical_flip=bool(flip),
            )
        )

    return effects


@dataclass
class Edge:
    """
    A retained hyperedge: its effect, merged probability, log-likelihood
    weight and the error locations (and channels) it stands for.
    """

    id: int
    effect: ErrorEffect
    probability: float
    locations: Tuple[int, ...]
    channels: Tuple[int, ...]
    weight: float = 0.0

    @property
    def dx(self) -> FrozenSet[int]:
        return self.effect.dx

    @property
    def dz(self) -> FrozenSet[int]:
        return self.effect.dz

    @property
    def logical_flip(self) -> bool:
        return self.effect.logical_flip


@dataclass
class Partition:
    z: Tuple[int, ...]
    x: Tuple[int, ...]
    mix: Tuple[int, ...]


@dataclass
class DecodingHypergraph:
    """
    Decoding hypergraph of a noisy circuit.

    `locations` is the total error set with `effects` aligned to it;
    `decomposition[i]` lists the edge ids whose XOR reproduces the effect of
    location `i`.
    """

    circuit: Circuit
    detectors: List[Detector]
    observable: Observable
    locations: List[ErrorLocation]
    effects: List[ErrorEffect]
    edges: List[Edge]
    decomposition: Dict[int, Tuple[int, ...]]
    partition: Partition
    regions: RegionIndex
    ambiguity_count: int = 0
    mixed_single_x_fraction: float = 1.0
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def z_detectors(self) -> List[int]:
        return [det.id for det in self.detectors if det.basis_class == DetectorClass.ZDet]

    @property
    def x_detectors(self) -> List[int]:
        return [det.id for det in self.detectors if det.basis_class == DetectorClass.XDet]

    def weights(self) -> Dict[int, float]:
        return {edge.id: edge.weight for edge in self.edges}


def total_error_locations(circuit: Circuit) -> List[ErrorLocation]:
    """
    Expand every noise channel into its Pauli components.
    """

    locations = []
    for channel in circuit.channels:
        for fault, prob in channel.components():
            if prob <= 0.0:
                continue
            locations.append(
                ErrorLocation(
                    id=len(locations),
                    timestamp=channel.timestamp,
                    fault=fault,
                    probability=prob,
                    parent_channel=channel.id,
                )
            )

    return locations


def _part_effects(
    location: ErrorLocation, effect: ErrorEffect, regions: RegionIndex
) -> List[ErrorEffect]:
    # Pure faults are their own part; others split into X and Z parts
    if effect.is_trivial:
        return []
    if set(location.fault.support.values()) in ({Pauli.X}, {Pauli.Z}):
        return [effect]

    return [
        regions.effect(location.timestamp, part)
        for part in (location.fault.x_part(), location.fault.z_part())
        if not part.is_identity
    ]


def decompose_total_error(
    location: ErrorLocation,
    effect: ErrorEffect,
    edge_by_signature: Dict[tuple, int],
    regions: RegionIndex,
) -> Tuple[int, ...]:
    """
    Decompose an error location into retained edges.

    Tries the location itself, then its X and Z parts, then its single-qubit
    single-Pauli parts; parts without any effect are dropped. The XOR of the
    chosen edges' effects equals the location's effect.

    Raises
    ------
    DecompositionError
        If no candidate decomposition uses only retained edges.
    """

    if effect.is_trivial:
        return ()

    if effect.signature() in edge_by_signature:
        return (edge_by_signature[effect.signature()],)

    fault, ts = location.fault, location.timestamp
    attempts = [
        [fault.x_part(), fault.z_part()],
        [
            SparsePauli.single(coord, part)
            for coord, pauli in sorted(fault.support.items())
            for part in (Pauli.X, Pauli.Z)
            if (part == Pauli.X and pauli.has_x) or (part == Pauli.Z and pauli.has_z)
        ],
    ]
    for parts in attempts:
        chosen = []
        combined = ErrorEffect()
        for part in parts:
            if part.is_identity:
                continue
            part_effect = regions.effect(ts, part)
            if part_effect.is_trivial:
                continue
            edge_id = edge_by_signature.get(part_effect.signature())
            if edge_id is None:
                break
            chosen.append(edge_id)
            combined = combined ^ part_effect
        else:
            if combined == effect:
                # parts hitting the same edge cancel
                counts = defaultdict(int)
                for edge_id in chosen:
                    counts[edge_id] ^= 1
                return tuple(sorted(k for k, v in counts.items() if v))

    raise DecompositionError(
        f"error location {location.id} ({location.fault} at {location.timestamp}) "
        f"cannot be decomposed into retained edges"
    )


def assign_weights(hypergraph: DecodingHypergraph) -> DecodingHypergraph:
    """
    Set every edge weight to `ln((1-p)/p)` of its clamped probability.
    """

    for edge in hypergraph.edges:
        edge.weight = weight_from_probability(edge.probability)

    return hypergraph


def _count_ambiguities(edges: Sequence[Edge], z_step: Sequence[int]) -> int:
    # Z footprints shared by hyperedges that differ elsewhere
    footprints: Dict[FrozenSet[int], set] = defaultdict(set)
    for edge_id in z_step:
        edge = edges[edge_id]
        footprints[edge.dz].add((edge.dx, edge.logical_flip))

    return sum(1 for variants in footprints.values() if len(variants) > 1)


def build_hypergraph(
    circuit: Circuit,
    detectors: Optional[Sequence[Detector]] = None,
) -> DecodingHypergraph:
    """
    Build the decoding hypergraph of a noisy circuit.

    Parameters
    ----------
    circuit : Circuit
        A circuit with noise channels attached.
    detectors : list of Detector
        Detectors of the circuit; enumerated when not given.

    Returns
    -------
    hypergraph : DecodingHypergraph
        Weighted hypergraph with its partition and the decomposition of every
        error location.
    """

    if detectors is None:
        detectors = enumerate_detectors(circuit)
    detectors = list(detectors)

    regions = {det.id: detecting_region(det, circuit) for det in detectors}
    observable, observable_region = logical_observable(circuit)
    index = RegionIndex(detectors, regions, observable_region)

    locations = total_error_locations(circuit)
    effects = [effect_via_regions(loc, index) for loc in locations]

    # Candidate edges: the X and Z parts of every location meeting the criterion
    candidates: Dict[tuple, ErrorEffect] = {}
    for loc, effect in zip(locations, effects):
        for part_effect in _part_effects(loc, effect, index):
            if part_effect.is_trivial or not part_effect.meets_edge_criterion():
                continue
            if not part_effect.detectors:
                raise DecompositionError(
                    f"error location {loc.id} flips the logical observable undetected"
                )
            candidates[part_effect.signature()] = part_effect

    signatures = sorted(candidates)
    provisional = {signature: idx for idx, signature in enumerate(signatures)}
    raw = {
        loc.id: decompose_total_error(loc, effect, provisional, index)
        for loc, effect in zip(locations, effects)
    }

    # An edge stands for every location whose decomposition uses it
    members: Dict[int, List[int]] = defaultdict(list)
    for loc_id, parts in raw.items():
        for idx in parts:
            members[idx].append(loc_id)

    edges = []
    renumber = {}
    for idx, signature in enumerate(signatures):
        ids = members.get(idx)
        if not ids:
            continue
        renumber[idx] = len(edges)
        edges.append(
            Edge(
                id=len(edges),
                effect=candidates[signature],
                probability=xor_probs(locations[i].probability for i in ids),
                locations=tuple(ids),
                channels=tuple(sorted({locations[i].parent_channel for i in ids})),
            )
        )
    decomposition = {
        loc_id: tuple(renumber[idx] for idx in parts) for loc_id, parts in raw.items()
    }

    z_edges = tuple(e.id for e in edges if not e.dx)
    x_edges = tuple(e.id for e in edges if not e.dz)
    mix_edges = tuple(e.id for e in edges if e.dx and e.dz)
    partition = Partition(z=z_edges, x=x_edges, mix=mix_edges)

    ambiguity = _count_ambiguities(edges, z_edges + mix_edges)
    single_x = sum(1 for i in mix_edges if len(edges[i].dx) == 1)
    fraction = single_x / len(mix_edges) if mix_edges else 1.0

    hypergraph = DecodingHypergraph(
        circuit=circuit,
        detectors=detectors,
        observable=observable,
        locations=locations,
        effects=effects,
        edges=edges,
        decomposition=decomposition,
        partition=partition,
        regions=index,
        ambiguity_count=ambiguity,
        mixed_single_x_fraction=fraction,
        stats={
            "locations": len(locations),
            "edges": len(edges),
            "z_edges": len(z_edges),
            "x_edges": len(x_edges),
            "mix_edges": len(mix_edges),
        },
    )
    assign_weights(hypergraph)

    logger.info(
        "Built hypergraph: %s locations, %s edges (%s Z, %s X, %s mixed), %s ambiguities",
        len(locations),
        len(edges),
        len(z_edges),
        len(x_edges),
        len(mix_edges),
        ambiguity,
    )

    return hypergraph
