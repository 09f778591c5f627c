"""
Correlated two-step decoding: match Z syndromes first, use the decoded
mixed hyperedges to correct the X syndromes, then match those.

Refinements: virtual time-boundary nodes (VTB) that try the four time
boundary conditions of the Z step and keep the lightest result, and
inference-based reweighting of the X step after the Z step, either only for
the final comparison of weights (PR) or for the X matching itself (FR).
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .common import clamp_probability, xor_prob, xor_probs
from .dem import DecodingHypergraph
from .matcher import (
    BOUNDARY,
    MatchingEntry,
    MatchingGraph,
    MatchResult,
    compile_matching_graph,
    decode,
)
from .simulator import ShotRecord
from .trajectory import DetectorClass

logger = logging.getLogger(__name__)

# Virtual time-boundary nodes of the Z step
V0 = -2
VF = -3

# Boundary conditions (v0, vf) in order of preference
VTB_CONDITIONS = ((0, 0), (0, 1), (1, 0), (1, 1))


class DecoderMode(enum.Enum):
    Plain = "plain"
    VTB = "vtb"
    VTB_PR = "vtb-pr"
    VTB_FR = "vtb-fr"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DecoderConfig:
    mode: DecoderMode = DecoderMode.Plain

    @classmethod
    def from_name(cls, name: str) -> "DecoderConfig":
        try:
            return cls(DecoderMode(name))
        except ValueError:
            names = ", ".join(mode.value for mode in DecoderMode)
            raise ValueError(f"unknown decoder `{name}` (expected one of {names})")

    @property
    def uses_vtb(self) -> bool:
        return self.mode != DecoderMode.Plain

    @property
    def reweight(self) -> Optional[str]:
        return {DecoderMode.VTB_PR: "pr", DecoderMode.VTB_FR: "fr"}.get(self.mode)


@dataclass
class InferenceState:
    """
    Neighborhoods of retained edges in the total error set, with the prior
    probability of every error location.
    """

    neighborhoods: Dict[int, FrozenSet[int]]
    priors: Dict[int, float]
    x_edges_of: Dict[int, FrozenSet[int]]

    @classmethod
    def from_hypergraph(cls, hypergraph: DecodingHypergraph) -> "InferenceState":
        members: Dict[int, Set[int]] = {edge.id: set() for edge in hypergraph.edges}
        for loc_id, parts in hypergraph.decomposition.items():
            for edge_id in parts:
                members[edge_id].add(loc_id)

        x_ids = set(hypergraph.partition.x)
        x_edges_of: Dict[int, Set[int]] = {}
        for edge_id in x_ids:
            for loc_id in members[edge_id]:
                x_edges_of.setdefault(loc_id, set()).add(edge_id)

        return cls(
            neighborhoods={eid: frozenset(locs) for eid, locs in members.items()},
            priors={loc.id: loc.probability for loc in hypergraph.locations},
            x_edges_of={loc: frozenset(eids) for loc, eids in x_edges_of.items()},
        )


def reweighted_probability(
    edge_id: int, posterior: Dict[int, float], state: InferenceState
) -> float:
    """
    Unclamped probability of an X edge given posterior location probabilities.

    Inferred neighbors add up; the remaining neighbors merge by XOR as in the
    hypergraph, so an edge without inferred neighbors keeps its probability.
    """

    hood = state.neighborhoods[edge_id]
    inferred = sum(posterior[loc] for loc in hood if loc in posterior)
    untouched = xor_probs(state.priors[loc] for loc in hood if loc not in posterior)

    return xor_prob(untouched, inferred)


def infer_and_reweight(
    z_edges: Iterable[int], state: InferenceState
) -> Dict[int, float]:
    """
    Reweight the X-step edges after a Z step.

    Every error location in the neighborhood of a decoded edge has its
    probability reset to zero, then each decoded edge spreads probability one
    uniformly over its neighborhood. An X edge whose neighborhood meets the
    reset locations takes the sum of its inferred neighbors, merged with the
    rest of its neighborhood and clamped; other X edges keep their
    probability.

    Returns
    -------
    probabilities : dict
        New probabilities of the affected X edges, by edge id.
    """

    z_edges = sorted(set(z_edges))
    if not z_edges:
        return {}

    posterior: Dict[int, float] = {}
    for edge_id in z_edges:
        for loc in state.neighborhoods[edge_id]:
            posterior[loc] = 0.0
    for edge_id in z_edges:
        hood = state.neighborhoods[edge_id]
        for loc in hood:
            posterior[loc] += 1.0 / len(hood)

    affected: Set[int] = set()
    for loc in posterior:
        affected |= state.x_edges_of.get(loc, frozenset())

    updates = {}
    for edge_id in sorted(affected):
        updates[edge_id] = clamp_probability(reweighted_probability(edge_id, posterior, state))

    return updates


@dataclass
class DecodeResult:
    """
    Outcome of decoding one shot: the logical correction, the total weight of
    the chosen correction and per-step diagnostics.
    """

    logical_correction: bool
    total_weight: float
    z_result: MatchResult
    x_result: MatchResult
    condition: Optional[Tuple[int, int]] = None
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @property
    def fault_set(self) -> FrozenSet[int]:
        return self.z_result.fault_set | self.x_result.fault_set


class DecodingGraphs:
    """
    Matching graphs and inference data shared by all shots of a hypergraph.
    """

    def __init__(self, hypergraph: DecodingHypergraph):
        self.hypergraph = hypergraph
        self.z_ids = frozenset(hypergraph.z_detectors)
        self.x_ids = frozenset(hypergraph.x_detectors)
        self.g_z = compile_matching_graph(hypergraph, DetectorClass.ZDet)
        self.g_x = compile_matching_graph(hypergraph, DetectorClass.XDet)
        self.g_z_vtb = self._vtb_graph()
        self.inference = InferenceState.from_hypergraph(hypergraph)

    def _vtb_graph(self) -> MatchingGraph:
        # Single-endpoint Z-step edges of the earliest and latest Z slices
        # attach to the virtual nodes instead of the boundary
        hypergraph = self.hypergraph
        coords = {det.id: det.coordinate[2] for det in hypergraph.detectors}
        z_times = [coords[d] for d in self.z_ids]
        first, last = (min(z_times), max(z_times)) if z_times else (None, None)

        entries = []
        for edge_id in sorted(hypergraph.partition.z + hypergraph.partition.mix):
            edge = hypergraph.edges[edge_id]
            nodes = tuple(sorted(edge.dz))
            if len(nodes) == 1:
                if coords[nodes[0]] == first:
                    nodes = (nodes[0], V0)
                elif coords[nodes[0]] == last:
                    nodes = (nodes[0], VF)
            entries.append(
                MatchingEntry(
                    nodes=nodes,
                    edge_id=edge_id,
                    probability=edge.probability,
                    logical_flip=edge.logical_flip,
                )
            )

        return MatchingGraph(sorted(self.z_ids) + [V0, VF], entries)

    def edge_dx(self, edge_ids: Iterable[int]) -> Set[int]:
        syndrome: Set[int] = set()
        for edge_id in edge_ids:
            syndrome ^= set(self.hypergraph.edges[edge_id].dx)
        return syndrome


def _defects(shot) -> Set[int]:
    if isinstance(shot, ShotRecord):
        return shot.defects
    return set(shot)


def _two_step(
    graphs: DecodingGraphs,
    defects: Set[int],
    z_graph: MatchingGraph,
    z_defects: Set[int],
    reweight: Optional[str],
) -> DecodeResult:
    z_result = decode(z_graph, z_defects)

    # X syndromes corrected by the X footprint of the decoded Z-step edges
    x_defects = (defects & graphs.x_ids) ^ graphs.edge_dx(z_result.fault_set)

    updates: Dict[int, float] = {}
    x_graph = graphs.g_x
    if reweight:
        updates = infer_and_reweight(z_result.fault_set, graphs.inference)
    reweighted = graphs.g_x.with_probabilities(updates) if updates else graphs.g_x
    if reweight == "fr":
        x_graph = reweighted

    x_result = decode(x_graph, x_defects)
    x_weight = reweighted.weight_of(x_result.fault_set) if reweight else x_result.total_weight
    total = z_result.total_weight + x_weight

    return DecodeResult(
        logical_correction=z_result.logical_correction != x_result.logical_correction,
        total_weight=total,
        z_result=z_result,
        x_result=x_result,
        diagnostics={
            "z_weight": z_result.total_weight,
            "x_weight": x_weight,
            "total_weight": total,
            "reweighted": len(updates),
        },
    )


def decode_shot(shot, graphs: DecodingGraphs, config: Optional[DecoderConfig] = None) -> DecodeResult:
    """
    Decode one shot.

    Parameters
    ----------
    shot : ShotRecord or set of int
        The shot, or directly its triggered detector ids.
    graphs : DecodingGraphs
        Compiled graphs of the circuit's hypergraph.
    config : DecoderConfig
        Decoder variant; plain two-step decoding by default.

    Returns
    -------
    result : DecodeResult
    """

    config = config or DecoderConfig()
    defects = _defects(shot)
    if config.uses_vtb:
        return vtb_decode(defects, graphs, config)

    result = _two_step(graphs, defects, graphs.g_z, defects & graphs.z_ids, None)
    result.diagnostics["condition"] = None
    return result


def vtb_decode(shot, graphs: DecodingGraphs, config: Optional[DecoderConfig] = None) -> DecodeResult:
    """
    Decode under each of the four time-boundary conditions and keep the result
    with the smallest total weight; ties go to the earlier condition in
    `VTB_CONDITIONS`.
    """

    config = config or DecoderConfig(DecoderMode.VTB)
    defects = _defects(shot)
    z_defects = defects & graphs.z_ids

    best: Optional[DecodeResult] = None
    weights = {}
    for condition in VTB_CONDITIONS:
        virtual = {node for node, bit in zip((V0, VF), condition) if bit}
        if any(graphs.g_z_vtb.graph.degree(node) == 0 for node in virtual):
            continue
        result = _two_step(graphs, defects, graphs.g_z_vtb, z_defects | virtual, config.reweight)
        result.condition = condition
        weights[condition] = result.total_weight
        if best is None or result.total_weight < best.total_weight:
            best = result

    best.diagnostics["condition"] = list(best.condition)
    best.diagnostics["condition_weights"] = {f"{a}{b}": w for (a, b), w in weights.items()}
    logger.debug("VTB condition %s, weight %s", best.condition, best.total_weight)

    return best


def decode_shot_pr(shot, graphs: DecodingGraphs) -> DecodeResult:
    return vtb_decode(shot, graphs, DecoderConfig(DecoderMode.VTB_PR))


def decode_shot_fr(shot, graphs: DecodingGraphs) -> DecodeResult:
    return vtb_decode(shot, graphs, DecoderConfig(DecoderMode.VTB_FR))


def syndrome_of(graphs: DecodingGraphs, fault_set: Iterable[int]) -> Set[int]:
    """
    All detectors (both classes) triggered by a set of hyperedges.
    """

    triggered: Set[int] = set()
    for edge_id in fault_set:
        triggered ^= set(graphs.hypergraph.edges[edge_id].effect.detectors)
    triggered.discard(BOUNDARY)

    return triggered


def decode_batch(
    detector_bits, graphs: DecodingGraphs, config: DecoderConfig
) -> List[DecodeResult]:
    """
    Decode the rows of a `(shots, n_detectors)` bit array.
    """

    results = []
    for row in detector_bits:
        defects = {int(idx) for idx in row.nonzero()[0]}
        results.append(decode_shot(defects, graphs, config))

    return results
