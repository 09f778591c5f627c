"""
Exact minimum-weight perfect matching with a boundary on detector graphs.

Decoding compiles shortest-path distances between defects (and from each
defect to the boundary) with `networkx` Dijkstra searches and solves the
resulting defect-complete problem with the `networkx` blossom matching.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .common import MatchingError, weight_from_probability, xor_prob
from .trajectory import DetectorClass

logger = logging.getLogger(__name__)

# Virtual node absorbing odd parity
BOUNDARY = -1

# Weights are scaled to integers before blossom matching
WEIGHT_SCALE = 10 ** 6


@dataclass(frozen=True)
class MatchingEntry:
    """
    Input edge of a matching graph: one hyperedge seen through one detector
    class. An entry with a single node attaches to the boundary.
    """

    nodes: Tuple[int, ...]
    edge_id: int
    probability: float
    logical_flip: bool


@dataclass
class GraphEdge:
    """
    Edge of a matching graph after parallel merging: `edge_id` is the most
    probable member, whose logical flip the edge carries.
    """

    u: int
    v: int
    edge_id: int
    probability: float
    weight: float
    logical_flip: bool
    members: Dict[int, float] = field(default_factory=dict)
    conflict: bool = False


@dataclass
class MatchResult:
    matched_paths: List[List[int]]
    total_weight: float
    logical_correction: bool
    fault_set: FrozenSet[int]
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    # sum of matched shortest-path lengths
    matching_weight: float = 0.0


def _merged_edge(u: int, v: int, members: Dict[int, Tuple[float, bool]]) -> GraphEdge:
    # Most probable member first, ties by smallest id
    order = sorted(members, key=lambda eid: (-members[eid][0], eid))
    representative = order[0]
    prob = 0.0
    for eid in order:
        prob = xor_prob(prob, members[eid][0])
    flips = {members[eid][1] for eid in order}

    return GraphEdge(
        u=u,
        v=v,
        edge_id=representative,
        probability=prob,
        weight=weight_from_probability(prob),
        logical_flip=members[representative][1],
        members={eid: members[eid][0] for eid in order},
        conflict=len(flips) > 1,
    )


class MatchingGraph:
    """
    Weighted detector graph with a boundary node.

    Parallel entries between the same node pair are merged into one edge whose
    probability is the XOR-combination of its members.
    """

    def __init__(self, nodes: Iterable[int], entries: Iterable[MatchingEntry]):
        self.nodes = sorted(set(nodes))
        grouped: Dict[Tuple[int, int], Dict[int, Tuple[float, bool]]] = {}
        self._flips: Dict[int, bool] = {}
        for entry in entries:
            if len(entry.nodes) == 1:
                u, v = entry.nodes[0], BOUNDARY
            elif len(entry.nodes) == 2:
                u, v = entry.nodes
            else:
                raise MatchingError(
                    f"edge {entry.edge_id} has {len(entry.nodes)} endpoints in a matching graph"
                )
            key = (min(u, v), max(u, v))
            grouped.setdefault(key, {})[entry.edge_id] = (entry.probability, entry.logical_flip)
            self._flips[entry.edge_id] = entry.logical_flip

        self.edges: Dict[Tuple[int, int], GraphEdge] = {
            key: _merged_edge(key[0], key[1], members) for key, members in sorted(grouped.items())
        }
        self.conflicts = sum(1 for edge in self.edges.values() if edge.conflict)
        self._build()

    def _build(self):
        self.graph = nx.Graph()
        self.graph.add_nodes_from(self.nodes)
        self.graph.add_node(BOUNDARY)
        self.by_edge_id: Dict[int, GraphEdge] = {}
        for key in sorted(self.edges):
            edge = self.edges[key]
            self.graph.add_edge(edge.u, edge.v, weight=edge.weight, edge_id=edge.edge_id)
            self.by_edge_id[edge.edge_id] = edge

    @property
    def has_boundary(self) -> bool:
        return self.graph.degree(BOUNDARY) > 0

    def weight_of(self, edge_ids: Iterable[int]) -> float:
        return sum(self.by_edge_id[eid].weight for eid in edge_ids)

    def with_probabilities(self, updates: Dict[int, float]) -> "MatchingGraph":
        """
        Return a copy in which the listed members take new probabilities;
        affected edges are re-merged, all others are shared.
        """

        other = MatchingGraph.__new__(MatchingGraph)
        other.nodes = self.nodes
        other._flips = self._flips
        other.edges = dict(self.edges)
        for key, edge in self.edges.items():
            if not any(eid in updates for eid in edge.members):
                continue
            members = {
                eid: (updates.get(eid, prob), self._flips[eid])
                for eid, prob in edge.members.items()
            }
            merged = _merged_edge(edge.u, edge.v, members)
            # keep the representative so fault sets stay comparable
            merged.edge_id = edge.edge_id
            merged.logical_flip = edge.logical_flip
            other.edges[key] = merged
        other.conflicts = self.conflicts
        other._build()
        return other

    def to_lines(self) -> List[str]:
        """
        Debug dump: one line per edge.
        """

        return [
            f"{edge.u} {edge.v} w={edge.weight:.6f} id={edge.edge_id} L={int(edge.logical_flip)}"
            for _, edge in sorted(self.edges.items())
        ]


def compile_matching_graph(
    hypergraph, basis_class: DetectorClass, probabilities: Optional[Dict[int, float]] = None
) -> MatchingGraph:
    """
    Compile the matching graph of one decoding step.

    Parameters
    ----------
    hypergraph : DecodingHypergraph
        The weighted hypergraph.
    basis_class : DetectorClass
        `ZDet` builds the Z-step graph from the Z and mixed edges on their Z
        endpoints; `XDet` builds the X-step graph from the X edges.
    probabilities : dict
        Optional replacement probabilities by edge id.

    Returns
    -------
    graph : MatchingGraph
    """

    probabilities = probabilities or {}
    if basis_class == DetectorClass.ZDet:
        edge_ids = hypergraph.partition.z + hypergraph.partition.mix
        nodes = hypergraph.z_detectors
    else:
        edge_ids = hypergraph.partition.x
        nodes = hypergraph.x_detectors

    entries = []
    for edge_id in sorted(edge_ids):
        edge = hypergraph.edges[edge_id]
        footprint = edge.dz if basis_class == DetectorClass.ZDet else edge.dx
        entries.append(
            MatchingEntry(
                nodes=tuple(sorted(footprint)),
                edge_id=edge_id,
                probability=probabilities.get(edge_id, edge.probability),
                logical_flip=edge.logical_flip,
            )
        )

    graph = MatchingGraph(nodes, entries)
    if graph.conflicts:
        logger.info(
            "%s graph: %s parallel edges with conflicting effects", basis_class, graph.conflicts
        )

    return graph


def decode(graph: MatchingGraph, defects: Iterable[int]) -> MatchResult:
    """
    Find a minimum-weight set of edges whose endpoints reproduce `defects`.

    Parameters
    ----------
    graph : MatchingGraph
        The matching graph.
    defects : set of int
        Triggered nodes; the boundary node is not allowed.

    Returns
    -------
    result : MatchResult
        Matched paths as lists of edge ids, their XOR as the fault set, its
        total weight and its logical flip.

    Raises
    ------
    MatchingError
        If a defect is not a node, cannot be paired with another defect or the
        boundary, or no perfect matching exists.
    """

    defects = sorted(set(defects))
    if not defects:
        return MatchResult([], 0.0, False, frozenset())

    for node in defects:
        if node == BOUNDARY or node not in graph.graph:
            raise MatchingError(f"defect {node} is not a node of the matching graph")

    distances: Dict[int, Dict[int, float]] = {}
    paths: Dict[int, Dict[int, List[int]]] = {}
    for node in defects:
        distances[node], paths[node] = nx.single_source_dijkstra(graph.graph, node, weight="weight")

    # Defect-complete graph plus one boundary copy per defect
    problem = nx.Graph()
    scaled = {}
    for idx, u in enumerate(defects):
        problem.add_node(("d", u))
        if BOUNDARY in distances[u]:
            problem.add_node(("b", u))
            scaled[(("d", u), ("b", u))] = round(distances[u][BOUNDARY] * WEIGHT_SCALE)
        for v in defects[idx + 1:]:
            if v in distances[u]:
                scaled[(("d", u), ("d", v))] = round(distances[u][v] * WEIGHT_SCALE)
    copies = [node for node in problem.nodes if node[0] == "b"]
    for idx, u in enumerate(copies):
        for v in copies[idx + 1:]:
            scaled[(u, v)] = 0

    big = sum(scaled.values()) + 1
    for (u, v), w in scaled.items():
        problem.add_edge(u, v, weight=big - w)

    matching = nx.max_weight_matching(problem, maxcardinality=True, weight="weight")
    matched = set()
    pairs = []
    for a, b in matching:
        matched.update((a, b))
        if a[0] == "b" and b[0] == "b":
            continue
        if a[0] == "b" or (a[0] == "d" and b[0] == "d" and b[1] < a[1]):
            a, b = b, a
        pairs.append((a[1], BOUNDARY if b[0] == "b" else b[1]))

    unmatched = [node[1] for node in problem.nodes if node[0] == "d" and node not in matched]
    if unmatched:
        raise MatchingError(f"defects {unmatched} cannot be matched")

    matched_paths = []
    fault_set: Set[int] = set()
    for u, v in sorted(pairs):
        nodes = paths[u][v]
        edge_ids = [graph.graph.edges[a, b]["edge_id"] for a, b in zip(nodes, nodes[1:])]
        matched_paths.append(edge_ids)
        fault_set ^= set(edge_ids)

    total = graph.weight_of(fault_set)
    logical = False
    for eid in fault_set:
        logical ^= graph.by_edge_id[eid].logical_flip

    return MatchResult(
        matched_paths=matched_paths,
        total_weight=total,
        logical_correction=logical,
        fault_set=frozenset(fault_set),
        pairs=sorted(pairs),
        matching_weight=sum(distances[u][v] for u, v in pairs),
    )


def incidence(graph: MatchingGraph, fault_set: Iterable[int]) -> Set[int]:
    """
    Nodes (boundary excluded) touched an odd number of times by `fault_set`.
    """

    touched: Set[int] = set()
    for eid in fault_set:
        edge = graph.by_edge_id[eid]
        touched ^= {edge.u, edge.v}
    touched.discard(BOUNDARY)

    return touched
