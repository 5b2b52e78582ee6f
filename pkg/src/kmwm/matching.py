"""Shortest paths, minimum-weight matchings (MWM) and minimum-weight cycles (MWC).

Solvers return ``None`` when no solution exists; that is an ordinary
outcome for reduced graphs, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from . import _core
from .graph import DecodingGraph

MATCHING = "matching"
CYCLE = "cycle"
EMPTY = "empty"


@dataclass(frozen=True)
class PathResult:
    edges: tuple  # in order from source to target
    weight: float


@dataclass(frozen=True)
class MatchingSolution:
    """An edge set (sorted ids) with its weight and kind."""

    edges: tuple
    weight: float
    kind: str = MATCHING

    @property
    def key(self) -> tuple:
        return self.edges

    def __len__(self):
        return len(self.edges)


def _flat(graph: DecodingGraph):
    start, inc_edge, inc_other = graph.adjacency
    return graph.n_vertices, start, inc_edge, inc_other


def _solution(graph: DecodingGraph, mask: np.ndarray, kind: str) -> MatchingSolution:
    edges = tuple(np.flatnonzero(mask).tolist())
    return MatchingSolution(edges, graph.weight_of(edges), kind)


def shortest_path(graph: DecodingGraph, source: int, target: int) -> PathResult | None:
    """Minimum-weight path between two vertices over active edges, or None."""
    n = graph.n_vertices
    if not (0 <= source < n and 0 <= target < n):
        raise ValueError("unknown vertex id")
    if source == target:
        raise ValueError("source and target must differ")
    n, start, inc_edge, inc_other = _flat(graph)
    found, mask = _core.shortest_path_kernel(n, start, inc_edge, inc_other, graph.eu, graph.ev,
                                             graph.weights, graph.active, source, target)
    if not found:
        return None
    # order the edges by walking from the source
    remaining = set(np.flatnonzero(mask).tolist())
    ordered, v = [], source
    while remaining:
        e = next(e for e in remaining if v in (graph.eu[e], graph.ev[e]))
        remaining.remove(e)
        ordered.append(e)
        v = int(graph.ev[e] if graph.eu[e] == v else graph.eu[e])
    return PathResult(tuple(ordered), graph.weight_of(ordered))


def mwc(graph: DecodingGraph) -> MatchingSolution | None:
    """Minimum-weight cycle of the active edges; requires no highlighted vertex."""
    if graph.highlighted.any():
        raise ValueError("mwc requires an empty highlighted set")
    n, start, inc_edge, inc_other = _flat(graph)
    status, mask = _core.mwc_kernel(n, start, inc_edge, inc_other, graph.eu, graph.ev,
                                    graph.weights, graph.active)
    if status != _core.OK:
        return None
    return _solution(graph, mask, CYCLE)


def mwm(graph: DecodingGraph) -> MatchingSolution | None:
    """Minimum-weight matching of the highlighted vertices.

    Shortest paths from every highlighted vertex give a complete distance
    graph; an exact minimum-weight perfect matching on it is realized as
    the symmetric difference of the paired paths.  With nothing
    highlighted the result is the minimum-weight cycle.
    """
    if not graph.highlighted.any():
        return mwc(graph)
    n, start, inc_edge, inc_other = _flat(graph)
    status, mask = _core.mwm_kernel(n, start, inc_edge, inc_other, graph.eu, graph.ev,
                                    graph.weights, graph.active, graph.highlighted)
    if status == _core.TOO_LARGE:
        terminals = np.flatnonzero(graph.highlighted).astype(np.int64)
        dmat, preds = _core.highlight_distances(n, start, inc_edge, inc_other, graph.weights,
                                                graph.active, terminals)
        partner = blossom_pairs(dmat)
        if partner is None:
            return None
        mask = _core.realize_pairs(graph.eu, graph.ev, terminals, preds, partner, graph.n_edges)
    elif status != _core.OK:
        return None
    return _solution(graph, mask, MATCHING)


def blossom_pairs(dmat: np.ndarray) -> np.ndarray | None:
    """Minimum-weight perfect matching of a distance matrix via blossom.

    Infinite entries are missing edges.  Returns the partner array or None
    when no perfect matching exists.
    """
    h = len(dmat)
    finite = np.isfinite(dmat)
    offset = 2.0 * float(dmat[finite].max(initial=0.0)) + 1.0
    g = nx.Graph()
    g.add_nodes_from(range(h))
    for i in range(h):
        for j in range(i + 1, h):
            if finite[i, j]:
                g.add_edge(i, j, weight=offset - dmat[i, j])
    pairs = nx.max_weight_matching(g, maxcardinality=True)
    if 2 * len(pairs) != h:
        return None
    partner = np.full(h, -1, dtype=np.int64)
    for i, j in pairs:
        partner[i], partner[j] = j, i
    return partner
