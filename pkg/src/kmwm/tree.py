"""Enumeration of the K lowest-weight matchings through a decoding tree.

A tree node is a matching written as ``mwm(G') | E''`` for a reduced graph
``G'`` and a set of completion edges ``E''``.  Its children delete a growing
prefix of ``mwm(G')`` from ``G'``: child ``j`` forbids ``e_j`` while forcing
``e_1 .. e_{j-1}`` into the completion set.  Popping nodes from a priority
queue keyed by ``(weight, sorted edge ids)`` yields matchings in
non-decreasing weight order.
"""

from __future__ import annotations

import heapq
from typing import Callable, Iterator

from .graph import DecodingGraph
from .matching import EMPTY, MatchingSolution, mwm

Solver = Callable[[DecodingGraph], "MatchingSolution | None"]


class TreeNode:
    """Decoding-tree node; its reduced graph is stored as a delta on its parent."""

    __slots__ = ("matching", "inner", "completion", "parent", "removed", "flipped", "_graph")

    def __init__(self, matching, inner, completion, parent=None, removed=(), flipped=(),
                 graph=None):
        self.matching: MatchingSolution = matching
        self.inner: tuple = inner            # mwm(G') edges, ascending ids
        self.completion: tuple = completion  # E''
        self.parent: TreeNode | None = parent
        self.removed: tuple = removed
        self.flipped: tuple = flipped
        self._graph = graph

    @property
    def weight(self) -> float:
        return self.matching.weight

    @property
    def key(self) -> tuple:
        return self.matching.edges

    def reduced_graph(self) -> DecodingGraph:
        """Materialize G' from the parent's graph plus this node's delta."""
        if self._graph is None:
            self._graph = self.parent.reduced_graph().reduced(self.removed, self.flipped)
        return self._graph

    def __repr__(self):
        return f"TreeNode(edges={self.key}, weight={self.weight!r})"


def root_node(graph: DecodingGraph, solver: Solver = mwm) -> TreeNode | None:
    """``(mwm(G), G, {})``; with nothing highlighted the root is the MWC."""
    sol = solver(graph)
    if sol is None:
        return None
    return TreeNode(sol, sol.edges, (), graph=graph)


def _reduction(mwm_edges, j, graph):
    m = len(mwm_edges)
    if not 1 <= j <= m + 1:
        raise ValueError(f"j must lie in 1..{m + 1}")
    removed = tuple(mwm_edges[:j])
    flipped = []
    for e in mwm_edges[: j - 1]:
        flipped.extend(graph.endpoints(e))
    return removed, tuple(flipped)


def reduced_graph(parent: DecodingGraph, mwm_edges, j: int) -> DecodingGraph:
    """Remove ``e_1..e_j`` (all edges when ``j = m + 1``) and flip the
    highlights of the endpoints of ``e_1..e_{j-1}``."""
    removed, flipped = _reduction(tuple(mwm_edges), j, parent)
    return parent.reduced(removed, flipped)


def node_children(node: TreeNode, solver: Solver = mwm) -> list[TreeNode]:
    """Children ``j = 1..|mwm(G')|+1`` of a node; infeasible branches are skipped."""
    graph = node.reduced_graph()
    inner = node.inner
    children = []
    for j in range(1, len(inner) + 2):
        removed, flipped = _reduction(inner, j, graph)
        sub = graph.reduced(removed, flipped)
        sol = solver(sub)
        if sol is None:
            continue
        completion = tuple(sorted(node.completion + inner[: j - 1]))
        edges = tuple(sorted(sol.edges + completion))
        full = MatchingSolution(edges, graph.weight_of(edges), sol.kind)
        children.append(TreeNode(full, sol.edges, completion, node, removed, flipped))
    return children


class MatchingEnumerator:
    """Lazy generator of matchings in non-decreasing weight order.

    With nothing highlighted and ``include_empty`` set, the empty matching
    comes first and the tree (rooted at the minimum-weight cycle) follows.
    A found node is expanded only when the next matching is requested.
    """

    def __init__(self, graph: DecodingGraph, include_empty: bool = True, solver: Solver = mwm):
        self.graph = graph
        self.found: list[MatchingSolution] = []
        self.mwm_calls = 0
        self._solver = solver
        self._heap: list = []
        self._seen: set = set()
        self._inserted: list = []  # (solution, number found when inserted)
        self._pending: TreeNode | None = None
        self._empty_first = include_empty and not graph.highlighted.any()
        root = root_node(graph, self._counted)
        if root is not None:
            self._push(root)

    def _counted(self, graph):
        self.mwm_calls += 1
        return self._solver(graph)

    def _push(self, node: TreeNode):
        self._seen.add(node.key)
        self._inserted.append((node.matching, len(self.found)))
        heapq.heappush(self._heap, (node.weight, node.key, node))

    def __iter__(self) -> Iterator[MatchingSolution]:
        return self

    def __next__(self) -> MatchingSolution:
        if self._empty_first:
            self._empty_first = False
            sol = MatchingSolution((), 0.0, EMPTY)
            self.found.append(sol)
            return sol
        if self._pending is not None:
            for child in node_children(self._pending, self._counted):
                if child.key not in self._seen:
                    self._push(child)
            self._pending = None
        if not self._heap:
            raise StopIteration
        _, _, node = heapq.heappop(self._heap)
        self.found.append(node.matching)
        self._pending = node
        return node.matching

    def pop_node(self) -> TreeNode | None:
        """Like ``next`` but returns the tree node (no empty matching)."""
        try:
            sol = next(self)
        except StopIteration:
            return None
        if sol.kind == EMPTY:
            return self.pop_node()
        return self._pending

    def take(self, k: int) -> list[MatchingSolution]:
        while len(self.found) < k:
            try:
                next(self)
            except StopIteration:
                break
        return self.found[:k]

    def explored(self, k: int | None = None) -> list[MatchingSolution]:
        """Candidates generated while finding the first ``k`` matchings but not among them.

        Assumes at least ``k`` matchings have been taken.
        """
        k = len(self.found) if k is None else k
        taken = {s.edges for s in self.found[:k]}
        out = [s for s, when in self._inserted if when <= k - 1 and s.edges not in taken]
        return sorted(out, key=lambda s: (s.weight, s.edges))


def enumerate_mwms(graph: DecodingGraph, k: int, include_empty: bool = True) -> list[MatchingSolution]:
    """The first ``k`` matchings of ``graph`` in non-decreasing weight order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return MatchingEnumerator(graph, include_empty).take(k)
