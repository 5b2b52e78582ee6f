"""Decoding graphs: construction, weighting, highlighting and serialization.

Vertices and edges are identified by their position.  Edge ``i`` of a graph
keeps id ``i`` in every reduced graph derived from it; removed edges are only
marked inactive, so matchings can always be reported in original ids.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codes import CodeSpec, rotated_surface_code, six_qubit_code

WIRINGS = ("path", "complete")


@dataclass(frozen=True, eq=False)
class DecodingGraph:
    """Weighted graph with a highlighted vertex set.

    Attributes are numpy arrays: ``virtual`` (bool per vertex), ``eu``/``ev``
    (edge endpoints), ``weights``, ``qubits`` (qubit index per edge, -1 for
    virtual edges), ``highlighted`` (bool per vertex) and ``active`` (bool
    per edge).
    """

    virtual: np.ndarray
    eu: np.ndarray
    ev: np.ndarray
    weights: np.ndarray
    qubits: np.ndarray
    highlighted: np.ndarray
    active: np.ndarray
    adjacency: tuple

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, virtual: Sequence[bool], edges: Iterable[tuple], highlighted: Iterable[int] = ()):
        """Create a graph from ``(u, v, weight, qubit_or_None)`` edge tuples."""
        virtual = np.asarray(virtual, dtype=bool).reshape(-1)
        n = len(virtual)
        edges = list(edges)
        eu = np.array([e[0] for e in edges], dtype=np.int64)
        ev = np.array([e[1] for e in edges], dtype=np.int64)
        weights = np.array([e[2] for e in edges], dtype=np.float64)
        qubits = np.array([-1 if e[3] is None else e[3] for e in edges], dtype=np.int64)
        hl = np.zeros(n, dtype=bool)
        for v in highlighted:
            if not 0 <= v < n:
                raise ValueError(f"highlighted vertex {v} does not exist")
            hl[v] = True
        graph = cls(virtual, eu, ev, weights, qubits, hl, np.ones(len(edges), dtype=bool),
                    _adjacency(n, eu, ev))
        graph.validate()
        return graph

    def validate(self) -> None:
        n = self.n_vertices
        if len(self.eu) and (self.eu.min() < 0 or self.ev.min() < 0
                             or self.eu.max() >= n or self.ev.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(self.eu == self.ev):
            raise ValueError("self-loops are not allowed")
        pairs = {frozenset(p) for p in zip(self.eu.tolist(), self.ev.tolist())}
        if len(pairs) != self.n_edges:
            raise ValueError("duplicated edge: two edges share an endpoint pair")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("edge weights must be finite and non-negative")
        q = self.qubits[self.qubits >= 0]
        if len(np.unique(q)) != len(q):
            raise ValueError("a qubit labels more than one edge")

    def _replace(self, **changes) -> "DecodingGraph":
        fields = dict(virtual=self.virtual, eu=self.eu, ev=self.ev, weights=self.weights,
                      qubits=self.qubits, highlighted=self.highlighted, active=self.active,
                      adjacency=self.adjacency)
        fields.update(changes)
        return DecodingGraph(**fields)

    def with_weights(self, weights) -> "DecodingGraph":
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.weights.shape:
            raise ValueError("one weight per edge expected")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("edge weights must be finite and non-negative")
        return self._replace(weights=weights)

    def with_highlighted(self, highlighted) -> "DecodingGraph":
        """Replace the highlighted set (bool mask or iterable of vertex ids)."""
        arr = np.asarray(highlighted)
        if arr.dtype == bool and arr.shape == (self.n_vertices,):
            hl = arr.copy()
        else:
            hl = np.zeros(self.n_vertices, dtype=bool)
            for v in arr.reshape(-1).tolist():
                if not 0 <= v < self.n_vertices:
                    raise ValueError(f"highlighted vertex {v} does not exist")
                hl[v] = True
        return self._replace(highlighted=hl)

    def reduced(self, removed: Iterable[int], flipped: Iterable[int] = ()) -> "DecodingGraph":
        """Deactivate ``removed`` edges and toggle highlights of ``flipped`` vertices."""
        active = self.active.copy()
        active[list(removed)] = False
        hl = self.highlighted.copy()
        for v in flipped:
            hl[v] = not hl[v]
        return self._replace(active=active, highlighted=hl)

    # -- views -------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.virtual)

    @property
    def n_edges(self) -> int:
        return len(self.eu)

    @property
    def highlighted_set(self) -> frozenset:
        return frozenset(np.flatnonzero(self.highlighted).tolist())

    @property
    def check_vertices(self) -> np.ndarray:
        return np.flatnonzero(~self.virtual)

    @property
    def virtual_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.virtual)

    def active_edges(self) -> np.ndarray:
        return np.flatnonzero(self.active)

    def endpoints(self, edge: int) -> tuple[int, int]:
        return int(self.eu[edge]), int(self.ev[edge])

    def is_virtual_edge(self, edge: int) -> bool:
        return self.qubits[edge] < 0

    def edge_of_qubit(self) -> dict:
        return {int(q): i for i, q in enumerate(self.qubits.tolist()) if q >= 0}

    def weight_of(self, edges: Iterable[int]) -> float:
        """Exactly rounded sum of edge weights (order independent)."""
        w = self.weights
        return math.fsum(w[e] for e in edges)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "vertices": [{"id": i, "virtual": bool(v)} for i, v in enumerate(self.virtual.tolist())],
            "edges": [
                {"id": i, "u": int(u), "v": int(v), "weight": float(w),
                 "qubit": None if q < 0 else int(q)}
                for i, (u, v, w, q) in enumerate(zip(self.eu.tolist(), self.ev.tolist(),
                                                     self.weights.tolist(), self.qubits.tolist()))
            ],
            "highlighted": sorted(self.highlighted_set),
        }
        if not self.active.all():
            out["removed"] = np.flatnonzero(~self.active).tolist()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "DecodingGraph":
        vertices = sorted(data["vertices"], key=lambda v: v["id"])
        if [v["id"] for v in vertices] != list(range(len(vertices))):
            raise ValueError("vertex ids must be 0..n-1")
        edges = sorted(data["edges"], key=lambda e: e["id"])
        if [e["id"] for e in edges] != list(range(len(edges))):
            raise ValueError("edge ids must be 0..m-1")
        graph = cls.build([v["virtual"] for v in vertices],
                          [(e["u"], e["v"], float(e["weight"]), e["qubit"]) for e in edges],
                          data.get("highlighted", []))
        if data.get("removed"):
            graph = graph.reduced(data["removed"])
        return graph

    @classmethod
    def from_json(cls, text: str) -> "DecodingGraph":
        return cls.from_dict(json.loads(text))

    def same_as(self, other: "DecodingGraph") -> bool:
        """Bit-exact structural equality."""
        return all(np.array_equal(getattr(self, f), getattr(other, f))
                   for f in ("virtual", "eu", "ev", "qubits", "highlighted", "active")) \
            and self.weights.tobytes() == other.weights.tobytes()


def _adjacency(n, eu, ev):
    """CSR incidence lists: (start, edge, neighbour)."""
    deg = np.bincount(np.concatenate([eu, ev]), minlength=n) if len(eu) else np.zeros(n, np.int64)
    start = np.zeros(n + 1, dtype=np.int64)
    start[1:] = np.cumsum(deg)
    edge = np.empty(2 * len(eu), dtype=np.int64)
    other = np.empty(2 * len(eu), dtype=np.int64)
    fill = start[:-1].copy()
    for i, (u, v) in enumerate(zip(eu.tolist(), ev.tolist())):
        edge[fill[u]], other[fill[u]] = i, v
        fill[u] += 1
        edge[fill[v]], other[fill[v]] = i, u
        fill[v] += 1
    return start, edge, other


# --- builders --------------------------------------------------------------

def build_model_graph(checks, virtual_weight: float = 0.0, wiring: str = "path") -> DecodingGraph:
    """Model graph of one error sector from its check matrix.

    One vertex per check row (in row order), one edge per qubit.  A qubit in
    one check is wired to its own virtual vertex; a qubit in no check gets an
    edge between two fresh virtual vertices.  Virtual vertices are tied
    together by ``virtual_weight`` edges: along a path by default, or as a
    complete graph with ``wiring="complete"``.
    """
    if wiring not in WIRINGS:
        raise ValueError(f"wiring must be one of {WIRINGS}")
    h = np.asarray(checks, dtype=np.int64)
    m, n = h.shape
    virtual = [False] * m
    edges = []
    virtuals = []

    def new_virtual():
        virtual.append(True)
        virtuals.append(len(virtual) - 1)
        return len(virtual) - 1

    for q in range(n):
        rows = np.flatnonzero(h[:, q]).tolist()
        if len(rows) > 2:
            raise ValueError(f"qubit {q} is in {len(rows)} checks; the sector is not graphlike")
        if len(rows) == 2:
            edges.append((rows[0], rows[1], 1.0, q))
        elif len(rows) == 1:
            edges.append((rows[0], new_virtual(), 1.0, q))
        else:
            a = new_virtual()
            edges.append((a, new_virtual(), 1.0, q))

    pairs = {frozenset(e[:2]) for e in edges}
    if len(pairs) != len(edges):
        raise ValueError("two qubits share the same pair of checks (duplicated edge)")

    def link(a, b):
        edges.append((a, b, virtual_weight, None))
        pairs.add(frozenset((a, b)))

    base = list(virtuals)
    if wiring == "path":
        for a, b in zip(base, base[1:]):
            if frozenset((a, b)) in pairs:
                spacer = new_virtual()
                link(a, spacer)
                link(spacer, b)
            else:
                link(a, b)
    else:
        for i, a in enumerate(base):
            for b in base[i + 1:]:
                if frozenset((a, b)) not in pairs:
                    link(a, b)
    return DecodingGraph.build(virtual, edges)


@dataclass(frozen=True)
class SurfaceCodeLayout:
    """One error sector of the rotated surface code of distance ``distance``.

    ``error_type="Z"`` gives the X-check graph (detecting Z errors).
    """

    distance: int
    error_type: str = "Z"

    @property
    def code(self) -> CodeSpec:
        return rotated_surface_code(self.distance)

    @property
    def checks(self) -> np.ndarray:
        return self.code.checks_for(self.error_type)

    @property
    def logical(self) -> np.ndarray:
        return self.code.opposing_logical(self.error_type)


def build_surface_model_graph(layout: SurfaceCodeLayout, virtual_weight: float = 0.0,
                              wiring: str = "path") -> DecodingGraph:
    checks = layout.checks
    if checks.shape[0] == 0:
        raise ValueError("not graphlike / empty check set")
    return build_model_graph(checks, virtual_weight, wiring)


FIXTURE_WEIGHTS = (0.1, 0.5, 0.1, 0.1, 0.1, 0.1, 1e-7)


def build_six_qubit_fixture() -> tuple[DecodingGraph, CodeSpec]:
    """Six-qubit example graph with X-error weights and highlights {v1, v2}.

    Vertices 0..3 are the checks v1..v4, vertices 4 and 5 the virtual
    vertices vA and vB.  Edge ``e_k`` of the example has id ``k - 1``.
    """
    w = FIXTURE_WEIGHTS
    edges = [
        (0, 4, w[0], 0),     # e1 = {v1, vA}
        (0, 1, w[1], 1),     # e2 = {v1, v2}
        (1, 5, w[2], 2),     # e3 = {v2, vB}
        (0, 2, w[3], 3),     # e4 = {v1, v3}
        (1, 3, w[4], 4),     # e5 = {v2, v4}
        (2, 3, w[5], 5),     # e6 = {v3, v4}
        (4, 5, w[6], None),  # e7 = {vA, vB}
    ]
    graph = DecodingGraph.build([False] * 4 + [True] * 2, edges, highlighted=[0, 1])
    return graph, six_qubit_code()


# --- weights and syndromes -------------------------------------------------

def assign_edge_weights(graph: DecodingGraph, probabilities) -> DecodingGraph:
    """Set qubit edge ``i`` to ``log((1 - eps_q) / eps_q)``; virtual edges unchanged.

    ``probabilities`` is indexed by qubit, or a scalar for uniform noise.
    """
    qubit_edges = np.flatnonzero(graph.qubits >= 0)
    eps = np.asarray(probabilities, dtype=float)
    if eps.ndim == 0:
        eps = np.full(int(graph.qubits.max()) + 1 if len(qubit_edges) else 0, float(eps))
    if len(eps) != len(qubit_edges):
        raise ValueError("one error probability per qubit edge expected")
    if np.any(~(eps > 0) | ~(eps < 0.5)):
        raise ValueError("error probabilities must lie in (0, 0.5)")
    weights = graph.weights.copy()
    q = graph.qubits[qubit_edges]
    weights[qubit_edges] = np.log((1.0 - eps[q]) / eps[q])
    return graph.with_weights(weights)


def highlight_from_syndrome(graph: DecodingGraph, syndrome) -> DecodingGraph:
    """Highlight checks with outcome 1, plus the lowest-id virtual vertex when odd."""
    checks = graph.check_vertices
    s = np.asarray(syndrome, dtype=np.int64).reshape(-1)
    if len(s) != len(checks):
        raise ValueError(f"syndrome has length {len(s)}, graph has {len(checks)} checks")
    hl = np.zeros(graph.n_vertices, dtype=bool)
    hl[checks] = (s % 2).astype(bool)
    if hl.sum() % 2:
        virtuals = graph.virtual_vertices
        if len(virtuals) == 0:
            raise ValueError("odd syndrome weight but no virtual vertex to absorb it")
        hl[virtuals[0]] = True
    return graph.with_highlighted(hl)


def validate_matching(graph: DecodingGraph, edge_set) -> tuple[bool, float]:
    """Check the matching condition and return ``(is_matching, weight)``."""
    edges = sorted(set(int(e) for e in edge_set))
    for e in edges:
        if not 0 <= e < graph.n_edges or not graph.active[e]:
            raise ValueError(f"unknown edge id {e}")
    parity = np.zeros(graph.n_vertices, dtype=bool)
    for e in edges:
        parity[graph.eu[e]] ^= True
        parity[graph.ev[e]] ^= True
    return bool(np.array_equal(parity, graph.highlighted)), graph.weight_of(edges)
