"""K-MWM decoding of graphlike qubit noise and the Pauli-to-GKP parameter map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codes import CodeSpec, hexagonal_shape
from .graph import DecodingGraph
from .matching import MatchingSolution
from .tree import MatchingEnumerator

# Class values closer than this (relative) count as tied.
TIE_RTOL = 1e-9

LABEL_ORDER = ("I", "X", "Y", "Z")


def class_label(x_bit: int, z_bit: int) -> str:
    """Label of a logical class from its X and Z components."""
    return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(int(x_bit) & 1, int(z_bit) & 1)]


def label_bits(label: str) -> tuple[int, int]:
    return {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}[label]


def _rank(label: str):
    return (label != "I", label)


def argmax_class(values: dict) -> str | None:
    """Label with the largest value; near-ties go to I, then alphabetical."""
    if not values:
        return None
    top = max(values.values())
    tied = [l for l, v in values.items() if v >= top - TIE_RTOL * abs(top)]
    return min(tied, key=_rank)


@dataclass
class ClassTally:
    """Unnormalized probability accumulated per logical class."""

    probabilities: dict = field(default_factory=dict)
    members: dict = field(default_factory=dict)
    chosen: str | None = None  # overrides the argmax when a decoder composes decisions

    def add(self, label: str, value: float, member=None) -> None:
        if value < 0:
            raise ValueError("contributions must be non-negative")
        self.probabilities[label] = self.probabilities.get(label, 0.0) + value
        self.members.setdefault(label, []).append(member)

    def ensure(self, *labels) -> "ClassTally":
        for label in labels:
            self.probabilities.setdefault(label, 0.0)
            self.members.setdefault(label, [])
        return self

    @property
    def decision(self) -> str | None:
        if self.chosen is not None:
            return self.chosen
        return argmax_class(self.probabilities)

    @property
    def total(self) -> float:
        return math.fsum(self.probabilities.values())

    @property
    def empty(self) -> bool:
        return not any(self.members.values())

    def __repr__(self):
        probs = ", ".join(f"{k}={v:.6g}" for k, v in sorted(self.probabilities.items(), key=lambda kv: _rank(kv[0])))
        return f"ClassTally({probs}; decision={self.decision})"


# --- errors and classes ----------------------------------------------------

def matching_to_error(graph: DecodingGraph, matching, n_qubits: int | None = None) -> np.ndarray:
    """Binary error with a 1 on every qubit whose edge is in the matching."""
    edges = matching.edges if isinstance(matching, MatchingSolution) else tuple(matching)
    if n_qubits is None:
        n_qubits = int(graph.qubits.max()) + 1 if graph.n_edges else 0
    eta = np.zeros(n_qubits, dtype=np.int64)
    for e in edges:
        q = graph.qubits[e]
        if q >= 0:
            eta[q] = 1
    return eta


def error_to_matching(graph: DecodingGraph, error) -> tuple:
    """Qubit edges carrying the error (virtual edges are not determined)."""
    eta = np.asarray(error)
    return tuple(sorted(e for e, q in enumerate(graph.qubits.tolist()) if q >= 0 and eta[q]))


def logical_class(error, code: CodeSpec, error_type: str | None = None) -> str:
    """Class of a binary error by symplectic products with the opposing logicals.

    A length-N error needs ``error_type``; a length-2N error ``[x | z]`` is
    classified in both components.
    """
    eta = np.asarray(error, dtype=np.int64).reshape(-1)
    n = code.n
    if len(eta) == 2 * n and error_type is None:
        x_bit = int(eta[:n] @ code.lz) % 2
        z_bit = int(eta[n:] @ code.lx) % 2
        return class_label(x_bit, z_bit)
    if len(eta) != n:
        raise ValueError(f"error of length {len(eta)} does not fit a code on {n} qubits")
    if error_type is None:
        raise ValueError("a single-sector error needs error_type")
    bit = int(eta @ code.opposing_logical(error_type)) % 2
    return class_label(bit, 0) if error_type == "X" else class_label(0, bit)


# --- graphlike decoder -----------------------------------------------------

@dataclass
class GraphlikeResult:
    """Matchings in enumeration order, their classes, and the explored frontier."""

    matchings: list
    labels: list
    explored: list
    explored_labels: list
    error_type: str

    def tally(self, k: int | None = None, include_explored: bool = False) -> ClassTally:
        k = len(self.matchings) if k is None else k
        tally = ClassTally().ensure("I", "X" if self.error_type == "X" else "Z")
        for m, label in zip(self.matchings[:k], self.labels[:k]):
            tally.add(label, math.exp(-m.weight), m)
        if include_explored:
            for m, label in zip(self.explored, self.explored_labels):
                tally.add(label, math.exp(-m.weight), m)
        return tally


def _infer_error_type(graph: DecodingGraph, code: CodeSpec) -> str:
    """Sector whose checks match the graph's non-virtual vertices."""
    n_checks = len(graph.check_vertices)
    candidates = [t for t in ("X", "Z") if len(code.checks_for(t)) == n_checks]
    if len(candidates) == 1:
        return candidates[0]
    for t in candidates:
        h = code.checks_for(t)
        ok = all(set(np.flatnonzero(h[:, q]).tolist()) ==
                 {v for v in graph.endpoints(e) if not graph.virtual[v]}
                 for e, q in enumerate(graph.qubits.tolist()) if q >= 0)
        if ok:
            return t
    raise ValueError("cannot tell which error sector the graph decodes; pass error_type")


def decode_graphlike(graph: DecodingGraph, code: CodeSpec, k: int, include_explored: bool = False,
                     error_type: str | None = None) -> ClassTally:
    """Sum ``exp(-w(M))`` over the first ``k`` matchings per logical class."""
    result = enumerate_graphlike(graph, code, k, include_explored, error_type)
    if not result.matchings:
        return ClassTally()
    return result.tally(k, include_explored)


def enumerate_graphlike(graph: DecodingGraph, code: CodeSpec, k: int, include_explored: bool = False,
                        error_type: str | None = None) -> GraphlikeResult:
    if k < 1:
        raise ValueError("k must be at least 1")
    error_type = error_type or _infer_error_type(graph, code)
    enum = MatchingEnumerator(graph)
    found = enum.take(k)
    labels = [logical_class(matching_to_error(graph, m, code.n), code, error_type) for m in found]
    explored = enum.explored(len(found)) if include_explored else []
    explored_labels = [logical_class(matching_to_error(graph, m, code.n), code, error_type)
                       for m in explored]
    return GraphlikeResult(found, labels, explored, explored_labels, error_type)


# --- Pauli noise to GKP parameters ----------------------------------------

@dataclass(frozen=True)
class GkpNoiseParams:
    """Per-mode shape ``[[g1, g2], [g3, g4]]`` and displacement noise ``sigma``."""

    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    sigma: float

    @property
    def shape(self) -> np.ndarray:
        return np.array([[self.gamma1, self.gamma2], [self.gamma3, self.gamma4]])

    def ratios(self) -> tuple[float, float, float]:
        """Forward map: ``eps_P / eps_I`` for P = X, Y, Z."""
        c = math.pi / (2.0 * self.sigma ** 2)
        g1, g2, g3, g4 = self.gamma1, self.gamma2, self.gamma3, self.gamma4
        return (math.exp(-c * (g1 ** 2 + g3 ** 2)),
                math.exp(-c * ((g1 + g2) ** 2 + (g3 + g4) ** 2)),
                math.exp(-c * (g2 ** 2 + g4 ** 2)))


def pauli_to_gkp_params(eps_x: float, eps_y: float, eps_z: float) -> GkpNoiseParams:
    """GKP shape and noise whose discrete shifts reproduce a Pauli channel.

    Solves ``eps_P / eps_I = exp(-pi |S b_P|^2 / (2 sigma^2))`` for an
    upper-triangular ``S`` with unit determinant.  Pure Z noise maps to the
    square shape.
    """
    eps = (eps_x, eps_y, eps_z)
    if min(eps) < 0:
        raise ValueError("probabilities must be non-negative")
    eps_i = 1.0 - sum(eps)
    if eps_x == 0 and eps_y == 0:
        if not 0 < eps_z < 0.5:
            raise ValueError("pure-Z noise needs 0 < eps_z < 1/2")
        sigma = math.sqrt(math.pi / (2.0 * math.log((1.0 - eps_z) / eps_z)))
        return GkpNoiseParams(1.0, 0.0, 0.0, 1.0, sigma)
    if min(eps) == 0:
        raise ValueError("no real GKP solution when exactly one or two Pauli rates vanish")
    a_x, a_y, a_z = (math.log(eps_i / e) if eps_i > 0 else -math.inf for e in eps)
    if not (a_x > 0 and a_z > 0):
        raise ValueError("each Pauli rate must be below the identity rate")
    d = a_y - a_x - a_z
    c_sq = a_x * a_z - d * d / 4.0
    if not c_sq > 0:
        raise ValueError("Pauli rates admit no real GKP shape")
    c = math.sqrt(c_sq)
    g1 = math.sqrt(a_x / c)
    g4 = 1.0 / g1
    g2 = d / (2.0 * c * g1)
    sigma = math.sqrt(math.pi / (2.0 * c))
    return GkpNoiseParams(g1, g2, 0.0, g4, sigma)


def depolarizing_params(eps: float) -> GkpNoiseParams:
    """Closed-form hexagonal solution for ``eps/3`` on each Pauli."""
    if not 0 < eps < 0.75:
        raise ValueError("depolarizing rate must lie in (0, 3/4)")
    sigma = (math.sqrt(3.0) / math.pi * math.log(3.0 * (1.0 - eps) / eps)) ** -0.5
    s = hexagonal_shape()
    return GkpNoiseParams(s[0, 0], s[0, 1], s[1, 0], s[1, 1], sigma)
