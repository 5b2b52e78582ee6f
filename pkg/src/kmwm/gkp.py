"""GKP lattices, candidate errors, coset probabilities and surface-GKP decoders.

Conventions.  Phase-space vectors are ordered ``(q_1..q_N, p_1..p_N)``.
Each mode carries a 2x2 symplectic shape ``S_i`` acting on ``(q_i, p_i)``.
Lattice points of the scaled dual lattice are ``S y`` with ``y`` an integer
vector obeying the check parities; a shift ``xi`` is consistent with a
candidate ``eta_s`` when ``xi / sqrt(pi) = eta' - S y`` for such a ``y``,
where ``eta' = eta_s / sqrt(pi)``.  Coset representatives are stored as the
integer coefficient vector ``y``; two reps are in the same coset when they
agree mod 2 up to a stabilizer, and their logical class is read from
``y_q . lz`` (X part) and ``y_p . lx`` (Z part), mod 2.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .codes import CodeSpec
from .graph import DecodingGraph, build_model_graph
from .matching import EMPTY, MatchingSolution
from .qubit_decoder import ClassTally, argmax_class, class_label
from .tree import MatchingEnumerator, node_children, root_node

SQRT_PI = math.sqrt(math.pi)
DEFAULT_NV = 4
SEARCH_SHELLS = 3


def symplectic_form(n: int) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` of size 2n (integer)."""
    eye = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    return np.block([[zero, eye], [-eye, zero]])


# --- exact integer linear algebra -----------------------------------------

def _exact_inverse_scaled(mat: np.ndarray) -> tuple[np.ndarray, int]:
    """Return ``(inv_scaled, scale)`` with ``mat @ inv_scaled == scale * I`` exactly."""
    n = len(mat)
    approx = np.linalg.inv(mat.astype(float))
    for scale in (1, 2, 4, 8):
        cand = np.rint(approx * scale).astype(np.int64)
        if np.array_equal(mat @ cand, scale * np.eye(n, dtype=np.int64)):
            return cand, scale
    # general fallback: Gauss-Jordan over the rationals
    aug = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    inv = [row[n:] for row in aug]
    scale = math.lcm(*(x.denominator for row in inv for x in row))
    return np.array([[int(x * scale) for x in row] for row in inv], dtype=np.int64), scale


# --- mode shapes -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModeShape:
    """Shape ``S`` with rotation ``O`` such that ``O.T @ S`` is upper triangular."""

    matrix: np.ndarray
    rotation: np.ndarray
    triangular: np.ndarray

    @classmethod
    def from_matrix(cls, s) -> "ModeShape":
        s = np.asarray(s, dtype=float)
        if abs(s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0] - 1.0) > 1e-9:
            raise ValueError("mode shape must have unit determinant")
        r = math.hypot(s[0, 0], s[1, 0])
        c, sn = s[0, 0] / r, s[1, 0] / r
        rot = np.array([[c, -sn], [sn, c]])
        tri = rot.T @ s
        tri[1, 0] = 0.0
        return cls(s, rot, tri)

    @property
    def diagonal(self) -> bool:
        return self.matrix[0, 1] == 0.0 and self.matrix[1, 0] == 0.0


# --- lattices ----------------------------------------------------------------

def _standard_form(checks: np.ndarray):
    """Binary standard form of a stabilizer matrix ``[x | z]``.

    Returns ``(rows, perm, r)`` where ``rows`` are the reduced generators in
    permuted qubit order (X-part rank ``r`` rows first) and ``perm[p]`` is
    the original qubit at permuted position ``p``.
    """
    g = np.array(checks, dtype=np.uint8) % 2
    n_stab, two_n = g.shape
    n = two_n // 2
    perm = list(range(n))

    def swap_cols(a, b):
        if a != b:
            g[:, [a, b]] = g[:, [b, a]]
            g[:, [n + a, n + b]] = g[:, [n + b, n + a]]
            perm[a], perm[b] = perm[b], perm[a]

    def eliminate(row_lo, col_lo, offset):
        rank = 0
        for col in range(col_lo, n):
            r0 = row_lo + rank
            if r0 >= n_stab:
                break
            pivot = None
            for c in range(col, n):
                rows = np.flatnonzero(g[r0:, offset + c])
                if rows.size:
                    pivot = (r0 + rows[0], c)
                    break
            if pivot is None:
                break
            pr, pc = pivot
            g[[r0, pr]] = g[[pr, r0]]
            swap_cols(col_lo + rank, pc)
            target = offset + col_lo + rank
            for r in range(n_stab):
                if r != r0 and g[r, target] and (offset == 0 or r >= row_lo):
                    g[r] ^= g[r0]
            rank += 1
        return rank

    r = eliminate(0, 0, 0)
    s = eliminate(r, r, n)
    if r + s != n_stab:
        raise ValueError("check matrix is rank deficient")
    # clear the Z-pivot block of the X-type rows
    for i in range(r):
        for j in range(s):
            if g[i, n + r + j]:
                g[i] ^= g[r + j]
    return g.astype(np.int64), perm, r


def standard_form_generator(checks, logicals=None, shapes=None) -> "GkpLattice":
    """Concatenated GKP lattice of a stabilizer code in standard form.

    ``checks`` are binary rows ``[x | z]``; the result stores ``sqrt(2) M``
    of the square-GKP concatenation as an integer matrix, plus optional
    per-mode shapes.
    """
    checks = np.asarray(checks, dtype=np.int64)
    two_n = checks.shape[1]
    n = two_n // 2
    rows, perm, r = _standard_form(checks)
    s = len(rows) - r
    k = n - r - s
    gen_p = np.zeros((two_n, two_n), dtype=np.int64)
    gen_p[: r + s] = rows
    row = r + s
    blocks = [(0, r + s, k), (n, 0, r), (0, r, s), (n, r + s, k)]
    for offset, col0, width in blocks:
        for j in range(width):
            gen_p[row, offset + col0 + j] = 2
            row += 1
    # undo the qubit permutation on both halves
    gen = np.zeros_like(gen_p)
    for pos, q in enumerate(perm):
        gen[:, q] = gen_p[:, pos]
        gen[:, n + q] = gen_p[:, n + pos]
    if logicals is None:
        logicals = np.zeros((0, two_n), dtype=np.int64)
    if shapes is None:
        shapes = np.tile(np.eye(2), (n, 1, 1))
    return GkpLattice(gen, np.asarray(logicals, dtype=np.int64), np.asarray(shapes, dtype=float), k)


@dataclass(frozen=True, eq=False)
class CandidateError:
    syndrome: np.ndarray
    eta: np.ndarray          # eta_s
    eta_scaled: np.ndarray   # eta_s / sqrt(pi)


@dataclass(frozen=True, eq=False)
class GkpLattice:
    """``M = gen @ S.T / sqrt(2)`` with ``gen`` the integer square-GKP generator."""

    gen: np.ndarray
    logicals: np.ndarray
    shapes: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return self.gen.shape[0] // 2

    @cached_property
    def omega(self) -> np.ndarray:
        return symplectic_form(self.n)

    @cached_property
    def shape_matrix(self) -> np.ndarray:
        """Full 2N x 2N matrix of the per-mode shapes."""
        n = self.n
        s = np.zeros((2 * n, 2 * n))
        for i, m in enumerate(self.shapes):
            s[np.ix_([i, n + i], [i, n + i])] = m
        return s

    @cached_property
    def shape_matrix_inv(self) -> np.ndarray:
        n = self.n
        s = np.zeros((2 * n, 2 * n))
        for i, m in enumerate(self.shapes):
            s[np.ix_([i, n + i], [i, n + i])] = [[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]
        return s

    @property
    def generator(self) -> np.ndarray:
        """Real generator matrix M (rows are basis vectors)."""
        return self.gen @ self.shape_matrix.T / math.sqrt(2.0)

    @cached_property
    def _gen_inverse(self):
        return _exact_inverse_scaled(self.gen)

    @cached_property
    def gram(self) -> np.ndarray:
        """Symplectic Gram matrix ``A = M Omega M^T`` (exact integers)."""
        twice = self.gen @ self.omega @ self.gen.T
        if np.any(twice % 2):
            raise ValueError("symplectic Gram matrix is not integral")
        return twice // 2

    @cached_property
    def dual_gen(self) -> np.ndarray:
        """``sqrt(2) M_perp`` of the square concatenation, ``M_perp = -Omega (M^T)^-1 Omega``."""
        inv, scale = self._gen_inverse
        num = -self.omega @ inv.T @ self.omega * 2
        if np.any(num % scale):
            raise ValueError("dual generator is not integral")
        return num // scale

    def dual_pairing(self) -> np.ndarray:
        """``M Omega M_perp^T`` (must be integral)."""
        twice = self.gen @ self.omega @ self.dual_gen.T
        if np.any(twice % 2):
            raise ValueError("M Omega M_perp^T is not integral")
        return twice // 2

    def det(self) -> float:
        return round(abs(np.linalg.det(self.gen.astype(float)))) / 2 ** self.n

    # syndromes ----------------------------------------------------------------

    def syndrome(self, shift) -> np.ndarray:
        """``s = sqrt(2 pi) M Omega^-1 xi mod 2 pi``."""
        xi = np.asarray(shift, dtype=float)
        s = SQRT_PI * (self.gen @ (self.shape_matrix.T @ (self.omega.T @ xi)))
        return np.mod(s, 2 * math.pi)

    def candidate(self, syndrome) -> CandidateError:
        """``eta_s = Omega M^-1 s / sqrt(2 pi)``."""
        s = np.asarray(syndrome, dtype=float)
        inv, scale = self._gen_inverse
        eta = (self.omega @ (self.shape_matrix_inv.T @ (inv @ s))) / (scale * SQRT_PI)
        return CandidateError(s, eta, eta / SQRT_PI)

    def syndrome_and_candidate(self, shift) -> CandidateError:
        return self.candidate(self.syndrome(shift))

    def coefficients(self, point_scaled) -> np.ndarray:
        """Integer ``y`` with ``S y = point`` (point in units of sqrt(pi))."""
        y = self.shape_matrix_inv @ np.asarray(point_scaled, dtype=float)
        r = np.rint(y)
        if np.max(np.abs(y - r), initial=0.0) > 1e-6:
            raise ValueError("vector is not a lattice point of the scaled dual lattice")
        return r.astype(np.int64)

    def class_of(self, y) -> str:
        """Logical class of an integer dual-lattice vector."""
        y = np.asarray(y, dtype=np.int64)
        # logicals are ordered [lx | 0], [0 | lz]; a product with the X logical
        # reveals the Z component and vice versa
        z_bit, x_bit = (int(y @ self.omega @ l) % 2 for l in self.logicals)
        return class_label(x_bit, z_bit)

    def parity_ok(self, y) -> bool:
        """All stabilizer parities ``g^T Omega y`` are even."""
        stab = self.gen[: self.n - self.k]
        return not np.any((stab @ self.omega @ np.asarray(y, dtype=np.int64)) % 2)


def lattice_from_code(code: CodeSpec) -> GkpLattice:
    return standard_form_generator(code.symplectic_checks(), code.symplectic_logicals(), code.shapes)


# --- decoding graphs and representatives ----------------------------------

def round_first(x):
    """Nearest integer, halves rounded down."""
    return np.ceil(np.asarray(x, dtype=float) - 0.5).astype(np.int64)


def round_second(x, first=None):
    """Second-nearest integer (``f1 + 1`` when x sits exactly on f1)."""
    x = np.asarray(x, dtype=float)
    f1 = round_first(x) if first is None else first
    return np.where(x >= f1, f1 + 1, f1 - 1)


@dataclass(frozen=True, eq=False)
class GkpGraph:
    """Decoding graph of one subspace together with its rounding data."""

    graph: DecodingGraph
    scaled: np.ndarray   # eta'' per qubit
    gamma: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    edge_qubit: np.ndarray

    @property
    def ansatz(self) -> np.ndarray:
        """``chi'`` in units of sqrt(pi): ``gamma * f1``."""
        return self.gamma * self.f1

    def coefficients(self, matching) -> np.ndarray:
        """Integer rep: f2 on matched qubit edges, f1 elsewhere."""
        edges = matching.edges if isinstance(matching, MatchingSolution) else tuple(matching)
        y = self.f1.copy()
        for e in edges:
            q = self.edge_qubit[e]
            if q >= 0:
                y[q] = self.f2[q]
        return y


def gkp_decoding_graph(model: DecodingGraph, eta, gamma=1.0) -> GkpGraph:
    """Weights and highlights of a GKP subspace on a qubit model graph.

    ``eta`` holds one scaled candidate component per qubit, ``gamma`` the
    per-qubit scale (1 for square).  Edge weights are the squared-distance
    penalty of the second rounding, highlights the parity of the first.
    """
    eta = np.asarray(eta, dtype=float)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), eta.shape).copy()
    if np.any(gamma <= 0):
        raise ValueError("mode scales must be positive")
    scaled = eta / gamma
    f1 = round_first(scaled)
    f2 = round_second(scaled, f1)
    penalty = gamma ** 2 * ((f2 - scaled) ** 2 - (f1 - scaled) ** 2)
    qubits = model.qubits
    qubit_edges = qubits >= 0
    weights = model.weights.copy()
    weights[qubit_edges] = np.maximum(penalty[qubits[qubit_edges]], 0.0)
    parity = np.zeros(model.n_vertices, dtype=np.int64)
    odd = (f1 % 2).astype(bool)
    for e in np.flatnonzero(qubit_edges):
        if odd[qubits[e]]:
            for v in model.endpoints(e):
                if not model.virtual[v]:
                    parity[v] ^= 1
    hl = parity.astype(bool)
    if hl.sum() % 2:
        hl[model.virtual_vertices[0]] = True
    graph = model.with_weights(weights).with_highlighted(hl)
    return GkpGraph(graph, scaled, gamma, f1, f2, qubits)


@dataclass(frozen=True, eq=False)
class CosetRepresentative:
    coefficients: np.ndarray    # integer y (full 2N)
    weight: float               # matching weight offset(s)
    label: str
    probability: float

    def to_dict(self) -> dict:
        return {"y": self.coefficients.tolist(), "weight": self.weight,
                "class": self.label, "probability": self.probability}


def matching_to_coset_rep(graph: GkpGraph, matching) -> np.ndarray:
    """Integer coefficients (one subspace) of the rep of a matching."""
    return graph.coefficients(matching)


# --- coset probabilities ----------------------------------------------------

def separable_coset_probability(eta, y, gamma, sigma: float, n_v: int = DEFAULT_NV,
                                discrete: bool = False) -> float:
    """Product over components of ``sum_v exp(-pi (d - 2 gamma v)^2 / (2 sigma^2))``.

    ``d = eta - gamma * y``.  In discrete mode only the representative of
    ``d / gamma`` in {0, 1} contributes (no periodic sum).
    """
    eta = np.asarray(eta, dtype=float)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), eta.shape)
    d = eta - gamma * np.asarray(y, dtype=float)
    c = math.pi / (2.0 * sigma ** 2)
    if discrete:
        b = np.rint(d / gamma) % 2
        return float(math.exp(-c * float(np.sum((gamma * b) ** 2))))
    if n_v < 0:
        raise ValueError("n_v must be non-negative")
    v = np.arange(-n_v, n_v + 1)
    terms = np.exp(-c * (d[:, None] - 2.0 * gamma[:, None] * v[None, :]) ** 2)
    return float(np.prod(terms.sum(axis=1)))


_BOX = np.array([(a, b) for a in range(-SEARCH_SHELLS, SEARCH_SHELLS + 1)
                 for b in range(-SEARCH_SHELLS, SEARCH_SHELLS + 1)], dtype=float)


def mode_coset_probability(delta, shapes, sigma: float, n_v: int = DEFAULT_NV,
                           discrete: bool = False) -> float:
    """Product over modes of Gaussian sums over the ``n_v`` closest points of ``2 S Z^2``.

    ``delta`` has shape (N, 2): per mode ``eta'_i - S_i y_i``.  Candidate
    points come from a coefficient box of ``SEARCH_SHELLS`` around the
    nearest coefficient.
    """
    delta = np.asarray(delta, dtype=float)
    shapes = np.asarray(shapes, dtype=float)
    c = math.pi / (2.0 * sigma ** 2)
    inv = np.stack([np.array([[s[1, 1], -s[0, 1]], [-s[1, 0], s[0, 0]]]) for s in shapes])
    coef = np.einsum("nij,nj->ni", inv, delta)
    if discrete:
        b = np.rint(coef) % 2
        pts = np.einsum("nij,nj->ni", shapes, b)
        return float(math.exp(-c * float(np.sum(pts ** 2))))
    if n_v < 1:
        raise ValueError("n_v must be at least 1 for 2D sums")
    centre = np.rint(coef / 2.0)
    a = centre[:, None, :] + _BOX[None, :, :]                       # (N, B, 2)
    pts = 2.0 * np.einsum("nij,nbj->nbi", shapes, a)                # (N, B, 2)
    dist = np.sum((delta[:, None, :] - pts) ** 2, axis=2)           # (N, B)
    n_keep = min(n_v, dist.shape[1])
    nearest = np.partition(dist, n_keep - 1, axis=1)[:, :n_keep]
    return float(np.prod(np.exp(-c * nearest).sum(axis=1)))


def coset_probability(y, candidate, sigma: float, n_v: int = DEFAULT_NV, shapes=None,
                      discrete: bool = False) -> float:
    """Coset probability of the full rep ``y`` (length 2N) given ``eta'``.

    ``candidate`` is a :class:`CandidateError` or the scaled vector ``eta'``.
    Diagonal shapes use 1D sums over ``v = -n_v..n_v``; general shapes use
    2D sums over the ``n_v`` closest coset points.
    """
    eta = candidate.eta_scaled if isinstance(candidate, CandidateError) else np.asarray(candidate, float)
    y = np.asarray(y, dtype=float)
    n = len(eta) // 2
    if shapes is None:
        shapes = np.tile(np.eye(2), (n, 1, 1))
    shapes = np.asarray(shapes, dtype=float)
    if np.all(shapes[:, 0, 1] == 0) and np.all(shapes[:, 1, 0] == 0):
        gamma = np.concatenate([shapes[:, 0, 0], shapes[:, 1, 1]])
        return separable_coset_probability(eta, y, gamma, sigma, n_v, discrete)
    pts = np.einsum("nij,nj->ni", shapes, np.stack([y[:n], y[n:]], axis=1))
    delta = np.stack([eta[:n], eta[n:]], axis=1) - pts
    return mode_coset_probability(delta, shapes, sigma, n_v, discrete)


# --- surface-GKP decoders ---------------------------------------------------

class SurfaceGkpCode:
    """A CSS code concatenated with per-mode GKP shapes, ready for decoding."""

    def __init__(self, code: CodeSpec, virtual_weight: float = 0.0, wiring: str = "path"):
        if code.shapes is None:
            code = code.with_shapes(np.tile(np.eye(2), (code.n, 1, 1)))
        self.code = code
        self.n = code.n
        self.lattice = lattice_from_code(code)
        self.modes = [ModeShape.from_matrix(s) for s in code.shapes]
        self.separable = all(m.diagonal for m in self.modes)
        # p shifts are detected by X checks, q shifts by Z checks
        self.graph_p = build_model_graph(code.hx, virtual_weight, wiring)
        self.graph_q = build_model_graph(code.hz, virtual_weight, wiring)
        tri = np.stack([m.triangular for m in self.modes])
        self.t1, self.t2, self.t4 = tri[:, 0, 0], tri[:, 0, 1], tri[:, 1, 1]
        self.rot = np.stack([m.rotation for m in self.modes])

    @property
    def shapes(self) -> np.ndarray:
        return self.code.shapes

    def candidate(self, syndrome) -> CandidateError:
        return self.lattice.candidate(syndrome)

    def true_class(self, candidate: CandidateError, shift) -> str:
        """Class of the dual-lattice vector ``eta_s - xi``."""
        y = self.lattice.coefficients(candidate.eta_scaled - np.asarray(shift) / SQRT_PI)
        return self.lattice.class_of(y)

    def rotated(self, eta_scaled):
        """Per-mode rotated candidate ``O_i^T eta'_i`` split into (q, p)."""
        n = self.n
        pairs = np.stack([eta_scaled[:n], eta_scaled[n:]], axis=1)
        rot = np.einsum("nji,nj->ni", self.rot, pairs)
        return rot[:, 0], rot[:, 1]

    def full_probability(self, y, eta_scaled, sigma, n_v, discrete):
        return coset_probability(y, eta_scaled, sigma, n_v, self.shapes, discrete)


def _as_context(code) -> SurfaceGkpCode:
    return code if isinstance(code, SurfaceGkpCode) else SurfaceGkpCode(code)


@dataclass
class SubspaceRun:
    """Enumerated reps of one subspace, in enumeration order."""

    enumerator: MatchingEnumerator
    graph: GkpGraph
    prob_fn: object
    bit_fn: object
    bits: list = field(default_factory=list)
    probabilities: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    explored_cache: dict = field(default_factory=dict)

    def extend(self, k: int) -> None:
        """Enumerate up to ``k`` reps in total."""
        found = self.enumerator.take(k)
        for m in found[len(self.bits):]:
            y = self.graph.coefficients(m)
            self.bits.append(self.bit_fn(y))
            self.probabilities.append(self.prob_fn(y))
            self.weights.append(m.weight)

    def sums(self, k: int, include_explored: bool) -> list:
        out = [0.0, 0.0]
        for bit, prob in zip(self.bits[:k], self.probabilities[:k]):
            out[bit] += prob
        if include_explored:
            for bit, prob in self.explored(min(k, len(self.bits))):
                out[bit] += prob
        return out

    def explored(self, k):
        if k not in self.explored_cache:
            items = []
            for m in self.enumerator.explored(k):
                y = self.graph.coefficients(m)
                items.append((self.bit_fn(y), self.prob_fn(y)))
            self.explored_cache[k] = items
        return self.explored_cache[k]


@dataclass
class SeparableResult:
    q: SubspaceRun
    p: SubspaceRun

    def grow(self, k: int) -> "SeparableResult":
        """Extend both subspaces to ``k`` reps; prefixes stay valid."""
        self.q.extend(k)
        self.p.extend(k)
        return self

    def tally(self, k: int, include_explored: bool = False) -> ClassTally:
        sq = self.q.sums(k, include_explored)
        sp = self.p.sums(k, include_explored)
        tally = ClassTally()
        for xb in (0, 1):
            for zb in (0, 1):
                tally.probabilities[class_label(xb, zb)] = sq[xb] * sp[zb]
                tally.members[class_label(xb, zb)] = []
        tally.chosen = class_label(_bit_decision(sq), _bit_decision(sp))
        return tally

    def decision(self, k: int, include_explored: bool = False) -> str:
        return self.tally(k, include_explored).decision

    @property
    def empty(self) -> bool:
        return not self.q.bits or not self.p.bits


def _bit_decision(sums) -> int:
    return 0 if argmax_class({"I": sums[0], "X": sums[1]}) == "I" else 1


def _subspace(model, eta, gamma, prob_fn, bit_fn) -> SubspaceRun:
    gg = gkp_decoding_graph(model, eta, gamma)
    return SubspaceRun(MatchingEnumerator(gg.graph), gg, prob_fn, bit_fn)


def run_separable(code, candidate: CandidateError, sigma: float, k: int, n_v: int = DEFAULT_NV,
                  discrete: bool = False) -> SeparableResult:
    """Enumerate ``k`` reps per subspace; tallies for any prefix follow from the result."""
    ctx = _as_context(code)
    if not ctx.separable:
        raise ValueError("separable decoding needs square or rectangular shapes")
    if k < 1:
        raise ValueError("k must be at least 1")
    n = ctx.n
    eta = candidate.eta_scaled
    gq = ctx.shapes[:, 0, 0]
    gp = ctx.shapes[:, 1, 1]
    lz, lx = ctx.code.lz, ctx.code.lx

    def prob_q(y):
        return separable_coset_probability(eta[:n], y, gq, sigma, n_v, discrete)

    def prob_p(y):
        return separable_coset_probability(eta[n:], y, gp, sigma, n_v, discrete)

    q = _subspace(ctx.graph_q, eta[:n], gq, prob_q, lambda y: int(y @ lz) % 2)
    p = _subspace(ctx.graph_p, eta[n:], gp, prob_p, lambda y: int(y @ lx) % 2)
    return SeparableResult(q, p).grow(k)


def decode_surface_gkp_separable(code, syndrome, sigma: float, k: int, n_v: int = DEFAULT_NV,
                                 include_explored: bool = False, discrete: bool = False) -> ClassTally:
    """K-rep decoding of a square or rectangular surface-GKP code.

    Each quadrature is decoded on its own graph; the joint tally holds the
    products of the subspace class sums and ``tally.chosen`` combines the
    two subspace decisions.
    """
    ctx = _as_context(code)
    candidate = syndrome if isinstance(syndrome, CandidateError) else ctx.candidate(syndrome)
    return run_separable(ctx, candidate, sigma, k, n_v, discrete).tally(k, include_explored)


# correlated (general shape) decoding -------------------------------------------

class _QTree:
    """Lazy q-subspace decoding tree attached to one p representative."""

    __slots__ = ("yp", "gg", "seen")

    def __init__(self, yp, gg):
        self.yp = yp
        self.gg = gg
        self.seen = set()


@dataclass
class CorrelatedResult:
    emitted: list        # (y, probability, label) in pop order
    explored: list       # (y, probability, label) left in the frontier
    first_candidates: list = field(default_factory=list)

    def tally(self, include_explored: bool = False) -> ClassTally:
        tally = ClassTally().ensure("I", "X", "Y", "Z")
        for y, prob, label in self.emitted:
            tally.add(label, prob, y)
        if include_explored:
            for y, prob, label in self.explored:
                tally.add(label, prob, y)
        return tally


def run_correlated(code, candidate: CandidateError, sigma: float, k: int, n_v: int = DEFAULT_NV,
                   discrete: bool = False) -> CorrelatedResult:
    """Best-first search over assembled (q, p) reps without a common root.

    The first ``k`` p-subspace matchings each seed a q-subspace decoding tree
    whose candidate is shifted by the p rep through the triangular shape.
    The frontier holds q-tree nodes of all seeds keyed by the coset
    probability of the assembled rep; popping a node emits its rep and
    inserts its q-tree children.
    """
    ctx = _as_context(code)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = ctx.n
    eta = candidate.eta_scaled
    rot_q, rot_p = ctx.rotated(eta)
    p_graph = gkp_decoding_graph(ctx.graph_p, rot_p, ctx.t4)
    p_found = MatchingEnumerator(p_graph.graph).take(k)
    heap = []
    trees = []

    def push(tree_idx, tree, entry):
        """entry: TreeNode or the string EMPTY (root-less empty matching)."""
        edges = () if entry is EMPTY else entry.key
        if edges in tree.seen:
            return
        tree.seen.add(edges)
        yq = tree.gg.f1.copy() if entry is EMPTY else tree.gg.coefficients(entry.matching)
        y = np.concatenate([yq, tree.yp])
        prob = coset_probability(y, eta, sigma, n_v, ctx.shapes, discrete)
        heapq.heappush(heap, (-prob, tree_idx, edges, entry, y))

    for i, m in enumerate(p_found):
        yp = p_graph.coefficients(m)
        q_eta = rot_q - ctx.t2 * yp
        tree = _QTree(yp, gkp_decoding_graph(ctx.graph_q, q_eta, ctx.t1))
        trees.append(tree)
        if tree.gg.graph.highlighted.any():
            root = root_node(tree.gg.graph)
            if root is not None:
                push(i, tree, root)
        else:
            push(i, tree, EMPTY)
    first = [(-item[0], item[1]) for item in heap]
    emitted = []
    lattice = ctx.lattice
    while heap and len(emitted) < k:
        neg, i, edges, entry, y = heapq.heappop(heap)
        emitted.append((y, -neg, lattice.class_of(y)))
        tree = trees[i]
        if entry is EMPTY:
            root = root_node(tree.gg.graph.with_highlighted([]))
            children = [] if root is None else [root]
        else:
            children = node_children(entry)
        for child in children:
            push(i, tree, child)
    explored = [(item[4], -item[0], lattice.class_of(item[4])) for item in sorted(heap)]
    return CorrelatedResult(emitted, explored, first)


def decode_surface_gkp_correlated(code, syndrome, sigma: float, k: int, n_v: int = DEFAULT_NV,
                                  include_explored: bool = False, discrete: bool = False) -> ClassTally:
    """K-rep decoding of a surface-GKP code with general (e.g. hexagonal) shapes."""
    ctx = _as_context(code)
    candidate = syndrome if isinstance(syndrome, CandidateError) else ctx.candidate(syndrome)
    return run_correlated(ctx, candidate, sigma, k, n_v, discrete).tally(include_explored)
