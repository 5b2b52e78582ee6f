"""Brute-force references for matchings, qubit MLD and GKP MLD at small sizes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec, gf2_rank, gf2_row_basis, gf2_solve, rotated_surface_code
from .gkp import CandidateError, SurfaceGkpCode, _as_context
from .graph import DecodingGraph
from .matching import CYCLE, EMPTY, MATCHING, MatchingSolution
from .qubit_decoder import ClassTally, class_label

MAX_SCAN_EDGES = 22
MAX_GROUP_GENERATORS = 16


@dataclass
class OracleReport:
    instance: str
    oracle: object
    tested: object
    agree: bool
    detail: str = ""


# --- matchings ---------------------------------------------------------------

def enumerate_all_matchings(graph: DecodingGraph) -> list[MatchingSolution]:
    """Every active-edge subset meeting the matching condition, by subset scan.

    Sorted by ``(weight, sorted edge ids)``.  With nothing highlighted the
    empty set and all cycles are returned.
    """
    ids = graph.active_edges()
    m = len(ids)
    if m > MAX_SCAN_EDGES:
        raise ValueError(f"subset scan limited to {MAX_SCAN_EDGES} edges, graph has {m}")
    incident = np.zeros(graph.n_vertices, dtype=np.int64)
    for bit, e in enumerate(ids.tolist()):
        incident[graph.eu[e]] |= 1 << bit
        incident[graph.ev[e]] |= 1 << bit
    target = graph.highlighted
    hits = []
    chunk = 1 << 18
    for lo in range(0, 1 << m, chunk):
        masks = np.arange(lo, min(lo + chunk, 1 << m), dtype=np.int64)
        ok = np.ones(len(masks), dtype=bool)
        for v in range(graph.n_vertices):
            par = np.bitwise_count(masks & incident[v]) & 1
            ok &= par.astype(bool) == target[v]
        hits.extend(masks[ok].tolist())
    kind = CYCLE if not target.any() else MATCHING
    out = []
    for mask in hits:
        edges = tuple(int(ids[b]) for b in range(m) if mask >> b & 1)
        out.append(MatchingSolution(edges, graph.weight_of(edges), kind if edges else EMPTY))
    out.sort(key=lambda s: (s.weight, s.edges))
    return out


def matching_count(graph: DecodingGraph) -> int:
    """Solution count of the incidence system over GF(2)."""
    ids = graph.active_edges()
    inc = np.zeros((graph.n_vertices, len(ids)), dtype=np.int64)
    for j, e in enumerate(ids.tolist()):
        inc[graph.eu[e], j] = 1
        inc[graph.ev[e], j] = 1
    if gf2_solve(inc, graph.highlighted.astype(np.int64)) is None:
        return 0
    return 2 ** (len(ids) - gf2_rank(inc))


def brute_force_mwc(graph: DecodingGraph) -> MatchingSolution | None:
    """Lightest non-empty cycle by exhaustive scan."""
    cycles = [c for c in enumerate_all_matchings(graph.with_highlighted([])) if c.edges]
    return cycles[0] if cycles else None


def random_graph(rng: np.random.Generator, max_edges: int = 12, min_vertices: int = 3,
                 max_vertices: int = 8, highlight: bool = True) -> DecodingGraph:
    """Random simple graph with weights in [0.1, 2.0] and an even highlighted set."""
    n = int(rng.integers(min_vertices, max_vertices + 1))
    pairs = list(itertools.combinations(range(n), 2))
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    chosen = rng.choice(len(pairs), size=m, replace=False)
    edges = [(pairs[c][0], pairs[c][1], float(rng.uniform(0.1, 2.0)), i)
             for i, c in enumerate(sorted(chosen.tolist()))]
    hl = []
    if highlight:
        size = 2 * int(rng.integers(0, n // 2 + 1))
        hl = sorted(rng.choice(n, size=size, replace=False).tolist())
    return DecodingGraph.build([False] * n, edges, hl)


# --- qubit MLD -----------------------------------------------------------------

def _group(rows) -> np.ndarray:
    basis = gf2_row_basis(rows)
    if len(basis) > MAX_GROUP_GENERATORS:
        raise ValueError(f"group scan limited to {MAX_GROUP_GENERATORS} generators")
    n = basis.shape[1] if basis.ndim == 2 and basis.size else None
    if n is None:
        return None
    coeffs = np.array(list(itertools.product((0, 1), repeat=len(basis))), dtype=np.int64)
    return (coeffs @ basis) % 2


def _span(rows, n) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, n)
    g = _group(rows) if len(rows) else None
    return np.zeros((1, n), dtype=np.int64) if g is None else g


def brute_force_mld_qubit(code: CodeSpec, syndrome, eps, error_type: str = "Z") -> ClassTally:
    """Exact class probabilities by summing over the stabilizer group.

    ``eps`` is a scalar (or per-qubit array) for one error sector, or a
    triple ``(eps_x, eps_y, eps_z)`` for correlated noise, in which case
    ``syndrome`` is ``(s_x_checks, s_z_checks)`` concatenated.
    Probabilities omit the constant no-error factor.
    """
    n = code.n
    if isinstance(eps, tuple) and len(eps) == 3:
        return _mld_pauli(code, syndrome, eps)
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (n,))
    h = code.checks_for(error_type)
    s = np.asarray(syndrome, dtype=np.int64).reshape(-1)
    base = gf2_solve(h, s) if len(h) else np.zeros(n, dtype=np.int64)
    if base is None:
        raise ValueError("syndrome is not reachable")
    group = _span(code.checks_for("X" if error_type == "Z" else "Z"), n)
    logical = code.lz if error_type == "Z" else code.lx
    with np.errstate(divide="ignore"):
        ratio = eps / (1.0 - eps)
    tally = ClassTally()
    for c in (0, 1):
        errors = (base + group + c * logical) % 2
        probs = np.prod(np.where(errors == 1, ratio, 1.0), axis=1)
        bit = int(errors[0] @ code.opposing_logical(error_type)) % 2
        label = class_label(bit, 0) if error_type == "X" else class_label(0, bit)
        tally.probabilities[label] = math.fsum(probs.tolist())
        tally.members[label] = []
    return tally


def _mld_pauli(code: CodeSpec, syndrome, eps) -> ClassTally:
    n = code.n
    ex, ey, ez = eps
    ei = 1.0 - ex - ey - ez
    s = np.asarray(syndrome, dtype=np.int64).reshape(-1)
    sx, sz = s[: len(code.hx)], s[len(code.hx):]
    z0 = gf2_solve(code.hx, sx) if len(code.hx) else np.zeros(n, dtype=np.int64)
    x0 = gf2_solve(code.hz, sz) if len(code.hz) else np.zeros(n, dtype=np.int64)
    if x0 is None or z0 is None:
        raise ValueError("syndrome is not reachable")
    stab = code.symplectic_checks()
    group = _span(stab, 2 * n)
    table = np.array([[ei, ez], [ex, ey]]) / ei   # [x][z]
    tally = ClassTally()
    for xb, zb in itertools.product((0, 1), repeat=2):
        logical = np.concatenate([xb * code.lx, zb * code.lz])
        errors = (np.concatenate([x0, z0]) + group + logical) % 2
        probs = np.prod(table[errors[:, :n], errors[:, n:]], axis=1)
        e0 = errors[0]
        label = class_label(int(e0[:n] @ code.lz) % 2, int(e0[n:] @ code.lx) % 2)
        tally.probabilities[label] = math.fsum(probs.tolist())
        tally.members[label] = []
    return tally


# --- GKP MLD ---------------------------------------------------------------------

def _mode_sums(eta_scaled, shapes, sigma, n_v, discrete):
    """Per-mode Gaussian sums ``tau_i(b)`` for every parity ``b`` in {0,1}^2."""
    n = len(shapes)
    c = math.pi / (2.0 * sigma ** 2)
    out = np.zeros((n, 2, 2))
    box = np.arange(-n_v, n_v + 1)
    grid = np.array([(a0, a1) for a0 in box for a1 in box], dtype=float)
    for i in range(n):
        s = shapes[i]
        eta = np.array([eta_scaled[i], eta_scaled[n + i]])
        sinv = np.array([[s[1, 1], -s[0, 1]], [-s[1, 0], s[0, 0]]])
        centre = np.rint(sinv @ eta / 2.0)
        for bq, bp in itertools.product((0, 1), repeat=2):
            b = np.array([bq, bp], dtype=float)
            if discrete:
                coef = np.rint(sinv @ eta) - b
                r = np.mod(coef, 2)
                out[i, bq, bp] = math.exp(-c * float(np.sum((s @ r) ** 2)))
                continue
            pts = (b + 2.0 * (centre + grid)) @ s.T
            out[i, bq, bp] = math.fsum(np.exp(-c * np.sum((eta - pts) ** 2, axis=1)).tolist())
    return out


def brute_force_mld_gkp(code, syndrome, sigma: float, n_v: int = 8, discrete: bool = False) -> ClassTally:
    """Class probabilities of a surface-GKP code summed over every coset.

    For each logical class, sums over all stabilizer binaries the product of
    per-mode Gaussian sums over a coefficient box of half-width ``n_v``.
    """
    ctx = _as_context(code)
    cand = syndrome if isinstance(syndrome, CandidateError) else ctx.candidate(syndrome)
    css = ctx.code
    n = css.n
    if len(gf2_row_basis(css.hx)) + len(gf2_row_basis(css.hz)) > MAX_GROUP_GENERATORS:
        raise ValueError(f"group scan limited to {MAX_GROUP_GENERATORS} generators")
    tau = _mode_sums(cand.eta_scaled, ctx.shapes, sigma, n_v, discrete)
    # q parities range over span(hx) (+ lx), p parities over span(hz) (+ lz)
    gq = _span(css.hx, n)
    gp = _span(css.hz, n)
    modes = np.arange(n)
    tally = ClassTally()
    for xb, zb in itertools.product((0, 1), repeat=2):
        bq = (gq + xb * css.lx) % 2
        bp = (gp + zb * css.lz) % 2
        total = 0.0
        for row_q in bq:
            vals = tau[modes[None, :], row_q[None, :], bp]
            total += float(np.sum(np.prod(vals, axis=1)))
        tally.probabilities[class_label(xb, zb)] = total
        tally.members[class_label(xb, zb)] = []
    return tally


def mld_gkp_decision(code, candidate, sigma, n_v: int = 8, discrete: bool = False) -> str:
    """Decision of the brute-force GKP oracle, read per quadrature when separable."""
    ctx = _as_context(code)
    tally = brute_force_mld_gkp(ctx, candidate, sigma, n_v, discrete)
    return tally.decision


# --- suites ------------------------------------------------------------------------

def matching_suite(instances: int = 50, seed: int = 2024) -> list[OracleReport]:
    """Enumeration and MWC checks on random graphs with at most 12 edges."""
    from .matching import mwc
    from .tree import enumerate_mwms
    from .graph import validate_matching

    rng = np.random.default_rng(seed)
    reports = []
    for i in range(instances):
        g = random_graph(rng)
        truth = enumerate_all_matchings(g)
        got = enumerate_mwms(g, max(1, len(truth))) if truth else []
        ok = [s.weight for s in got] == [s.weight for s in truth] and len(got) == len(truth)
        ok &= all(validate_matching(g, s.edges)[0] for s in got)
        reports.append(OracleReport(f"enumerate#{i}", [s.weight for s in truth],
                                    [s.weight for s in got], ok))
        g0 = g.with_highlighted([])
        ref = brute_force_mwc(g0)
        sol = mwc(g0)
        agree = (ref is None and sol is None) or (
            ref is not None and sol is not None and ref.weight == sol.weight)
        reports.append(OracleReport(f"mwc#{i}", None if ref is None else ref.weight,
                                    None if sol is None else sol.weight, agree))
    return reports


def mld_qubit_suite(distance: int = 3, eps: float = 0.1) -> list[OracleReport]:
    """All syndromes of one surface-code sector: K-all decoding vs exact MLD."""
    from .graph import (SurfaceCodeLayout, assign_edge_weights, build_surface_model_graph,
                        highlight_from_syndrome)
    from .qubit_decoder import decode_graphlike

    code = rotated_surface_code(distance)
    layout = SurfaceCodeLayout(distance, "Z")
    model = assign_edge_weights(build_surface_model_graph(layout), eps)
    total = matching_count(model)
    reports = []
    for bits in itertools.product((0, 1), repeat=len(layout.checks)):
        graph = highlight_from_syndrome(model, bits)
        ours = decode_graphlike(graph, code, total, error_type="Z")
        ref = brute_force_mld_qubit(code, bits, eps, "Z")
        reports.append(OracleReport("".join(map(str, bits)), ref.decision, ours.decision,
                                    ref.decision == ours.decision))
    return reports


def mld_gkp_suite(instances: int = 100, seed: int = 7, sigma: float = 0.3,
                  hex_sigma: float = 0.5) -> list[OracleReport]:
    """Separable decoder at K = all reps vs brute force (d=3), and the
    correlated decoder on a single hexagonal mode vs a 2D direct sum."""
    from .codes import hexagonal_shape, trivial_code
    from .gkp import decode_surface_gkp_correlated, decode_surface_gkp_separable

    rng = np.random.default_rng(seed)
    ctx = SurfaceGkpCode(rotated_surface_code(3))
    k_all = matching_count(ctx.graph_p)
    reports = []
    for i in range(instances):
        xi = rng.normal(0.0, sigma, 2 * ctx.n)
        cand = ctx.lattice.syndrome_and_candidate(xi)
        ours = decode_surface_gkp_separable(ctx, cand, sigma, k_all).decision
        ref = brute_force_mld_gkp(ctx, cand, sigma).decision
        reports.append(OracleReport(f"square-d3#{i}", ref, ours, ref == ours))
    single = SurfaceGkpCode(trivial_code().with_shapes(hexagonal_shape()[None]))
    for i in range(instances):
        xi = rng.normal(0.0, hex_sigma, 2)
        cand = single.lattice.syndrome_and_candidate(xi)
        ours = decode_surface_gkp_correlated(single, cand, hex_sigma, 4).decision
        ref = brute_force_mld_gkp(single, cand, hex_sigma).decision
        reports.append(OracleReport(f"hex-N1#{i}", ref, ours, ref == ours))
    return reports
