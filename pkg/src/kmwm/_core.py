"""Compiled kernels behind the single-solution solvers.

All kernels take the graph as flat arrays (CSR incidence lists, weights,
active-edge mask, highlighted mask) and are deterministic: Dijkstra picks
the lowest-index vertex among equal tentative distances and only relaxes on
strict improvement; the pairing search keeps the first optimum it meets.
"""

import numpy as np
from numba import njit

OK = 0
NO_SOLUTION = 1
TOO_LARGE = 2

# Largest number of highlighted vertices paired by the exact subset DP.
# Larger instances are handed back to the caller for a blossom solve.
DP_LIMIT = 16


@njit(cache=True)
def dijkstra(n, start, inc_edge, inc_other, weights, active, source, banned, stop,
             dist, pred, done):
    """Single-source shortest paths; ``pred[v]`` is the edge entering ``v``."""
    for v in range(n):
        dist[v] = np.inf
        pred[v] = -1
        done[v] = False
    dist[source] = 0.0
    for _ in range(n):
        u = -1
        best = np.inf
        for v in range(n):
            if not done[v] and dist[v] < best:
                best = dist[v]
                u = v
        if u < 0:
            break
        done[u] = True
        if u == stop:
            break
        for k in range(start[u], start[u + 1]):
            e = inc_edge[k]
            if e == banned or not active[e]:
                continue
            v = inc_other[k]
            nd = best + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = e


@njit(cache=True)
def _walk_back(eu, ev, pred, source, target, out_mask):
    """Toggle the edges of the predecessor path target -> source in ``out_mask``."""
    v = target
    while v != source:
        e = pred[v]
        out_mask[e] = not out_mask[e]
        v = eu[e] if ev[e] == v else ev[e]


@njit(cache=True)
def shortest_path_kernel(n, start, inc_edge, inc_other, eu, ev, weights, active,
                         source, target):
    dist = np.empty(n)
    pred = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    dijkstra(n, start, inc_edge, inc_other, weights, active, source, -1, target,
             dist, pred, done)
    path = np.zeros(len(eu), dtype=np.bool_)
    if not np.isfinite(dist[target]):
        return False, path
    _walk_back(eu, ev, pred, source, target, path)
    return True, path


@njit(cache=True)
def mwc_kernel(n, start, inc_edge, inc_other, eu, ev, weights, active):
    """Minimum-weight cycle: for each edge, shortest detour between its ends."""
    m = len(eu)
    dist = np.empty(n)
    pred = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    best = np.inf
    best_mask = np.zeros(m, dtype=np.bool_)
    for e in range(m):
        if not active[e] or weights[e] >= best:
            continue
        a = eu[e]
        b = ev[e]
        dijkstra(n, start, inc_edge, inc_other, weights, active, a, e, b, dist, pred, done)
        cand = dist[b] + weights[e]
        if cand < best:
            best = cand
            best_mask[:] = False
            _walk_back(eu, ev, pred, a, b, best_mask)
            best_mask[e] = True
    if not np.isfinite(best):
        return NO_SOLUTION, best_mask
    return OK, best_mask


@njit(cache=True)
def pair_dp(dmat):
    """Exact minimum-weight perfect matching on a small complete graph.

    Subset DP: the lowest unmatched vertex is paired with every candidate
    partner.  Returns ``partner`` (all -1 if no finite perfect matching).
    """
    h = dmat.shape[0]
    size = 1 << h
    cost = np.full(size, np.inf)
    choice = np.full(size, -1, dtype=np.int64)
    cost[0] = 0.0
    for mask in range(1, size):
        # popcount parity check
        c = 0
        x = mask
        while x:
            x &= x - 1
            c += 1
        if c & 1:
            continue
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask ^ (1 << i)
        best = np.inf
        arg = -1
        for j in range(i + 1, h):
            if (rest >> j) & 1:
                val = cost[rest ^ (1 << j)] + dmat[i, j]
                if val < best:
                    best = val
                    arg = j
        cost[mask] = best
        choice[mask] = arg
    partner = np.full(h, -1, dtype=np.int64)
    mask = size - 1
    if not np.isfinite(cost[mask]):
        return partner
    while mask:
        i = 0
        while not (mask >> i) & 1:
            i += 1
        j = choice[mask]
        partner[i] = j
        partner[j] = i
        mask ^= (1 << i) | (1 << j)
    return partner


@njit(cache=True)
def highlight_distances(n, start, inc_edge, inc_other, weights, active, terminals):
    """Distance matrix between terminals and the predecessor tree of each."""
    h = len(terminals)
    dmat = np.empty((h, h))
    preds = np.empty((h, n), dtype=np.int64)
    dist = np.empty(n)
    done = np.empty(n, dtype=np.bool_)
    for i in range(h):
        dijkstra(n, start, inc_edge, inc_other, weights, active, terminals[i], -1, -1,
                 dist, preds[i], done)
        for j in range(h):
            dmat[i, j] = dist[terminals[j]]
    return dmat, preds


@njit(cache=True)
def realize_pairs(eu, ev, terminals, preds, partner, m):
    """Symmetric difference of the shortest paths of all matched pairs."""
    mask = np.zeros(m, dtype=np.bool_)
    for i in range(len(terminals)):
        j = partner[i]
        if j > i:
            _walk_back(eu, ev, preds[i], terminals[i], terminals[j], mask)
    return mask


@njit(cache=True)
def mwm_kernel(n, start, inc_edge, inc_other, eu, ev, weights, active, highlighted):
    """Minimum-weight matching of the highlighted vertices (non-empty case).

    Returns ``(status, edge_mask)``; ``TOO_LARGE`` asks the caller to pair
    the terminals with a blossom solver instead of the subset DP.
    """
    m = len(eu)
    count = 0
    for v in range(n):
        if highlighted[v]:
            count += 1
    terminals = np.empty(count, dtype=np.int64)
    k = 0
    for v in range(n):
        if highlighted[v]:
            terminals[k] = v
            k += 1
    if count & 1:
        return NO_SOLUTION, np.zeros(m, dtype=np.bool_)
    if count > DP_LIMIT:
        return TOO_LARGE, np.zeros(m, dtype=np.bool_)
    dmat, preds = highlight_distances(n, start, inc_edge, inc_other, weights, active, terminals)
    partner = pair_dp(dmat)
    if count > 0 and partner[0] < 0:
        return NO_SOLUTION, np.zeros(m, dtype=np.bool_)
    return OK, realize_pairs(eu, ev, terminals, preds, partner, m)
