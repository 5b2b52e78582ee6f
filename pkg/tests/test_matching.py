import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmwm.graph import DecodingGraph, validate_matching
from kmwm.matching import CYCLE, blossom_pairs, mwc, mwm, shortest_path
from kmwm.oracle import brute_force_mwc, enumerate_all_matchings, random_graph
from conftest import E1, E2, E3, E4, E5, E6, E7, V1, V2, VA, VB


def test_shortest_path_fixture(fixture):
    # {e4, e6, e5} (0.3) is beaten by the route through the virtual edge
    path = shortest_path(fixture[0], V1, V2)
    assert set(path.edges) == {E1, E7, E3}
    assert path.weight == pytest.approx(0.2 + 1e-7, abs=1e-15)


def test_shortest_path_without_virtual_edge(fixture):
    g = fixture[0].reduced([E7])
    path = shortest_path(g, VA, VB)
    assert path.edges == (E1, E4, E6, E5, E3)
    assert path.weight == pytest.approx(0.5, abs=1e-15)


def test_shortest_path_errors(fixture):
    g = DecodingGraph.build([False] * 4, [(0, 1, 1.0, 0), (2, 3, 1.0, 1)])
    assert shortest_path(g, 0, 2) is None
    with pytest.raises(ValueError):
        shortest_path(g, 0, 0)
    with pytest.raises(ValueError):
        shortest_path(g, 0, 9)


def test_mwc_fixture(fixture):
    sol = mwc(fixture[0].with_highlighted([]))
    assert sol.edges == (E1, E3, E4, E5, E6, E7)
    assert sol.weight == pytest.approx(0.5 + 1e-7, abs=1e-15)
    assert sol.kind == CYCLE


def test_mwc_triangle_and_tree():
    tri = DecodingGraph.build([False] * 3, [(0, 1, 1.0, 0), (1, 2, 2.0, 1), (0, 2, 3.0, 2)])
    assert mwc(tri).weight == 6.0
    tree = DecodingGraph.build([False] * 4, [(0, 1, 1.0, 0), (1, 2, 1.0, 1), (1, 3, 1.0, 2)])
    assert mwc(tree) is None
    assert mwm(tree) is None


def test_mwc_requires_empty_highlights(fixture):
    with pytest.raises(ValueError):
        mwc(fixture[0])


def test_mwm_fixture(fixture):
    sol = mwm(fixture[0])
    assert sol.edges == (E1, E3, E7)
    assert sol.weight == pytest.approx(0.2 + 1e-7, abs=1e-15)


def test_mwm_no_solution(fixture):
    g = fixture[0].reduced([E1, E3]).with_highlighted([V2, VA])
    assert mwm(g) is None


@given(st.integers(0, 2**32 - 1))
def test_mwm_optimal_against_oracle(seed):
    g = random_graph(np.random.default_rng(seed))
    truth = enumerate_all_matchings(g)
    sol = mwm(g)
    if not g.highlighted.any():
        truth = [t for t in truth if t.edges]
    if not truth:
        assert sol is None
        return
    assert sol.weight == truth[0].weight
    assert validate_matching(g, sol.edges) == (True, sol.weight)


@given(st.integers(0, 2**32 - 1))
def test_mwc_against_oracle(seed):
    g = random_graph(np.random.default_rng(seed), highlight=False)
    ref, sol = brute_force_mwc(g), mwc(g)
    assert (ref is None) == (sol is None)
    if sol is not None:
        assert sol.weight == ref.weight
        assert len(sol.edges) >= 3
        assert validate_matching(g, sol.edges)[0]


@given(st.integers(0, 2**32 - 1))
def test_shortest_path_against_exhaustive(seed):
    g = random_graph(np.random.default_rng(seed), highlight=False)
    nxg = nx.Graph()
    for e in range(g.n_edges):
        nxg.add_edge(*g.endpoints(e), w=g.weights[e])
    s, t = 0, g.n_vertices - 1
    path = shortest_path(g, s, t)
    if not (nxg.has_node(s) and nxg.has_node(t)) or not nx.has_path(nxg, s, t):
        assert path is None
        return
    best = min(sum(nxg[a][b]["w"] for a, b in zip(p, p[1:]))
               for p in nx.all_simple_paths(nxg, s, t))
    assert path.weight == pytest.approx(best, rel=1e-12)
    # consecutive edges share a vertex
    for a, b in zip(path.edges, path.edges[1:]):
        assert set(g.endpoints(a)) & set(g.endpoints(b))


def test_blossom_fallback_matches_dp():
    # more than 16 highlighted vertices exercises the blossom path
    rng = np.random.default_rng(3)
    n = 20
    edges = [(i, i + 1, float(rng.uniform(0.1, 2.0)), i) for i in range(n - 1)]
    edges += [(i, (i + 5) % n, float(rng.uniform(0.1, 2.0)), n + i) for i in range(n)
              if abs(i - (i + 5) % n) > 1]
    g = DecodingGraph.build([False] * n, edges, list(range(18)))
    sol = mwm(g)
    assert validate_matching(g, sol.edges)[0]
    # compare with a direct blossom solve of the distance matrix
    nxg = nx.Graph()
    for e in range(g.n_edges):
        nxg.add_edge(*g.endpoints(e), weight=g.weights[e])
    dist = dict(nx.all_pairs_dijkstra_path_length(nxg))
    dmat = np.array([[dist[a][b] for b in range(18)] for a in range(18)])
    partner = blossom_pairs(dmat)
    best = sum(dmat[i, partner[i]] for i in range(18)) / 2
    assert sol.weight == pytest.approx(best, rel=1e-12)


def test_blossom_pairs_infeasible():
    dmat = np.array([[0, np.inf], [np.inf, 0]])
    assert blossom_pairs(dmat) is None
