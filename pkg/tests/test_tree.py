import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmwm.graph import DecodingGraph, validate_matching
from kmwm.oracle import enumerate_all_matchings, random_graph
from kmwm.tree import MatchingEnumerator, enumerate_mwms, node_children, reduced_graph, root_node
from conftest import E1, E2, E3, E4, E5, E6, E7, V1, V2, VA

M1 = (E1, E3, E7)


@pytest.mark.parametrize("j, removed, highlighted", [
    (1, {E1}, {V1, V2}),
    (2, {E1, E3}, {V2, VA}),
    (4, {E1, E3, E7}, set()),
])
def test_reduced_graph(fixture, j, removed, highlighted):
    g = reduced_graph(fixture[0], M1, j)
    assert set(np.flatnonzero(~g.active).tolist()) == removed
    assert g.highlighted_set == highlighted
    assert np.array_equal(g.weights, fixture[0].weights)


def test_reduced_graph_range(fixture):
    for j in (0, 5):
        with pytest.raises(ValueError):
            reduced_graph(fixture[0], M1, j)


def test_root_children(fixture):
    root = root_node(fixture[0])
    assert root.key == M1
    kids = node_children(root)
    assert [k.key for k in kids] == [(E4, E5, E6), tuple(range(7))]
    assert kids[0].weight == pytest.approx(0.3, abs=1e-15)
    assert kids[1].weight == pytest.approx(1.0 + 1e-7, abs=1e-15)
    assert all(k.weight >= root.weight for k in kids)
    for k in kids:
        assert set(k.inner).isdisjoint(k.completion)


def test_acyclic_node_has_no_cycle_child():
    g = DecodingGraph.build([False] * 3, [(0, 1, 1.0, 0), (1, 2, 1.0, 1)], [0, 2])
    root = root_node(g)
    # the only child branch leaves an acyclic graph with nothing highlighted
    assert node_children(root) == []


def test_enumerate_fixture(fixture):
    found = enumerate_mwms(fixture[0], 4)
    assert [m.edges for m in found] == [(E1, E3, E7), (E4, E5, E6), (E2,), tuple(range(7))]
    assert [m.weight for m in found] == pytest.approx([0.2 + 1e-7, 0.3, 0.5, 1.0 + 1e-7], abs=1e-12)
    assert [m.edges for m in enumerate_mwms(fixture[0], 10)] == [m.edges for m in found]


def test_k_one_is_mwm(fixture):
    assert enumerate_mwms(fixture[0], 1)[0].edges == M1


def test_empty_highlight_starts_with_empty(fixture):
    g = fixture[0].with_highlighted([])
    found = enumerate_mwms(g, 4)
    assert found[0].edges == ()
    assert [m.weight for m in found] == [m.weight for m in enumerate_all_matchings(g)]


def test_no_matching_gives_empty():
    g = DecodingGraph.build([False] * 4, [(0, 1, 1.0, 0), (2, 3, 1.0, 1)], [0, 2])
    assert enumerate_mwms(g, 3) == []


def test_bad_k(fixture):
    with pytest.raises(ValueError):
        enumerate_mwms(fixture[0], 0)


@given(st.integers(0, 2**32 - 1))
def test_against_oracle(seed):
    g = random_graph(np.random.default_rng(seed))
    truth = enumerate_all_matchings(g)
    found = enumerate_mwms(g, len(truth) + 2) if truth else enumerate_mwms(g, 1)
    assert len(found) == len(truth)
    assert [m.weight for m in found] == [t.weight for t in truth]
    assert len({m.edges for m in found}) == len(found)
    assert all(validate_matching(g, m.edges)[0] for m in found)


@given(st.integers(0, 2**32 - 1))
def test_call_budget(seed):
    g = random_graph(np.random.default_rng(seed))
    enum = MatchingEnumerator(g, include_empty=False)
    found = enum.take(6)
    # the K-th node is only expanded when the enumeration ran dry
    expanded = found if len(found) < 6 else found[:-1]
    bound = sum(len(m.edges) + 1 for m in expanded) + 1
    assert enum.mwm_calls <= bound


def test_explored_are_frontier(fixture):
    enum = MatchingEnumerator(fixture[0])
    enum.take(1)
    # children of the last found node are not generated
    assert enum.explored(1) == []
    enum.take(2)
    assert [m.edges for m in enum.explored(2)] == [tuple(range(7))]
    assert enum.explored(1) == []


def test_deterministic(fixture):
    a = [m.edges for m in enumerate_mwms(fixture[0].with_highlighted([]), 4)]
    b = [m.edges for m in enumerate_mwms(fixture[0].with_highlighted([]), 4)]
    assert a == b


def test_monotone_tree(fixture):
    enum = MatchingEnumerator(fixture[0])
    node = enum.pop_node()
    while node is not None:
        parent = node.parent
        if parent is not None:
            assert node.weight >= parent.weight
        node = enum.pop_node()
