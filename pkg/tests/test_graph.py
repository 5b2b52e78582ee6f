import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmwm.codes import rotated_surface_code
from kmwm.graph import (DecodingGraph, SurfaceCodeLayout, assign_edge_weights, build_model_graph,
                        build_surface_model_graph, highlight_from_syndrome, validate_matching)
from kmwm.oracle import random_graph
from conftest import E1, E2, E3, E4, E5, E6, E7, V1, V2, VA


def test_fixture_shape(fixture):
    graph, code = fixture
    assert graph.n_vertices == 6
    assert graph.n_edges == 7
    assert graph.highlighted_set == {V1, V2}
    assert code.lx.tolist() == [1, 1, 1, 0, 0, 0]
    assert code.lz.tolist() == [1, 0, 0, 0, 0, 0]


def test_fixture_matches_model_graph(fixture):
    graph, code = fixture
    built = build_model_graph(code.hz, virtual_weight=1e-7)
    assert built.eu.tolist() == graph.eu.tolist()
    assert built.ev.tolist() == graph.ev.tolist()
    assert built.qubits.tolist() == graph.qubits.tolist()


@pytest.mark.parametrize("edges, expected", [
    ({E1, E3, E7}, (True, 0.2 + 1e-7)),
    ({E4, E5, E6}, (True, 0.3)),
    ({E1}, (False, 0.1)),
    ({E2}, (True, 0.5)),
])
def test_validate_matching(fixture, edges, expected):
    ok, weight = validate_matching(fixture[0], edges)
    assert ok == expected[0]
    assert weight == pytest.approx(expected[1], abs=1e-15)


def test_validate_matching_unknown_edge(fixture):
    with pytest.raises(ValueError):
        validate_matching(fixture[0], {99})


def test_surface_d3_graph():
    graph = build_surface_model_graph(SurfaceCodeLayout(3, "Z"))
    assert len(graph.check_vertices) == 4
    assert int((graph.qubits >= 0).sum()) == 9
    boundary = [e for e in range(graph.n_edges)
                if graph.qubits[e] >= 0 and any(graph.virtual[v] for v in graph.endpoints(e))]
    assert len(boundary) == 6


def test_surface_d5_graph():
    graph = build_surface_model_graph(SurfaceCodeLayout(5, "X"))
    assert len(graph.check_vertices) == 12
    assert int((graph.qubits >= 0).sum()) == 25


def test_empty_check_set_rejected():
    layout = SurfaceCodeLayout(1, "Z")
    with pytest.raises(ValueError, match="not graphlike"):
        build_surface_model_graph(layout)


def test_not_graphlike_rejected():
    with pytest.raises(ValueError, match="not graphlike"):
        build_model_graph(np.array([[1], [1], [1]]))


@pytest.mark.parametrize("wiring", ["path", "complete"])
def test_builders_have_no_duplicate_edges(wiring):
    for d in (3, 5):
        code = rotated_surface_code(d)
        for h in (code.hx, code.hz):
            g = build_model_graph(h, wiring=wiring)
            pairs = {frozenset(g.endpoints(e)) for e in range(g.n_edges)}
            assert len(pairs) == g.n_edges


def test_complete_wiring_connects_all_virtuals():
    g = build_model_graph(rotated_surface_code(3).hx, wiring="complete")
    virt = set(g.virtual_vertices.tolist())
    virtual_edges = {frozenset(g.endpoints(e)) for e in range(g.n_edges) if g.qubits[e] < 0}
    missing = [(a, b) for a in virt for b in virt if a < b and frozenset((a, b)) not in virtual_edges]
    # only pairs already joined by a qubit edge may be missing
    assert all(frozenset(p) in {frozenset(g.endpoints(e)) for e in range(g.n_edges)} for p in missing)


def test_assign_weights():
    g = assign_edge_weights(build_surface_model_graph(SurfaceCodeLayout(3)), 0.1)
    qubit = g.weights[g.qubits >= 0]
    assert np.allclose(qubit, 2.1972245773362196, rtol=0, atol=1e-14)
    assert np.all(g.weights[g.qubits < 0] == 0.0)
    near_half = assign_edge_weights(g, 0.5 - 1e-12)
    assert np.all(near_half.weights[near_half.qubits >= 0] < 1e-10)
    with pytest.raises(ValueError):
        assign_edge_weights(g, 0.6)
    with pytest.raises(ValueError):
        assign_edge_weights(g, 0.0)


def test_highlight_from_syndrome(fixture):
    graph, _ = fixture
    g = highlight_from_syndrome(graph, [1, 1, 0, 0])
    assert g.highlighted_set == {V1, V2}
    assert highlight_from_syndrome(graph, [0, 0, 0, 0]).highlighted_set == set()
    odd = highlight_from_syndrome(graph, [1, 0, 0, 0])
    assert odd.highlighted_set == {V1, VA}
    with pytest.raises(ValueError):
        highlight_from_syndrome(graph, [1, 0])


@given(st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_highlight_is_even(bits):
    g = build_surface_model_graph(SurfaceCodeLayout(3))
    assert len(highlight_from_syndrome(g, bits).highlighted_set) % 2 == 0


def test_graph_validation():
    with pytest.raises(ValueError):
        DecodingGraph.build([False, False], [(0, 1, -1.0, 0)])
    with pytest.raises(ValueError):
        DecodingGraph.build([False, False], [(0, 1, 1.0, 0), (1, 0, 1.0, 1)])
    with pytest.raises(ValueError):
        DecodingGraph.build([False, False], [(0, 0, 1.0, 0)])
    with pytest.raises(ValueError):
        DecodingGraph.build([False, False], [(0, 1, math.inf, 0)])


@given(st.integers(0, 2**32 - 1))
def test_json_round_trip(seed):
    g = random_graph(np.random.default_rng(seed))
    again = DecodingGraph.from_json(g.to_json())
    assert again.same_as(g)


def test_json_round_trip_fixture(fixture):
    g = fixture[0].reduced([E2])
    again = DecodingGraph.from_json(g.to_json())
    assert again.same_as(g)
    assert again.weights.tobytes() == g.weights.tobytes()


@given(st.integers(0, 2**32 - 1), st.data())
def test_validate_matching_is_parity_rule(seed, data):
    g = random_graph(np.random.default_rng(seed))
    edges = data.draw(st.sets(st.integers(0, g.n_edges - 1)))
    ok, weight = validate_matching(g, edges)
    counts = np.zeros(g.n_vertices, dtype=int)
    for e in edges:
        for v in g.endpoints(e):
            counts[v] += 1
    assert ok == all((counts[v] % 2 == 1) == bool(g.highlighted[v]) for v in range(g.n_vertices))
    assert weight == math.fsum(g.weights[e] for e in edges)
