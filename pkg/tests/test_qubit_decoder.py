import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmwm.codes import rotated_surface_code, six_qubit_code
from kmwm.graph import DecodingGraph, build_model_graph, highlight_from_syndrome
from kmwm.oracle import brute_force_mld_qubit, enumerate_all_matchings, random_graph
from kmwm.qubit_decoder import (ClassTally, argmax_class, decode_graphlike, depolarizing_params,
                                enumerate_graphlike, error_to_matching, logical_class,
                                matching_to_error, pauli_to_gkp_params)
from conftest import E1, E2, E3, E7


def test_matching_to_error(fixture):
    graph, code = fixture
    assert matching_to_error(graph, (E1, E3, E7), code.n).tolist() == [1, 0, 1, 0, 0, 0]
    assert matching_to_error(graph, (E2,), code.n).tolist() == [0, 1, 0, 0, 0, 0]
    assert matching_to_error(graph, (), code.n).tolist() == [0] * 6


@pytest.mark.parametrize("error, label", [
    ([1, 0, 1, 0, 0, 0], "X"),
    ([0, 0, 0, 1, 1, 1], "I"),
    ([0, 0, 0, 0, 0, 0], "I"),
])
def test_logical_class_six_qubit(error, label):
    assert logical_class(error, six_qubit_code(), "X") == label


def test_logical_class_dimension():
    with pytest.raises(ValueError):
        logical_class([1, 0], six_qubit_code(), "X")


def test_fixture_k4(fixture):
    tally = decode_graphlike(*fixture, k=4)
    # class sums of the four matchings, evaluated directly
    p_i = math.exp(-0.3) + math.exp(-0.5)
    p_x = math.exp(-(0.2 + 1e-7)) + math.exp(-(1.0 + 1e-7))
    assert tally.probabilities["I"] == pytest.approx(p_i, rel=1e-12)
    assert tally.probabilities["X"] == pytest.approx(p_x, rel=1e-12)
    assert tally.decision == "I"


def test_fixture_k1(fixture):
    assert decode_graphlike(*fixture, k=1).decision == "X"


def test_fixture_prefix_decisions(fixture):
    result = enumerate_graphlike(*fixture, k=4)
    assert [result.tally(k).decision for k in (1, 2, 3, 4)] == ["X", "X", "I", "I"]


def test_trivial_syndrome_counts_identity():
    code = rotated_surface_code(3)
    graph = build_model_graph(code.hx)
    tally = decode_graphlike(graph, code, 1, error_type="Z")
    assert tally.probabilities["I"] == 1.0
    assert tally.decision == "I"


def test_empty_enumeration():
    g = DecodingGraph.build([False] * 4, [(0, 1, 1.0, 0), (2, 3, 1.0, 1)], [0, 2])
    code = rotated_surface_code(3)
    tally = decode_graphlike(g, code, 2, error_type="Z")
    assert tally.empty and tally.decision is None


def test_include_explored_adds_mass(fixture):
    base = decode_graphlike(*fixture, k=2)
    more = decode_graphlike(*fixture, k=2, include_explored=True)
    assert more.total > base.total
    # the only explored candidate at K=2 is the full edge set (class X)
    assert more.probabilities["X"] - base.probabilities["X"] == pytest.approx(math.exp(-(1 + 1e-7)))


def test_contribution_is_exp_weight(fixture):
    result = enumerate_graphlike(*fixture, k=4)
    for m, members in zip(result.matchings, result.labels):
        t = ClassTally()
        t.add(members, math.exp(-m.weight), m)
        assert -math.log(t.probabilities[members]) == pytest.approx(m.weight, abs=1e-15)


def test_tie_break():
    assert argmax_class({"X": 1.0, "I": 1.0}) == "I"
    assert argmax_class({"Z": 1.0, "X": 1.0}) == "X"
    assert argmax_class({"Z": 1.0, "X": 1.0 - 1e-12}) == "X"
    assert argmax_class({"Z": 1.0, "X": 0.5}) == "Z"
    with pytest.raises(ValueError):
        ClassTally().add("I", -1.0)


@given(st.integers(0, 2**32 - 1))
def test_error_matching_bijection(seed):
    g = random_graph(np.random.default_rng(seed))
    n = int(g.qubits.max()) + 1
    for m in enumerate_all_matchings(g):
        eta = matching_to_error(g, m, n)
        assert error_to_matching(g, eta) == m.edges  # no virtual edges in random graphs


def test_six_qubit_mld_agrees_with_example(fixture):
    graph, code = fixture
    weights = graph.weights[graph.qubits >= 0]
    eps = 1.0 / (1.0 + np.exp(weights))   # weights induced by per-qubit rates
    assert brute_force_mld_qubit(code, [1, 1, 0, 0], eps, "X").decision == "I"


def test_graphlike_matches_mld_all_syndromes():
    code = rotated_surface_code(3)
    from kmwm.graph import assign_edge_weights
    from kmwm.oracle import matching_count
    model = assign_edge_weights(build_model_graph(code.hx), 0.1)
    total = matching_count(model)
    assert total == 32
    for bits in itertools.product((0, 1), repeat=4):
        graph = highlight_from_syndrome(model, bits)
        ours = decode_graphlike(graph, code, total, error_type="Z")
        ref = brute_force_mld_qubit(code, bits, 0.1, "Z")
        # exhaustive enumeration reproduces the exact class sums
        for label in ("I", "Z"):
            assert ours.probabilities[label] == pytest.approx(ref.probabilities[label], rel=1e-12)


# --- Pauli to GKP map ------------------------------------------------------

def test_depolarizing_is_hexagonal():
    p = pauli_to_gkp_params(0.1 / 3, 0.1 / 3, 0.1 / 3)
    g1 = math.sqrt(2) / 3 ** 0.25
    assert p.gamma1 == pytest.approx(g1, rel=1e-12)
    assert p.gamma2 == pytest.approx(-g1 / 2, rel=1e-12)
    assert p.gamma3 == 0.0
    assert p.gamma4 == pytest.approx(1 / g1, rel=1e-12)
    assert p.sigma == pytest.approx(0.7418426002319728, rel=1e-12)
    assert depolarizing_params(0.1).sigma == pytest.approx(p.sigma, rel=1e-12)


def test_pure_z_is_square():
    p = pauli_to_gkp_params(0.0, 0.0, 0.1)
    assert (p.gamma1, p.gamma2, p.gamma3, p.gamma4) == (1.0, 0.0, 0.0, 1.0)
    assert p.sigma == pytest.approx(0.8455177211892319, rel=1e-12)


@pytest.mark.parametrize("eps", [(0.25, 0.25, 0.25), (0.1, 0.0, 0.1), (0.1, 0.0, 0.0), (0.0, 0.0, 0.6)])
def test_domain_errors(eps):
    with pytest.raises(ValueError):
        pauli_to_gkp_params(*eps)


def test_depolarizing_boundary():
    with pytest.raises(ValueError):
        depolarizing_params(0.75)


@given(st.floats(0.001, 0.08), st.floats(0.001, 0.08), st.floats(0.001, 0.08))
def test_forward_equations(ex, ey, ez):
    try:
        p = pauli_to_gkp_params(ex, ey, ez)
    except ValueError:
        return
    assert p.gamma1 * p.gamma4 - p.gamma2 * p.gamma3 == pytest.approx(1.0, abs=1e-12)
    ei = 1 - ex - ey - ez
    for got, want in zip(p.ratios(), (ex / ei, ey / ei, ez / ei)):
        assert got == pytest.approx(want, rel=1e-10)
