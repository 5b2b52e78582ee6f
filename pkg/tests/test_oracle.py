import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmwm.codes import CodeSpec, repetition_pair_code, rotated_surface_code
from kmwm.gkp import SurfaceGkpCode
from kmwm.graph import DecodingGraph
from kmwm.oracle import (brute_force_mld_gkp, brute_force_mld_qubit, enumerate_all_matchings,
                         matching_count, matching_suite, mld_qubit_suite, random_graph)
from conftest import E1, E2, E3, E4, E5, E6, E7


def test_fixture_has_four_matchings(fixture):
    sets = [m.edges for m in enumerate_all_matchings(fixture[0])]
    assert sets == [(E1, E3, E7), (E4, E5, E6), (E2,), (E1, E2, E3, E4, E5, E6, E7)]


def test_fixture_cycles(fixture):
    sets = {m.edges for m in enumerate_all_matchings(fixture[0].with_highlighted([]))}
    assert sets == {(), (E1, E2, E3, E7), (E2, E4, E5, E6), (E1, E3, E4, E5, E6, E7)}


def test_single_edge():
    g = DecodingGraph.build([False, False], [(0, 1, 0.7, 0)], [0, 1])
    assert [m.edges for m in enumerate_all_matchings(g)] == [(0,)]


def test_size_guard():
    n = 9
    edges = [(a, b, 1.0, i) for i, (a, b) in enumerate(itertools.combinations(range(n), 2))][:23]
    g = DecodingGraph.build([False] * n, edges)
    with pytest.raises(ValueError):
        enumerate_all_matchings(g)


@given(st.integers(0, 2**32 - 1))
def test_count_matches_rank_formula(seed):
    g = random_graph(np.random.default_rng(seed))
    assert len(enumerate_all_matchings(g)) == matching_count(g)


def test_two_qubit_mld():
    tally = brute_force_mld_qubit(repetition_pair_code(), [], 0.1, "Z")
    assert tally.probabilities["I"] == pytest.approx(1 + (1 / 9) ** 2, rel=1e-12)
    assert tally.probabilities["Z"] == pytest.approx(2 / 9, rel=1e-12)
    assert tally.decision == "I"


def test_zero_noise_mld():
    tally = brute_force_mld_qubit(repetition_pair_code(), [], 0.0, "Z")
    assert tally.probabilities == {"I": 1.0, "Z": 0.0}


def test_mld_group_guard():
    code = rotated_surface_code(7)
    with pytest.raises(ValueError):
        brute_force_mld_qubit(code, np.zeros(len(code.hx), dtype=int), 0.1, "Z")


def test_mld_scale_invariance():
    code = rotated_surface_code(3)
    a = brute_force_mld_qubit(code, [1, 0, 0, 1], 0.1, "Z")
    b = brute_force_mld_qubit(code, [1, 0, 0, 1], np.full(9, 0.1), "Z")
    assert a.probabilities == b.probabilities


def test_correlated_mld_factorizes_for_independent_noise():
    # independent X and Z flips: joint class sums are products of sector sums
    px, pz = 0.07, 0.12
    eps = (px * (1 - pz), px * pz, pz * (1 - px))
    code = rotated_surface_code(3)
    rng = np.random.default_rng(0)
    for _ in range(5):
        sx = rng.integers(0, 2, 4)
        sz = rng.integers(0, 2, 4)
        joint = brute_force_mld_qubit(code, np.concatenate([sx, sz]), eps)
        tz = brute_force_mld_qubit(code, sx, pz, "Z")
        tx = brute_force_mld_qubit(code, sz, px, "X")
        for label, (xl, zl) in {"I": ("I", "I"), "X": ("X", "I"), "Z": ("I", "Z"), "Y": ("X", "Z")}.items():
            expected = tx.probabilities[xl] * tz.probabilities[zl]
            assert joint.probabilities[label] == pytest.approx(expected, rel=1e-12)


def test_gkp_mld_zero_shift():
    ctx = SurfaceGkpCode(rotated_surface_code(3))
    tally = brute_force_mld_gkp(ctx, ctx.lattice.syndrome_and_candidate(np.zeros(18)), 0.4)
    assert tally.decision == "I"


def test_gkp_mld_guard():
    ctx = SurfaceGkpCode(rotated_surface_code(5))
    with pytest.raises(ValueError):
        brute_force_mld_gkp(ctx, ctx.lattice.syndrome_and_candidate(np.zeros(50)), 0.4)


def test_suites_pass():
    assert all(r.agree for r in matching_suite(10, 11))
    assert all(r.agree for r in mld_qubit_suite())
