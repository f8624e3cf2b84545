"""Game structure, referee, and strategy search."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pentagram import game
from pentagram.game import (
    ALL_ONES,
    InvalidPair,
    Strategy,
    brute_force_optimum,
    build_pentagram,
    edge_sign,
    intersection,
    mirror_strategy_pair,
    near_optimal_strategy_pair,
    order,
    pair_target,
    referee,
    violated_edges,
    win_probability,
)
from pentagram.paulis import PauliWord

from conftest import word_matrix

ALL_PARAMS = list(itertools.product((1, -1), repeat=6))


def test_pentagram_invariants_hold():
    p = build_pentagram()
    assert len(p.vertices) == 10
    assert len(p.edges) == 5
    for v in p.vertices:
        assert len(v.edges) == 2
    for x, y in itertools.combinations(range(5), 2):
        assert len(set(p.edges[x]) & set(p.edges[y])) == 1


def test_edge4_observables_and_product():
    p = build_pentagram()
    obs = [v.observable for v in p.edge_vertices(4)]
    assert {str(o) for o in obs} == {"+ZXX", "+XZX", "+XXZ", "+ZZZ"}
    mat = np.eye(8)
    for o in obs:
        mat = mat @ word_matrix(o)
    assert np.allclose(mat, -np.eye(8))


def test_edge0_observables_and_product():
    p = build_pentagram()
    obs = [v.observable for v in p.edge_vertices(0)]
    assert {str(o) for o in obs} == {"+ZII", "+IXI", "+IIX", "+ZXX"}
    mat = np.eye(8)
    for o in obs:
        mat = mat @ word_matrix(o)
    assert np.allclose(mat, np.eye(8))


def test_edge_signs():
    assert edge_sign(4) == -1
    assert [edge_sign(s) for s in range(4)] == [1, 1, 1, 1]
    prod = 1
    for s in range(5):
        prod *= edge_sign(s)
    assert prod == -1


def test_order_table():
    for j in range(1, 5):
        assert order(0, j) == j
    assert order(4, 0) == 1
    assert order(4, 3) == 4
    with pytest.raises(InvalidPair):
        order(0, 0)
    # bijection per row
    for s in range(5):
        assert sorted(order(s, t) for t in range(5) if t != s) == [1, 2, 3, 4]


def test_intersection():
    assert str(intersection(0, 4).observable) == "+ZXX"
    assert intersection(0, 4) == intersection(4, 0)
    assert str(intersection(3, 4).observable) == "+ZZZ"
    with pytest.raises(InvalidPair):
        intersection(2, 2)


def test_pair_target_examples():
    assert pair_target(0, 4, ALL_ONES) == 1
    assert pair_target(0, 4, (1, -1, 1, 1, 1, 1)) == -1  # beta1 flips ZXX
    assert pair_target(0, 4, (1, 1, -1, 1, -1, 1)) == 1  # alpha2*alpha3 cancel


def test_pair_target_involution_and_multiplicativity():
    for x, y in itertools.permutations(range(5), 2):
        for p in ALL_PARAMS[:8]:
            assert pair_target(x, y, p) * pair_target(x, y, p) == 1
    # flipping a parameter not present at the intersection changes nothing
    assert pair_target(0, 4, (1, 1, 1, -1, 1, 1)) == pair_target(0, 4, ALL_ONES)


def test_referee_examples():
    ones = (1, 1, 1, 1)
    assert referee(0, 3, ones, ones, ALL_ONES)
    assert not referee(4, 0, ones, ones, ALL_ONES)  # product misses edge sign
    w = (-1, 1, 1, -1)  # w[rank(4->0)] = w[0] = -1
    assert not referee(0, 4, ones, w, ALL_ONES)
    with pytest.raises(InvalidPair):
        referee(1, 1, ones, ones, ALL_ONES)


def test_referee_reduces_to_plain_agreement_with_unit_params():
    rng = np.random.default_rng(0)
    for _ in range(300):
        x, y = rng.choice(5, size=2, replace=False)
        z = tuple(int(v) for v in 1 - 2 * rng.integers(0, 2, 4))
        w = tuple(int(v) for v in 1 - 2 * rng.integers(0, 2, 4))
        got = referee(int(x), int(y), z, w, ALL_ONES)
        parities = (
            np.prod(z) == edge_sign(int(x)) and np.prod(w) == edge_sign(int(y))
        )
        agree = z[order(int(x), int(y)) - 1] == w[order(int(y), int(x)) - 1]
        assert got == (parities and agree)


def test_violated_edges_examples():
    all_plus = {v: 1 for v in range(10)}
    assert violated_edges(all_plus) == {4}
    p = build_pentagram()
    v04 = intersection(0, 4).vid
    flipped = dict(all_plus)
    flipped[v04] = -1
    assert violated_edges(flipped) == {0}
    with pytest.raises(ValueError):
        violated_edges({0: 1})


@given(st.lists(st.sampled_from([1, -1]), min_size=10, max_size=10))
@settings(max_examples=300, deadline=None)
def test_violated_edges_odd_cardinality(vals):
    labeling = dict(enumerate(vals))
    assert len(violated_edges(labeling)) % 2 == 1


def test_win_probability_all_plus_strategies():
    a = Strategy.constant(1, "A")
    b = Strategy.constant(1, "B")
    assert win_probability(a, b, ALL_ONES) == Fraction(12, 20)


def test_mirror_pair_perfect_for_every_parameter_vector():
    for p in ALL_PARAMS:
        a, b = mirror_strategy_pair(p)
        assert win_probability(a, b, p) == 1


def test_near_optimal_pair_loses_exactly_two_rounds():
    for p in ALL_PARAMS[::7]:
        a, b = near_optimal_strategy_pair(p)
        assert win_probability(a, b, p) == Fraction(18, 20)


def test_strategy_serialization_round_trip():
    a, b = mirror_strategy_pair(ALL_ONES)
    text = game.strategy_pair_to_json(a, b)
    a2, b2 = game.strategy_pair_from_json(text)
    assert (a2.assignments, b2.assignments) == (a.assignments, b.assignments)
    data = a.to_json()
    assert set(data["edges"].keys()) == {"0", "1", "2", "3", "4"}
    with pytest.raises(ValueError):
        Strategy.from_json({"edges": {"0": [1, 1, 1]}})


def test_brute_force_witness_consistency():
    best, (a, b) = brute_force_optimum(ALL_ONES)
    assert win_probability(a, b, ALL_ONES) == best
    # the mirror construction shows the search cannot return less than 1
    assert best == 1


def test_brute_force_parameter_independent():
    for p in [(1, -1, 1, 1, -1, 1), (-1, 1, -1, 1, 1, -1)]:
        best, (a, b) = brute_force_optimum(p)
        assert best == brute_force_optimum(ALL_ONES)[0]
        assert win_probability(a, b, p) == best


def test_random_pairs_never_beat_brute_force():
    best, _ = brute_force_optimum(ALL_ONES)
    rng = np.random.default_rng(17)
    # vectorized equivalent of sampling strategy pairs and comparing
    tabs = game._win_tables(ALL_ONES)
    samples = 100_000
    za = rng.integers(0, 16, size=(samples, 5))
    wb = rng.integers(0, 16, size=(samples, 5))
    wins = np.zeros(samples, dtype=np.int64)
    for x in range(5):
        for y in range(5):
            if x != y:
                wins += tabs[(x, y)][za[:, x], wb[:, y]]
    assert wins.max() <= best * 20
    assert Fraction(int(wins.max()), 20) <= best


def test_random_strategy_objects_consistent_with_tables(rng):
    for _ in range(50):
        a = Strategy.random(np.random.default_rng(int(rng.integers(1 << 30))))
        b = Strategy.random(np.random.default_rng(int(rng.integers(1 << 30))))
        assert win_probability(a, b) <= 1
