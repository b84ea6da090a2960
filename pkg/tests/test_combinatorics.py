import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from bpreduce.combinatorics import (ForestRootPair, LabeledTree, LimitExceeded, SimpleGraph, bareiss_det,
                                    enumerate_forest_root_pairs, enumerate_labeled_trees, laplacian,
                                    prufer_decode, prufer_encode, spanning_tree_count)


@pytest.mark.parametrize("n", range(1, 8))
def test_labeled_tree_count_is_cayley(n):
    assert sum(1 for _ in enumerate_labeled_trees(n)) == max(1, n ** (n - 2))


def test_labeled_trees_are_distinct_and_ordered():
    trees = list(enumerate_labeled_trees(5))
    assert len({t.edges for t in trees}) == 125
    codes = [prufer_encode(t) for t in trees]
    assert codes == sorted(codes)


@pytest.mark.parametrize("n", range(1, 8))
def test_forest_root_pair_count(n):
    assert sum(1 for _ in enumerate_forest_root_pairs(n)) == (n + 1) ** (n - 1)


def test_forest_root_pairs_for_two_vertices():
    pairs = {(fr.forest_edges, fr.roots) for fr in enumerate_forest_root_pairs(2)}
    assert pairs == {
        (frozenset(), frozenset({1, 2})),
        (frozenset({(1, 2)}), frozenset({1})),
        (frozenset({(1, 2)}), frozenset({2})),
    }


def test_every_forest_tree_has_one_root():
    for fr in enumerate_forest_root_pairs(5):
        assert len(fr.forest_edges) + len(fr.roots) == 5


def test_enumeration_limits():
    with pytest.raises(LimitExceeded):
        list(enumerate_labeled_trees(10))
    with pytest.raises(LimitExceeded):
        list(enumerate_forest_root_pairs(8))


def test_prufer_round_trip_small():
    for n in range(2, 7):
        for seq in itertools.product(range(1, n + 1), repeat=n - 2):
            assert prufer_encode(prufer_decode(seq, n)) == tuple(seq)


def test_prufer_star_and_path():
    star = prufer_decode((1, 1, 1), 5)
    assert star.edges == ((1, 2), (1, 3), (1, 4), (1, 5))
    assert prufer_decode((), 2).edges == ((1, 2),)


def test_prufer_rejects_bad_labels():
    with pytest.raises(ValueError):
        prufer_decode((0, 1), 4)
    with pytest.raises(ValueError):
        prufer_decode((1,), 4)


def test_labeled_tree_invariants():
    with pytest.raises(ValueError):
        LabeledTree(3, ((1, 2),))
    with pytest.raises(ValueError):
        LabeledTree(4, ((1, 2), (2, 3), (1, 3)))
    with pytest.raises(ValueError):
        LabeledTree(3, ((2, 1), (2, 3)))


def test_parent_order_and_non_edges():
    t = LabeledTree(4, ((1, 2), (2, 3), (2, 4)))
    order, parent = t.parent_order(1)
    assert order == [1, 2, 3, 4]
    assert parent[1:] == [0, 1, 2, 2]
    assert t.non_edges() == [(1, 3), (1, 4), (3, 4)]


def test_forest_root_pair_invariants():
    with pytest.raises(ValueError):
        ForestRootPair(3, frozenset({(1, 2)}), frozenset({1, 2, 3}))
    with pytest.raises(ValueError):
        ForestRootPair(3, frozenset({(1, 2), (2, 3), (1, 3)}), frozenset({1}))


def test_bareiss_matches_float_det():
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        m = rng.integers(-9, 10, size=(n, n)).tolist()
        assert bareiss_det(m) == round(np.linalg.det(np.array(m, dtype=float)))


def test_bareiss_rationals_and_singular():
    m = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 4), Fraction(1, 5)]]
    assert bareiss_det(m) == Fraction(1, 10) - Fraction(1, 12)
    assert bareiss_det([[1, 2], [2, 4]]) == 0
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([]) == 1


@pytest.mark.parametrize("n", range(1, 8))
def test_spanning_trees_of_complete_graph(n):
    g = SimpleGraph.from_edges(n, itertools.combinations(range(1, n + 1), 2))
    assert spanning_tree_count(g) == max(1, n ** (n - 2))


def test_spanning_trees_cycle_and_disconnected():
    cycle = SimpleGraph.from_edges(6, [(i, i % 6 + 1) for i in range(1, 7)])
    assert spanning_tree_count(cycle) == 6
    assert spanning_tree_count(SimpleGraph.from_edges(4, [(1, 2), (3, 4)])) == 0


def test_laplacian_rows_sum_to_zero():
    g = SimpleGraph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 3)])
    assert all(sum(row) == 0 for row in laplacian(g))


def test_simple_graph_validation():
    with pytest.raises(ValueError):
        SimpleGraph(3, frozenset({(2, 1)}))
    g = SimpleGraph.from_edges(3, [(2, 1)])
    assert g.has_edge(1, 2) and not g.is_connected()


def test_spanning_tree_count_vs_subset_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        edges = [p for p in pairs if rng.random() < 0.6]
        g = SimpleGraph.from_edges(n, edges)
        brute = 0
        for sub in itertools.combinations(edges, n - 1):
            try:
                LabeledTree(n, tuple(sorted(sub)))
            except ValueError:
                continue
            brute += 1
        assert spanning_tree_count(g) == brute
    assert math.comb(4, 2) == 6
