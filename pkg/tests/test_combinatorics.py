import itertools
import math

import numpy as np
import pytest

from spherecode import (
    AngleSystem,
    Code,
    EdgeColoring,
    MonoPair,
    RandomColoring,
    check_mono_pair,
    color_graph,
    greedy_independent,
    icosahedron_code,
    max_degree,
    ramsey_pair,
)
from spherecode.combinatorics import is_independent, ramsey_hypothesis
from spherecode.errors import DomainError, HypothesisError, PreconditionError, RamseyFailure


def constant_coloring(n, c):
    return EdgeColoring(np.full((n, n), c))


def random_matrix_coloring(rng, n, k):
    c = rng.integers(0, k, size=(n, n))
    c = np.triu(c, 1)
    return EdgeColoring(c + c.T)


class TestEdgeColoring:
    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            EdgeColoring([[0, 1], [2, 0]])

    def test_palette_and_graph(self):
        c = EdgeColoring([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        assert c.palette() == [1, 2]
        assert c.graph([2]).sum() == 2
        assert c.color(0, 2) == 2

    def test_random_coloring_is_symmetric_and_seeded(self):
        c = RandomColoring(50, 3, seed=4)
        assert c.color(3, 17) == c.color(17, 3)
        assert c.row(5, range(50)).max() < 3
        assert np.array_equal(c.row(5, range(50)), RandomColoring(50, 3, 4).row(5, range(50)))


class TestColorGraph:
    def test_icosahedron(self):
        s = 1 / math.sqrt(5)
        c = color_graph(icosahedron_code(), AngleSystem(0.9, [-s, s]))
        iu = np.triu_indices(6, 1)
        counts = np.bincount(c.colors[iu], minlength=3)
        assert counts[0] == 0 and counts.sum() == 15

    def test_invalid_code_rejected(self):
        with pytest.raises(PreconditionError):
            color_graph(Code(2, [[1, 0], [0.6, 0.8]]), AngleSystem(0.5, [0.0]))


class TestRamseyPair:
    def test_constant_coloring(self):
        # k t = 2 pivots are consumed before Y is read
        pair = ramsey_pair(constant_coloring(12, 1), 2, 1, 2, force=True)
        assert pair.X == (0,) and pair.Y == (2, 3) and pair.color == 1
        assert [s[0] for s in pair.steps] == [0, 1]

    def test_hypothesis(self):
        assert ramsey_hypothesis(9, 2, 1, 2)
        assert not ramsey_hypothesis(8, 2, 1, 2)
        assert ramsey_hypothesis(10, 40, 40, 1) is None
        with pytest.raises(HypothesisError):
            ramsey_pair(constant_coloring(8, 0), 2, 1, 2)

    def test_two_color_k2_t1(self, rng):
        # n = 2^2 m + 2
        for m in range(1, 5):
            for _ in range(20):
                c = random_matrix_coloring(rng, 4 * m + 2, 2)
                pair = ramsey_pair(c, 2, 1, m)
                assert len(pair.X) == 1 and len(pair.Y) == m
                assert check_mono_pair(c, pair)

    def test_failure_is_reported(self):
        # alternating colors starve the chain when forced below the hypothesis
        c = EdgeColoring([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
        with pytest.raises(RamseyFailure) as err:
            ramsey_pair(c, 2, 2, 1, force=True)
        assert err.value.to_dict()["steps"]

    def test_too_many_colors(self):
        with pytest.raises(DomainError):
            ramsey_pair(EdgeColoring([[0, 1, 2], [1, 0, 3], [2, 3, 0]]), 2, 1, 1, force=True)

    def test_checker_rejects_bad_pair(self):
        c = EdgeColoring([[0, 1, 1], [1, 0, 2], [1, 2, 0]])
        assert check_mono_pair(c, MonoPair((0,), (1, 2), 1))
        assert not check_mono_pair(c, MonoPair((1,), (0, 2), 1))
        assert not check_mono_pair(c, MonoPair((0,), (0, 1), 1))

    def test_lazy_coloring_matches_dense(self):
        lazy = RandomColoring(40, 2, seed=3)
        dense = np.array([[0 if i == j else lazy.color(i, j) for j in range(40)]
                          for i in range(40)])
        a = ramsey_pair(lazy, 2, 1, 2, force=True)
        b = ramsey_pair(EdgeColoring(dense), 2, 1, 2, force=True)
        assert a == b


class TestTuran:
    def test_star(self):
        adj = np.zeros((5, 5), dtype=bool)
        adj[0, 1:] = adj[1:, 0] = True
        assert greedy_independent(adj) == [0]
        assert max_degree(adj) == 4

    def test_empty_graph(self):
        assert greedy_independent(np.zeros((4, 4), dtype=bool)) == [0, 1, 2, 3]
        assert greedy_independent(np.zeros((0, 0), dtype=bool)) == []

    def test_all_graphs_up_to_five(self):
        for n in range(1, 6):
            pairs = list(itertools.combinations(range(n), 2))
            for mask in range(1 << len(pairs)):
                adj = np.zeros((n, n), dtype=bool)
                for b, (i, j) in enumerate(pairs):
                    if mask >> b & 1:
                        adj[i, j] = adj[j, i] = True
                S = greedy_independent(adj)
                assert is_independent(adj, S)
                assert len(S) * (max_degree(adj) + 1) >= n
