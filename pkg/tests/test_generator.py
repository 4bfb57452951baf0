"""
Tests for the partial k-tree generator.
"""

import random
from fractions import Fraction

import pytest

from twapprox.errors import InputError
from twapprox.generator import generate_partial_ktree, parse_probability, random_weights
from twapprox.graph import ProblemKind
from twapprox.treedecomp import validate


class TestParseProbability:
    """Tests for parse_probability."""

    def test_forms(self):
        """Test fraction, decimal and float inputs."""
        assert parse_probability("1/2") == Fraction(1, 2)
        assert parse_probability("1.0") == 1
        assert parse_probability(0.25) == Fraction(1, 4)

    def test_out_of_range(self):
        """Test probabilities outside [0, 1] are rejected."""
        with pytest.raises(InputError):
            parse_probability("3/2")

    def test_garbage(self):
        """Test non-numeric input is rejected."""
        with pytest.raises(InputError):
            parse_probability("half")


class TestGeneratePartialKtree:
    """Tests for generate_partial_ktree."""

    def test_full_ktree_edge_count(self):
        """Test a 2-tree on 10 vertices has 3 + 7*2 = 17 edges."""
        graph, td = generate_partial_ktree(10, 2, "1.0", seed=7)
        assert graph.n == 10
        assert graph.m == 17
        assert td.width == 2

    def test_decomposition_is_valid(self):
        """Test the returned decomposition validates for sparse keeps."""
        for seed in range(10):
            graph, td = generate_partial_ktree(12, 3, "1/2", seed)
            assert validate(graph, td) == []
            assert td.width <= 3

    def test_bag_numbering(self):
        """Test bags are numbered 1..n-k."""
        _, td = generate_partial_ktree(8, 2, 1, seed=3)
        assert sorted(td.bags) == list(range(1, 7))

    def test_deterministic(self):
        """Test equal seeds give equal graphs."""
        a, _ = generate_partial_ktree(12, 2, "1/2", seed=5)
        b, _ = generate_partial_ktree(12, 2, "1/2", seed=5)
        assert a.edges == b.edges

    def test_keep_zero(self):
        """Test keep 0 drops every edge."""
        graph, td = generate_partial_ktree(6, 2, 0, seed=1)
        assert graph.m == 0
        assert validate(graph, td) == []

    def test_n_must_exceed_k(self):
        """Test n <= k is rejected."""
        with pytest.raises(InputError):
            generate_partial_ktree(3, 3, 1, seed=1)


class TestRandomWeights:
    """Tests for random_weights."""

    def test_cvc_capacities(self):
        """Test capacities lie in [0, max_capacity]."""
        graph, _ = generate_partial_ktree(10, 2, 1, seed=2)
        inst = random_weights(graph, ProblemKind.CVC, random.Random(0), max_capacity=3)
        assert all(0 <= c <= 3 for c in inst.weight.values())

    def test_thresholds_bounded_by_degree(self):
        """Test TSS thresholds lie in [0, deg(v)]."""
        graph, _ = generate_partial_ktree(10, 2, "1/2", seed=2)
        inst = random_weights(graph, ProblemKind.TSS, random.Random(0))
        assert all(0 <= inst.weight[v] <= graph.degree(v) for v in graph.vertices)
