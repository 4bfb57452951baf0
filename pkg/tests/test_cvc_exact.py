"""
Tests for the exact CVC dynamic program.
"""

import pytest

from twapprox.config import SolverSettings
from twapprox.cvc_exact import (
    ExactRecordSet,
    compute_exact_tables,
    introduce_table,
    join_table,
    leaf_table,
    solve_exact,
)
from twapprox.errors import InputError, ResourceLimitError
from twapprox.flowtest import scope_edges
from twapprox.generator import generate_partial_ktree
from twapprox.graph import Graph, orientation_covers, orientation_feasible
from twapprox.oracles import cvc_opt_brute, enumerate_records
from twapprox.treedecomp import decompose, make_nice


class TestTableRules:
    """Tests for the per-node table rules."""

    def test_leaf(self):
        """Test a leaf holds only the empty record."""
        assert leaf_table().records() == {((), 0)}

    def test_introduce_pads_with_zero(self):
        """Test introduce inserts d(v) = 0 in bag order."""
        child = ExactRecordSet(order=(1, 3), forgotten=frozenset({5}))
        child.entries[(2, 1)] = 1
        table = introduce_table(child, 2)
        assert table.order == (1, 2, 3)
        assert table.records() == {((2, 0, 1), 1)}

    def test_introduce_twice_rejected(self):
        """Test introducing a vertex already in the bag raises."""
        with pytest.raises(InputError):
            introduce_table(introduce_table(leaf_table(), 1), 1)

    def test_join_adds_pointwise(self, settings):
        """Test join sums vectors and keeps the smallest k per sum."""
        left = ExactRecordSet(order=(1,), forgotten=frozenset({2}))
        left.entries.update({(0,): 1, (1,): 0})
        right = ExactRecordSet(order=(1,), forgotten=frozenset({3}))
        right.entries.update({(0,): 1, (1,): 0})
        table = join_table(left, right, settings)
        assert table.forgotten == frozenset({2, 3})
        assert table.records() == {((0,), 2), ((1,), 1), ((2,), 0)}

    def test_contains_uses_upward_closure(self):
        """Test (d, k) is a member for k_min <= k <= |Y|."""
        table = ExactRecordSet(order=(1,), forgotten=frozenset({2, 3}))
        table.entries[(0,)] = 1
        assert table.contains((0,), 2)
        assert not table.contains((0,), 0)
        assert not table.contains((0,), 3)
        assert table.contains({1: 0}, 1)


class TestSolveExact:
    """Tests for solve_exact."""

    def test_infeasible_path(self, p3_infeasible):
        """Test the P3 example with capacities (0, 1, 0) has no cover."""
        result = solve_exact(p3_infeasible.graph, decompose(p3_infeasible.graph), p3_infeasible.weight)
        assert result.opt is None
        assert not result.feasible
        assert result.witness is None

    def test_triangle_needs_every_vertex(self, triangle_cvc):
        """Test K3 with capacity 1 needs all three vertices."""
        result = solve_exact(triangle_cvc.graph, decompose(triangle_cvc.graph), triangle_cvc.weight)
        assert result.opt == 3

    def test_star_centre(self, star_cvc):
        """Test a star with a capacity-3 centre is covered by the centre alone."""
        g = star_cvc.graph
        result = solve_exact(g, decompose(g), star_cvc.weight)
        assert result.opt == 1
        assert result.witness is not None
        assert result.witness.cover() == frozenset({1})

    def test_capacity_above_degree(self, star):
        """Test capacities larger than the degree behave like the degree."""
        result = solve_exact(star, decompose(star), {1: 10, 2: 5, 3: 5, 4: 5})
        assert result.opt == 1

    def test_edgeless_graph(self):
        """Test a graph with no edges needs no cover vertices."""
        g = Graph([1, 2, 3], [])
        result = solve_exact(g, decompose(g), {1: 0, 2: 0, 3: 0})
        assert result.opt == 0
        assert len(result.witness) == 0

    def test_matches_brute_force(self, cvc_corpus):
        """Test the optimum agrees with subset enumeration on the corpus."""
        for instance, td in cvc_corpus:
            g, c = instance.graph, instance.weight
            result = solve_exact(g, make_nice(g, td), c)
            assert result.opt == cvc_opt_brute(g, c)
            if result.feasible:
                assert orientation_covers(g, result.witness)
                assert orientation_feasible(g, result.witness, c)
                assert len(result.witness.cover()) == result.opt

    def test_tables_match_enumeration(self, cvc_corpus):
        """Test every small node table equals its orientation enumeration."""
        for instance, td in cvc_corpus[:12]:
            g, c = instance.graph, instance.weight
            ntd = make_nice(g, td)
            tables = compute_exact_tables(g, ntd, c)
            for node in ntd:
                if len(scope_edges(g, node)) <= 12:
                    assert tables[node.id].records() == enumerate_records(g, ntd, c, node.id)

    def test_width_guard(self, triangle_cvc):
        """Test decompositions wider than exact_max_width are refused."""
        settings = SolverSettings(exact_max_width=1)
        with pytest.raises(ResourceLimitError) as exc_info:
            solve_exact(triangle_cvc.graph, decompose(triangle_cvc.graph), triangle_cvc.weight, settings)
        assert exc_info.value.limit == 1
        assert exc_info.value.observed == 2

    def test_table_cap(self):
        """Test oversized tables raise with the node in the detail."""
        g, td = generate_partial_ktree(9, 2, 1, seed=3)
        capacity = {v: 2 for v in g.vertices}
        with pytest.raises(ResourceLimitError) as exc_info:
            solve_exact(g, make_nice(g, td), capacity, SolverSettings(table_cap=1))
        assert "node" in str(exc_info.value)

    def test_missing_capacity(self, triangle):
        """Test every vertex needs a capacity."""
        with pytest.raises(InputError):
            solve_exact(triangle, decompose(triangle), {1: 1, 2: 1})


def _member(k_min_of, d, k, y_size):
    """(d, k) is a record iff d is stored and k_min(d) <= k <= |Y|."""
    k_min = k_min_of.get(d)
    return k_min is not None and k_min <= k <= y_size


class TestRecordProperties:
    """Structural properties every exact table must have."""

    def test_k_at_least_every_out_degree(self, cvc_corpus):
        """Test each stored k_min is at least max d(v): distinct out-neighbours all cover."""
        for instance, td in cvc_corpus:
            g, c = instance.graph, instance.weight
            for table in compute_exact_tables(g, make_nice(g, td), c):
                for key, k in table.entries.items():
                    assert k >= max(key, default=0)

    def test_lowering_d_never_raises_k_min(self, cvc_corpus):
        """Test every coordinate can be lowered by one without increasing k_min."""
        for instance, td in cvc_corpus:
            g, c = instance.graph, instance.weight
            for table in compute_exact_tables(g, make_nice(g, td), c):
                for key, k in table.entries.items():
                    for i, x in enumerate(key):
                        if x == 0:
                            continue
                        lowered = key[:i] + (x - 1,) + key[i + 1 :]
                        assert table.k_min(lowered) is not None
                        assert table.k_min(lowered) <= k

    def test_extension_by_p_iff_full_budget(self, cvc_corpus):
        """Test (d_m, |Y|) is a record iff (d_m, k + p) is, against orientation enumeration."""
        checked = 0
        for instance, td in cvc_corpus[:15]:
            g, c = instance.graph, instance.weight
            ntd = make_nice(g, td)
            tables = compute_exact_tables(g, ntd, c)
            for node in ntd:
                if not node.order or len(scope_edges(g, node)) > 10:
                    continue
                oracle = dict(enumerate_records(g, ntd, c, node.id))
                table = tables[node.id]
                y = table.y_size
                for key, k in table.entries.items():
                    for i in range(len(key)):
                        for p in range(1, y - k + 1):
                            d_m = key[:i] + (key[i] + p,) + key[i + 1 :]
                            full = _member(oracle, d_m, y, y)
                            assert full == _member(oracle, d_m, k + p, y)
                            assert full == table.contains(d_m, k + p)
                            checked += 1
        assert checked > 0
