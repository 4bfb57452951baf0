"""
Tests for the max-flow feasibility test.
"""

from itertools import product

from twapprox.flowtest import FeasibilityTester, feasibility_test, orientation_for, scope_edges
from twapprox.oracles import enumerate_records
from twapprox.treedecomp import NodeKind, decompose, make_nice


def targets(g, node):
    """Every vector with 0 <= d(u) <= |N(u) n Y| in bag order."""
    ranges = [range(len(g.neighbors(u) & node.forgotten) + 1) for u in node.order]
    return product(*ranges)


class TestFeasibilityTest:
    """Tests for feasibility_test and orientation_for."""

    def test_leaf_is_feasible(self, p3_infeasible):
        """Test an empty Y always passes."""
        g = p3_infeasible.graph
        ntd = decompose(g)
        leaf = next(n for n in ntd if n.kind is NodeKind.LEAF)
        assert feasibility_test(g, ntd, p3_infeasible.weight, leaf.id, {})

    def test_infeasible_root(self, p3_infeasible):
        """Test the P3 example fails at the root."""
        g = p3_infeasible.graph
        ntd = decompose(g)
        assert not feasibility_test(g, ntd, p3_infeasible.weight, ntd.root.id, {})

    def test_feasible_root_orientation(self, star_cvc):
        """Test the returned orientation covers G_alpha within capacities."""
        g = star_cvc.graph
        ntd = decompose(g)
        o = orientation_for(g, ntd.root, star_cvc.weight, {})
        assert o is not None
        assert len(o) == g.m
        assert o.cover() == frozenset({1})

    def test_zero_capacity_centre(self, star):
        """Test a centre without capacity fails the root test instead of erroring."""
        ntd = decompose(star)
        assert not feasibility_test(star, ntd, {v: 0 for v in star.vertices}, ntd.root.id, {})
        assert orientation_for(star, ntd.root, {1: 2, 2: 0, 3: 0, 4: 0}, {}) is None

    def test_target_above_neighbourhood(self, star_cvc):
        """Test targets larger than |N(u) n Y| fail without a flow."""
        g = star_cvc.graph
        ntd = decompose(g)
        node = next(n for n in ntd if n.order and n.forgotten)
        too_big = {u: len(g.neighbors(u) & node.forgotten) + 1 for u in node.order}
        assert orientation_for(g, node, star_cvc.weight, too_big) is None

    def test_agrees_with_enumeration(self, cvc_corpus):
        """Test the flow passes iff some record dominates the target pointwise."""
        for instance, td in cvc_corpus[:10]:
            g, c = instance.graph, instance.weight
            ntd = make_nice(g, td)
            for node in ntd:
                if len(scope_edges(g, node)) > 10:
                    continue
                keys = [key for key, _ in enumerate_records(g, ntd, c, node.id)]
                for target in targets(g, node):
                    d_t = dict(zip(node.order, target, strict=True))
                    expected = any(
                        all(a >= b for a, b in zip(key, target, strict=True)) for key in keys
                    )
                    assert feasibility_test(g, ntd, c, node.id, d_t) is expected
                    o = orientation_for(g, node, c, d_t)
                    if o is not None:
                        out = o.out_degrees()
                        assert all(out.get(u, 0) >= d_t[u] for u in node.order)


class TestFeasibilityTester:
    """Tests for the memoized tester."""

    def test_memo_hits(self, star_cvc, settings):
        """Test repeated targets run one flow."""
        g = star_cvc.graph
        ntd = decompose(g)
        tester = FeasibilityTester(g, ntd, star_cvc.weight, settings)
        assert tester.test(ntd.root.id, ())
        assert tester.test(ntd.root.id, ())
        stats = tester.get_stats()
        assert stats["flows_run"] == 1
        assert stats["hits"] == 1
