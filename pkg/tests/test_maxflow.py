"""
Tests for the max-flow wrapper.
"""

import pytest

from twapprox.errors import InputError
from twapprox.maxflow import FlowNetwork, max_flow


def diamond():
    net = FlowNetwork()
    net.add_arc("s", "a", 3)
    net.add_arc("s", "b", 2)
    net.add_arc("a", "b", 1)
    net.add_arc("a", "t", 2)
    net.add_arc("b", "t", 3)
    return net


class TestFlowNetwork:
    """Tests for FlowNetwork."""

    def test_parallel_arcs_merge(self):
        """Test repeated arcs sum their capacities."""
        net = FlowNetwork()
        net.add_arc("s", "t", 2)
        net.add_arc("s", "t", 3)
        assert net.arcs == {("s", "t"): 5}

    def test_negative_capacity(self):
        """Test negative capacities are rejected."""
        with pytest.raises(InputError):
            FlowNetwork().add_arc("s", "t", -1)

    def test_arc_into_source(self):
        """Test arcs entering the source are rejected."""
        with pytest.raises(InputError):
            FlowNetwork().add_arc("a", "s", 1)

    def test_arc_out_of_sink(self):
        """Test arcs leaving the sink are rejected."""
        with pytest.raises(InputError):
            FlowNetwork().add_arc("t", "a", 1)


class TestMaxFlow:
    """Tests for max_flow."""

    def test_value_equals_cut(self):
        """Test the flow value matches the capacity of the returned cut."""
        net = diamond()
        result = max_flow(net)
        assert result.value == 5
        assert net.cut_capacity(result.source_side) == result.value
        assert "s" in result.source_side
        assert "t" not in result.source_side

    def test_flow_respects_capacity_and_conservation(self):
        """Test per-arc flows are feasible."""
        net = diamond()
        result = max_flow(net)
        for arc, cap in net.arcs.items():
            assert 0 <= result.flow[arc] <= cap
        for v in ("a", "b"):
            inflow = sum(f for (u, w), f in result.flow.items() if w == v)
            outflow = sum(f for (u, w), f in result.flow.items() if u == v)
            assert inflow == outflow

    def test_disconnected(self):
        """Test an unreachable sink gives zero flow."""
        net = FlowNetwork()
        net.add_arc("s", "a", 4)
        result = max_flow(net)
        assert result.value == 0
        assert result.source_side == frozenset({"s", "a"})

    def test_tuple_nodes(self):
        """Test hashable tuple node ids work."""
        net = FlowNetwork(source=("s",), sink=("t",))
        net.add_arc(("s",), ("e", 1, 2), 1)
        net.add_arc(("e", 1, 2), ("v", 1), 1)
        net.add_arc(("v", 1), ("t",), 1)
        assert max_flow(net).value == 1

    def test_zero_capacity_arc(self):
        """Test a zero-capacity arc reports zero flow and blocks the cut."""
        net = FlowNetwork()
        net.add_arc("s", "a", 1)
        net.add_arc("a", "t", 0)
        result = max_flow(net)
        assert result.value == 0
        assert result.flow == {("s", "a"): 0, ("a", "t"): 0}
        assert result.source_side == frozenset({"s", "a"})

    def test_zero_capacity_beside_positive(self):
        """Test zero-capacity arcs sit alongside arcs that carry flow."""
        net = diamond()
        net.add_arc("s", "c", 0)
        net.add_arc("c", "t", 5)
        result = max_flow(net)
        assert result.value == 5
        assert result.flow[("s", "c")] == 0
        assert result.flow[("c", "t")] == 0
        assert net.cut_capacity(result.source_side) == 5

    def test_antiparallel_arcs(self):
        """Test opposite arcs between two nodes both get non-negative flow."""
        net = FlowNetwork()
        net.add_arc("s", "a", 2)
        net.add_arc("s", "b", 2)
        net.add_arc("a", "b", 3)
        net.add_arc("b", "a", 3)
        net.add_arc("a", "t", 1)
        net.add_arc("b", "t", 3)
        result = max_flow(net)
        assert result.value == 4
        assert all(f >= 0 for f in result.flow.values())
        for v in ("a", "b"):
            inflow = sum(f for (u, w), f in result.flow.items() if w == v)
            outflow = sum(f for (u, w), f in result.flow.items() if u == v)
            assert inflow == outflow
