"""
Integral maximum flow on small directed networks.

Thin layer over networkx's Dinitz implementation that keeps integral
per-arc flows and exposes the source side of a minimum cut.
"""

from collections.abc import Hashable
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms.flow import dinitz

from twapprox.errors import InputError

Node = Hashable
Arc = tuple[Node, Node]


@dataclass
class FlowNetwork:
    """Directed network with non-negative integer capacities."""

    source: Node = "s"
    sink: Node = "t"
    arcs: dict[Arc, int] = field(default_factory=dict)

    def add_arc(self, u: Node, v: Node, capacity: int) -> None:
        """Add an arc; parallel arcs are merged by summing capacities."""
        if capacity < 0:
            raise InputError("Arc capacity must be non-negative", detail=f"{u}->{v}")
        if v == self.source:
            raise InputError("No arc may enter the source", detail=f"{u}->{v}")
        if u == self.sink:
            raise InputError("No arc may leave the sink", detail=f"{u}->{v}")
        if u == v:
            raise InputError("Self-loop arc", detail=str(u))
        self.arcs[(u, v)] = self.arcs.get((u, v), 0) + capacity

    def cut_capacity(self, source_side: frozenset[Node]) -> int:
        return sum(
            cap for (u, v), cap in self.arcs.items() if u in source_side and v not in source_side
        )


@dataclass(frozen=True)
class FlowResult:
    value: int
    flow: dict[Arc, int]
    # Source side of a minimum cut (residual reachability from the source)
    source_side: frozenset[Node]


def max_flow(net: FlowNetwork) -> FlowResult:
    """Compute a maximum s-t flow.

    Zero-capacity arcs never carry flow and are left out of the networkx
    graph; its residual network has no entry for them.

    Args:
        net: Network with non-negative integer capacities.

    Returns:
        FlowResult with the flow value, a flow on every arc of ``net``
        (zero-capacity arcs included) and the source side of a minimum cut.
    """
    g: nx.DiGraph = nx.DiGraph()
    g.add_node(net.source)
    g.add_node(net.sink)
    for (u, v), cap in net.arcs.items():
        if cap > 0:
            g.add_edge(u, v, capacity=cap)

    residual = dinitz(g, net.source, net.sink, capacity="capacity")
    value = int(residual.graph["flow_value"])
    # Residual flows are antisymmetric; an antiparallel pair keeps its net part
    flow = {
        (u, v): max(0, int(residual[u][v]["flow"])) if cap > 0 else 0
        for (u, v), cap in net.arcs.items()
    }

    seen = {net.source}
    frontier = [net.source]
    while frontier:
        u = frontier.pop()
        for v, attrs in residual[u].items():
            if v not in seen and attrs["capacity"] - attrs["flow"] > 0:
                seen.add(v)
                frontier.append(v)

    return FlowResult(value=value, flow=flow, source_side=frozenset(seen))
