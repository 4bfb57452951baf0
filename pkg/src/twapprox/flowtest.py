"""
Flow-based membership test for full-budget records.

(d_t, |Y|) is a record of node alpha iff the edges of G_alpha can be
oriented so that every Y vertex stays within capacity and every bag
vertex u keeps at least d_t(u) out-edges toward Y. That is a bipartite
assignment of edges to endpoints, decided by one max-flow:

    source -> edge       capacity 1
    edge   -> endpoint   capacity 1
    u in X -> sink       capacity |N(u) n Y| - d_t(u)
    y in Y -> sink       capacity c(y)

and the test passes iff the flow saturates every edge.
"""

from collections.abc import Mapping

import structlog

from twapprox.cache import BoundedLRUCache
from twapprox.config import SolverSettings, get_settings
from twapprox.graph import Edge, Graph, Orientation
from twapprox.maxflow import FlowNetwork, FlowResult, max_flow
from twapprox.treedecomp import NiceNode, NiceTreeDecomposition

logger = structlog.get_logger(__name__)


def scope_edges(g: Graph, node: NiceNode) -> list[Edge]:
    """Edges of G_alpha: inside the subtree but not inside the bag."""
    return [
        (u, v)
        for u, v in g.edges_within(node.subtree)
        if not (u in node.bag and v in node.bag)
    ]


def build_network(
    g: Graph,
    node: NiceNode,
    capacity: Mapping[int, int],
    d_t: Mapping[int, int],
) -> tuple[FlowNetwork, list[Edge]] | None:
    """The test network, or None when some target exceeds |N(u) n Y|."""
    y = node.forgotten
    edges = scope_edges(g, node)
    net = FlowNetwork(source=("s",), sink=("t",))
    for u, v in edges:
        net.add_arc(("s",), ("e", u, v), 1)
        net.add_arc(("e", u, v), ("v", u), 1)
        net.add_arc(("e", u, v), ("v", v), 1)
    for u in node.order:
        room = len(g.neighbors(u) & y) - d_t[u]
        if room < 0 or d_t[u] < 0:
            return None
        net.add_arc(("v", u), ("t",), room)
    for w in sorted(y):
        net.add_arc(("v", w), ("t",), capacity[w])
    return net, edges


def feasibility_test(
    g: Graph,
    ntd: NiceTreeDecomposition,
    capacity: Mapping[int, int],
    node_id: int,
    d_t: Mapping[int, int],
) -> bool:
    """True iff (d_t, |Y|) is a record of the node."""
    return orientation_for(g, ntd[node_id], capacity, d_t) is not None


def orientation_for(
    g: Graph,
    node: NiceNode,
    capacity: Mapping[int, int],
    d_t: Mapping[int, int],
) -> Orientation | None:
    """An orientation of G_alpha realizing (d_t, |Y|), or None."""
    built = build_network(g, node, capacity, d_t)
    if built is None:
        return None
    net, edges = built
    result = max_flow(net)
    if result.value != len(edges):
        return None
    return _orientation_from_flow(result, edges)


def _orientation_from_flow(result: FlowResult, edges: list[Edge]) -> Orientation:
    sinks: dict[Edge, int] = {}
    for u, v in edges:
        sinks[(u, v)] = u if result.flow.get((("e", u, v), ("v", u)), 0) else v
    return Orientation(sinks)


class FeasibilityTester:
    """
    Memoized feasibility tests for one instance and decomposition.

    Results are keyed by (node id, target vector in bag order); the memo
    is bounded and safe to share between threads.
    """

    def __init__(
        self,
        g: Graph,
        ntd: NiceTreeDecomposition,
        capacity: Mapping[int, int],
        settings: SolverSettings | None = None,
    ):
        settings = settings or get_settings()
        self.g = g
        self.ntd = ntd
        self.capacity = capacity
        self.memo: BoundedLRUCache[tuple[int, tuple[int, ...]], bool] = BoundedLRUCache(
            max_size=settings.flow_memo_size
        )
        self.flows_run = 0
        self._log = logger.bind(nodes=len(ntd))

    def test(self, node_id: int, target: tuple[int, ...]) -> bool:
        """target is ordered like the node's bag."""

        def run() -> bool:
            self.flows_run += 1
            node = self.ntd[node_id]
            d_t = dict(zip(node.order, target, strict=True))
            return orientation_for(self.g, node, self.capacity, d_t) is not None

        return self.memo.get_or_compute((node_id, target), run)

    def get_stats(self) -> dict[str, int | float]:
        stats = self.memo.get_stats()
        return {"flows_run": self.flows_run, "hits": stats["hits"], "hit_rate": stats["hit_rate"]}
