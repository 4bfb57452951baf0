"""
Brute-force reference optima.

Features:
- CVC optimum by subset enumeration plus a flow assignment check
- Second CVC check through bipartite matching on replicated capacity slots
- TSS and VDS optima by subset enumeration
- Exhaustive record sets of a decomposition node, for table comparison

Every oracle refuses inputs above its guard instead of sampling.
"""

from collections.abc import Callable, Mapping
from itertools import combinations, product

import networkx as nx
import structlog
from networkx.algorithms.bipartite import hopcroft_karp_matching

from twapprox.config import SolverSettings, get_settings
from twapprox.errors import ResourceLimitError
from twapprox.flowtest import scope_edges
from twapprox.graph import Graph, Orientation
from twapprox.maxflow import FlowNetwork, max_flow
from twapprox.subset_problems import tss_is_target_set, vds_check
from twapprox.treedecomp import NiceTreeDecomposition

logger = structlog.get_logger(__name__)

Records = set[tuple[tuple[int, ...], int]]


def _guard(g: Graph, settings: SolverSettings) -> None:
    if g.n > settings.guard_max:
        raise ResourceLimitError(
            "Graph too large for the brute-force oracle",
            limit=settings.guard_max,
            observed=g.n,
            advice="Raise TWAPPROX_GUARD_MAX",
        )


def _min_size(g: Graph, accept: Callable[[frozenset[int]], bool]) -> int | None:
    for size in range(g.n + 1):
        for combo in combinations(g.vertices, size):
            if accept(frozenset(combo)):
                return size
    return None


def can_assign(g: Graph, chosen: frozenset[int], capacity: Mapping[int, int]) -> bool:
    """Every edge can be given to an endpoint in chosen without exceeding capacities."""
    if any(u not in chosen and v not in chosen for u, v in g.edges):
        return False
    net = FlowNetwork(source=("s",), sink=("t",))
    for u, v in g.edges:
        net.add_arc(("s",), ("e", u, v), 1)
        for x in (u, v):
            if x in chosen:
                net.add_arc(("e", u, v), ("v", x), 1)
    for x in sorted(chosen):
        net.add_arc(("v", x), ("t",), capacity[x])
    return max_flow(net).value == g.m


def can_assign_by_matching(
    g: Graph, chosen: frozenset[int], capacity: Mapping[int, int]
) -> bool:
    """Same question as can_assign, answered by a perfect matching of edges into slots."""
    b: nx.Graph = nx.Graph()
    top = [("e", u, v) for u, v in g.edges]
    b.add_nodes_from(top)
    for u, v in g.edges:
        for x in (u, v):
            if x in chosen:
                for slot in range(capacity[x]):
                    b.add_edge(("e", u, v), ("slot", x, slot))
    matching = hopcroft_karp_matching(b, top_nodes=top)
    return sum(1 for node in top if node in matching) == g.m


def cvc_opt_brute(
    g: Graph, capacity: Mapping[int, int], settings: SolverSettings | None = None
) -> int | None:
    """Minimum capacitated vertex cover size, or None when no cover exists."""
    settings = settings or get_settings()
    _guard(g, settings)
    return _min_size(g, lambda s: can_assign(g, s, capacity))


def cvc_opt_by_matching(
    g: Graph, capacity: Mapping[int, int], settings: SolverSettings | None = None
) -> int | None:
    settings = settings or get_settings()
    _guard(g, settings)
    return _min_size(g, lambda s: can_assign_by_matching(g, s, capacity))


def tss_opt_brute(
    g: Graph, t: Mapping[int, int], settings: SolverSettings | None = None
) -> int:
    """Smallest seed set whose activation closure is V."""
    settings = settings or get_settings()
    _guard(g, settings)
    size = _min_size(g, lambda s: tss_is_target_set(g, t, s))
    return g.n if size is None else size


def vds_opt_brute(
    g: Graph, t: Mapping[int, int], settings: SolverSettings | None = None
) -> int:
    settings = settings or get_settings()
    _guard(g, settings)
    size = _min_size(g, lambda s: vds_check(g, t, s))
    return g.n if size is None else size


def enumerate_records(
    g: Graph,
    ntd: NiceTreeDecomposition,
    capacity: Mapping[int, int],
    node_id: int,
    settings: SolverSettings | None = None,
) -> Records:
    """
    All (d, k_min) of a node by trying every orientation of G_alpha.

    d is ordered like the bag; k_min is the fewest Y vertices with
    positive indegree among capacity-respecting orientations with that d.
    """
    settings = settings or get_settings()
    node = ntd[node_id]
    edges = scope_edges(g, node)
    if len(edges) > settings.record_edge_guard:
        raise ResourceLimitError(
            "Too many DP-scope edges to enumerate orientations",
            limit=settings.record_edge_guard,
            observed=len(edges),
            advice="Raise TWAPPROX_RECORD_EDGE_GUARD",
        )
    y = node.forgotten
    best: dict[tuple[int, ...], int] = {}
    for choice in product((0, 1), repeat=len(edges)):
        o = Orientation({e: e[bit] for e, bit in zip(edges, choice, strict=True)})
        indeg = o.in_degrees()
        if any(indeg.get(w, 0) > capacity[w] for w in y):
            continue
        outdeg = o.out_degrees()
        key = tuple(outdeg.get(u, 0) for u in node.order)
        k = sum(1 for w in y if indeg.get(w, 0) > 0)
        if key not in best or k < best[key]:
            best[key] = k
    logger.debug("Enumerated records", node=node_id, edges=len(edges), records=len(best))
    return set(best.items())

