"""
Exact record-set dynamic program for Capacitated Vertex Cover.

A record (d, k) at node alpha says: some orientation of G_alpha (edges
inside the subtree that are not inside the bag) respects every capacity
on Y, gives each bag vertex u exactly d(u) out-edges toward Y, and uses
at most k vertices of Y as covering endpoints. Tables keep the minimum k
per d-vector; larger k up to |Y| are members by upward closure.

Every entry carries a back-reference to the child entries and the branch
that produced it, so a covering orientation can be rebuilt top-down.
"""

import time
from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import combinations

import structlog

from twapprox.config import SolverSettings, get_settings
from twapprox.errors import InputError, InternalError, ResourceLimitError
from twapprox.graph import Edge, Graph, Orientation, edge_key, orientation_feasible
from twapprox.treedecomp import NiceNode, NiceTreeDecomposition, NodeKind

logger = structlog.get_logger(__name__)

Key = tuple[int, ...]


@dataclass(frozen=True)
class BackRef:
    """How an entry was produced: the rule, child keys and the forget-branch choice."""

    rule: NodeKind
    children: tuple[Key, ...] = ()
    # Forget nodes only: None for branch (1), the chosen neighbour set for branch (2)
    delta: tuple[int, ...] | None = None


@dataclass
class ExactRecordSet:
    """
    Table of one node: d-vector (ordered like `order`) -> minimum k.
    """

    order: tuple[int, ...]
    forgotten: frozenset[int]
    entries: dict[Key, int] = field(default_factory=dict)
    backrefs: dict[Key, BackRef] = field(default_factory=dict)

    @property
    def y_size(self) -> int:
        return len(self.forgotten)

    def __len__(self) -> int:
        return len(self.entries)

    def offer(self, key: Key, k: int, ref: BackRef) -> None:
        current = self.entries.get(key)
        if current is None or k < current:
            self.entries[key] = k
            self.backrefs[key] = ref

    def key_of(self, d: Mapping[int, int]) -> Key:
        return tuple(d[v] for v in self.order)

    def as_mapping(self, key: Key) -> dict[int, int]:
        return dict(zip(self.order, key, strict=True))

    def k_min(self, d: Mapping[int, int] | Key) -> int | None:
        key = d if isinstance(d, tuple) else self.key_of(d)
        return self.entries.get(key)

    def contains(self, d: Mapping[int, int] | Key, k: int) -> bool:
        """Membership of (d, k), using closure upward in k up to |Y|."""
        k_min = self.k_min(d)
        return k_min is not None and k_min <= k <= self.y_size

    def records(self) -> set[tuple[Key, int]]:
        return set(self.entries.items())


def _check_cap(table: ExactRecordSet, settings: SolverSettings) -> None:
    if len(table) > settings.table_cap:
        raise ResourceLimitError(
            "Exact table exceeds the table cap",
            limit=settings.table_cap,
            observed=len(table),
            advice="Raise --table-cap or use solve-cvc-approx",
        )


def leaf_table() -> ExactRecordSet:
    table = ExactRecordSet(order=(), forgotten=frozenset())
    table.offer((), 0, BackRef(NodeKind.LEAF))
    return table


def introduce_table(child: ExactRecordSet, v: int) -> ExactRecordSet:
    """Extend every vector by d(v) = 0; v has no edge into Y."""
    if v in child.order:
        raise InputError("Introduced vertex already in the bag", detail=f"vertex {v}")
    order = tuple(sorted(child.order + (v,)))
    pos = order.index(v)
    table = ExactRecordSet(order=order, forgotten=child.forgotten)
    for key, k in child.entries.items():
        table.offer(key[:pos] + (0,) + key[pos:], k, BackRef(NodeKind.INTRODUCE, (key,)))
    return table


def join_table(
    left: ExactRecordSet,
    right: ExactRecordSet,
    settings: SolverSettings | None = None,
) -> ExactRecordSet:
    """Pointwise sums of vectors, k added; minimum kept per sum."""
    if left.order != right.order:
        raise InputError("Join children must share their bag")
    settings = settings or get_settings()
    table = ExactRecordSet(order=left.order, forgotten=left.forgotten | right.forgotten)
    swap = len(left) > len(right)
    outer, inner = (right, left) if swap else (left, right)
    for key_a, k_a in outer.entries.items():
        for key_b, k_b in inner.entries.items():
            key = tuple(a + b for a, b in zip(key_a, key_b, strict=True))
            refs = (key_b, key_a) if swap else (key_a, key_b)
            table.offer(key, k_a + k_b, BackRef(NodeKind.JOIN, refs))
        _check_cap(table, settings)
    return table


def forget_table(
    child: ExactRecordSet,
    v: int,
    g: Graph,
    capacity: Mapping[int, int],
    settings: SolverSettings | None = None,
) -> ExactRecordSet:
    """
    Forget v, with both branches.

    (1) v covers nothing: every edge from v to Y already points away
        from v, and its edges to the bag will be covered by the bag side.
    (2) v is a covering vertex: it takes the edges from a subset Delta of
        its bag neighbours plus |N_Y(v)| - d(v) edges from Y, within c(v).
    """
    if v not in child.order:
        raise InputError("Forgotten vertex not in the bag", detail=f"vertex {v}")
    settings = settings or get_settings()
    idx = child.order.index(v)
    order = child.order[:idx] + child.order[idx + 1 :]
    pos = {u: i for i, u in enumerate(order)}
    nbrs = g.neighbors(v)
    n_y = len(nbrs & child.forgotten)
    bag_nbrs = [u for u in order if u in nbrs]
    cap = capacity[v]

    table = ExactRecordSet(order=order, forgotten=child.forgotten | {v})
    for key, k in child.entries.items():
        d_v = key[idx]
        rest = key[:idx] + key[idx + 1 :]
        if d_v == n_y:
            table.offer(rest, k, BackRef(NodeKind.FORGET, (key,), None))
        for size in range(len(bag_nbrs) + 1):
            # indegree of v: (n_y - d_v) from Y plus |Delta| from the bag
            if n_y - d_v + size > cap:
                break
            for delta in combinations(bag_nbrs, size):
                bumped = list(rest)
                for u in delta:
                    bumped[pos[u]] += 1
                table.offer(tuple(bumped), k + 1, BackRef(NodeKind.FORGET, (key,), delta))
    _check_cap(table, settings)
    return table


def check_instance(g: Graph, ntd: NiceTreeDecomposition, capacity: Mapping[int, int]) -> None:
    """Raise InputError unless ntd is a rooted nice decomposition over g's vertices."""
    if ntd.root.bag:
        raise InputError("Root bag must be empty")
    if ntd.vertices != frozenset(g.vertices):
        raise InputError("Decomposition does not cover exactly the graph's vertices")
    missing = [v for v in g.vertices if v not in capacity]
    if missing:
        raise InputError("Capacity missing", detail=f"vertices {missing[:5]}")


def compute_exact_tables(
    g: Graph,
    ntd: NiceTreeDecomposition,
    capacity: Mapping[int, int],
    settings: SolverSettings | None = None,
) -> list[ExactRecordSet]:
    """Tables for every node, indexed by node id."""
    settings = settings or get_settings()
    if ntd.width > settings.exact_max_width:
        raise ResourceLimitError(
            "Decomposition too wide for the exact solver",
            limit=settings.exact_max_width,
            observed=ntd.width,
            advice="Use solve-cvc-approx or raise TWAPPROX_EXACT_MAX_WIDTH",
        )
    check_instance(g, ntd, capacity)

    tables: list[ExactRecordSet] = []
    for node in ntd:
        tables.append(_node_table(node, tables, g, capacity, settings))
        logger.debug("Exact table", node=node.id, kind=node.kind.value, size=len(tables[-1]))
    return tables


def _node_table(
    node: NiceNode,
    tables: list[ExactRecordSet],
    g: Graph,
    capacity: Mapping[int, int],
    settings: SolverSettings,
) -> ExactRecordSet:
    if node.kind is NodeKind.LEAF:
        return leaf_table()
    child = tables[node.children[0]]
    if node.kind is NodeKind.INTRODUCE:
        assert node.vertex is not None
        return introduce_table(child, node.vertex)
    if node.kind is NodeKind.FORGET:
        assert node.vertex is not None
        try:
            return forget_table(child, node.vertex, g, capacity, settings)
        except ResourceLimitError as e:
            e.detail = f"node {node.id}, {e.detail}"
            raise
    try:
        return join_table(child, tables[node.children[1]], settings)
    except ResourceLimitError as e:
        e.detail = f"node {node.id}, {e.detail}"
        raise


def forget_orientation(
    g: Graph,
    node: NiceNode,
    delta: tuple[int, ...] | None,
) -> dict[Edge, int]:
    """Sinks for the edges between the forgotten vertex and the remaining bag."""
    v = node.vertex
    assert v is not None
    chosen = set(delta or ())
    sinks: dict[Edge, int] = {}
    for u in node.order:
        if g.has_edge(u, v):
            sinks[edge_key(u, v)] = v if u in chosen else u
    return sinks


def reconstruct(
    g: Graph,
    ntd: NiceTreeDecomposition,
    tables: list[ExactRecordSet],
    root_key: Key = (),
) -> Orientation:
    """Follow back-references from the root entry down to the leaves."""
    sinks: dict[Edge, int] = {}
    stack = [(ntd.root.id, root_key)]
    while stack:
        node_id, key = stack.pop()
        node = ntd[node_id]
        ref = tables[node_id].backrefs[key]
        if node.kind is NodeKind.FORGET:
            sinks.update(forget_orientation(g, node, ref.delta))
        stack.extend(zip(node.children, ref.children, strict=True))
    return Orientation(sinks)


@dataclass
class ExactResult:
    """Outcome of solve_exact; opt is None when the instance is infeasible."""

    opt: int | None
    witness: Orientation | None
    table_sizes: list[int]
    height: int
    width: int
    elapsed_s: float

    @property
    def feasible(self) -> bool:
        return self.opt is not None


def solve_exact(
    g: Graph,
    ntd: NiceTreeDecomposition,
    capacity: Mapping[int, int],
    settings: SolverSettings | None = None,
) -> ExactResult:
    """
    Solve capacitated vertex cover exactly.

    Args:
        g: Input graph.
        ntd: Nice decomposition of g with an empty root bag.
        capacity: Capacity of every vertex of g.
        settings: Guards and caps; the environment settings when omitted.

    Returns:
        ExactResult with the optimum and a witness orientation, or with
        opt and witness set to None when no capacitated cover exists.

    Raises:
        InputError: If ntd does not fit g or a capacity is missing.
        ResourceLimitError: If the width or a table exceeds its cap.
    """
    started = time.perf_counter()
    tables = compute_exact_tables(g, ntd, capacity, settings)
    root = tables[ntd.root.id]
    sizes = [len(t) for t in tables]

    opt = root.entries.get(())
    witness = None
    if opt is not None:
        witness = reconstruct(g, ntd, tables)
        if len(witness) != g.m or not orientation_feasible(g, witness, capacity):
            raise InternalError("Reconstructed orientation is not a feasible cover")
        if len(witness.cover()) != opt:
            raise InternalError(
                "Reconstructed cover size differs from the optimum",
                detail=f"cover={len(witness.cover())}, opt={opt}",
            )

    elapsed = time.perf_counter() - started
    logger.info(
        "Exact CVC solved",
        opt=opt,
        nodes=len(ntd),
        width=ntd.width,
        height=ntd.height,
        max_table=max(sizes),
        elapsed_s=round(elapsed, 4),
    )
    return ExactResult(opt, witness, sizes, ntd.height, ntd.width, elapsed)
