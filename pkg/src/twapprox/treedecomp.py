"""
Tree decompositions and nice tree decompositions.

Features:
- Validation of the four decomposition properties with witnesses
- Compression of bags contained in a neighbour's bag
- Conversion to nice form (leaf / introduce / forget / join, empty root)
- Node heights and the derived sets X (bag), V (subtree) and Y = V minus X
- Min-fill heuristic decompositions via networkx
- Restriction to a vertex subset for shrinking residual graphs
"""

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Literal

import networkx as nx
import structlog
from networkx.algorithms.approximation import treewidth_min_fill_in
from pydantic import BaseModel

from twapprox.errors import DecompositionError, InputError
from twapprox.graph import Graph

logger = structlog.get_logger(__name__)


class Violation(BaseModel):
    """One failed decomposition property, with its witness."""

    property: Literal["tree", "unknown-vertex", "vertex-coverage", "edge-coverage", "subtree"]
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags keyed by node id plus the edges of the decomposition tree."""

    bags: Mapping[int, frozenset[int]]
    tree_edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "bags", {k: frozenset(b) for k, b in self.bags.items()})
        object.__setattr__(self, "tree_edges", tuple(tuple(e) for e in self.tree_edges))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {k: set() for k in self.bags}
        for a, b in self.tree_edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def tree(self) -> nx.Graph:
        t: nx.Graph = nx.Graph()
        t.add_nodes_from(self.bags)
        t.add_edges_from(self.tree_edges)
        return t


def validate(g: Graph, td: TreeDecomposition) -> list[Violation]:
    """
    Check td against g; an empty list means td is a tree decomposition.

    Each violated property is reported once per witness.
    """
    violations: list[Violation] = []

    t = td.tree()
    if not td.bags:
        violations.append(Violation(property="tree", message="decomposition has no nodes"))
    elif any(a not in td.bags or b not in td.bags for a, b in td.tree_edges):
        violations.append(Violation(property="tree", message="tree edge names an unknown node"))
    elif any(a == b for a, b in td.tree_edges) or t.number_of_edges() != len(td.tree_edges):
        violations.append(Violation(property="tree", message="tree edges contain loops or repeats"))
    elif not nx.is_tree(t):
        violations.append(
            Violation(property="tree", message="decomposition graph is not a tree")
        )

    for node_id in sorted(td.bags):
        unknown = sorted(v for v in td.bags[node_id] if v not in g)
        if unknown:
            violations.append(
                Violation(
                    property="unknown-vertex",
                    message=f"bag {node_id} holds unknown vertices {unknown}",
                )
            )

    holders: dict[int, list[int]] = {v: [] for v in g.vertices}
    for node_id, bag in td.bags.items():
        for v in bag:
            if v in holders:
                holders[v].append(node_id)

    for v in g.vertices:
        if not holders[v]:
            violations.append(Violation(property="vertex-coverage", message=f"vertex {v} in no bag"))

    bags = list(td.bags.values())
    for u, v in g.edges:
        if not any(u in b and v in b for b in bags):
            violations.append(
                Violation(property="edge-coverage", message=f"edge {{{u},{v}}} in no bag")
            )

    for v in g.vertices:
        nodes = holders[v]
        if len(nodes) > 1 and not nx.is_connected(t.subgraph(nodes)):
            violations.append(
                Violation(property="subtree", message=f"vertex {v}'s nodes not a subtree")
            )

    return violations


def compress(td: TreeDecomposition) -> TreeDecomposition:
    """
    Contract every node whose bag is a subset of a neighbour's bag.

    The neighbour adopts the contracted node's other neighbours; width and
    validity are preserved.
    """
    bags = dict(td.bags)
    adj = td.adjacency()
    changed = True
    while changed:
        changed = False
        for a in sorted(bags):
            target = next((b for b in sorted(adj[a]) if bags[a] <= bags[b]), None)
            if target is None:
                continue
            for other in adj[a]:
                adj[other].discard(a)
                if other != target:
                    adj[other].add(target)
                    adj[target].add(other)
            del adj[a]
            del bags[a]
            changed = True
            break
    edges = sorted({(min(a, b), max(a, b)) for a in adj for b in adj[a]})
    return TreeDecomposition(bags, tuple(edges))


def min_fill_decomposition(g: Graph) -> TreeDecomposition:
    """Heuristic decomposition from a min-fill elimination ordering."""
    if g.n == 0:
        return TreeDecomposition({1: frozenset()})
    width, decomp = treewidth_min_fill_in(g.nx_graph)
    ordered = sorted(decomp.nodes, key=lambda b: sorted(b))
    ids = {bag: i for i, bag in enumerate(ordered, start=1)}
    edges = tuple(sorted((min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in decomp.edges))
    logger.debug("Min-fill decomposition", width=width, bags=len(ids))
    return TreeDecomposition({i: bag for bag, i in ids.items()}, edges)


def restrict(td: TreeDecomposition, keep: Iterable[int]) -> TreeDecomposition:
    """Intersect every bag with keep; valid for the induced subgraph."""
    keep_set = frozenset(keep)
    return TreeDecomposition(
        {k: b & keep_set for k, b in td.bags.items()},
        td.tree_edges,
    )


class NodeKind(StrEnum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    """
    One node of a nice tree decomposition.

    `order` is the bag in ascending order; DP tables index their vectors
    by it. `subtree` is V (all vertices in bags below and at this node).
    """

    id: int
    kind: NodeKind
    bag: frozenset[int]
    children: tuple[int, ...]
    height: int
    subtree: frozenset[int]
    vertex: int | None = None
    order: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(sorted(self.bag)))

    @property
    def forgotten(self) -> frozenset[int]:
        """Y: subtree vertices no longer in the bag."""
        return self.subtree - self.bag


class NiceTreeDecomposition:
    """
    Nice tree decomposition stored in post-order.

    Node ids are list indices; children always precede their parent and
    the root is the last node.
    """

    def __init__(self, nodes: list[NiceNode]):
        if not nodes:
            raise InputError("Nice tree decomposition needs at least one node")
        self._nodes = nodes
        self._parent: list[int | None] = [None] * len(nodes)
        for node in nodes:
            for c in node.children:
                self._parent[c] = node.id

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[NiceNode]:
        return iter(self._nodes)

    def __getitem__(self, node_id: int) -> NiceNode:
        return self._nodes[node_id]

    @property
    def root(self) -> NiceNode:
        return self._nodes[-1]

    @property
    def height(self) -> int:
        """Realized root height h0."""
        return self.root.height

    @property
    def width(self) -> int:
        return max(len(n.bag) for n in self._nodes) - 1

    @property
    def vertices(self) -> frozenset[int]:
        return self.root.subtree

    def parent(self, node_id: int) -> int | None:
        return self._parent[node_id]

    def to_tree_decomposition(self) -> TreeDecomposition:
        """Plain decomposition with node ids shifted to 1..N."""
        bags = {n.id + 1: n.bag for n in self._nodes}
        edges = tuple((c + 1, n.id + 1) for n in self._nodes for c in n.children)
        return TreeDecomposition(bags, edges)

    def stats(self) -> dict[str, int]:
        counts = {kind.value: 0 for kind in NodeKind}
        for n in self._nodes:
            counts[n.kind.value] += 1
        return {"nodes": len(self), "width": self.width, "height": self.height, **counts}


class _NiceBuilder:
    """Appends nice nodes in post-order while tracking heights and subtrees."""

    def __init__(self) -> None:
        self.nodes: list[NiceNode] = []

    def _add(
        self,
        kind: NodeKind,
        bag: frozenset[int],
        children: tuple[int, ...],
        subtree: frozenset[int],
        vertex: int | None = None,
    ) -> int:
        height = 1 + max(self.nodes[c].height for c in children) if children else 0
        node = NiceNode(len(self.nodes), kind, bag, children, height, subtree, vertex)
        self.nodes.append(node)
        return node.id

    def leaf(self) -> int:
        return self._add(NodeKind.LEAF, frozenset(), (), frozenset())

    def introduce(self, child: int, v: int) -> int:
        c = self.nodes[child]
        return self._add(NodeKind.INTRODUCE, c.bag | {v}, (child,), c.subtree | {v}, v)

    def forget(self, child: int, v: int) -> int:
        c = self.nodes[child]
        return self._add(NodeKind.FORGET, c.bag - {v}, (child,), c.subtree, v)

    def join(self, left: int, right: int) -> int:
        a, b = self.nodes[left], self.nodes[right]
        return self._add(NodeKind.JOIN, a.bag, (left, right), a.subtree | b.subtree)

    def morph(self, top: int, target: frozenset[int]) -> int:
        """Forget then introduce, ascending, until the bag equals target."""
        bag = self.nodes[top].bag
        for v in sorted(bag - target):
            top = self.forget(top, v)
        for v in sorted(target - bag):
            top = self.introduce(top, v)
        return top


def make_nice(g: Graph, td: TreeDecomposition, check: bool = True) -> NiceTreeDecomposition:
    """
    Convert a valid decomposition of g into a nice one with an empty root.

    The input is compressed first; the root is the smallest remaining
    node id, introduce and forget chains run in ascending vertex order and
    several children are joined left-deep. Width is preserved.

    Args:
        g: Graph the decomposition belongs to.
        td: Tree decomposition of g.
        check: Validate td against g first.

    Returns:
        NiceTreeDecomposition with heights, subtrees and forgotten sets filled in.

    Raises:
        DecompositionError: If check is set and td is not valid for g.
    """
    if check:
        violations = validate(g, td)
        if violations:
            raise DecompositionError("Invalid tree decomposition", violations)

    td = compress(td)
    adj = td.adjacency()
    root = min(td.bags)

    # Iterative DFS; children sorted ascending, post-order processing.
    children: dict[int, list[int]] = {}
    order: list[int] = []
    stack = [(root, -1)]
    while stack:
        node, parent = stack.pop()
        order.append(node)
        kids = sorted(k for k in adj[node] if k != parent)
        children[node] = kids
        stack.extend((k, node) for k in reversed(kids))

    builder = _NiceBuilder()
    top: dict[int, int] = {}
    for node in reversed(order):
        bag = td.bags[node]
        kids = children[node]
        if not kids:
            top[node] = builder.morph(builder.leaf(), bag)
            continue
        branches = [builder.morph(top[k], bag) for k in kids]
        current = branches[0]
        for other in branches[1:]:
            current = builder.join(current, other)
        top[node] = current

    builder.morph(top[root], frozenset())
    ntd = NiceTreeDecomposition(builder.nodes)
    logger.debug("Built nice tree decomposition", **ntd.stats())
    return ntd


def decompose(g: Graph, td: TreeDecomposition | None = None) -> NiceTreeDecomposition:
    """Nice decomposition of g from td, or from min-fill when td is None."""
    return make_nice(g, td if td is not None else min_fill_decomposition(g))


def separator_check(g: Graph, ntd: NiceTreeDecomposition, node_id: int) -> bool:
    """True iff no edge joins Y of the node with vertices outside its subtree."""
    node = ntd[node_id]
    inside = node.forgotten
    return not any(
        (u in inside and v not in node.subtree) or (v in inside and u not in node.subtree)
        for u, v in g.edges
    )


def check_nice(g: Graph, ntd: NiceTreeDecomposition) -> list[str]:
    """Structural problems of ntd as a nice decomposition of g (empty if none)."""
    problems: list[str] = []
    if ntd.root.bag:
        problems.append("root bag is not empty")
    for node in ntd:
        kids = [ntd[c] for c in node.children]
        if node.kind is NodeKind.LEAF:
            ok = not kids and not node.bag
        elif node.kind is NodeKind.INTRODUCE:
            ok = (
                len(kids) == 1
                and node.vertex not in kids[0].bag
                and node.bag == kids[0].bag | {node.vertex}
            )
        elif node.kind is NodeKind.FORGET:
            ok = (
                len(kids) == 1
                and node.vertex in kids[0].bag
                and node.bag == kids[0].bag - {node.vertex}
            )
        else:
            ok = (
                len(kids) == 2
                and kids[0].bag == kids[1].bag == node.bag
                and not (kids[0].forgotten & kids[1].forgotten)
            )
        if not ok:
            problems.append(f"node {node.id} is not a legal {node.kind.value} node")
        expected_height = 1 + max((k.height for k in kids), default=-1)
        if node.height != expected_height:
            problems.append(f"node {node.id} has height {node.height}, expected {expected_height}")
    problems += [str(v) for v in validate(g, ntd.to_tree_decomposition())]
    return problems
