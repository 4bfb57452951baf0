"""
Instance and tree decomposition file formats.

Instance files are line oriented:

    c comment
    p cvc <n> <m>
    w <v> <weight>        (one per vertex, weight 0 when absent)
    e <u> <v>             (m lines)

Tree decompositions use the PACE layout:

    s td <#bags> <width+1> <n>
    b <bag-id> <v> ...
    <bag-id> <bag-id>     (tree edges)
"""

import hashlib
from pathlib import Path

import structlog

from twapprox.errors import DecompositionFormatError, InstanceFormatError
from twapprox.graph import Graph, ProblemKind, WeightedInstance
from twapprox.treedecomp import TreeDecomposition

logger = structlog.get_logger(__name__)


def _ints(tokens: list[str], line_number: int, error: type[InstanceFormatError]) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise error(f"Expected integers, got {' '.join(tokens)!r}", line_number) from None


def parse_instance(text: str) -> WeightedInstance:
    """Parse an instance file body."""
    kind: ProblemKind | None = None
    n = m = 0
    weights: dict[int, int] = {}
    edges: list[tuple[int, int]] = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        head = tokens[0]
        if head == "p":
            if kind is not None:
                raise InstanceFormatError("Duplicate problem line", line_number)
            if len(tokens) != 4:
                raise InstanceFormatError("Problem line needs 'p <kind> <n> <m>'", line_number)
            try:
                kind = ProblemKind(tokens[1].lower())
            except ValueError:
                raise InstanceFormatError(
                    f"Unknown problem kind {tokens[1]!r}", line_number
                ) from None
            n, m = _ints(tokens[2:], line_number, InstanceFormatError)
            if n < 0 or m < 0:
                raise InstanceFormatError("Counts must be non-negative", line_number)
            continue
        if kind is None:
            raise InstanceFormatError("Problem line must come first", line_number)
        if head == "w":
            if len(tokens) != 3:
                raise InstanceFormatError("Weight line needs 'w <v> <weight>'", line_number)
            v, w = _ints(tokens[1:], line_number, InstanceFormatError)
            if not 1 <= v <= n:
                raise InstanceFormatError(f"Vertex {v} outside 1..{n}", line_number)
            if w < 0:
                raise InstanceFormatError(f"Negative weight for vertex {v}", line_number)
            if v in weights:
                raise InstanceFormatError(f"Duplicate weight for vertex {v}", line_number)
            weights[v] = w
        elif head == "e":
            if len(tokens) != 3:
                raise InstanceFormatError("Edge line needs 'e <u> <v>'", line_number)
            u, v = _ints(tokens[1:], line_number, InstanceFormatError)
            for x in (u, v):
                if not 1 <= x <= n:
                    raise InstanceFormatError(f"Vertex {x} outside 1..{n}", line_number)
            if u == v:
                raise InstanceFormatError(f"Self-loop at vertex {u}", line_number)
            edges.append((u, v))
        else:
            raise InstanceFormatError(f"Unknown line type {head!r}", line_number)

    if kind is None:
        raise InstanceFormatError("Missing problem line")
    if len(edges) != m:
        raise InstanceFormatError(f"Header declares {m} edges, found {len(edges)}")
    if len({frozenset(e) for e in edges}) != len(edges):
        raise InstanceFormatError("Duplicate edge")

    vertices = range(1, n + 1)
    graph = Graph(vertices, edges)
    return WeightedInstance(graph, kind, {v: weights.get(v, 0) for v in vertices})


def read_instance(path: str | Path) -> WeightedInstance:
    return parse_instance(Path(path).read_text())


def format_instance(instance: WeightedInstance) -> str:
    """Canonical text of an instance; parse_instance inverts it."""
    g = instance.graph
    lines = [f"p {instance.kind.value} {g.n} {g.m}"]
    lines += [f"w {v} {instance.weight[v]}" for v in g.vertices]
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def instance_hash(instance: WeightedInstance) -> str:
    """sha256 of the canonical instance text."""
    return hashlib.sha256(format_instance(instance).encode()).hexdigest()


def parse_td(text: str) -> TreeDecomposition:
    """Parse a PACE tree decomposition."""
    header: list[int] | None = None
    bags: dict[int, frozenset[int]] = {}
    tree_edges: list[tuple[int, int]] = []
    err = DecompositionFormatError

    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "s":
            if header is not None:
                raise err("Duplicate solution line", line_number)
            if len(tokens) != 5 or tokens[1] != "td":
                raise err("Solution line needs 's td <bags> <width+1> <n>'", line_number)
            header = _ints(tokens[2:], line_number, err)
            continue
        if header is None:
            raise err("Solution line must come first", line_number)
        if tokens[0] == "b":
            values = _ints(tokens[1:], line_number, err)
            if not values:
                raise err("Bag line needs an id", line_number)
            bag_id, members = values[0], values[1:]
            if bag_id in bags:
                raise err(f"Duplicate bag {bag_id}", line_number)
            if not 1 <= bag_id <= header[0]:
                raise err(f"Bag id {bag_id} outside 1..{header[0]}", line_number)
            bags[bag_id] = frozenset(members)
        else:
            values = _ints(tokens, line_number, err)
            if len(values) != 2:
                raise err("Tree edge needs two bag ids", line_number)
            tree_edges.append((values[0], values[1]))

    if header is None:
        raise err("Missing solution line")
    num_bags, width_plus_one, _n = header
    if len(bags) != num_bags:
        raise err(f"Header declares {num_bags} bags, found {len(bags)}")
    largest = max((len(b) for b in bags.values()), default=0)
    if largest > width_plus_one:
        raise err(f"Bag of size {largest} exceeds declared width+1 = {width_plus_one}")
    for a, b in tree_edges:
        if a not in bags or b not in bags:
            raise err(f"Tree edge {a}-{b} names an unknown bag")
    return TreeDecomposition(bags, tuple(tree_edges))


def read_td(path: str | Path) -> TreeDecomposition:
    return parse_td(Path(path).read_text())


def format_td(td: TreeDecomposition, n: int) -> str:
    """PACE text for td over a graph with n vertices."""
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for bag_id in sorted(td.bags):
        members = " ".join(str(v) for v in sorted(td.bags[bag_id]))
        lines.append(f"b {bag_id} {members}".rstrip())
    lines += [f"{a} {b}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"
