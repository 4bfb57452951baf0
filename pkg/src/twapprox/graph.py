"""
Graphs, weighted instances and orientations.

Features:
- Immutable simple undirected graphs backed by a frozen networkx graph
- CVC / TSS / VDS instances with a total non-negative weight mapping
- Orientations (edge -> covering endpoint) with in/out degree queries
- Partial instances with a pre-selected vertex set
- Separator components and capacity checks
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

import networkx as nx
import structlog

from twapprox.errors import InputError

logger = structlog.get_logger(__name__)

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    """Canonical (smaller, larger) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class Graph:
    """
    Simple undirected graph with integer vertex ids.

    Top-level instances use ids 1..n; induced subgraphs keep the ids of
    the parent so that mappings stay valid across restriction.
    """

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        g: nx.Graph = nx.Graph()
        g.add_nodes_from(vertices)
        for u, v in edges:
            if u == v:
                raise InputError("Self-loops are not allowed", detail=f"vertex {u}")
            if u not in g or v not in g:
                raise InputError("Edge endpoint is not a vertex", detail=f"edge {u}-{v}")
            if g.has_edge(u, v):
                raise InputError("Duplicate edge", detail=f"edge {u}-{v}")
            g.add_edge(u, v)
        self._g = nx.freeze(g)
        self._vertices = tuple(sorted(g.nodes))
        self._edges = tuple(sorted(edge_key(u, v) for u, v in g.edges))
        self._adj = {v: frozenset(g.neighbors(v)) for v in self._vertices}

    @classmethod
    def from_nx(cls, g: nx.Graph) -> "Graph":
        return cls(g.nodes, g.edges)

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def vertices(self) -> tuple[int, ...]:
        """Vertex ids in ascending order."""
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges as canonical pairs in ascending order."""
        return self._edges

    @property
    def nx_graph(self) -> nx.Graph:
        """The frozen underlying networkx graph."""
        return self._g

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(self._vertices)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise InputError("Unknown vertex", detail=f"vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def check_vertices(self, vs: Iterable[int]) -> frozenset[int]:
        """Return vs as a frozenset, raising InputError on unknown ids."""
        result = frozenset(vs)
        unknown = sorted(v for v in result if v not in self._adj)
        if unknown:
            raise InputError("Unknown vertex ids", detail=f"vertices {unknown}")
        return result

    def induced(self, vs: Iterable[int]) -> "Graph":
        """Induced subgraph on vs; ids are preserved."""
        keep = self.check_vertices(vs)
        return Graph(
            keep,
            ((u, v) for u, v in self._edges if u in keep and v in keep),
        )

    def edges_within(self, vs: frozenset[int]) -> list[Edge]:
        """Edges with both endpoints in vs, ascending."""
        return [(u, v) for u, v in self._edges if u in vs and v in vs]


class ProblemKind(StrEnum):
    """The three problems an instance file can describe."""

    CVC = "cvc"
    TSS = "tss"
    VDS = "vds"


@dataclass(frozen=True)
class WeightedInstance:
    """
    A graph with a capacity (CVC) or threshold (TSS, VDS) per vertex.
    """

    graph: Graph
    kind: ProblemKind
    weight: Mapping[int, int]

    def __post_init__(self) -> None:
        missing = [v for v in self.graph.vertices if v not in self.weight]
        if missing:
            raise InputError("Weight mapping is not total", detail=f"missing {missing[:5]}")
        extra = [v for v in self.weight if v not in self.graph]
        if extra:
            raise InputError("Weight given for unknown vertex", detail=f"vertices {extra[:5]}")
        negative = [v for v, w in self.weight.items() if w < 0]
        if negative:
            raise InputError("Weights must be non-negative", detail=f"vertices {negative[:5]}")
        object.__setattr__(self, "weight", dict(self.weight))

    def restrict(self, vs: Iterable[int]) -> "WeightedInstance":
        """Instance on the induced subgraph, weights carried over unchanged."""
        sub = self.graph.induced(vs)
        return WeightedInstance(sub, self.kind, {v: self.weight[v] for v in sub.vertices})


@dataclass(frozen=True)
class PartialInstance:
    """An instance together with a set U of vertices already selected."""

    instance: WeightedInstance
    excluded: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "excluded", self.instance.graph.check_vertices(self.excluded)
        )

    @property
    def free(self) -> frozenset[int]:
        """Vertices still open for selection (V minus U)."""
        return frozenset(self.instance.graph.vertices) - self.excluded


class Orientation:
    """
    Direction for a set of edges, stored as edge -> sink.

    The sink of an edge is its covering endpoint: a vertex with positive
    indegree is a member of the cover.
    """

    def __init__(self, sinks: Mapping[Edge, int] | None = None):
        self._sink: dict[Edge, int] = {}
        for (u, v), s in (sinks or {}).items():
            key = edge_key(u, v)
            if s not in key:
                raise InputError("Sink is not an endpoint", detail=f"edge {key}, sink {s}")
            self._sink[key] = s

    def __len__(self) -> int:
        return len(self._sink)

    def __contains__(self, e: object) -> bool:
        return e in self._sink

    def items(self) -> Iterable[tuple[Edge, int]]:
        return self._sink.items()

    def sink(self, u: int, v: int) -> int:
        return self._sink[edge_key(u, v)]

    def source(self, u: int, v: int) -> int:
        key = edge_key(u, v)
        s = self._sink[key]
        return key[0] if s == key[1] else key[1]

    def in_degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for s in self._sink.values():
            deg[s] = deg.get(s, 0) + 1
        return deg

    def out_degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for (u, v), s in self._sink.items():
            src = u if s == v else v
            deg[src] = deg.get(src, 0) + 1
        return deg

    def indegree(self, v: int) -> int:
        return sum(1 for s in self._sink.values() if s == v)

    def outdegree(self, v: int) -> int:
        return sum(1 for e, s in self._sink.items() if v in e and s != v)

    def cover(self) -> frozenset[int]:
        """Vertices with positive indegree."""
        return frozenset(self._sink.values())

    def as_dict(self) -> dict[Edge, int]:
        return dict(self._sink)


def components_after_removal(g: Graph, separator: Iterable[int]) -> list[frozenset[int]]:
    """
    Connected components of g minus the separator.

    Components are ordered by their smallest vertex id.
    """
    removed = g.check_vertices(separator)
    rest = [v for v in g.vertices if v not in removed]
    sub = g.nx_graph.subgraph(rest)
    parts = [frozenset(c) for c in nx.connected_components(sub)]
    return sorted(parts, key=min)


def orientation_feasible(
    g: Graph,
    orientation: Orientation,
    capacity: Mapping[int, int],
    scope: Iterable[int] | None = None,
) -> bool:
    """True iff every vertex in scope has indegree at most its capacity."""
    indeg = orientation.in_degrees()
    vertices = g.vertices if scope is None else scope
    return all(indeg.get(v, 0) <= capacity[v] for v in vertices)


def orientation_covers(g: Graph, orientation: Orientation) -> bool:
    """True iff the orientation directs exactly the edges of g."""
    return len(orientation) == g.m and all(e in orientation for e in g.edges)
