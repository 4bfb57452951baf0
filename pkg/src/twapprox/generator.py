"""
Random partial k-trees with width-certified decompositions.

A k-tree is grown from a (k+1)-clique by attaching each new vertex to a
random existing k-clique; every attachment adds one bag, so the natural
decomposition comes for free. Dropping edges afterwards keeps it valid.
"""

import random
from fractions import Fraction
from itertools import combinations

import structlog

from twapprox.errors import InputError
from twapprox.graph import Graph, ProblemKind, WeightedInstance
from twapprox.treedecomp import TreeDecomposition

logger = structlog.get_logger(__name__)


def parse_probability(value: str | float | Fraction) -> Fraction:
    """Fraction in [0, 1] from '1/2', '0.5', 0.5 or a Fraction."""
    try:
        p = Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InputError("Not a probability", detail=repr(value)) from None
    if not 0 <= p <= 1:
        raise InputError("Probability must lie in [0, 1]", detail=str(p))
    return p


def generate_partial_ktree(
    n: int,
    k: int,
    keep_prob: str | float | Fraction,
    seed: int,
) -> tuple[Graph, TreeDecomposition]:
    """
    Random partial k-tree on vertices 1..n and a decomposition of width <= k.

    Bags are numbered 1..n-k; bag 1 holds the initial clique and bag
    v-k is created when vertex v is attached.
    """
    if k < 0:
        raise InputError("k must be non-negative", detail=f"k={k}")
    if n <= k:
        raise InputError("Need n > k for a k-tree", detail=f"n={n}, k={k}")
    keep = parse_probability(keep_prob)
    rng = random.Random(seed)

    base = frozenset(range(1, k + 2))
    bags: dict[int, frozenset[int]] = {1: base}
    tree_edges: list[tuple[int, int]] = []
    edges = [(u, v) for u, v in combinations(sorted(base), 2)]
    # (k-clique, a bag containing it)
    cliques: list[tuple[tuple[int, ...], int]] = [
        (c, 1) for c in combinations(sorted(base), k)
    ]

    for v in range(k + 2, n + 1):
        clique, host = cliques[rng.randrange(len(cliques))]
        bag_id = v - k
        bags[bag_id] = frozenset(clique) | {v}
        tree_edges.append((host, bag_id))
        edges.extend((u, v) for u in clique)
        for x in clique:
            rest = tuple(sorted((set(clique) - {x}) | {v}))
            cliques.append((rest, bag_id))

    kept = [e for e in sorted(edges) if rng.random() < keep]
    graph = Graph(range(1, n + 1), kept)
    logger.debug("Generated partial k-tree", n=n, k=k, edges=graph.m, seed=seed)
    return graph, TreeDecomposition(bags, tuple(tree_edges))


def random_weights(
    graph: Graph,
    kind: ProblemKind,
    rng: random.Random,
    max_capacity: int = 3,
) -> WeightedInstance:
    """
    Random weights: capacities in [0, max_capacity] for CVC, thresholds
    in [0, deg(v)] for TSS and VDS.
    """
    if kind is ProblemKind.CVC:
        weights = {v: rng.randint(0, max_capacity) for v in graph.vertices}
    else:
        weights = {v: rng.randint(0, graph.degree(v)) for v in graph.vertices}
    return WeightedInstance(graph, kind, weights)
