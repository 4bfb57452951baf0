"""
Approximation framework for monotone, splittable vertex subset problems.

Features:
- l-good node test through the problem's partial solver
- Round loop: pick the lowest node that is not l-good, take its children's
  optimal partial solutions plus their bags, drop their subtrees
- Residual decompositions by restriction, so width never grows
- Optional thread pool for the per-round node tests
"""

import time
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol

import structlog

from twapprox.errors import DecompositionError, InternalError
from twapprox.graph import PartialInstance, ProblemKind, WeightedInstance
from twapprox.treedecomp import (
    NiceTreeDecomposition,
    TreeDecomposition,
    decompose,
    make_nice,
    restrict,
)

logger = structlog.get_logger(__name__)


class SubsetProblem(Protocol):
    """A monotone, splittable vertex subset problem with a bounded partial solver."""

    kind: ProblemKind

    def is_solution(self, instance: WeightedInstance, chosen: Iterable[int]) -> bool: ...

    def solve_partial(self, partial: PartialInstance, limit: int) -> frozenset[int] | None: ...


def is_l_good(
    prob: SubsetProblem,
    instance: WeightedInstance,
    ntd: NiceTreeDecomposition,
    node_id: int,
    l: int,
) -> tuple[bool, frozenset[int] | None]:
    """
    Whether (I, V minus Y_alpha) has a solution of size at most l.

    Returns the optimal partial solution alongside when it does.
    """
    y = ntd[node_id].forgotten
    partial = PartialInstance(instance, frozenset(instance.graph.vertices) - y)
    found = prob.solve_partial(partial, l)
    return found is not None, found


@dataclass
class FrameworkResult:
    """Outcome of one framework run; solution is None when no solution exists."""

    solution: frozenset[int] | None
    rounds: int
    bad_node_heights: list[int]
    ratio_bound: Fraction
    width: int
    l: int
    elapsed_s: float = 0.0
    tests_run: int = 0
    good_by_round: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.solution is not None


def ratio_bound(width: int, l: int) -> Fraction:
    """1 + (w+1)/(l+1)."""
    return 1 + Fraction(width + 1, l + 1)


class _Round:
    """l-goodness of every node of one residual decomposition, cached by Y."""

    def __init__(
        self,
        prob: SubsetProblem,
        instance: WeightedInstance,
        ntd: NiceTreeDecomposition,
        l: int,
        workers: int | None,
    ):
        self.ntd = ntd
        by_y: dict[frozenset[int], int] = {}
        for node in ntd:
            by_y.setdefault(node.forgotten, node.id)
        # One test per distinct Y; nodes sharing Y share the partial instance
        reps = sorted(by_y.values())
        if workers and workers > 1 and len(reps) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                results = list(
                    executor.map(lambda i: is_l_good(prob, instance, ntd, i, l), reps)
                )
        else:
            results = [is_l_good(prob, instance, ntd, i, l) for i in reps]
        self.tests_run = len(reps)
        outcome = {ntd[i].forgotten: r for i, r in zip(reps, results, strict=True)}
        self.good = {node.id: outcome[node.forgotten] for node in ntd}

    def is_good(self, node_id: int) -> bool:
        return self.good[node_id][0]

    def solution(self, node_id: int) -> frozenset[int]:
        found = self.good[node_id][1]
        if found is None:
            raise InternalError("No partial solution cached", detail=f"node {node_id}")
        return found

    def lowest_bad(self) -> int:
        """Not-good node of minimum height, ties to the smallest id."""
        bad = [n for n in self.ntd if not self.is_good(n.id)]
        return min(bad, key=lambda n: (n.height, n.id)).id

    @property
    def good_count(self) -> int:
        return sum(1 for ok, _ in self.good.values() if ok)


def residual_decomposition(
    instance: WeightedInstance,
    ntd: NiceTreeDecomposition,
    keep: frozenset[int],
) -> NiceTreeDecomposition:
    """Nice decomposition of G[keep] obtained by deleting the other vertices from every bag."""
    sub = instance.graph.induced(keep)
    try:
        return make_nice(sub, restrict(ntd.to_tree_decomposition(), keep))
    except DecompositionError as e:
        raise InternalError("Restricted decomposition is invalid", detail=str(e)) from e


def solve(
    prob: SubsetProblem,
    partial: PartialInstance,
    ntd: NiceTreeDecomposition,
    l: int,
    workers: int | None = None,
) -> FrameworkResult:
    """
    Solution S of (I, D) with |S| <= (1 + (w+1)/(l+1)) OPT, or no solution.

    Args:
        prob: Problem whose partial solver handles each cut-off subtree.
        partial: Instance I together with the set D already decided.
        ntd: Nice decomposition of G[V minus D] with an empty root bag.
        l: Goodness budget; larger values trade time for a better ratio.
        workers: Threads for the per-node l-good checks; serial when None.

    Returns:
        FrameworkResult with the solution (None when no solution exists),
        the ratio bound, the round count and the height of each cut-off node.

    Raises:
        ValueError: If l is negative.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    started = time.perf_counter()
    instance = partial.instance
    width = ntd.width
    bound = ratio_bound(width, l)
    if ntd.vertices != partial.free:
        raise InternalError(
            "Decomposition does not cover the residual vertices",
            detail=f"{len(ntd.vertices)} vs {len(partial.free)}",
        )

    chosen: set[int] = set()
    removed = set(partial.excluded)
    heights: list[int] = []
    good_counts: list[int] = []
    tests = 0
    log = logger.bind(kind=instance.kind.value, l=l, width=width)

    while True:
        current = _Round(prob, instance, ntd, l, workers)
        tests += current.tests_run
        good_counts.append(current.good_count)
        rounds = len(good_counts)

        if current.is_good(ntd.root.id):
            chosen |= current.solution(ntd.root.id)
            solution: frozenset[int] | None = frozenset(chosen)
            break

        alpha = ntd[current.lowest_bad()]
        heights.append(alpha.height)
        if not alpha.children:
            log.info("No solution", rounds=rounds)
            solution = None
            break

        added: set[int] = set()
        dropped: set[int] = set()
        for c in alpha.children:
            if not current.is_good(c):
                raise InternalError("Child of the lowest bad node is not l-good", detail=f"node {c}")
            child = ntd[c]
            added |= current.solution(c) | child.bag
            dropped |= child.subtree
        if not dropped:
            raise InternalError("Round removed no vertex", detail=f"node {alpha.id}")

        chosen |= added
        removed |= dropped
        log.debug(
            "Framework round",
            round=rounds,
            node=alpha.id,
            height=alpha.height,
            added=len(added),
            removed=len(dropped),
            remaining=instance.graph.n - len(removed),
        )
        ntd = residual_decomposition(
            instance, ntd, frozenset(instance.graph.vertices) - frozenset(removed)
        )

    elapsed = time.perf_counter() - started
    if solution is not None and not prob.is_solution(instance, solution | partial.excluded):
        raise InternalError("Framework output is not a solution", detail=f"size {len(solution)}")
    log.info(
        "Framework solved",
        size=None if solution is None else len(solution),
        rounds=rounds,
        tests=tests,
        elapsed_s=round(elapsed, 4),
    )
    return FrameworkResult(
        solution=solution,
        rounds=rounds,
        bad_node_heights=heights,
        ratio_bound=bound,
        width=width,
        l=l,
        elapsed_s=elapsed,
        tests_run=tests,
        good_by_round=good_counts,
    )


def solve_instance(
    prob: SubsetProblem,
    instance: WeightedInstance,
    l: int,
    td: TreeDecomposition | None = None,
    workers: int | None = None,
) -> FrameworkResult:
    """Run the framework on (I, empty set), decomposing with min-fill unless td is given."""
    ntd = decompose(instance.graph, td)
    return solve(prob, PartialInstance(instance), ntd, l, workers=workers)
