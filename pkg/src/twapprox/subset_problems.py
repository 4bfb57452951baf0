"""
Target Set Selection and Vector Dominating Set.

Features:
- Threshold activation closure (worklist) and target-set check
- Vector domination check
- Brute-force partial solvers: subsets of V minus U by increasing size,
  lexicographic within a size, under a subset-check budget
- The default search budget l for VDS
"""

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations

import structlog

from twapprox.budget import SubsetBudget
from twapprox.config import SolverSettings, get_settings
from twapprox.errors import InputError
from twapprox.graph import Graph, PartialInstance, ProblemKind, WeightedInstance

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ActivationState:
    """Fixed point of threshold activation and the active-neighbour counts."""

    active: frozenset[int]
    counts: Mapping[int, int]


def activation_state(g: Graph, t: Mapping[int, int], seed: Iterable[int]) -> ActivationState:
    """Activate v once |N(v) n active| >= t(v), starting from seed."""
    active = set(g.check_vertices(seed))
    counts = {v: len(g.neighbors(v) & active) for v in g.vertices}
    queue = [v for v in g.vertices if v not in active and counts[v] >= t[v]]
    while queue:
        v = queue.pop()
        if v in active:
            continue
        active.add(v)
        for w in g.neighbors(v):
            counts[w] += 1
            if w not in active and counts[w] >= t[w]:
                queue.append(w)
    return ActivationState(frozenset(active), counts)


def tss_activate(g: Graph, t: Mapping[int, int], seed: Iterable[int]) -> frozenset[int]:
    """Activation closure of seed."""
    return activation_state(g, t, seed).active


def tss_is_target_set(g: Graph, t: Mapping[int, int], seed: Iterable[int]) -> bool:
    return len(tss_activate(g, t, seed)) == g.n


def vds_check(g: Graph, t: Mapping[int, int], chosen: Iterable[int]) -> bool:
    """Every vertex outside chosen has at least t(v) neighbours inside it."""
    s = g.check_vertices(chosen)
    return all(len(g.neighbors(v) & s) >= t[v] for v in g.vertices if v not in s)


def _smallest_subset(
    candidates: Iterable[int],
    limit: int,
    accept: Callable[[frozenset[int]], bool],
    budget: SubsetBudget,
) -> frozenset[int] | None:
    pool = sorted(candidates)
    for size in range(min(limit, len(pool)) + 1):
        for combo in combinations(pool, size):
            budget.acquire()
            chosen = frozenset(combo)
            if accept(chosen):
                return chosen
    return None


def tss_partial_brute(
    partial: PartialInstance,
    limit: int,
    settings: SolverSettings | None = None,
) -> frozenset[int] | None:
    """
    Minimum W within V minus U, |W| <= limit, such that W u U is a target set.

    None means the partial optimum exceeds limit.
    """
    settings = settings or get_settings()
    inst = partial.instance
    budget = SubsetBudget(settings.subset_check_cap, label="TSS subset checks")
    u = partial.excluded
    return _smallest_subset(
        partial.free,
        limit,
        lambda w: tss_is_target_set(inst.graph, inst.weight, w | u),
        budget,
    )


def vds_reduce(partial: PartialInstance) -> tuple[Graph, dict[int, int]]:
    """Equivalent plain instance: G[V minus U], t'(v) = max(0, t(v) - |N(v) n U|)."""
    g = partial.instance.graph
    u = partial.excluded
    reduced = g.induced(partial.free)
    t = {
        v: max(0, partial.instance.weight[v] - len(g.neighbors(v) & u))
        for v in reduced.vertices
    }
    return reduced, t


def vds_partial_brute(
    partial: PartialInstance,
    limit: int,
    settings: SolverSettings | None = None,
) -> frozenset[int] | None:
    """Minimum W within V minus U, |W| <= limit, with W u U a vector dominating set."""
    settings = settings or get_settings()
    reduced, t = vds_reduce(partial)
    budget = SubsetBudget(settings.subset_check_cap, label="VDS subset checks")
    return _smallest_subset(
        reduced.vertices, limit, lambda w: vds_check(reduced, t, w), budget
    )


def default_vds_budget(w: int, n: int) -> int:
    """floor(w^2 * sqrt(log log n / log log log n)), logs base 2, at least 1."""
    if n < 16:
        return 1
    ll = math.log2(math.log2(n))
    lll = math.log2(ll)
    return max(1, math.floor(w * w * math.sqrt(ll / lll)))


class TargetSetSelection:
    """TSS as a monotone, splittable vertex subset problem."""

    kind = ProblemKind.TSS

    def __init__(self, settings: SolverSettings | None = None):
        self.settings = settings or get_settings()

    def is_solution(self, instance: WeightedInstance, chosen: Iterable[int]) -> bool:
        return tss_is_target_set(instance.graph, instance.weight, chosen)

    def solve_partial(self, partial: PartialInstance, limit: int) -> frozenset[int] | None:
        return tss_partial_brute(partial, limit, self.settings)


class VectorDominatingSet:
    """VDS as a monotone, splittable vertex subset problem."""

    kind = ProblemKind.VDS

    def __init__(self, settings: SolverSettings | None = None):
        self.settings = settings or get_settings()

    def is_solution(self, instance: WeightedInstance, chosen: Iterable[int]) -> bool:
        return vds_check(instance.graph, instance.weight, chosen)

    def solve_partial(self, partial: PartialInstance, limit: int) -> frozenset[int] | None:
        return vds_partial_brute(partial, limit, self.settings)


def problem_for(
    kind: ProblemKind, settings: SolverSettings | None = None
) -> TargetSetSelection | VectorDominatingSet:
    if kind is ProblemKind.TSS:
        return TargetSetSelection(settings)
    if kind is ProblemKind.VDS:
        return VectorDominatingSet(settings)
    raise InputError("Not a splittable subset problem", detail=kind.value)
