"""
Rounded dynamic program for Capacitated Vertex Cover.

Same node rules as the exact DP, but out-degree vectors live in N_eps
(exponent codes), join sums are rounded down, and forget nodes check
membership of a full-budget record with a max-flow test instead of
carrying exact vectors. Errors grow with node height following an
ErrorSchedule, and the reported bound is (1 + delta_h0) * min k.

Witness: every approximate entry carries a shadow, an exact record with
a concrete orientation that stays close to it. At forget nodes the
shadow is moved onto the tested vector: out-degrees above the target are
lowered by flipping edges back, and the forgotten vertex is raised along
augmenting reversal paths that end at a Y vertex with spare capacity.
"""

import time
from collections import Counter, deque
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil

import structlog

from twapprox.config import SolverSettings, get_settings
from twapprox.cvc_exact import ExactRecordSet, check_instance, forget_orientation
from twapprox.errors import InternalError, ResourceLimitError
from twapprox.flowtest import FeasibilityTester
from twapprox.graph import Edge, Graph, Orientation, edge_key, orientation_feasible
from twapprox.rounding import ZERO, EpsilonArithmetic, ErrorSchedule, schedule
from twapprox.treedecomp import NiceNode, NiceTreeDecomposition, NodeKind

logger = structlog.get_logger(__name__)

Key = tuple[int, ...]


@dataclass(frozen=True)
class Shadow:
    """Exact record (d, k) tracked alongside an approximate entry."""

    d: Key
    k: int
    # edge -> sink for every edge of G_alpha; shared between entries, never mutated
    sinks: Mapping[Edge, int]


@dataclass
class ApproxRecordSet:
    """Table of one node: vector of exponent codes -> minimum k-hat."""

    order: tuple[int, ...]
    forgotten: frozenset[int]
    height: int
    entries: dict[Key, int] = field(default_factory=dict)
    shadows: dict[Key, Shadow] = field(default_factory=dict)

    @property
    def y_size(self) -> int:
        return len(self.forgotten)

    def __len__(self) -> int:
        return len(self.entries)

    def offer(self, key: Key, k: int, make_shadow: Callable[[], Shadow]) -> None:
        current = self.entries.get(key)
        if current is None or k < current:
            self.entries[key] = k
            self.shadows[key] = make_shadow()

    def records(self) -> set[tuple[Key, int]]:
        return set(self.entries.items())


class ApproxDP:
    """
    Rounded DP over one instance and nice decomposition.

    Example:
        dp = ApproxDP(g, ntd, capacity, schedule(ntd.width, g.n, ntd.height))
        tables = dp.run()
    """

    def __init__(
        self,
        g: Graph,
        ntd: NiceTreeDecomposition,
        capacity: Mapping[int, int],
        sched: ErrorSchedule,
        settings: SolverSettings | None = None,
    ):
        check_instance(g, ntd, capacity)
        self.g = g
        self.ntd = ntd
        self.capacity = capacity
        self.sched = sched
        self.settings = settings or get_settings()
        self.ar = EpsilonArithmetic(sched.eps)
        self.tester = FeasibilityTester(g, ntd, capacity, self.settings)
        self._log = logger.bind(nodes=len(ntd), width=ntd.width, height=ntd.height)

    def run(self) -> list[ApproxRecordSet]:
        tables: list[ApproxRecordSet] = []
        for node in self.ntd:
            kids = [tables[c] for c in node.children]
            table = self.approx_table(node, kids)
            if len(table) > self.settings.table_cap:
                raise ResourceLimitError(
                    "Approximate table exceeds the table cap",
                    limit=self.settings.table_cap,
                    observed=len(table),
                    advice="Raise --table-cap or --epsilon",
                )
            tables.append(table)
            self._log.debug("Approx table", node=node.id, kind=node.kind.value, size=len(table))
        return tables

    def approx_table(self, node: NiceNode, children: list[ApproxRecordSet]) -> ApproxRecordSet:
        """Table of node from its children's tables."""
        if node.kind is NodeKind.LEAF:
            table = ApproxRecordSet(order=(), forgotten=frozenset(), height=node.height)
            table.offer((), 0, lambda: Shadow((), 0, {}))
            return table
        if node.kind is NodeKind.INTRODUCE:
            return self._introduce(node, children[0])
        if node.kind is NodeKind.JOIN:
            return self._join(node, children[0], children[1])
        return self._forget(node, children[0])

    def _introduce(self, node: NiceNode, child: ApproxRecordSet) -> ApproxRecordSet:
        assert node.vertex is not None
        pos = node.order.index(node.vertex)
        table = ApproxRecordSet(node.order, child.forgotten, node.height)
        for key, k in child.entries.items():
            s = child.shadows[key]
            shadow = Shadow(s.d[:pos] + (0,) + s.d[pos:], s.k, s.sinks)
            table.offer(key[:pos] + (ZERO,) + key[pos:], k, lambda shadow=shadow: shadow)
        return table

    def _join(
        self, node: NiceNode, left: ApproxRecordSet, right: ApproxRecordSet
    ) -> ApproxRecordSet:
        table = ApproxRecordSet(node.order, left.forgotten | right.forgotten, node.height)
        outer, inner = (right, left) if len(left) > len(right) else (left, right)
        add = self.ar.add
        for key_a, k_a in outer.entries.items():
            sa = outer.shadows[key_a]
            for key_b, k_b in inner.entries.items():
                key = tuple(add(a, b) for a, b in zip(key_a, key_b, strict=True))
                sb = inner.shadows[key_b]

                def make(sa: Shadow = sa, sb: Shadow = sb) -> Shadow:
                    d = tuple(a + b for a, b in zip(sa.d, sb.d, strict=True))
                    return Shadow(d, sa.k + sb.k, {**sa.sinks, **sb.sinks})

                table.offer(key, k_a + k_b, make)
        return table

    def _forget(self, node: NiceNode, child: ApproxRecordSet) -> ApproxRecordSet:
        v = node.vertex
        assert v is not None
        child_node = self.ntd[node.children[0]]
        idx = child.order.index(v)
        pos = {u: i for i, u in enumerate(node.order)}
        nbrs = self.g.neighbors(v)
        n_y = len(nbrs & child.forgotten)
        bag_nbrs = [u for u in node.order if u in nbrs]
        cap = self.capacity[v]
        gamma = self.sched.eps_h(node.height - 1)
        ar = self.ar

        table = ApproxRecordSet(node.order, child.forgotten | {v}, node.height)
        for key, k in child.entries.items():
            code_v = key[idx]
            rest = key[:idx] + key[idx + 1 :]
            base = [ar.ceil_div(c, gamma) for c in key]
            shadow = child.shadows[key]

            # (1) v covers nothing
            if ar.similar(code_v, n_y, gamma):
                target = tuple(base[:idx] + [n_y] + base[idx + 1 :])
                if self.tester.test(child_node.id, target):
                    table.offer(
                        rest,
                        k,
                        lambda t=target, s=shadow: self._move_shadow(node, child_node, s, t, None),
                    )

            # (2) v covers: the smallest admissible A is the easiest to pass
            for size in range(len(bag_nbrs) + 1):
                a = max(0, n_y - cap + size)
                if a > n_y or not ar.at_least(code_v, Fraction(a) / (1 + gamma)):
                    break
                target = tuple(base[:idx] + [a] + base[idx + 1 :])
                if not self.tester.test(child_node.id, target):
                    break
                for delta in combinations(bag_nbrs, size):
                    bumped = list(rest)
                    for u in delta:
                        bumped[pos[u]] = ar.increment(bumped[pos[u]])
                    table.offer(
                        tuple(bumped),
                        k + 1,
                        lambda t=target, s=shadow, dl=delta: self._move_shadow(
                            node, child_node, s, t, dl
                        ),
                    )
        return table

    def _move_shadow(
        self,
        node: NiceNode,
        child_node: NiceNode,
        shadow: Shadow,
        target: Key,
        delta: tuple[int, ...] | None,
    ) -> Shadow:
        """Shadow of the forget entry built from the child's shadow and the tested vector."""
        v = node.vertex
        assert v is not None
        g = self.g
        y = child_node.forgotten
        sinks = dict(shadow.sinks)
        indeg = Counter(sinks.values())
        d = dict(zip(child_node.order, shadow.d, strict=True))
        want = dict(zip(child_node.order, target, strict=True))

        for u in child_node.order:
            excess = d[u] - want[u]
            if excess <= 0:
                continue
            outs = sorted(
                (w for w in g.neighbors(u) & y if sinks[edge_key(u, w)] == w),
                key=lambda w: (indeg[w], w),
            )
            for w in outs[:excess]:
                sinks[edge_key(u, w)] = u
                indeg[w] -= 1
                indeg[u] += 1
            d[u] = want[u]

        k = shadow.k
        while d[v] < want[v]:
            k += self._augment(sinks, indeg, v, child_node)
            d[v] += 1

        sinks.update(forget_orientation(g, node, delta))
        chosen = set(delta or ())
        new_d = tuple(d[u] + (1 if u in chosen else 0) for u in node.order)
        return Shadow(new_d, k + (0 if delta is None else 1), sinks)

    def _augment(
        self, sinks: dict[Edge, int], indeg: Counter[int], v: int, child_node: NiceNode
    ) -> int:
        """
        Give v one more out-edge toward Y by reversing a path z -> ... -> v.

        z is a Y vertex below capacity, preferably one already covering.
        Returns 1 if z starts covering, else 0.
        """
        y = child_node.forgotten
        g = self.g
        parent: dict[int, int] = {v: v}
        queue = deque([v])
        reached: list[int] = []
        while queue:
            x = queue.popleft()
            candidates = g.neighbors(x) if x in y else g.neighbors(x) & y
            for w in sorted(candidates):
                if w in parent or sinks.get(edge_key(w, x)) != x:
                    continue
                parent[w] = x
                queue.append(w)
                if w in y and indeg[w] < self.capacity[w]:
                    reached.append(w)
        if not reached:
            raise InternalError(
                "No augmenting path for a record that passed the flow test",
                detail=f"vertex {v}",
            )
        z = next((w for w in reached if indeg[w] > 0), reached[0])
        newly_used = 1 if indeg[z] == 0 else 0
        indeg[z] += 1
        indeg[v] -= 1
        w = z
        while w != v:
            p = parent[w]
            sinks[edge_key(w, p)] = w
            w = p
        return newly_used


@dataclass
class ApproxResult:
    """Outcome of solve_cvc_approx; bound fields are None when infeasible."""

    k_hat: int | None
    k_hat_min: Fraction | None
    witness: Orientation | None
    sched: ErrorSchedule
    table_sizes: list[int]
    height: int
    width: int
    flows_run: int
    elapsed_s: float

    @property
    def feasible(self) -> bool:
        return self.k_hat is not None

    @property
    def k_hat_min_ceil(self) -> int | None:
        return None if self.k_hat_min is None else ceil(self.k_hat_min)

    @property
    def opt_lower(self) -> int | None:
        """Lower bound on OPT implied by k_hat_min <= (1 + delta_h0)^2 OPT."""
        if self.k_hat_min is None:
            return None
        return ceil(self.k_hat_min / self.sched.ratio_bound)

    @property
    def witness_size(self) -> int | None:
        return None if self.witness is None else len(self.witness.cover())


def solve_cvc_approx(
    g: Graph,
    ntd: NiceTreeDecomposition,
    capacity: Mapping[int, int],
    epsilon: Fraction | None = None,
    settings: SolverSettings | None = None,
) -> ApproxResult:
    """
    Approximate minimum capacitated vertex cover.

    When feasible, OPT <= k_hat_min <= (1 + delta_h0)^2 * OPT and the
    witness is a capacity-respecting cover of at most that size.

    Args:
        g: Input graph.
        ntd: Nice decomposition of g with an empty root bag.
        capacity: Capacity of every vertex of g.
        epsilon: Rounding base is 1 + epsilon; see schedule() for the default.
        settings: Guards and caps; the environment settings when omitted.

    Returns:
        ApproxResult with k_hat_min, the witness and the schedule used.
        k_hat_min and witness are None when the instance is infeasible.

    Raises:
        ConfigurationError: If epsilon is not positive or makes delta_h0 >= 1.
        ResourceLimitError: If a rounded table exceeds the table cap.
    """
    started = time.perf_counter()
    sched = schedule(ntd.width, g.n, ntd.height, epsilon)
    dp = ApproxDP(g, ntd, capacity, sched, settings)
    tables = dp.run()
    root = tables[ntd.root.id]

    k_hat = root.entries.get(())
    k_hat_min = None
    witness = None
    if k_hat is not None:
        k_hat_min = (1 + sched.delta_h0) * k_hat
        witness = Orientation(root.shadows[()].sinks)
        if len(witness) != g.m or not orientation_feasible(g, witness, capacity):
            raise InternalError("Shadow orientation is not a feasible cover")

    elapsed = time.perf_counter() - started
    sizes = [len(t) for t in tables]
    logger.info(
        "Approximate CVC solved",
        k_hat=k_hat,
        epsilon=str(sched.eps),
        delta_h0=float(sched.delta_h0),
        max_table=max(sizes),
        witness_size=None if witness is None else len(witness.cover()),
        exact_fallbacks=dp.ar.exact_fallbacks,
        elapsed_s=round(elapsed, 4),
        **dp.tester.get_stats(),
    )
    return ApproxResult(
        k_hat=k_hat,
        k_hat_min=k_hat_min,
        witness=witness,
        sched=sched,
        table_sizes=sizes,
        height=ntd.height,
        width=ntd.width,
        flows_run=dp.tester.flows_run,
        elapsed_s=elapsed,
    )


def _close_vectors(ar: EpsilonArithmetic, codes: Key, d: Key, gamma: Fraction) -> bool:
    return all(ar.similar(c, x, gamma) for c, x in zip(codes, d, strict=True))


def check_exact_covered(
    exact: ExactRecordSet,
    approx: ApproxRecordSet,
    ar: EpsilonArithmetic,
    sched: ErrorSchedule,
) -> list[Key]:
    """
    Exact vectors with no close approximate entry.

    An exact (d, k) is covered when some stored d-hat is eps_h-close to d
    and its minimum k-hat is at most (1 + delta_h) * k.
    """
    gamma = sched.eps_h(approx.height)
    bound = 1 + sched.delta_h(approx.height)
    return [
        d
        for d, k in exact.entries.items()
        if not any(
            k_hat <= bound * k and _close_vectors(ar, codes, d, gamma)
            for codes, k_hat in approx.entries.items()
        )
    ]


def check_approx_covered(
    exact: ExactRecordSet,
    approx: ApproxRecordSet,
    ar: EpsilonArithmetic,
    sched: ErrorSchedule,
) -> list[Key]:
    """
    Approximate vectors with no close exact record.

    A stored (d-hat, k-hat) is covered when some exact d is eps_h-close and
    k_min(d) <= (1 + delta_h) * k-hat.
    """
    gamma = sched.eps_h(approx.height)
    bound = 1 + sched.delta_h(approx.height)
    return [
        codes
        for codes, k_hat in approx.entries.items()
        if not any(
            k <= bound * k_hat and _close_vectors(ar, codes, d, gamma)
            for d, k in exact.entries.items()
        )
    ]


def shadow_is_close(
    approx: ApproxRecordSet,
    key: Key,
    ar: EpsilonArithmetic,
    sched: ErrorSchedule,
) -> bool:
    """Whether the shadow of an entry is h-close to it."""
    shadow = approx.shadows[key]
    gamma = sched.eps_h(approx.height)
    delta = sched.delta_h(approx.height)
    k_hat = approx.entries[key]
    k_ok = Fraction(k_hat) / (1 + delta) <= shadow.k <= (1 + delta) * k_hat
    return k_ok and _close_vectors(ar, key, shadow.d, gamma)
