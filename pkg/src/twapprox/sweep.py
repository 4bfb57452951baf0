"""
Seeded experiment sweep.

Generates a corpus of partial k-trees with random weights, runs every
solver against the brute-force oracles, and collects one SweepEntry per
instance. All randomness flows from a single seed; instances may be
solved on a thread pool and are reported in corpus order.
"""

import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction

import structlog

from twapprox.config import SolverSettings, get_settings
from twapprox.cvc_approx import solve_cvc_approx
from twapprox.cvc_exact import solve_exact
from twapprox.errors import TwApproxError
from twapprox.formats import instance_hash
from twapprox.framework import solve
from twapprox.generator import generate_partial_ktree, random_weights
from twapprox.graph import PartialInstance, ProblemKind, WeightedInstance
from twapprox.oracles import cvc_opt_brute, tss_opt_brute, vds_opt_brute
from twapprox.reports import RunMeta, SweepEntry, SweepReport
from twapprox.subset_problems import problem_for
from twapprox.treedecomp import NiceTreeDecomposition, TreeDecomposition, decompose

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class CorpusItem:
    """Parameters of one generated instance."""

    index: int
    kind: ProblemKind
    n: int
    k: int
    keep: Fraction
    seed: int


@dataclass
class SweepConfig:
    seed: int = 1
    count: int = 20
    n_max: int = 12
    ks: tuple[int, ...] = (1, 2, 3)
    keeps: tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1))
    kinds: tuple[ProblemKind, ...] = (ProblemKind.CVC, ProblemKind.TSS, ProblemKind.VDS)
    budgets: tuple[int, ...] = (1, 2, 3)
    epsilon: Fraction | None = None
    workers: int = 1
    timings: bool = False
    settings: SolverSettings = field(default_factory=get_settings)


def build_corpus(config: SweepConfig) -> list[CorpusItem]:
    """Deterministic corpus parameters from config.seed."""
    rng = random.Random(config.seed)
    items = []
    for i in range(config.count):
        k = rng.choice(config.ks)
        items.append(
            CorpusItem(
                index=i,
                kind=config.kinds[i % len(config.kinds)],
                n=rng.randint(k + 2, max(k + 2, config.n_max)),
                k=k,
                keep=rng.choice(config.keeps),
                seed=rng.randrange(2**31),
            )
        )
    return items


def materialize(item: CorpusItem) -> tuple[WeightedInstance, TreeDecomposition]:
    graph, td = generate_partial_ktree(item.n, item.k, item.keep, item.seed)
    instance = random_weights(graph, item.kind, random.Random(item.seed + 1))
    return instance, td


def _run_cvc(
    entry: SweepEntry, instance: WeightedInstance, ntd: NiceTreeDecomposition, config: SweepConfig
) -> None:
    g, c = instance.graph, instance.weight
    opt = cvc_opt_brute(g, c, config.settings)
    entry.oracle_opt = opt
    entry.exact_opt = solve_exact(g, ntd, c, config.settings).opt
    approx = solve_cvc_approx(g, ntd, c, config.epsilon, config.settings)
    entry.approx_k_hat_min = None if approx.k_hat_min is None else str(approx.k_hat_min)
    if opt is None or approx.k_hat_min is None:
        entry.approx_within_bound = opt is None and approx.k_hat_min is None
    else:
        entry.approx_within_bound = opt <= approx.k_hat_min <= approx.sched.ratio_bound * opt


def _run_subset(
    entry: SweepEntry, instance: WeightedInstance, ntd: NiceTreeDecomposition, config: SweepConfig
) -> None:
    prob = problem_for(instance.kind, config.settings)
    oracle = tss_opt_brute if instance.kind is ProblemKind.TSS else vds_opt_brute
    opt = oracle(instance.graph, instance.weight, config.settings)
    entry.oracle_opt = opt
    ok = True
    for l in config.budgets:
        result = solve(prob, PartialInstance(instance), ntd, l)
        size = None if result.solution is None else len(result.solution)
        entry.framework[l] = size
        ok = ok and size is not None and size <= result.ratio_bound * opt
        if opt <= l:
            ok = ok and size == opt
    entry.framework_within_bound = ok


def run_item(item: CorpusItem, config: SweepConfig) -> SweepEntry:
    """Solve one corpus instance; solver errors are recorded, not raised."""
    started = time.perf_counter()
    instance, td = materialize(item)
    ntd = decompose(instance.graph, td)
    entry = SweepEntry(
        index=item.index,
        kind=item.kind.value,
        n=instance.graph.n,
        m=instance.graph.m,
        k=item.k,
        keep=str(item.keep),
        instance_hash=instance_hash(instance),
        width=ntd.width,
        height=ntd.height,
    )
    try:
        if item.kind is ProblemKind.CVC:
            _run_cvc(entry, instance, ntd, config)
        else:
            _run_subset(entry, instance, ntd, config)
    except TwApproxError as e:
        entry.errors.append(f"{type(e).__name__}: {e}")
    if config.timings:
        entry.wall_time_s = round(time.perf_counter() - started, 6)
    return entry


def run_sweep(config: SweepConfig) -> SweepReport:
    """Run the whole corpus; entries come back in corpus order."""
    started = time.perf_counter()
    corpus = build_corpus(config)
    log = logger.bind(seed=config.seed, count=len(corpus), workers=config.workers)
    log.info("Starting sweep")

    results: dict[int, SweepEntry] = {}
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            futures = {executor.submit(run_item, item, config): item.index for item in corpus}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
    else:
        for item in corpus:
            results[item.index] = run_item(item, config)
    entries = [results[i] for i in sorted(results)]

    agreements = {
        "exact_matches_oracle": sum(
            1 for e in entries if e.kind == "cvc" and not e.errors and e.exact_opt == e.oracle_opt
        ),
        "approx_within_bound": sum(1 for e in entries if e.approx_within_bound),
        "framework_within_bound": sum(1 for e in entries if e.framework_within_bound),
        "entries_with_errors": sum(1 for e in entries if e.errors),
    }
    elapsed = time.perf_counter() - started
    log.info("Sweep finished", elapsed_s=round(elapsed, 3), **agreements)
    return SweepReport(
        count=len(entries),
        entries=entries,
        agreements=agreements,
        meta=RunMeta(
            seed=config.seed,
            parameters={
                "count": config.count,
                "n_max": config.n_max,
                "ks": list(config.ks),
                "keeps": [str(k) for k in config.keeps],
                "kinds": [k.value for k in config.kinds],
                "budgets": list(config.budgets),
                "epsilon": None if config.epsilon is None else str(config.epsilon),
            },
            wall_time_s=round(elapsed, 6) if config.timings else None,
        ),
    )
