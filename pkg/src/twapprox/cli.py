#!/usr/bin/env python3
"""
twapprox CLI

Treewidth solvers for capacitated vertex cover, target set selection and
vector dominating set.

Usage:
    twapprox solve-cvc-exact graph.cvc [--td graph.td]
    twapprox solve-cvc-approx graph.cvc [--epsilon 1/100]
    twapprox solve-tss graph.tss --budget 2
    twapprox solve-vds graph.vds --budget auto
    twapprox oracle graph.tss
    twapprox gen --n 10 --k 2 --keep 1 --seed 7 --out corpus/g7
    twapprox validate-td graph.cvc graph.td
    twapprox nice-td graph.cvc [--td graph.td] [--out nice.td]
    twapprox sweep --seed 1 --count 30 --workers 4

JSON reports go to stdout (and to --json FILE); logs and status lines go
to stderr. Exit codes: 0 success, 1 internal error, 2 infeasible or no
solution, 3 input error, 4 resource guard.
"""

import argparse
import logging
import random
import sys
import time
from pathlib import Path
from typing import Any, NoReturn

import structlog
from pydantic import BaseModel

from twapprox.config import SolverSettings, get_settings
from twapprox.errors import (
    ConfigurationError,
    InputError,
    InternalError,
    ResourceLimitError,
    TwApproxError,
)
from twapprox.formats import (
    format_instance,
    format_td,
    instance_hash,
    read_instance,
    read_td,
)
from twapprox.generator import generate_partial_ktree, parse_probability, random_weights
from twapprox.graph import Orientation, ProblemKind, WeightedInstance
from twapprox.reports import (
    CvcApproxReport,
    CvcExactReport,
    GenerateReport,
    NiceReport,
    OracleReport,
    ReportWriter,
    RunMeta,
    SubsetReport,
    ValidationReport,
    render,
)
from twapprox.rounding import parse_epsilon
from twapprox.treedecomp import NiceTreeDecomposition, decompose, validate

# Add color support
try:
    from colorama import Fore, Style, init
    init()
    GREEN = Fore.GREEN
    RED = Fore.RED
    YELLOW = Fore.YELLOW
    BLUE = Fore.CYAN
    RESET = Style.RESET_ALL
except ImportError:
    GREEN = RED = YELLOW = BLUE = RESET = ""

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_NO_SOLUTION = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4

logger = structlog.get_logger(__name__)


def print_success(msg: str) -> None:
    print(f"{GREEN}✓ {msg}{RESET}", file=sys.stderr)


def print_error(msg: str) -> None:
    print(f"{RED}✗ {msg}{RESET}", file=sys.stderr)


def print_warning(msg: str) -> None:
    print(f"{YELLOW}⚠ {msg}{RESET}", file=sys.stderr)


def print_info(msg: str) -> None:
    print(f"{BLUE}ℹ {msg}{RESET}", file=sys.stderr)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # sys.stderr is looked up per logger so a replaced stream is honoured
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(verbose: bool = False) -> None:
    """Route structlog to stderr; stdout carries only reports.

    Loggers are not cached, so every log call resolves ``sys.stderr`` anew.
    """
    level = logging.DEBUG if verbose else logging.INFO
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def settings_from(args: argparse.Namespace) -> SolverSettings:
    settings = get_settings()
    table_cap = getattr(args, "table_cap", None)
    if table_cap is not None:
        settings = settings.model_copy(update={"table_cap": table_cap})
    return settings


def emit(report: BaseModel, args: argparse.Namespace) -> None:
    """Print the report and save it when --json was given."""
    sys.stdout.write(render(report))
    if getattr(args, "json", None):
        path = ReportWriter().save(report, args.json)
        print_info(f"Report saved to {path}")


def load(args: argparse.Namespace, expected: ProblemKind | None = None) -> WeightedInstance:
    instance = read_instance(args.instance)
    if expected is not None and instance.kind is not expected:
        raise InputError(
            f"Expected a '{expected.value}' instance",
            detail=f"{args.instance} is '{instance.kind.value}'",
        )
    return instance


def nice_for(instance: WeightedInstance, args: argparse.Namespace) -> NiceTreeDecomposition:
    td = read_td(args.td) if getattr(args, "td", None) else None
    return decompose(instance.graph, td)


def meta_for(
    instance: WeightedInstance | None,
    started: float,
    seed: int | None = None,
    **parameters: Any,
) -> RunMeta:
    return RunMeta(
        instance_hash=None if instance is None else instance_hash(instance),
        seed=seed,
        parameters=parameters,
        wall_time_s=round(time.perf_counter() - started, 6),
    )


def write_witness(path: str, witness: Orientation) -> None:
    """One 'u v sink' line per edge, ascending."""
    lines = [f"{u} {v} {s}" for (u, v), s in sorted(witness.items())]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
    print_info(f"Witness written to {path}")


def cmd_solve_cvc_exact(args: argparse.Namespace) -> int:
    """Exact minimum capacitated vertex cover."""
    from twapprox.cvc_exact import solve_exact

    started = time.perf_counter()
    instance = load(args, ProblemKind.CVC)
    ntd = nice_for(instance, args)
    result = solve_exact(instance.graph, ntd, instance.weight, settings_from(args))

    report = CvcExactReport(
        status="ok" if result.feasible else "infeasible",
        opt=result.opt,
        width=result.width,
        height=result.height,
        table_sizes=result.table_sizes,
        witness_size=None if result.witness is None else len(result.witness.cover()),
        meta=meta_for(instance, started, td=args.td, table_cap=args.table_cap),
    )
    emit(report, args)
    if not result.feasible:
        print_warning("Instance is infeasible")
        return EXIT_NO_SOLUTION
    if args.emit_witness and result.witness is not None:
        write_witness(args.emit_witness, result.witness)
    print_success(f"Optimum: {result.opt}")
    return EXIT_OK


def cmd_solve_cvc_approx(args: argparse.Namespace) -> int:
    """Approximate minimum capacitated vertex cover."""
    from twapprox.cvc_approx import solve_cvc_approx

    started = time.perf_counter()
    instance = load(args, ProblemKind.CVC)
    epsilon = parse_epsilon(args.epsilon) if args.epsilon else None
    ntd = nice_for(instance, args)
    result = solve_cvc_approx(
        instance.graph, ntd, instance.weight, epsilon, settings_from(args)
    )

    report = CvcApproxReport(
        status="ok" if result.feasible else "infeasible",
        opt_lower=result.opt_lower,
        k_hat_min=None if result.k_hat_min is None else str(result.k_hat_min),
        k_hat_min_ceil=result.k_hat_min_ceil,
        epsilon=str(result.sched.eps),
        delta_h0=str(result.sched.delta_h0),
        ratio_bound=str(result.sched.ratio_bound),
        width=result.width,
        height=result.height,
        table_sizes=result.table_sizes,
        witness_size=result.witness_size,
        flows_run=result.flows_run,
        meta=meta_for(
            instance, started, td=args.td, epsilon=args.epsilon, table_cap=args.table_cap
        ),
    )
    emit(report, args)
    if not result.feasible:
        print_warning("Instance is infeasible")
        return EXIT_NO_SOLUTION
    if args.emit_witness and result.witness is not None:
        write_witness(args.emit_witness, result.witness)
    print_success(f"k_hat_min = {result.k_hat_min} (cover of size {result.witness_size})")
    return EXIT_OK


def parse_budget(text: str) -> int | None:
    """Integer budget, or None for 'auto'."""
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise InputError("Budget must be a non-negative integer or 'auto'", detail=text) from None
    if value < 0:
        raise InputError("Budget must be a non-negative integer or 'auto'", detail=text)
    return value


def _solve_subset(args: argparse.Namespace, kind: ProblemKind) -> int:
    from twapprox.framework import solve
    from twapprox.graph import PartialInstance
    from twapprox.subset_problems import default_vds_budget, problem_for

    started = time.perf_counter()
    instance = load(args, kind)
    ntd = nice_for(instance, args)
    budget = parse_budget(args.budget)
    if budget is None:
        if kind is not ProblemKind.VDS:
            raise InputError("--budget auto is only defined for solve-vds")
        budget = default_vds_budget(ntd.width, instance.graph.n)
        print_info(f"Using budget l = {budget}")

    result = solve(
        problem_for(kind, settings_from(args)),
        PartialInstance(instance),
        ntd,
        budget,
        workers=args.workers,
    )
    report = SubsetReport(
        command=f"solve-{kind.value}",  # type: ignore[arg-type]
        status="ok" if result.found else "no-solution",
        solution=None if result.solution is None else sorted(result.solution),
        solution_size=None if result.solution is None else len(result.solution),
        budget=budget,
        ratio_bound=str(result.ratio_bound),
        rounds=result.rounds,
        bad_node_heights=result.bad_node_heights,
        width=result.width,
        meta=meta_for(instance, started, td=args.td, budget=args.budget),
    )
    emit(report, args)
    if not result.found:
        print_warning("No solution")
        return EXIT_NO_SOLUTION
    print_success(f"Solution of size {report.solution_size} in {result.rounds} round(s)")
    return EXIT_OK


def cmd_solve_tss(args: argparse.Namespace) -> int:
    """Target set selection through the framework."""
    return _solve_subset(args, ProblemKind.TSS)


def cmd_solve_vds(args: argparse.Namespace) -> int:
    """Vector dominating set through the framework."""
    return _solve_subset(args, ProblemKind.VDS)


def cmd_oracle(args: argparse.Namespace) -> int:
    """Brute-force optimum of any instance kind."""
    from twapprox.oracles import cvc_opt_brute, tss_opt_brute, vds_opt_brute

    started = time.perf_counter()
    instance = load(args)
    g, w = instance.graph, instance.weight
    opt: int | None
    if instance.kind is ProblemKind.CVC:
        opt = cvc_opt_brute(g, w)
    elif instance.kind is ProblemKind.TSS:
        opt = tss_opt_brute(g, w)
    else:
        opt = vds_opt_brute(g, w)
    report = OracleReport(
        kind=instance.kind.value,
        status="ok" if opt is not None else "infeasible",
        opt=opt,
        meta=meta_for(instance, started),
    )
    emit(report, args)
    if opt is None:
        print_warning("Infeasible")
        return EXIT_NO_SOLUTION
    print_success(f"Optimum: {opt}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    """Random partial k-tree with weights and a matching decomposition."""
    started = time.perf_counter()
    keep = parse_probability(args.keep)
    kind = ProblemKind(args.kind)
    graph, td = generate_partial_ktree(args.n, args.k, keep, args.seed)
    instance = random_weights(graph, kind, random.Random(args.seed + 1))
    instance_text = format_instance(instance)
    td_text = format_td(td, graph.n)

    instance_path = td_path = None
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        instance_path = prefix.with_suffix(f".{kind.value}")
        td_path = prefix.with_suffix(".td")
        instance_path.write_text(instance_text)
        td_path.write_text(td_text)

    report = GenerateReport(
        n=graph.n,
        k=args.k,
        keep=str(keep),
        edges=graph.m,
        width=td.width,
        instance_path=None if instance_path is None else str(instance_path),
        td_path=None if td_path is None else str(td_path),
        instance_text=None if args.out else instance_text,
        td_text=None if args.out else td_text,
        meta=meta_for(instance, started, seed=args.seed, n=args.n, k=args.k, keep=str(keep)),
    )
    emit(report, args)
    print_success(f"Generated {graph.n} vertices, {graph.m} edges")
    return EXIT_OK


def cmd_validate_td(args: argparse.Namespace) -> int:
    """Check a decomposition against its graph."""
    started = time.perf_counter()
    instance = load(args)
    td = read_td(args.td)
    violations = validate(instance.graph, td)
    report = ValidationReport(
        ok=not violations,
        width=td.width,
        violations=[str(v) for v in violations],
        meta=meta_for(instance, started),
    )
    emit(report, args)
    if violations:
        for v in violations[:10]:
            print_error(str(v))
        return EXIT_INPUT
    print_success(f"Valid decomposition of width {td.width}")
    return EXIT_OK


def cmd_nice_td(args: argparse.Namespace) -> int:
    """Nice tree decomposition, from --td or min-fill."""
    started = time.perf_counter()
    instance = load(args)
    ntd = nice_for(instance, args)
    stats = ntd.stats()
    if args.out:
        Path(args.out).write_text(format_td(ntd.to_tree_decomposition(), instance.graph.n))
    report = NiceReport(
        nodes=stats["nodes"],
        width=stats["width"],
        height=stats["height"],
        kinds={k: v for k, v in stats.items() if k not in ("nodes", "width", "height")},
        output_path=args.out,
        meta=meta_for(instance, started, td=args.td),
    )
    emit(report, args)
    print_success(f"{stats['nodes']} nodes, width {stats['width']}, height {stats['height']}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Seeded corpus run of every solver against the oracles."""
    from twapprox.sweep import SweepConfig, run_sweep

    config = SweepConfig(
        seed=args.seed,
        count=args.count,
        n_max=args.n_max,
        ks=tuple(args.ks),
        keeps=tuple(parse_probability(k) for k in args.keeps),
        kinds=tuple(ProblemKind(k) for k in args.kinds),
        budgets=tuple(args.budgets),
        epsilon=parse_epsilon(args.epsilon) if args.epsilon else None,
        workers=args.workers,
        timings=args.timings,
        settings=settings_from(args),
    )
    report = run_sweep(config)
    emit(report, args)
    errors = report.agreements.get("entries_with_errors", 0)
    if errors:
        print_warning(f"{errors} instance(s) hit a guard or error")
    print_success(f"Swept {report.count} instances")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="twapprox",
        description="Treewidth-based exact and approximate solvers",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  twapprox gen --n 10 --k 2 --keep 1 --seed 7 --out g7
  twapprox solve-cvc-exact g7.cvc --td g7.td
  twapprox solve-cvc-approx g7.cvc --epsilon 1/50
  twapprox sweep --seed 1 --count 30
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    def with_json(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--json", metavar="FILE", help="Also save the report to FILE")
        return p

    def instance_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = with_json(subparsers.add_parser(name, help=help_text))
        p.add_argument("instance", help="Instance file")
        return p

    for name, help_text in (
        ("solve-cvc-exact", "Exact CVC by the record-set DP"),
        ("solve-cvc-approx", "Approximate CVC by the rounded DP"),
    ):
        p = instance_command(name, help_text)
        p.add_argument("--td", help="Tree decomposition file (default: min-fill)")
        p.add_argument("--table-cap", type=int, help="Max distinct vectors per node table")
        p.add_argument("--emit-witness", metavar="FILE", help="Write the cover orientation")
        if name == "solve-cvc-approx":
            p.add_argument("--epsilon", help="Rational rounding parameter, e.g. 1/100")

    for name, help_text in (
        ("solve-tss", "Target set selection via the framework"),
        ("solve-vds", "Vector dominating set via the framework"),
    ):
        p = instance_command(name, help_text)
        p.add_argument("--td", help="Tree decomposition file (default: min-fill)")
        p.add_argument("--budget", required=True, help="Search budget l (int, or 'auto' for VDS)")
        p.add_argument("--workers", type=int, default=None, help="Threads for node tests")

    instance_command("oracle", "Brute-force optimum")

    p = with_json(subparsers.add_parser("gen", help="Generate a partial k-tree instance"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--keep", default="1", help="Edge keep probability, e.g. 1/2")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--kind", choices=[k.value for k in ProblemKind], default="cvc")
    p.add_argument("--out", metavar="PREFIX", help="Write PREFIX.<kind> and PREFIX.td")

    p = instance_command("validate-td", "Validate a tree decomposition")
    p.add_argument("td", help="Tree decomposition file")

    p = instance_command("nice-td", "Build a nice tree decomposition")
    p.add_argument("--td", help="Tree decomposition file (default: min-fill)")
    p.add_argument("--out", metavar="FILE", help="Write the nice decomposition")

    p = with_json(subparsers.add_parser("sweep", help="Seeded corpus run against the oracles"))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--ks", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--keeps", nargs="+", default=["1/2", "1"])
    p.add_argument("--kinds", nargs="+", choices=[k.value for k in ProblemKind],
                   default=[k.value for k in ProblemKind])
    p.add_argument("--budgets", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--epsilon", help="Override epsilon for the approximate CVC solver")
    p.add_argument("--table-cap", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="Record wall times (not reproducible)")

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT

    commands = {
        "solve-cvc-exact": cmd_solve_cvc_exact,
        "solve-cvc-approx": cmd_solve_cvc_approx,
        "solve-tss": cmd_solve_tss,
        "solve-vds": cmd_solve_vds,
        "oracle": cmd_oracle,
        "gen": cmd_gen,
        "validate-td": cmd_validate_td,
        "nice-td": cmd_nice_td,
        "sweep": cmd_sweep,
    }

    try:
        return commands[args.command](args)
    except ResourceLimitError as e:
        print_error(str(e))
        return EXIT_RESOURCE
    except (InputError, ConfigurationError) as e:
        print_error(str(e))
        return EXIT_INPUT
    except OSError as e:
        print_error(f"Cannot access file: {e}")
        return EXIT_INPUT
    except InternalError as e:
        print_error(f"Internal error: {e}")
        logger.exception("Internal error", command=args.command)
        return EXIT_INTERNAL
    except TwApproxError as e:
        print_error(str(e))
        return EXIT_INTERNAL
    except Exception as e:
        print_error(f"Unexpected error: {type(e).__name__}: {e}")
        logger.exception("Unexpected error", command=args.command)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
