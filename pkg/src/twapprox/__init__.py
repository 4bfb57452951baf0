"""
twapprox - Treewidth Dynamic Programs and Approximation Framework

Exact and approximate solvers for Capacitated Vertex Cover over nice tree
decompositions, plus a generic approximation framework for monotone,
splittable vertex subset problems (Target Set Selection, Vector
Dominating Set).

Features:
- Exact record-set DP with witness reconstruction
- Rounded DP with flow-assisted forgetting and a certified output interval
- l-good node framework with restriction-based residual decompositions
- Brute-force oracles for verification
- Seeded sweeps and JSON reports

Quick Start:
    twapprox gen --n 10 --k 2 --keep 1 --seed 7 --out g7
    twapprox solve-cvc-exact g7.cvc --td g7.td
    twapprox solve-cvc-approx g7.cvc --td g7.td
"""

from twapprox.config import SolverSettings, get_settings
from twapprox.cvc_approx import ApproxResult, solve_cvc_approx
from twapprox.cvc_exact import ExactResult, solve_exact
from twapprox.errors import (
    ConfigurationError,
    DecompositionError,
    InputError,
    InternalError,
    ResourceLimitError,
    TwApproxError,
)
from twapprox.framework import FrameworkResult, SubsetProblem, is_l_good, solve, solve_instance
from twapprox.graph import Graph, Orientation, PartialInstance, ProblemKind, WeightedInstance
from twapprox.subset_problems import TargetSetSelection, VectorDominatingSet, problem_for
from twapprox.treedecomp import NiceTreeDecomposition, TreeDecomposition, decompose, make_nice

__version__ = "0.1.0"
__all__ = [
    # Graphs and instances
    "Graph",
    "Orientation",
    "PartialInstance",
    "ProblemKind",
    "WeightedInstance",

    # Decompositions
    "TreeDecomposition",
    "NiceTreeDecomposition",
    "decompose",
    "make_nice",

    # CVC solvers
    "solve_exact",
    "ExactResult",
    "solve_cvc_approx",
    "ApproxResult",

    # Framework
    "SubsetProblem",
    "FrameworkResult",
    "is_l_good",
    "solve",
    "solve_instance",
    "TargetSetSelection",
    "VectorDominatingSet",
    "problem_for",

    # Configuration
    "SolverSettings",
    "get_settings",

    # Errors
    "TwApproxError",
    "InputError",
    "DecompositionError",
    "ResourceLimitError",
    "ConfigurationError",
    "InternalError",
]
