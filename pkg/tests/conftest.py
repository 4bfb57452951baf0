"""
Pytest configuration and fixtures for twapprox tests.
"""

import random

import pytest
import structlog

from twapprox.config import SolverSettings
from twapprox.generator import generate_partial_ktree, random_weights
from twapprox.graph import Graph, ProblemKind, WeightedInstance


@pytest.fixture(autouse=True)
def reset_logging():
    """Undo any structlog configuration a test (usually a CLI run) installed."""
    yield
    structlog.reset_defaults()


@pytest.fixture
def settings():
    """Default settings, independent of the environment."""
    return SolverSettings()


@pytest.fixture
def triangle():
    """K3 with every capacity 1."""
    return Graph([1, 2, 3], [(1, 2), (1, 3), (2, 3)])


@pytest.fixture
def triangle_cvc(triangle):
    return WeightedInstance(triangle, ProblemKind.CVC, {1: 1, 2: 1, 3: 1})


@pytest.fixture
def p3():
    """Path 1-2-3."""
    return Graph([1, 2, 3], [(1, 2), (2, 3)])


@pytest.fixture
def p3_infeasible(p3):
    """Path 1-2-3 where only the middle vertex may cover, and only once."""
    return WeightedInstance(p3, ProblemKind.CVC, {1: 0, 2: 1, 3: 0})


@pytest.fixture
def star():
    """K1,3 centred at 1."""
    return Graph([1, 2, 3, 4], [(1, 2), (1, 3), (1, 4)])


@pytest.fixture
def star_cvc(star):
    return WeightedInstance(star, ProblemKind.CVC, {1: 3, 2: 0, 3: 0, 4: 0})


@pytest.fixture
def k3_tss(triangle):
    """K3 with threshold 2 everywhere; OPT = 2."""
    return WeightedInstance(triangle, ProblemKind.TSS, {1: 2, 2: 2, 3: 2})


@pytest.fixture
def k3_vds(triangle):
    """K3 with threshold 1 everywhere; OPT = 1."""
    return WeightedInstance(triangle, ProblemKind.VDS, {1: 1, 2: 1, 3: 1})


def make_corpus(kind, count, seed, n_max=10, ks=(1, 2, 3), max_capacity=3):
    """(instance, td) pairs of random partial k-trees with random weights."""
    rng = random.Random(seed)
    corpus = []
    for _ in range(count):
        k = rng.choice(ks)
        n = rng.randint(k + 2, n_max)
        keep = rng.choice(["1/2", "1"])
        graph, td = generate_partial_ktree(n, k, keep, rng.randrange(2**31))
        corpus.append((random_weights(graph, kind, rng, max_capacity), td))
    return corpus


@pytest.fixture(scope="session")
def cvc_corpus():
    """Small CVC corpus with capacities in [0, 3]."""
    return make_corpus(ProblemKind.CVC, count=40, seed=11)


@pytest.fixture(scope="session")
def tss_corpus():
    return make_corpus(ProblemKind.TSS, count=30, seed=12)


@pytest.fixture(scope="session")
def vds_corpus():
    return make_corpus(ProblemKind.VDS, count=30, seed=13)


@pytest.fixture
def corpus_factory():
    """make_corpus, for tests that need their own kind or size."""
    return make_corpus


@pytest.fixture(scope="session")
def cvc_acceptance_corpus():
    """200 CVC instances with n <= 14."""
    return make_corpus(ProblemKind.CVC, count=200, seed=21, n_max=14)


@pytest.fixture(scope="session")
def tss_acceptance_corpus():
    return make_corpus(ProblemKind.TSS, count=200, seed=22, n_max=16)


@pytest.fixture(scope="session")
def vds_acceptance_corpus():
    return make_corpus(ProblemKind.VDS, count=200, seed=23, n_max=16)
