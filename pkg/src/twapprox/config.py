"""
Solver settings.

All guards and caps are read from the environment with the ``TWAPPROX_``
prefix, e.g. ``TWAPPROX_GUARD_MAX=20`` raises the brute-force oracle
limit. Explicit ``SolverSettings`` objects can be passed to every solver
that consults a guard.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverSettings(BaseSettings):
    """Guards and caps for solvers and oracles."""

    model_config = SettingsConfigDict(env_prefix="TWAPPROX_", frozen=True)

    # Brute-force optimum oracles refuse graphs above this many vertices
    guard_max: int = Field(default=18, ge=1)

    # enumerate_records refuses nodes with more DP-scope edges than this
    record_edge_guard: int = Field(default=20, ge=0)

    # Subset checks per brute-force partial solve
    subset_check_cap: int = Field(default=10**8, ge=1)

    # Distinct d-vectors per node table
    table_cap: int = Field(default=250_000, ge=1)

    # Widest decomposition the exact DP accepts
    exact_max_width: int = Field(default=8, ge=0)

    # Entries kept in the flow-test memo
    flow_memo_size: int = Field(default=65_536, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> SolverSettings:
    """Settings from the environment, read once."""
    return SolverSettings()
