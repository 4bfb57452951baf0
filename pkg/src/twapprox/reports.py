"""
JSON run reports.

Every solver and CLI command produces one pydantic model; the shared
`RunMeta` ties it to the instance (canonical text hash), the seed, the
solver parameters and the wall time. Rationals travel as "p/q" strings.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

import structlog
from pydantic import BaseModel, Field

logger = structlog.get_logger(__name__)

Status = Literal["ok", "infeasible", "no-solution"]


def fraction_text(q: Fraction | None) -> str | None:
    return None if q is None else str(q)


class RunMeta(BaseModel):
    """Provenance shared by every report."""

    instance_hash: str | None = None
    seed: int | None = None
    parameters: dict[str, Any] = Field(default_factory=dict)
    wall_time_s: float | None = None


class CvcExactReport(BaseModel):
    command: Literal["solve-cvc-exact"] = "solve-cvc-exact"
    status: Status
    opt: int | None = None
    width: int
    height: int
    table_sizes: list[int] = Field(default_factory=list)
    witness_size: int | None = None
    meta: RunMeta = Field(default_factory=RunMeta)


class CvcApproxReport(BaseModel):
    command: Literal["solve-cvc-approx"] = "solve-cvc-approx"
    status: Status
    # ceil(k_hat_min / (1 + delta_h0)^2), a certified lower bound on OPT
    opt_lower: int | None = None
    k_hat_min: str | None = None
    k_hat_min_ceil: int | None = None
    epsilon: str
    delta_h0: str
    ratio_bound: str
    width: int
    height: int
    table_sizes: list[int] = Field(default_factory=list)
    witness_size: int | None = None
    flows_run: int = 0
    meta: RunMeta = Field(default_factory=RunMeta)


class SubsetReport(BaseModel):
    command: Literal["solve-tss", "solve-vds"]
    status: Status
    solution: list[int] | None = None
    solution_size: int | None = None
    budget: int
    ratio_bound: str
    rounds: int
    bad_node_heights: list[int] = Field(default_factory=list)
    width: int
    meta: RunMeta = Field(default_factory=RunMeta)


class OracleReport(BaseModel):
    command: Literal["oracle"] = "oracle"
    kind: str
    status: Status
    opt: int | None = None
    meta: RunMeta = Field(default_factory=RunMeta)


class GenerateReport(BaseModel):
    command: Literal["gen"] = "gen"
    n: int
    k: int
    keep: str
    edges: int
    width: int
    instance_path: str | None = None
    td_path: str | None = None
    # Inline texts when no output prefix was given
    instance_text: str | None = None
    td_text: str | None = None
    meta: RunMeta = Field(default_factory=RunMeta)


class ValidationReport(BaseModel):
    command: Literal["validate-td"] = "validate-td"
    ok: bool
    width: int
    violations: list[str] = Field(default_factory=list)
    meta: RunMeta = Field(default_factory=RunMeta)


class NiceReport(BaseModel):
    command: Literal["nice-td"] = "nice-td"
    nodes: int
    width: int
    height: int
    kinds: dict[str, int] = Field(default_factory=dict)
    output_path: str | None = None
    meta: RunMeta = Field(default_factory=RunMeta)


class SweepEntry(BaseModel):
    """One corpus instance with every solver's outcome."""

    index: int
    kind: str
    n: int
    m: int
    k: int
    keep: str
    instance_hash: str
    width: int
    height: int
    oracle_opt: int | None = None
    exact_opt: int | None = None
    approx_k_hat_min: str | None = None
    approx_within_bound: bool | None = None
    framework: dict[int, int | None] = Field(default_factory=dict)
    framework_within_bound: bool | None = None
    errors: list[str] = Field(default_factory=list)
    wall_time_s: float | None = None


class SweepReport(BaseModel):
    command: Literal["sweep"] = "sweep"
    count: int
    entries: list[SweepEntry] = Field(default_factory=list)
    agreements: dict[str, int] = Field(default_factory=dict)
    meta: RunMeta = Field(default_factory=RunMeta)


Report = (
    CvcExactReport
    | CvcApproxReport
    | SubsetReport
    | OracleReport
    | GenerateReport
    | ValidationReport
    | NiceReport
    | SweepReport
)


def render(report: BaseModel) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


class ReportWriter:
    """Writes reports to disk without ever leaving a half-written file."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._log = logger.bind(directory=str(self.directory) if self.directory else None)

    def resolve(self, path: str | Path) -> Path:
        p = Path(path)
        return self.directory / p if self.directory and not p.is_absolute() else p

    def save(self, report: BaseModel, path: str | Path) -> Path:
        """Write to a temp file next to the target, then rename over it."""
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        temp_file = target.with_suffix(target.suffix + ".tmp")
        temp_file.write_text(render(report))
        temp_file.replace(target)
        self._log.debug("Saved report", path=str(target), command=getattr(report, "command", None))
        return target

    def load(self, path: str | Path, model: type[BaseModel]) -> BaseModel:
        return model.model_validate_json(self.resolve(path).read_text())
