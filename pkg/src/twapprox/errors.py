"""
Exception hierarchy for twapprox.

Infeasible instances and "no solution" outcomes are ordinary results;
exceptions are reserved for bad input, exhausted guards, bad
configuration and broken invariants.
"""

from typing import Any


class TwApproxError(Exception):
    """Base exception for all twapprox errors."""

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.detail = detail

    def __str__(self) -> str:
        base = super().__str__()
        if self.detail is not None:
            return f"{base} ({self.detail})"
        return base


class InputError(TwApproxError):
    """Raised on malformed input: files, vertex ids, parameters."""
    pass


class InstanceFormatError(InputError):
    """Raised when an instance file cannot be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message, detail=f"line {line_number}" if line_number else None)
        self.line_number = line_number


class DecompositionFormatError(InstanceFormatError):
    """Raised when a tree decomposition file cannot be parsed."""
    pass


class DecompositionError(InputError):
    """Raised when a tree decomposition does not decompose its graph."""

    def __init__(self, message: str, violations: list[Any] | None = None):
        self.violations = list(violations or [])
        summary = "; ".join(str(v) for v in self.violations[:3]) or None
        super().__init__(message, detail=summary)


class ResourceLimitError(TwApproxError):
    """Raised when a guard or cap is exceeded."""

    def __init__(self, message: str, limit: int, observed: int, advice: str | None = None):
        super().__init__(message, detail=f"limit={limit}, observed={observed}")
        self.limit = limit
        self.observed = observed
        self.advice = advice

    def __str__(self) -> str:
        base = super().__str__()
        if self.advice:
            return f"{base}. {self.advice}"
        return base


class ConfigurationError(TwApproxError):
    """Raised when solver parameters are inconsistent."""
    pass


class InternalError(TwApproxError):
    """Raised when a guaranteed invariant does not hold."""
    pass
