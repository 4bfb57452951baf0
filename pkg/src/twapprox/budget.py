"""
Work budget for brute-force subset enumeration.

Every subset examined consumes one unit; exceeding the cap raises
ResourceLimitError instead of silently sampling.
"""

import threading
from dataclasses import dataclass

from twapprox.errors import ResourceLimitError


@dataclass
class BudgetStats:
    """Counters for monitoring enumeration effort."""
    checks: int = 0


class SubsetBudget:
    """
    Thread-safe counter of subset checks with a hard cap.

    Example:
        budget = SubsetBudget(cap=10**6)
        for subset in candidates:
            budget.acquire()
            ...
    """

    def __init__(self, cap: int, label: str = "subset checks"):
        if cap <= 0:
            raise ValueError("cap must be positive")
        self.cap = cap
        self.label = label
        self._lock = threading.Lock()
        self.stats = BudgetStats()

    def acquire(self, count: int = 1) -> None:
        """Consume count units, raising once the cap would be exceeded."""
        with self._lock:
            used = self.stats.checks + count
            if used > self.cap:
                raise ResourceLimitError(
                    f"Budget of {self.label} exhausted",
                    limit=self.cap,
                    observed=used,
                    advice="Lower the search budget or raise TWAPPROX_SUBSET_CHECK_CAP",
                )
            self.stats.checks = used

    @property
    def remaining(self) -> int:
        with self._lock:
            return self.cap - self.stats.checks

    def get_stats(self) -> dict[str, int]:
        return {
            "checks": self.stats.checks,
            "cap": self.cap,
            "remaining": self.remaining,
        }
