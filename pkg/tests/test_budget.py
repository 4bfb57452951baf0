"""
Tests for the subset-check budget.
"""

import pytest

from twapprox.budget import SubsetBudget
from twapprox.errors import ResourceLimitError


class TestSubsetBudget:
    """Tests for SubsetBudget."""

    def test_acquire_within_cap(self):
        """Test units are counted."""
        budget = SubsetBudget(cap=5)
        budget.acquire()
        budget.acquire(3)
        assert budget.remaining == 1
        assert budget.get_stats() == {"checks": 4, "cap": 5, "remaining": 1}

    def test_exhaustion_raises(self):
        """Test exceeding the cap raises with limit and observed values."""
        budget = SubsetBudget(cap=2, label="test checks")
        budget.acquire(2)
        with pytest.raises(ResourceLimitError) as exc_info:
            budget.acquire()
        assert exc_info.value.limit == 2
        assert exc_info.value.observed == 3
        assert "test checks" in str(exc_info.value)
        assert budget.remaining == 0

    def test_invalid_cap(self):
        """Test a non-positive cap is rejected."""
        with pytest.raises(ValueError):
            SubsetBudget(cap=0)
