"""
Tests for the bounded LRU memo.
"""

from concurrent.futures import ThreadPoolExecutor

import pytest

from twapprox.cache import BoundedLRUCache


class TestBoundedLRUCache:
    """Tests for BoundedLRUCache."""

    def test_falsy_values_are_hits(self):
        """Test a stored False is distinguished from a miss."""
        cache: BoundedLRUCache[str, bool] = BoundedLRUCache(max_size=4)
        assert cache.lookup("a") == (False, None)
        cache.set("a", False)
        assert cache.lookup("a") == (True, False)

    def test_eviction_order(self):
        """Test the least recently used entry is evicted first."""
        cache: BoundedLRUCache[str, int] = BoundedLRUCache(max_size=2)
        cache.set("a", 1)
        cache.set("b", 2)
        cache.lookup("a")
        cache.set("c", 3)
        assert "a" in cache
        assert "b" not in cache
        assert cache.get_stats()["evictions"] == 1

    def test_get_or_compute_once(self):
        """Test compute runs only on a miss."""
        cache: BoundedLRUCache[int, int] = BoundedLRUCache()
        calls = []

        def compute():
            calls.append(1)
            return 42

        assert cache.get_or_compute(1, compute) == 42
        assert cache.get_or_compute(1, compute) == 42
        assert len(calls) == 1
        stats = cache.get_stats()
        assert stats["hits"] == 1
        assert stats["misses"] == 1
        assert stats["hit_rate"] == 0.5

    def test_clear(self):
        """Test clear empties the cache."""
        cache: BoundedLRUCache[int, int] = BoundedLRUCache()
        cache.set(1, 1)
        cache.clear()
        assert len(cache) == 0

    def test_invalid_size(self):
        """Test a non-positive size is rejected."""
        with pytest.raises(ValueError):
            BoundedLRUCache(max_size=0)

    def test_concurrent_inserts(self):
        """Test concurrent writers never exceed the size limit."""
        cache: BoundedLRUCache[int, int] = BoundedLRUCache(max_size=16)
        with ThreadPoolExecutor(max_workers=4) as pool:
            list(pool.map(lambda i: cache.get_or_compute(i % 32, lambda: i % 32), range(400)))
        assert len(cache) <= 16
