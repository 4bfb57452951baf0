"""
Bounded LRU memo for feasibility tests.

The approximate DP re-tests identical (node, target vector) pairs across
branch choices; results are pure, so a bounded memo replaces recomputation
and least-recently-used entries are evicted when full.
"""

import threading
from collections import OrderedDict
from collections.abc import Callable, Hashable
from typing import Any, Generic, TypeVar

K = TypeVar("K", bound=Hashable)
V = TypeVar("V")


class BoundedLRUCache(Generic[K, V]):
    """
    Thread-safe LRU cache with a size limit and hit statistics.

    Example:
        memo = BoundedLRUCache[tuple[int, tuple[int, ...]], bool](max_size=65536)
        ok = memo.get_or_compute((node_id, target), lambda: run_flow(...))
    """

    def __init__(self, max_size: int = 65_536):
        if max_size <= 0:
            raise ValueError("max_size must be positive")
        self.max_size = max_size
        self._cache: OrderedDict[K, V] = OrderedDict()
        self._lock = threading.Lock()

        self._hits = 0
        self._misses = 0
        self._evictions = 0

    def lookup(self, key: K) -> tuple[bool, V | None]:
        """(found, value); found distinguishes a stored falsy value from a miss."""
        with self._lock:
            if key not in self._cache:
                self._misses += 1
                return False, None
            self._cache.move_to_end(key)
            self._hits += 1
            return True, self._cache[key]

    def set(self, key: K, value: V) -> None:
        with self._lock:
            if key in self._cache:
                del self._cache[key]
            while len(self._cache) >= self.max_size:
                self._cache.popitem(last=False)
                self._evictions += 1
            self._cache[key] = value

    def get_or_compute(self, key: K, compute: Callable[[], V]) -> V:
        """
        Cached value for key, computing and storing it on a miss.

        Inserts are idempotent, so two threads racing on the same key
        store the same result.
        """
        found, value = self.lookup(key)
        if found:
            return value  # type: ignore[return-value]
        value = compute()
        self.set(key, value)
        return value

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def __contains__(self, key: object) -> bool:
        with self._lock:
            return key in self._cache

    def __len__(self) -> int:
        return len(self._cache)

    def get_stats(self) -> dict[str, Any]:
        total = self._hits + self._misses
        hit_rate = self._hits / total if total > 0 else 0.0
        return {
            "size": len(self._cache),
            "max_size": self.max_size,
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": round(hit_rate, 4),
            "evictions": self._evictions,
        }
