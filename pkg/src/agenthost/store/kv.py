"""Key-value tier for global variables: atomic per-key operations with TTL.

The in-process reference implementation serves tests and single-node runs;
a networked cache backend can be swapped in behind the same four methods.
"""

from __future__ import annotations

import threading

from ..clock import Clock, SystemClock


class KVStore:
    def get(self, key: str):
        raise NotImplementedError

    def set(self, key: str, value) -> None:
        raise NotImplementedError

    def delete(self, key: str) -> None:
        raise NotImplementedError

    def expire(self, key: str, ttl_s: float) -> None:
        raise NotImplementedError


class InMemoryKVStore(KVStore):
    def __init__(self, clock: Clock | None = None):
        self._clock = clock or SystemClock()
        self._data: dict[str, object] = {}
        self._expiry: dict[str, float] = {}
        self._lock = threading.Lock()

    def _expired(self, key: str) -> bool:
        deadline = self._expiry.get(key)
        return deadline is not None and self._clock.monotonic() >= deadline

    def get(self, key: str):
        with self._lock:
            if self._expired(key):
                self._data.pop(key, None)
                self._expiry.pop(key, None)
            return self._data.get(key)

    def set(self, key: str, value) -> None:
        with self._lock:
            self._data[key] = value
            self._expiry.pop(key, None)

    def delete(self, key: str) -> None:
        with self._lock:
            self._data.pop(key, None)
            self._expiry.pop(key, None)

    def expire(self, key: str, ttl_s: float) -> None:
        with self._lock:
            if key in self._data:
                self._expiry[key] = self._clock.monotonic() + ttl_s
