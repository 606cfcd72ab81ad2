"""Credential rotation across a pool of provider API keys.

Multiple sessions call models in parallel; rotating keys round-robin spreads
the per-key rate limits. A key that was rate limited cools down for a
configurable interval before re-entering rotation.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .. import errors
from ..clock import Clock, SystemClock
from ..errors import PlatformError


@dataclass(frozen=True)
class KeyHandle:
    name: str
    secret: str


class AllKeysCooling(PlatformError):
    category = errors.ALL_KEYS_COOLING

    def __init__(self, earliest_available: float, soonest: KeyHandle):
        super().__init__(
            f"all keys cooling; earliest available in {earliest_available:.1f}s ({soonest.name})"
        )
        self.earliest_available = earliest_available  # seconds until the soonest key frees up
        self.soonest = soonest


class KeyPool:
    """Thread-safe round-robin pool with per-key cooldowns."""

    def __init__(self, keys, cooldown_seconds: float = 10.0, clock: Clock | None = None):
        if not keys:
            raise ValueError("key pool must not be empty")
        self._keys = [k if isinstance(k, KeyHandle) else KeyHandle(f"key{i + 1}", k) for i, k in enumerate(keys)]
        self.cooldown_seconds = cooldown_seconds
        self._clock = clock or SystemClock()
        self._cooldown_until: dict[str, float] = {}
        self._cursor = -1  # index of the key returned last
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._keys)

    def next_key(self, now: float | None = None) -> KeyHandle:
        """The next non-cooling key in round-robin order.

        Raises AllKeysCooling with a wait hint when every key is cooling.
        """
        now = self._clock.monotonic() if now is None else now
        with self._lock:
            n = len(self._keys)
            for step in range(1, n + 1):
                idx = (self._cursor + step) % n
                key = self._keys[idx]
                if self._cooldown_until.get(key.name, 0.0) <= now:
                    self._cursor = idx
                    return key
            soonest = min(self._keys, key=lambda k: self._cooldown_until.get(k.name, 0.0))
            wait = self._cooldown_until[soonest.name] - now
            raise AllKeysCooling(max(wait, 0.0), soonest)

    def mark_cooldown(self, key: KeyHandle, now: float | None = None, duration: float | None = None) -> None:
        now = self._clock.monotonic() if now is None else now
        with self._lock:
            self._cooldown_until[key.name] = now + (duration if duration is not None else self.cooldown_seconds)

    def cooling(self, key: KeyHandle, now: float | None = None) -> bool:
        now = self._clock.monotonic() if now is None else now
        with self._lock:
            return self._cooldown_until.get(key.name, 0.0) > now
