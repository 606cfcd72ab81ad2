"""Injectable time source so prompts, cooldowns, and fixtures stay deterministic."""

from __future__ import annotations

import time
from datetime import datetime, timedelta, timezone


class Clock:
    def now(self) -> datetime:
        raise NotImplementedError

    def monotonic(self) -> float:
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def monotonic(self) -> float:
        return time.monotonic()


class FixedClock(Clock):
    """Frozen wall time with a manually advanced monotonic counter."""

    def __init__(self, at: datetime | str = "2023-09-30T12:00:00+00:00"):
        self._at = datetime.fromisoformat(at) if isinstance(at, str) else at
        self._mono = 0.0

    def now(self) -> datetime:
        return self._at

    def monotonic(self) -> float:
        return self._mono

    def advance(self, seconds: float) -> None:
        self._mono += seconds
        self._at = self._at + timedelta(seconds=seconds)
