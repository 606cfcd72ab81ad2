"""Uniform model access: key rotation, bounded retries, timeouts, cancellation.

Every model call in the platform goes through LlmClient so that rate-limit
rotation and error categorization behave identically for the chat loop and
for tool-embedded calls.
"""

from __future__ import annotations

import threading
from typing import Iterator

from .. import errors
from ..clock import Clock, SystemClock
from .keypool import KeyPool
from .providers import Provider
from .types import FINISH_CANCELLED, CompletionRequest, ProviderError, TokenEvent

DEFAULT_TIMEOUT_S = 60.0
GRACE_S = 5.0  # slack allowed beyond the configured timeout for teardown


class LlmClient:
    def __init__(
        self,
        provider: Provider,
        pool: KeyPool,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        clock: Clock | None = None,
    ):
        self.provider = provider
        self.pool = pool
        self.timeout_s = timeout_s
        self._clock = clock or SystemClock()

    def complete_stream(
        self,
        req: CompletionRequest,
        cancel: threading.Event | None = None,
        timeout_s: float | None = None,
    ) -> Iterator[TokenEvent]:
        """Stream token events, rotating keys on retryable pre-stream failures.

        Each retryable error consumes one pool key (rate limits also put the
        key on cooldown), so a request touches at most len(pool) keys. Once
        deltas have been yielded the stream is never silently restarted. A
        fired cancel signal ends the stream with finish=cancelled within one
        event boundary.
        """
        timeout = timeout_s if timeout_s is not None else self.timeout_s
        deadline = self._clock.monotonic() + timeout + GRACE_S
        attempts = 0
        while True:
            if cancel is not None and cancel.is_set():
                yield TokenEvent(finish=FINISH_CANCELLED)
                return
            key = self.pool.next_key()  # raises AllKeysCooling when exhausted
            attempts += 1
            yielded = False
            try:
                inner = self.provider.stream(req, key, timeout)
                for ev in inner:
                    if cancel is not None and cancel.is_set():
                        if hasattr(inner, "close"):
                            inner.close()
                        yield TokenEvent(finish=FINISH_CANCELLED)
                        return
                    yielded = True
                    yield ev
                    if ev.finish is not None:
                        return
                return
            except ProviderError as e:
                if e.category == errors.RATE_LIMITED:
                    self.pool.mark_cooldown(key)
                retryable = e.retryable and not yielded and attempts < len(self.pool)
                if retryable and self._clock.monotonic() < deadline:
                    continue
                raise

    def complete(self, req: CompletionRequest, timeout_s: float | None = None) -> str:
        """Blocking completion with the same key-rotation semantics."""
        timeout = timeout_s if timeout_s is not None else self.timeout_s
        attempts = 0
        while True:
            key = self.pool.next_key()
            attempts += 1
            try:
                return self.provider.complete(req, key, timeout)
            except ProviderError as e:
                if e.category == errors.RATE_LIMITED:
                    self.pool.mark_cooldown(key)
                if e.retryable and attempts < len(self.pool):
                    continue
                raise
