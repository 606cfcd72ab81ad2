"""Model providers: the remote HTTP wire client and the scripted test double."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import httpx

from .. import errors
from .keypool import KeyHandle
from .types import (
    FINISH_CONTENT_FILTER,
    FINISH_LENGTH,
    FINISH_STOP,
    CompletionRequest,
    ProviderError,
    ScriptMismatch,
    TokenEvent,
)


class Provider:
    """One attempt against one credential; retry policy lives in the client."""

    def stream(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> Iterator[TokenEvent]:
        raise NotImplementedError

    def complete(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> str:
        raise NotImplementedError


# --- scripted provider ------------------------------------------------------


@dataclass
class ScriptedTurn:
    """One canned completion.

    require: substrings that must appear in the flattened prompt (loud
    mismatch otherwise). reject_keys: key names answered with a rate-limit
    instead of consuming this turn. error: categorized failure raised after
    ``error_after`` events.
    """

    reply: str = ""
    chunk_size: int = 3
    require: tuple[str, ...] = ()
    finish: str = FINISH_STOP
    reject_keys: frozenset[str] = frozenset()
    error: str | None = None
    error_after: int = 0
    latency_s: float = 0.0

    @classmethod
    def from_dict(cls, d: dict) -> "ScriptedTurn":
        return cls(
            reply=d.get("reply", ""),
            chunk_size=int(d.get("chunk_size", 3)),
            require=tuple(d.get("require", ())),
            finish=d.get("finish", FINISH_STOP),
            reject_keys=frozenset(d.get("reject_keys", ())),
            error=d.get("error"),
            error_after=int(d.get("error_after", 0)),
            latency_s=float(d.get("latency_s", 0.0)),
        )


class ScriptedProvider(Provider):
    """Deterministic playback keyed by (profile kind, turn index).

    Each profile owns an ordered turn list consumed one call at a time;
    substring guards assert the request is the one the fixture scripted.
    """

    def __init__(self, scripts: dict[str, list[ScriptedTurn]] | list[ScriptedTurn]):
        if isinstance(scripts, list):
            scripts = {"": scripts}
        self._scripts = scripts
        self._cursors = {profile: 0 for profile in scripts}
        self.calls: list[CompletionRequest] = []  # consumed turns, for test inspection
        self.attempted_keys: list[str] = []  # every key tried, including rejected ones

    @classmethod
    def from_dir(cls, path: str | Path) -> "ScriptedProvider":
        """Load {profile}.json files, each {"turns": [...]}, from a fixture dir."""
        scripts: dict[str, list[ScriptedTurn]] = {}
        for f in sorted(Path(path).glob("*.json")):
            doc = json.loads(f.read_text())
            scripts[f.stem] = [ScriptedTurn.from_dict(t) for t in doc["turns"]]
        if not scripts:
            raise ScriptMismatch(f"no scripted fixtures in {path}")
        return cls(scripts)

    def _take(self, req: CompletionRequest, key: KeyHandle) -> ScriptedTurn:
        profile = req.profile if req.profile in self._scripts else ""
        if profile not in self._scripts:
            raise ScriptMismatch(f"no script for profile {req.profile!r}")
        turns = self._scripts[profile]
        cursor = self._cursors[profile]
        if cursor >= len(turns):
            raise ScriptMismatch(f"script for {profile or 'default'} exhausted at turn {cursor}")
        turn = turns[cursor]
        self.attempted_keys.append(key.name)
        if key.name in turn.reject_keys:
            # Simulated per-key rate limit; the turn stays pending for the next key.
            raise ProviderError(f"scripted rate limit for {key.name}", category=errors.RATE_LIMITED)
        prompt = req.prompt_text()
        for needle in turn.require:
            if needle not in prompt:
                raise ScriptMismatch(
                    f"turn {cursor} for {profile or 'default'} expected {needle!r} in prompt; "
                    f"got:\n{prompt[:2000]}"
                )
        self._cursors[profile] = cursor + 1
        self.calls.append(req)
        return turn

    def stream(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> Iterator[TokenEvent]:
        turn = self._take(req, key)
        emitted = 0
        if turn.error is not None and turn.error_after == 0:
            raise ProviderError(f"scripted {turn.error}", category=turn.error)
        size = max(1, turn.chunk_size)
        for i in range(0, len(turn.reply), size):
            if turn.latency_s:
                time.sleep(turn.latency_s)
            yield TokenEvent(delta=turn.reply[i : i + size])
            emitted += 1
            if turn.error is not None and emitted >= turn.error_after:
                raise ProviderError(f"scripted {turn.error}", category=turn.error)
        yield TokenEvent(finish=turn.finish)

    def complete(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> str:
        turn = self._take(req, key)
        if turn.error is not None:
            raise ProviderError(f"scripted {turn.error}", category=turn.error)
        return turn.reply


# --- remote HTTP provider ----------------------------------------------------

_STATUS_CATEGORIES = {
    401: errors.AUTH_FAILED,
    403: errors.AUTH_FAILED,
    408: errors.TIMEOUT,
    429: errors.RATE_LIMITED,
}

_FINISH_MAP = {
    "stop": FINISH_STOP,
    "length": FINISH_LENGTH,
    "content_filter": FINISH_CONTENT_FILTER,
}


class HttpProvider(Provider):
    """Client for the de-facto JSON chat-completions wire contract.

    Streaming uses incremental server-sent chunks (`data: {...}` lines ended
    by `data: [DONE]`); the base URL is configurable so any compatible remote
    or local server works.
    """

    def __init__(self, base_url: str, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client()

    def _body(self, req: CompletionRequest, stream: bool) -> dict:
        body = {
            "model": req.model_id,
            "messages": [{"role": m.role, "content": m.text} for m in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
            "stream": stream,
        }
        if req.stop_sequences:
            body["stop"] = list(req.stop_sequences)
        return body

    def _raise_for_status(self, status: int, body: str) -> None:
        if status == 200:
            return
        category = _STATUS_CATEGORIES.get(status, errors.SERVER_ERROR)
        raise ProviderError(f"provider returned {status}: {body[:300]}", category=category)

    def stream(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> Iterator[TokenEvent]:
        headers = {"Authorization": f"Bearer {key.secret}"}
        saw_finish = False
        try:
            with self._client.stream(
                "POST",
                f"{self.base_url}/chat/completions",
                json=self._body(req, stream=True),
                headers=headers,
                timeout=timeout,
            ) as resp:
                if resp.status_code != 200:
                    self._raise_for_status(resp.status_code, resp.read().decode("utf-8", "replace"))
                for line in resp.iter_lines():
                    if not line.startswith("data:"):
                        continue
                    data = line[len("data:") :].strip()
                    if data == "[DONE]":
                        break
                    try:
                        doc = json.loads(data)
                        choice = doc["choices"][0]
                    except (json.JSONDecodeError, KeyError, IndexError) as e:
                        raise ProviderError(
                            f"undecodable stream chunk: {data[:200]}", category=errors.MALFORMED_RESPONSE
                        ) from e
                    delta = (choice.get("delta") or {}).get("content") or ""
                    finish = choice.get("finish_reason")
                    if delta:
                        yield TokenEvent(delta=delta)
                    if finish:
                        saw_finish = True
                        yield TokenEvent(finish=_FINISH_MAP.get(finish, FINISH_STOP))
                        break
        except httpx.TimeoutException as e:
            raise ProviderError(f"remote call timed out after {timeout}s", category=errors.TIMEOUT) from e
        except httpx.HTTPError as e:
            raise ProviderError(f"connection failed: {e}", category=errors.SERVER_ERROR) from e
        if not saw_finish:
            yield TokenEvent(finish=FINISH_STOP)

    def complete(self, req: CompletionRequest, key: KeyHandle, timeout: float) -> str:
        headers = {"Authorization": f"Bearer {key.secret}"}
        try:
            resp = self._client.post(
                f"{self.base_url}/chat/completions",
                json=self._body(req, stream=False),
                headers=headers,
                timeout=timeout,
            )
        except httpx.TimeoutException as e:
            raise ProviderError(f"remote call timed out after {timeout}s", category=errors.TIMEOUT) from e
        except httpx.HTTPError as e:
            raise ProviderError(f"connection failed: {e}", category=errors.SERVER_ERROR) from e
        self._raise_for_status(resp.status_code, resp.text)
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError) as e:
            raise ProviderError(
                f"undecodable completion body: {resp.text[:200]}", category=errors.MALFORMED_RESPONSE
            ) from e
