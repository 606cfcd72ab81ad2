"""Platform wiring: configuration, shared components, turn orchestration."""

from __future__ import annotations

import json
import logging
import queue
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .. import errors
from ..agents import AgentLoop, ErrorEvent, ObservationEvent, FinalAnswerEvent, load_profile
from ..agents.types import ToolContext
from ..clock import Clock, FixedClock, SystemClock
from ..datamodel import ApproxCounter, Kind, render_frontend
from ..executors import ApiPluginExecutor, FixtureSearchClient, HttpSearchClient, SandboxLimits, data_tools
from ..llm import HttpProvider, KeyPool, LlmClient, ScriptedProvider
from ..parsing import (
    ActionEnd,
    ActionInputDelta,
    ActionName,
    ActionStart,
    ParseWarning,
    TextDelta,
    ThoughtDelta,
)
from ..store import FileDocumentStore, InMemoryDocumentStore, InMemoryKVStore, SessionManager, TOOLS_AUTO, persist_round
from ..tools import HashingEmbedder, ToolRegistry, auto_select, generate_catalog, load_catalog_dir
from ..web import SimulatorDriver, WebotExecutor, WebStepEvent
from . import frames as fr

log = logging.getLogger(__name__)

# chat-body block kinds rendered standalone, beyond the observation card
RICH_BLOCK_KINDS = {Kind.TABLE, Kind.IMAGE, Kind.CHART_SPEC, Kind.CARD}


@dataclass
class AppConfig:
    model_id: str = "default"
    base_url: str = ""
    keys: list[str] = field(default_factory=lambda: ["dev-key"])
    timeout_s: float = 60.0
    cooldown_s: float = 10.0
    chars_per_token: int = 4
    token_budget: int = 3000
    catalog_dir: str = ""
    scripted_dir: str = ""
    workspace_root: str = "var/workspaces"
    docs_dir: str = ""
    upload_cap: int = 32 * 1024 * 1024
    auto_min_score: float = 0.1
    web_site_dir: str = ""
    web_start_url: str = ""
    web_step_cap: int = 20
    fixed_clock: str = ""  # ISO timestamp pins the clock (offline golden mode)
    sandbox_wall_clock_s: float = 10.0
    sandbox_memory_bytes: int = 512 * 1024 * 1024
    sandbox_output_cap: int = 64 * 1024
    synthetic_catalog: int = 0  # generate N synthetic plugins (tests/demo)
    dataset_search_url: str = ""
    dataset_fixture_cards: list = field(default_factory=list)


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".toml":
        import tomli

        doc = tomli.loads(raw.decode("utf-8"))
    else:
        doc = json.loads(raw)
    known = {f.name for f in AppConfig.__dataclass_fields__.values()}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return AppConfig(**doc)


class Platform:
    """All shared components behind the HTTP surface."""

    def __init__(self, config: AppConfig, provider=None, clock: Clock | None = None):
        self.config = config
        if clock is not None:
            self.clock = clock
        elif config.fixed_clock:
            self.clock = FixedClock(config.fixed_clock)
        else:
            self.clock = SystemClock()

        if provider is not None:
            self.provider = provider
        elif config.scripted_dir:
            self.provider = ScriptedProvider.from_dir(config.scripted_dir)
        elif config.base_url:
            self.provider = HttpProvider(config.base_url)
        else:
            raise ValueError("config needs base_url, scripted_dir, or an injected provider")
        self.pool = KeyPool(config.keys, cooldown_seconds=config.cooldown_s, clock=self.clock)
        self.llm = LlmClient(self.provider, self.pool, timeout_s=config.timeout_s, clock=self.clock)

        self.counter = ApproxCounter(config.chars_per_token)
        self.loop = AgentLoop(self.llm, self.counter, token_budget=config.token_budget, clock=self.clock)
        self.sessions = SessionManager(config.workspace_root, clock=self.clock)
        self.docs = FileDocumentStore(config.docs_dir) if config.docs_dir else InMemoryDocumentStore()
        self.kv = InMemoryKVStore(clock=self.clock)
        self.embedder = HashingEmbedder()
        self.registry = ToolRegistry()
        self.reload_catalog()

        if config.dataset_search_url:
            self.search_client = HttpSearchClient(config.dataset_search_url)
        else:
            self.search_client = FixtureSearchClient(list(config.dataset_fixture_cards))
        self.sandbox_limits = SandboxLimits(
            wall_clock_s=config.sandbox_wall_clock_s,
            memory_bytes=config.sandbox_memory_bytes,
            output_cap=config.sandbox_output_cap,
        )

    def reload_catalog(self) -> int:
        descriptors = []
        if self.config.catalog_dir:
            descriptors += load_catalog_dir(self.config.catalog_dir)
        if self.config.synthetic_catalog:
            descriptors += generate_catalog(self.config.synthetic_catalog)
        self.registry.replace_all(descriptors)
        return len(descriptors)

    # -- tool resolution -------------------------------------------------------

    def _web_driver_factory(self):
        site_dir = self.config.web_site_dir
        if not site_dir:
            raise errors.PlatformError("no web site corpus configured", category=errors.NAVIGATION)
        return SimulatorDriver(site_dir)

    def tools_for(self, session, user_input: str) -> dict:
        kind = session.profile_kind
        if kind == "data":
            return data_tools(self.sandbox_limits)
        if kind == "web":
            start_url = self.config.web_start_url or "about:start"
            return {"WeBot": WebotExecutor(self._web_driver_factory, start_url, self.config.web_step_cap)}
        # plugins profile
        if session.selected_tools == TOOLS_AUTO:
            ranked = auto_select(user_input, self.registry.enabled(), k=1, embedder=self.embedder)
            if not ranked or ranked[0][1] < self.config.auto_min_score:
                return {}  # nothing close enough: answer without plugins
            chosen = [ranked[0][0]]
        else:
            chosen = [d for d in (self.registry.get(n) for n in session.selected_tools) if d is not None]
        return {d.name: ApiPluginExecutor(d, timeout_s=self.config.timeout_s) for d in chosen}

    # -- turn orchestration -----------------------------------------------------

    def _tool_context(self, session, emit) -> ToolContext:
        return ToolContext(
            factory=session.factory,
            llm=self.llm,
            clock=self.clock,
            workspace=str(session.workspace),
            grounding=session.grounding,
            profile=session.profile_kind,
            emit=emit,
            extras=dict(session.extras, search_client=self.search_client, sandbox_limits=self.sandbox_limits),
        )

    def stream_turn(self, session, text: str):
        """Run one turn in a worker thread; yield wire frames in order.

        The caller must already hold the session's turn lock.
        """
        q: queue.Queue = queue.Queue()
        session.cancel = threading.Event()
        cancel = session.cancel

        def emit(event):
            q.put(("event", event))

        def worker():
            try:
                profile = load_profile(session.profile_kind)
                tools = self.tools_for(session, text)
                ctx = self._tool_context(session, emit)
                gen = self.loop.run_turn(
                    profile, tools, session.history, text, session.factory, ctx=ctx, cancel=cancel
                )
                transcript = None
                try:
                    while True:
                        q.put(("event", next(gen)))
                except StopIteration as stop:
                    transcript = stop.value
                if transcript.round is not None:
                    session.history = session.history.append(transcript.round)
                    if not persist_round(session, transcript.round, self.docs):
                        log.warning("persist failed for %s; queued for retry", session.id)
                q.put(("done", transcript.ended_by))
            except Exception as e:  # pragma: no cover - defensive
                log.exception("turn crashed")
                q.put(("crash", e))
            finally:
                q.put(("close", None))
                session.turn_lock.release()

        threading.Thread(target=worker, daemon=True).start()

        seq = 0
        while True:
            kind, payload = q.get()
            if kind == "close":
                return
            if kind == "done":
                yield fr.make_frame(fr.DONE, {"ended_by": payload}, seq)
                seq += 1
                continue
            if kind == "crash":
                yield fr.make_frame(fr.ERROR, {"category": errors.INTERNAL, "message": str(payload)}, seq)
                yield fr.make_frame(fr.DONE, {"ended_by": "error"}, seq + 1)
                seq += 2
                continue
            for frame_event, data in self._frames_for(payload):
                yield fr.make_frame(frame_event, data, seq)
                seq += 1

    def _frames_for(self, event):
        if isinstance(event, TextDelta):
            return [(fr.TEXT_DELTA, {"text": event.text})]
        if isinstance(event, ThoughtDelta):
            return [(fr.THOUGHT_DELTA, {"text": event.text})]
        if isinstance(event, ActionStart):
            return [(fr.ACTION_START, {})]
        if isinstance(event, ActionName):
            return [(fr.ACTION_NAME, {"name": event.name})]
        if isinstance(event, ActionInputDelta):
            return [(fr.ACTION_INPUT_DELTA, {"text": event.text})]
        if isinstance(event, ObservationEvent):
            obs = event.observation
            blocks = [render_frontend(a) for a in obs.artifacts]
            out = [(fr.OBSERVATION, {"tool": event.tool, "status": obs.status, "blocks": blocks})]
            for artifact in obs.artifacts:
                if artifact.kind in RICH_BLOCK_KINDS:
                    out.append((fr.BLOCK, {"block": render_frontend(artifact)}))
            return out
        if isinstance(event, WebStepEvent):
            block = {
                "block_type": "card",
                "payload": {"title": event.action, "subtitle": event.outcome},
                "name": "web-step",
            }
            return [(fr.BLOCK, {"block": block})]
        if isinstance(event, ErrorEvent):
            return [(fr.ERROR, {"category": event.category, "message": event.message})]
        if isinstance(event, (ActionEnd, FinalAnswerEvent)):
            return []  # structural; the wire carries deltas and done
        if isinstance(event, ParseWarning):
            log.info("parse warning: %s", event.category)
            return []
        log.warning("unmapped turn event %r", event)
        return []

    def health(self) -> dict:
        backlog = sum(len(s.pending_persists) for s in self.sessions.all())
        return {"status": "ok", "pending_persists": backlog}
