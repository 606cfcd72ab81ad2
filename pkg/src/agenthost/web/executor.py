"""WeBot: the web runner exposed as a chat-agent tool."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .. import errors
from ..agents.types import OBS_INTERRUPTED, OBS_OK, OBS_TOOL_ERROR, Observation, ToolContext
from ..parsing import ThoughtDelta
from .runner import ENDED_ERROR, ENDED_FINISH, ENDED_INTERRUPTED, StreamEmitter, format_previous_actions, web_task

_URL_RE = re.compile(r"https?://[^\s\"']+")


@dataclass(frozen=True)
class WebStepEvent:
    """Live timeline entry: one performed (or failed) web action."""

    action: str
    outcome: str


class _CtxEmitter(StreamEmitter):
    def __init__(self, ctx: ToolContext):
        self.ctx = ctx

    def on_thought(self, text: str) -> None:
        if self.ctx.emit is not None:
            self.ctx.emit(ThoughtDelta(text))

    def on_action(self, rendered: str, outcome: str) -> None:
        if self.ctx.emit is not None:
            self.ctx.emit(WebStepEvent(rendered, outcome))


class WebotExecutor:
    name = "WeBot"
    description = (
        "A web navigation agent tool that opens pages, clicks elements, fills inputs, "
        "and reports back what it found or did."
    )

    def __init__(self, driver_factory, start_url: str, step_cap: int = 20):
        self.driver_factory = driver_factory
        self.start_url = start_url
        self.step_cap = step_cap

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        driver = ctx.extras.get("web_driver")
        if driver is None:
            driver = self.driver_factory()
            ctx.extras["web_driver"] = driver
        url_match = _URL_RE.search(action_input)
        start_url = url_match.group(0) if url_match else self.start_url
        report = web_task(
            action_input,
            start_url,
            driver,
            ctx.llm,
            clock=ctx.clock,
            cancel=ctx.cancel,
            step_cap=self.step_cap,
            emitter=_CtxEmitter(ctx),
            profile=ctx.profile,
        )
        log = format_previous_actions(report.steps)
        if report.ended_by == ENDED_INTERRUPTED:
            return Observation(
                (ctx.factory.error(errors.INTERRUPTED, "WeBot was interrupted by the user before finishing."),),
                OBS_INTERRUPTED,
            )
        if report.ended_by == ENDED_ERROR:
            category = report.error.split(":", 1)[0] if ":" in report.error else errors.TOOL_ERROR
            if category not in errors.CATEGORIES:
                category = errors.TOOL_ERROR
            return Observation(
                (ctx.factory.error(category, f"WeBot failed: {report.error}"),),
                OBS_TOOL_ERROR,
            )
        if report.ended_by == ENDED_FINISH:
            body = f"WeBot finished the task. Answer: {report.answer}"
        else:
            body = f"WeBot stopped after reaching its step limit ({self.step_cap} steps) without finishing."
        artifacts = [ctx.factory.text(body, name="WeBot result")]
        if log:
            artifacts.append(ctx.factory.text(log, name="WeBot steps"))
        return Observation(tuple(artifacts), OBS_OK)
