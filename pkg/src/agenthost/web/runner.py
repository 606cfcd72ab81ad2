"""The web-navigation step loop.

Each step: snapshot the page, prompt the model, parse the <Thought>/<Action>
turn, validate, perform. A failed attempt (bad format, bad id, or a driver
failure) earns exactly one retry prompt naming the problem; a step whose
retry also fails is recorded as failed and the loop moves on with a fresh
snapshot.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..agents.catalog import render_prompt
from ..clock import Clock, SystemClock
from ..llm import ChatMessage, CompletionRequest, LlmClient, ProviderError
from ..parsing import GRAMMAR_WEBOT, StreamParser, ThoughtDelta, WebActionCall
from .dom import PageSnapshot
from .driver import BrowserDriver, DriverError, WebAction

DEFAULT_STEP_CAP = 20

ENDED_FINISH = "finish"
ENDED_STEP_CAP = "step_cap"
ENDED_INTERRUPTED = "interrupted"
ENDED_ERROR = "error"

FORMATTED_ACTIONS = """click(elementId: number): click the element with the given id
setValue(elementId: number, value: string): focus the element and set its value
finish(answer: string): end the task and report the answer back to the chat"""


@dataclass
class Attempt:
    action_text: str  # rendered action, or a note when the reply had none
    outcome: str  # "ok" | "failed: <reason>"


@dataclass
class WebStep:
    index: int
    thought: str
    attempts: list[Attempt] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.attempts) and self.attempts[-1].outcome == "ok"


@dataclass
class WebRunReport:
    steps: list[WebStep] = field(default_factory=list)
    ended_by: str = ENDED_STEP_CAP
    answer: str = ""
    final_snapshot: PageSnapshot | None = None
    error: str = ""


def format_previous_actions(steps: list[WebStep]) -> str:
    """One line per attempt: "<n>. <verb>(<args>) — <ok|failed: reason>";
    a retried step renders both attempts under the same ordinal."""
    lines = []
    for step in steps:
        for attempt in step.attempts:
            lines.append(f"{step.index}. {attempt.action_text} — {attempt.outcome}")
    return "\n".join(lines)


def _parse_turn(reply_events) -> tuple[str, WebActionCall | None]:
    thought_parts = []
    call = None
    for ev in reply_events:
        if isinstance(ev, ThoughtDelta):
            thought_parts.append(ev.text)
        elif isinstance(ev, WebActionCall) and call is None:
            call = ev
    return "".join(thought_parts), call


def _validate(call: WebActionCall | None, snapshot: PageSnapshot) -> tuple[WebAction | None, str]:
    """Normalize a parsed call into a WebAction, or explain what is wrong."""
    if call is None:
        return None, "the response did not include the mandatory <Thought> and <Action> tags"
    verb = call.name
    args = call.args
    if verb == "finish":
        return WebAction("finish", text=args[0] if args else ""), ""
    if verb not in ("click", "setValue"):
        return None, f"unknown action {verb!r}; you must use one of: click, setValue, finish"
    if verb == "click" and len(args) != 1:
        return None, f"click takes exactly one element id, got {len(args)} arguments"
    if verb == "setValue" and len(args) != 2:
        return None, f"setValue takes an element id and a value, got {len(args)} arguments"
    try:
        element_id = int(args[0])
    except ValueError:
        return None, f"element id must be a number, got {args[0]!r}"
    if snapshot.element(element_id) is None:
        valid = ", ".join(str(e.id) for e in snapshot.elements)
        return None, f"element id {element_id} is not on the current page (valid ids: {valid})"
    if verb == "click":
        return WebAction("click", element_id=element_id), ""
    return WebAction("setValue", element_id=element_id, text=args[1]), ""


class StreamEmitter:
    """Optional sink for live thought/action progress."""

    def on_thought(self, text: str) -> None:  # pragma: no cover - interface default
        pass

    def on_action(self, rendered: str, outcome: str) -> None:  # pragma: no cover
        pass


def web_task(
    user_query: str,
    start_url: str,
    driver: BrowserDriver,
    llm: LlmClient,
    clock: Clock | None = None,
    cancel: threading.Event | None = None,
    step_cap: int = DEFAULT_STEP_CAP,
    plan: str = "",
    emitter: StreamEmitter | None = None,
    profile: str = "",
) -> WebRunReport:
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    clock = clock or SystemClock()
    report = WebRunReport()
    system_text = render_prompt("webot_system", formattedActions=FORMATTED_ACTIONS, plan=plan)

    try:
        driver.navigate(start_url)
    except DriverError as e:
        report.ended_by = ENDED_ERROR
        report.error = f"{e.category}: {e.detail}"
        return report

    for step_no in range(1, step_cap + 1):
        if cancel is not None and cancel.is_set():
            report.ended_by = ENDED_INTERRUPTED
            return report
        snapshot = driver.snapshot()
        report.final_snapshot = snapshot
        step = WebStep(index=step_no, thought="")
        report.steps.append(step)

        retry_message = ""
        for attempt_no in (1, 2):  # one retry per action at most
            prompt_name = "webot_user" if not retry_message else "webot_retry"
            bindings = {
                "user_query": user_query,
                "previous_actions_string": format_previous_actions(report.steps[:-1]),
                "current_time": clock.now().strftime("%Y-%m-%d %H:%M:%S"),
                "processed_html": snapshot.processed_html,
            }
            if retry_message:
                bindings["retry_message"] = retry_message
            req = CompletionRequest(
                messages=[
                    ChatMessage("system", system_text),
                    ChatMessage("user", render_prompt(prompt_name, **bindings)),
                ],
                profile=profile,
            )
            parser = StreamParser(GRAMMAR_WEBOT)
            events = []
            try:
                for token in llm.complete_stream(req, cancel=cancel):
                    if token.delta:
                        for ev in parser.feed(token.delta):
                            events.append(ev)
                            if isinstance(ev, ThoughtDelta) and emitter is not None:
                                emitter.on_thought(ev.text)
                    if token.finish == "cancelled":
                        report.ended_by = ENDED_INTERRUPTED
                        return report
                events.extend(parser.finish())
            except ProviderError as e:
                report.ended_by = ENDED_ERROR
                report.error = f"{e.category}: {e.detail}"
                return report

            thought, call = _parse_turn(events)
            if thought:
                step.thought = thought
            action, problem = _validate(call, snapshot)
            if action is None:
                step.attempts.append(Attempt(call.raw_args if call else "(no action)", f"failed: {problem}"))
                if emitter is not None:
                    emitter.on_action("(invalid)", f"failed: {problem}")
                retry_message = problem
                continue

            if action.kind == "finish":
                step.attempts.append(Attempt(action.render(), "ok"))
                if emitter is not None:
                    emitter.on_action(action.render(), "ok")
                report.ended_by = ENDED_FINISH
                report.answer = action.text
                return report

            try:
                driver.perform(action)
            except DriverError as e:
                step.attempts.append(Attempt(action.render(), f"failed: {e.detail}"))
                if emitter is not None:
                    emitter.on_action(action.render(), f"failed: {e.detail}")
                retry_message = f"the action {action.render()} failed: {e.detail}"
                # a driver failure may have changed nothing; retry sees the same snapshot
                continue
            step.attempts.append(Attempt(action.render(), "ok"))
            if emitter is not None:
                emitter.on_action(action.render(), "ok")
            break  # step done

    report.ended_by = ENDED_STEP_CAP
    return report
