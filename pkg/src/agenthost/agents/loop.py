"""The ReAct controller.

One turn = a chain of completions. Each completion is streamed, parsed into
role events (forwarded live), and scanned for a tool call; the dispatched
observation is wrapped in the profile's tool-response template and appended
as the next model input. The chain ends on a completion with no tool call,
on the profile's iteration cap, on cancellation, or on a provider error.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterator, Union

from .. import errors
from ..clock import Clock, SystemClock
from ..datamodel import (
    ApproxCounter,
    ArtifactFactory,
    ChatHistory,
    Message,
    Role,
    Round,
    TokenCounter,
    linearize,
    message_texts,
    truncate_history,
)
from ..llm import FINISH_CANCELLED, ChatMessage, CompletionRequest, LlmClient
from ..parsing import GRAMMAR_CHAT, ActionEnd, RoleEvent, StreamParser, TextDelta
from .catalog import render
from .profiles import AgentProfile
from .types import OBS_INTERRUPTED, OBS_TOOL_ERROR, Observation, ToolCall, ToolContext, ToolExecutor

log = logging.getLogger(__name__)

ENDED_FINAL = "final_answer"
ENDED_CAP = "iteration_cap"
ENDED_CANCELLED = "cancelled"
ENDED_ERROR = "error"

DEFAULT_TOKEN_BUDGET = 3000
DEFAULT_OBSERVATION_BUDGET = 1500


@dataclass(frozen=True)
class ObservationEvent:
    tool: str
    observation: Observation


@dataclass(frozen=True)
class FinalAnswerEvent:
    text: str


@dataclass(frozen=True)
class ErrorEvent:
    category: str
    message: str


TurnEvent = Union[RoleEvent, ObservationEvent, FinalAnswerEvent, ErrorEvent]


@dataclass(frozen=True)
class AssistantText:
    text: str


@dataclass(frozen=True)
class FinalAnswer:
    text: str


@dataclass
class TurnTranscript:
    items: list = field(default_factory=list)  # AssistantText | ToolCall | Observation | FinalAnswer
    iterations_used: int = 0
    ended_by: str = ENDED_FINAL
    round: Round | None = None


def tool_lines(tools: dict[str, ToolExecutor]) -> str:
    return "\n".join(f"{name}: {tools[name].description}" for name in tools)


def build_prompt(
    profile: AgentProfile,
    tools: dict[str, ToolExecutor],
    history: ChatHistory,
    user_input: str,
    now: datetime,
    counter: TokenCounter,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> list[ChatMessage]:
    """Deterministic prompt assembly: system + truncated history + suffix."""
    names = ", ".join(tools)
    bindings = {"tool_names": names, "current_date": now.strftime("%Y-%m-%d")}
    system = (
        render(profile.system_prompt, **bindings)
        + tool_lines(tools)
        + "\n\n"
        + render(profile.format_instructions, **bindings)
    )
    messages = [ChatMessage("system", system)]
    for round_ in truncate_history(history, token_budget, counter).rounds:
        for role, text in message_texts(round_):
            wire_role = "assistant" if role == Role.ASSISTANT else "user"
            messages.append(ChatMessage(wire_role, text))
    messages.append(ChatMessage("user", render(profile.suffix, input=user_input)))
    return messages


def compose_observation(
    template: str,
    observation: Observation,
    tool_names: str,
    char_budget: int = DEFAULT_OBSERVATION_BUDGET,
) -> str:
    """Linearize the observation under a per-observation budget and fill the template."""
    per = max(1, char_budget // len(observation.artifacts))
    body = "\n".join(linearize(a, per) for a in observation.artifacts)
    if observation.status == OBS_INTERRUPTED:
        body = "[interrupted] " + body
    return render(template, observation=body, tool_names=tool_names)


class AgentLoop:
    def __init__(
        self,
        llm: LlmClient,
        counter: TokenCounter | None = None,
        token_budget: int = DEFAULT_TOKEN_BUDGET,
        observation_budget: int = DEFAULT_OBSERVATION_BUDGET,
        clock: Clock | None = None,
    ):
        self.llm = llm
        self.counter = counter or ApproxCounter()
        self.token_budget = token_budget
        self.observation_budget = observation_budget
        self.clock = clock or SystemClock()

    def _cap_notice(self, profile: AgentProfile) -> str:
        return (
            f"I reached the maximum of {profile.max_tool_iterations} tool iterations for this turn, "
            "so I have to stop here. The results gathered so far are shown above; "
            "please refine your request if you need more."
        )

    _INTERRUPT_NOTICE = (
        "Tool execution was interrupted, so I will not retry on my own. "
        "Let me know how you would like to continue."
    )

    def _dispatch(self, call: ToolCall, tools: dict[str, ToolExecutor], ctx: ToolContext) -> Observation:
        executor = tools.get(call.action)
        if executor is None:
            msg = f"Unknown tool {call.action!r}. Available tools: {', '.join(tools) or 'none'}."
            return Observation((ctx.factory.error(errors.UNKNOWN_TOOL, msg),), OBS_TOOL_ERROR)
        try:
            return executor.run(call.action_input, ctx)
        except errors.PlatformError as e:
            return Observation((ctx.factory.error(e.category, e.detail),), OBS_TOOL_ERROR)
        except Exception as e:  # executors must not take the loop down
            log.exception("executor %s crashed", call.action)
            return Observation((ctx.factory.error(errors.INTERNAL, str(e)),), OBS_TOOL_ERROR)

    def run_turn(
        self,
        profile: AgentProfile,
        tools: dict[str, ToolExecutor],
        history: ChatHistory,
        user_input: str,
        factory: ArtifactFactory,
        ctx: ToolContext | None = None,
        cancel: threading.Event | None = None,
    ) -> Iterator[TurnEvent]:
        """Generator of live turn events; the TurnTranscript (with the new
        history round) is the generator's return value."""
        ctx = ctx or ToolContext(factory=factory)
        ctx.cancel = cancel
        transcript = TurnTranscript()
        idx = history.rounds[-1].index + 1 if history.rounds else 0
        round_messages: list[Message] = [Message(Role.USER, (factory.text(user_input),), idx)]
        messages = build_prompt(
            profile, tools, history, user_input, self.clock.now(), self.counter, self.token_budget
        )
        names = ", ".join(tools)
        no_more_tools = False
        final_text = ""

        while True:
            req = CompletionRequest(messages=list(messages), profile=profile.kind, stream=True)
            parser = StreamParser(GRAMMAR_CHAT)
            raw_parts: list[str] = []
            tool_call: ToolCall | None = None
            cancelled = False
            try:
                for ev in self.llm.complete_stream(req, cancel=cancel):
                    if ev.delta:
                        raw_parts.append(ev.delta)
                        for pe in parser.feed(ev.delta):
                            yield pe
                            if isinstance(pe, ActionEnd) and tool_call is None:
                                tool_call = ToolCall(pe.name, pe.input)
                    if ev.finish is not None:
                        cancelled = ev.finish == FINISH_CANCELLED
                        break
                for pe in parser.finish():
                    yield pe
                    if isinstance(pe, ActionEnd) and tool_call is None:
                        tool_call = ToolCall(pe.name, pe.input)
            except errors.PlatformError as e:
                yield ErrorEvent(e.category, e.detail)
                transcript.ended_by = ENDED_ERROR
                break

            raw_text = "".join(raw_parts)
            if raw_text:
                transcript.items.append(AssistantText(raw_text))
                round_messages.append(Message(Role.ASSISTANT, (factory.text(raw_text),), idx))

            if cancelled:
                transcript.ended_by = ENDED_CANCELLED
                break

            if tool_call is None:
                final_text = raw_text
                transcript.items.append(FinalAnswer(final_text))
                transcript.ended_by = ENDED_FINAL
                yield FinalAnswerEvent(final_text)
                break

            if no_more_tools:
                # an interrupted tool forbids further tool use this turn
                final_text = self._INTERRUPT_NOTICE
                transcript.items.append(FinalAnswer(final_text))
                round_messages.append(Message(Role.ASSISTANT, (factory.text(final_text),), idx))
                transcript.ended_by = ENDED_FINAL
                yield TextDelta(final_text)
                yield FinalAnswerEvent(final_text)
                break

            transcript.items.append(tool_call)
            observation = self._dispatch(tool_call, tools, ctx)
            transcript.iterations_used += 1
            transcript.items.append(observation)
            round_messages.append(Message(Role.TOOL_OBSERVATION, observation.artifacts, idx))
            yield ObservationEvent(tool_call.action, observation)

            if cancel is not None and cancel.is_set():
                transcript.ended_by = ENDED_CANCELLED
                break
            if observation.status == OBS_INTERRUPTED:
                no_more_tools = True
            if transcript.iterations_used >= profile.max_tool_iterations:
                final_text = self._cap_notice(profile)
                transcript.items.append(FinalAnswer(final_text))
                round_messages.append(Message(Role.ASSISTANT, (factory.text(final_text),), idx))
                transcript.ended_by = ENDED_CAP
                yield TextDelta(final_text)
                yield FinalAnswerEvent(final_text)
                break

            messages.append(ChatMessage("assistant", raw_text))
            messages.append(
                ChatMessage(
                    "user",
                    compose_observation(
                        profile.tool_response_template, observation, names, self.observation_budget
                    ),
                )
            )

        transcript.round = Round(idx, tuple(round_messages))
        return transcript
