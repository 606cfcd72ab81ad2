"""Shared agent-loop types: tool calls, observations, executor contract."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..clock import Clock
from ..datamodel import Artifact, ArtifactFactory

OBS_OK = "ok"
OBS_TOOL_ERROR = "tool_error"
OBS_INTERRUPTED = "interrupted"


@dataclass(frozen=True)
class ToolCall:
    action: str
    action_input: str


@dataclass(frozen=True)
class Observation:
    artifacts: tuple[Artifact, ...]
    status: str = OBS_OK  # ok | tool_error | interrupted

    def __post_init__(self):
        if not self.artifacts:
            raise ValueError("observation must carry at least one artifact")


@dataclass
class ToolContext:
    """Per-session resources an executor may use."""

    factory: ArtifactFactory
    llm: "object | None" = None  # LlmClient; typed loosely to avoid cycles
    clock: Clock | None = None
    workspace: str | None = None
    grounding: "object | None" = None  # GroundingPool
    cancel: threading.Event | None = None
    profile: str = ""
    emit: "object | None" = None  # callable(event) for live progress from inside a tool
    extras: dict = field(default_factory=dict)


@runtime_checkable
class ToolExecutor(Protocol):
    name: str
    description: str

    def run(self, action_input: str, ctx: ToolContext) -> Observation: ...
