"""Chat-completion request/response types shared by all model providers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import errors
from ..errors import PlatformError

FINISH_STOP = "stop"
FINISH_LENGTH = "length"
FINISH_CANCELLED = "cancelled"
FINISH_CONTENT_FILTER = "content_filter"


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    text: str


@dataclass
class CompletionRequest:
    messages: list[ChatMessage]
    model_id: str = "default"
    temperature: float = 0.0
    stop_sequences: tuple[str, ...] = ()
    stream: bool = True
    max_output_tokens: int = 2048
    profile: str = ""  # agent profile kind; scripted providers route on it

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        # A system prompt, when present, leads the conversation.
        for i, m in enumerate(self.messages):
            if m.role == "system" and i != 0:
                raise ValueError("system message must come first")

    def prompt_text(self) -> str:
        """Flat rendering used for logging and scripted-provider guards."""
        return "\n".join(f"{m.role}: {m.text}" for m in self.messages)


@dataclass(frozen=True)
class TokenEvent:
    delta: str = ""
    finish: str | None = None  # one of the FINISH_* constants, set on the last event


class ProviderError(PlatformError):
    """Model-provider failure with a category from the platform taxonomy."""

    category = errors.SERVER_ERROR


class ScriptMismatch(Exception):
    """A scripted provider received a request its fixture does not cover.

    Deliberately not a ProviderError: golden tests must fail loudly instead
    of exercising retry machinery.
    """
