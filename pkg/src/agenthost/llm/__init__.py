from .client import DEFAULT_TIMEOUT_S, LlmClient
from .keypool import AllKeysCooling, KeyHandle, KeyPool
from .providers import HttpProvider, Provider, ScriptedProvider, ScriptedTurn
from .types import (
    FINISH_CANCELLED,
    FINISH_CONTENT_FILTER,
    FINISH_LENGTH,
    FINISH_STOP,
    ChatMessage,
    CompletionRequest,
    ProviderError,
    ScriptMismatch,
    TokenEvent,
)

__all__ = [
    "DEFAULT_TIMEOUT_S", "LlmClient",
    "AllKeysCooling", "KeyHandle", "KeyPool",
    "HttpProvider", "Provider", "ScriptedProvider", "ScriptedTurn",
    "FINISH_CANCELLED", "FINISH_CONTENT_FILTER", "FINISH_LENGTH", "FINISH_STOP",
    "ChatMessage", "CompletionRequest", "ProviderError", "ScriptMismatch", "TokenEvent",
]
