"""Platform error taxonomy.

Every error surfaced to users, observations, or wire frames carries one of
these category strings, so failures are machine-readable end to end.
"""

from __future__ import annotations

# Transport / model-provider failures
TIMEOUT = "timeout"
RATE_LIMITED = "rate_limited"
AUTH_FAILED = "auth_failed"
SERVER_ERROR = "server_error"
CONTENT_FILTERED = "content_filtered"
CANCELLED = "cancelled"
MALFORMED_RESPONSE = "malformed_response"
ALL_KEYS_COOLING = "all_keys_cooling"
CONNECTION_FAILED = "connection_failed"
HTTP_ERROR = "http_error"

# Agent-loop failures
UNKNOWN_TOOL = "unknown_tool"
TOOL_ERROR = "tool_error"
UNBOUND_PLACEHOLDER = "unbound_placeholder"
INTERRUPTED = "interrupted"

# Tool-registry failures
SPEC_PARSE = "spec_parse"
DUPLICATE_NAME = "duplicate_name"
EMBEDDER_UNAVAILABLE = "embedder_unavailable"

# Executor failures
LLM_FORMAT = "llm_format"
UNKNOWN_ENDPOINT = "unknown_endpoint"
EXHAUSTED = "exhausted"
SQL_SYNTAX = "sql_syntax"
NON_SELECT_REJECTED = "non_select_rejected"
INTERPRETER_MISSING = "interpreter_missing"
TIME_LIMIT = "time_limit"
MEMORY_LIMIT = "memory_limit"
OUTPUT_LIMIT = "output_limit"
SPEC_INVALID = "spec_invalid"
CLIENT_UNAVAILABLE = "client_unavailable"

# Web-driver failures
NAVIGATION = "navigation"
STALE_ELEMENT = "stale_element"
DRIVER_TIMEOUT = "driver_timeout"

# Storage / upload failures
TOO_LARGE = "too_large"
UNREADABLE_CONTENT = "unreadable_content"
STORE_UNAVAILABLE = "store_unavailable"

INTERNAL = "internal"

CATEGORIES = frozenset(
    v for k, v in list(globals().items()) if k.isupper() and isinstance(v, str)
)

# Categories a caller may retry without changing the request.
RETRYABLE = frozenset({TIMEOUT, RATE_LIMITED, SERVER_ERROR, HTTP_ERROR, CONNECTION_FAILED})


class PlatformError(Exception):
    """Base for all categorized errors.

    Subclasses pin ``category``; ``retryable`` derives from the taxonomy
    unless overridden.
    """

    category: str = INTERNAL

    def __init__(self, detail: str = "", *, category: str | None = None, retryable: bool | None = None):
        super().__init__(detail)
        if category is not None:
            self.category = category
        assert self.category in CATEGORIES, f"unknown error category: {self.category}"
        self.detail = detail
        self.retryable = retryable if retryable is not None else self.category in RETRYABLE

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"[{self.category}] {self.detail}"
