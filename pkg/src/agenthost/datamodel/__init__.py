from .artifacts import (
    Artifact,
    ArtifactFactory,
    ArtifactIds,
    ErrorInfo,
    FileBlob,
    Kind,
    Table,
    from_record,
    to_record,
)
from .history import (
    ApproxCounter,
    ChatHistory,
    Message,
    PluggableCounter,
    Role,
    Round,
    TokenCounter,
    history_tokens,
    message_texts,
    round_context_text,
    round_from_record,
    round_to_record,
    round_tokens,
    truncate_history,
)
from .ingest import table_from_csv, table_from_jsonl
from .linearize import linearize
from .render import BLOCK_TYPES, render_frontend

__all__ = [
    "Artifact", "ArtifactFactory", "ArtifactIds", "ErrorInfo", "FileBlob", "Kind", "Table",
    "from_record", "to_record",
    "ApproxCounter", "ChatHistory", "Message", "PluggableCounter", "Role", "Round",
    "TokenCounter", "history_tokens", "message_texts", "round_context_text", "round_from_record",
    "round_to_record", "round_tokens", "truncate_history",
    "table_from_csv", "table_from_jsonl",
    "linearize", "render_frontend", "BLOCK_TYPES",
]
