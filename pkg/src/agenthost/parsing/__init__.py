from .events import (
    MALFORMED_ACTION,
    TRAILING_AFTER_ACTION,
    UNTERMINATED,
    ActionEnd,
    ActionInputDelta,
    ActionName,
    ActionStart,
    ParseWarning,
    RoleEvent,
    TextDelta,
    ThoughtDelta,
    WebActionCall,
    coalesce,
    event_to_dict,
)
from .parser import GRAMMAR_CHAT, GRAMMAR_WEBOT, StreamParser, parse_full, split_call

__all__ = [
    "MALFORMED_ACTION", "TRAILING_AFTER_ACTION", "UNTERMINATED",
    "ActionEnd", "ActionInputDelta", "ActionName", "ActionStart",
    "ParseWarning", "RoleEvent", "TextDelta", "ThoughtDelta", "WebActionCall",
    "coalesce", "event_to_dict",
    "GRAMMAR_CHAT", "GRAMMAR_WEBOT", "StreamParser", "parse_full", "split_call",
]
