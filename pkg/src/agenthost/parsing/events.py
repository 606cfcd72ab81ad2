"""Role events: the incremental, role-tagged output of the stream parser."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# warning categories
TRAILING_AFTER_ACTION = "trailing_after_action"
MALFORMED_ACTION = "malformed_action"
UNTERMINATED = "unterminated"


@dataclass(frozen=True)
class TextDelta:
    text: str


@dataclass(frozen=True)
class ThoughtDelta:
    text: str


@dataclass(frozen=True)
class ActionStart:
    pass


@dataclass(frozen=True)
class ActionName:
    name: str


@dataclass(frozen=True)
class ActionInputDelta:
    text: str


@dataclass(frozen=True)
class ActionEnd:
    name: str
    input: str


@dataclass(frozen=True)
class WebActionCall:
    name: str
    args: tuple[str, ...]
    raw_args: str


@dataclass(frozen=True)
class ParseWarning:
    category: str  # trailing_after_action | malformed_action | unterminated
    span: str  # raw text region the warning refers to


RoleEvent = Union[
    TextDelta,
    ThoughtDelta,
    ActionStart,
    ActionName,
    ActionInputDelta,
    ActionEnd,
    WebActionCall,
    ParseWarning,
]

_DELTAS = (TextDelta, ThoughtDelta, ActionInputDelta)


def coalesce(events) -> list[RoleEvent]:
    """Merge adjacent deltas of the same type.

    Chunk boundaries may split one logical delta into many; sequences are
    compared modulo this merge. Structural events are never merged.
    """
    out: list[RoleEvent] = []
    for ev in events:
        if out and type(ev) in _DELTAS and type(out[-1]) is type(ev):
            out[-1] = type(ev)(out[-1].text + ev.text)
        else:
            out.append(ev)
    return [e for e in out if not (type(e) in _DELTAS and e.text == "")]


def event_to_dict(ev: RoleEvent) -> dict:
    """JSON-lines rendering used by the debug CLI and the wire frames."""
    if isinstance(ev, TextDelta):
        return {"event": "text.delta", "text": ev.text}
    if isinstance(ev, ThoughtDelta):
        return {"event": "thought.delta", "text": ev.text}
    if isinstance(ev, ActionStart):
        return {"event": "action.start"}
    if isinstance(ev, ActionName):
        return {"event": "action.name", "name": ev.name}
    if isinstance(ev, ActionInputDelta):
        return {"event": "action.input.delta", "text": ev.text}
    if isinstance(ev, ActionEnd):
        return {"event": "action.end", "name": ev.name, "input": ev.input}
    if isinstance(ev, WebActionCall):
        return {"event": "web.action", "name": ev.name, "args": list(ev.args), "raw_args": ev.raw_args}
    if isinstance(ev, ParseWarning):
        return {"event": "parse.warning", "category": ev.category, "span": ev.span}
    raise TypeError(f"unknown event {ev!r}")
