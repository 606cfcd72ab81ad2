"""Incremental role parser for streamed model output.

A character-level automaton assigns a role to every char as it arrives, so
the first tokens of a completion can be displayed or dispatched before the
model finishes. Two grammars exist:

* ``chat``: free markdown text, with a tool call carried in a ```json fenced
  block holding {"action": ..., "action_input": ...}. Other fenced blocks are
  plain text with code styling.
* ``webot``: <Thought>...</Thought> streams as thought text and
  <Action>name(args)</Action> emits one structured action call.

Invariant: transitions depend only on the sequence of consumed characters,
never on chunk boundaries, so feeding a transcript in any partition yields
the same events (modulo merging adjacent deltas; see events.coalesce).

Malformed structures never crash and never drop characters: the buffered raw
text is re-emitted as plain text behind a ParseWarning.
"""

from __future__ import annotations

import re

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
)

GRAMMAR_CHAT = "chat"
GRAMMAR_WEBOT = "webot"

_OPENER = "```json"
_TICKS = "```"
_THOUGHT_OPEN = "<Thought>"
_THOUGHT_CLOSE = "</Thought>"
_ACTION_OPEN = "<Action>"
_ACTION_CLOSE = "</Action>"

_JSON_ESCAPES = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}


def _next_of(text: str, i: int, *chars: str) -> int:
    """Index of the first occurrence of any char at or after i, else len(text)."""
    best = len(text)
    for c in chars:
        j = text.find(c, i, best)
        if j >= 0:
            best = j
    return best


class _ChatMachine:
    """States: TEXT, FENCE (delimiter matching), the J_* block states."""

    def __init__(self, max_block: int):
        self.max_block = max_block
        self.state = "TEXT"
        self.line_start = True
        self.in_generic_fence = False
        self.trailing_armed = False  # set after a completed action block
        self.fence_buf = ""  # unconsumed delimiter prefix (bounded)
        # action-block registers
        self.raw = ""  # consumed block text, kept for degradation re-emission
        self.key_buf = ""
        self.current_key = ""
        self.keys_seen: set[str] = set()
        self.name_buf = ""
        self.name_done = False
        self.input_parts: list[str] = []
        self.pending_input: list[str] = []  # input seen before the name closed
        self.action_started = False
        # string-scanning registers
        self.esc = False
        self.u_buf: str | None = None
        self.close_ticks = 0
        self._handlers = {
            "TEXT": self._st_text,
            "FENCE": self._st_fence,
            "FENCE_TAIL": self._st_fence_tail,
            "J_PRE_OBJ": self._st_j_pre_obj,
            "J_PRE_KEY": self._st_j_pre_key,
            "J_KEY": self._st_j_key,
            "J_POST_KEY": self._st_j_post_key,
            "J_PRE_VALUE": self._st_j_pre_value,
            "J_VALUE": self._st_j_value,
            "J_POST_VALUE": self._st_j_post_value,
            "J_CLOSE": self._st_j_close,
        }

    def pending_len(self) -> int:
        return len(self.fence_buf)

    # -- emission helpers ---------------------------------------------------

    def _text(self, out: list[RoleEvent], s: str) -> None:
        if not s:
            return
        if self.trailing_armed:
            # the warning lands exactly before the first non-space character,
            # so its position cannot depend on chunk boundaries
            k = next((idx for idx, c in enumerate(s) if not c.isspace()), -1)
            if k >= 0:
                if k:
                    out.append(TextDelta(s[:k]))
                out.append(ParseWarning(TRAILING_AFTER_ACTION, ""))
                self.trailing_armed = False
                out.append(TextDelta(s[k:]))
                self.line_start = s.endswith("\n")
                return
        out.append(TextDelta(s))
        self.line_start = s.endswith("\n")

    def _reset_block(self) -> None:
        self.raw = ""
        self.key_buf = ""
        self.current_key = ""
        self.keys_seen = set()
        self.name_buf = ""
        self.name_done = False
        self.input_parts = []
        self.pending_input = []
        self.action_started = False
        self.esc = False
        self.u_buf = None
        self.close_ticks = 0

    def _degrade(self, out: list[RoleEvent]) -> None:
        """Abandon the open block: warn, then replay its raw text as plain text."""
        out.append(ParseWarning(MALFORMED_ACTION, self.raw))
        self._text(out, self.raw)
        self._reset_block()
        self.state = "TEXT"

    # -- character consumption --------------------------------------------------

    def step(self, ch: str, out: list[RoleEvent]) -> None:
        self._handlers[self.state](ch, out)

    def run(self, text: str, i: int, out: list[RoleEvent]) -> int:
        """Consume starting at i, bulk-scanning the hot states; returns new i.

        Bulk runs are capped char-exactly at the block bound so that degrade
        points cannot depend on chunk boundaries.
        """
        state = self.state
        if state == "TEXT" and not self.line_start:
            # everything up to (and including) the next newline is plain text
            j = text.find("\n", i)
            seg = text[i:] if j < 0 else text[i : j + 1]
            self._text(out, seg)
            return i + len(seg)
        if state == "J_VALUE" and not self.esc and self.u_buf is None:
            j = _next_of(text, i, '"', "\\")
            if j > i:
                seg = text[i:j]
                taken, degraded = self._consume_run(seg, out)
                if not degraded:
                    chunk = seg[:taken]
                    if self.current_key == "action":
                        self.name_buf += chunk
                    elif self.name_done:
                        self.input_parts.append(chunk)
                        out.append(ActionInputDelta(chunk))
                    else:
                        self.input_parts.append(chunk)
                        self.pending_input.append(chunk)
                return i + taken
        self.step(text[i], out)
        return i + 1

    def _st_text(self, ch, out):
        if self.line_start and ch == "`":
            self.state = "FENCE"
            self.fence_buf = "`"
            return
        self._text(out, ch)

    def _st_fence(self, ch, out):
        # Matching "```json" + spaces + newline (action opener) outside a
        # generic fence, or "```" + spaces + newline (closer) inside one.
        buf = self.fence_buf
        if self.in_generic_fence:
            if len(buf) < 3 and ch == "`":
                self.fence_buf += ch
                return
            if len(buf) >= 3 and ch in " \t\r":
                self.fence_buf += ch
                return
            if len(buf) >= 3 and ch == "\n":
                self._text(out, buf + ch)
                self.in_generic_fence = False
                self.state = "TEXT"
                self.fence_buf = ""
                return
            # not a closer line; stays fence content
            self.fence_buf = ""
            self._text(out, buf)
            self.state = "TEXT"
            self._st_text(ch, out)
            return
        matched = _OPENER[: len(buf)]
        if buf == matched and len(buf) < len(_OPENER) and ch == _OPENER[len(buf)]:
            self.fence_buf += ch
            return
        if buf == _OPENER or (len(buf) > len(_OPENER)):
            # full label seen; allow trailing spaces then the opening newline
            if ch in " \t\r":
                self.fence_buf += ch
                return
            if ch == "\n":
                self._reset_block()
                self.raw = self.fence_buf + ch
                self.fence_buf = ""
                self.state = "J_PRE_OBJ"
                return
        if len(buf) >= 3:
            # a ``` line that is not the action opener: generic fence opens
            self.fence_buf = ""
            self._text(out, buf)
            if ch == "\n":
                self._text(out, ch)
                self.in_generic_fence = True
                self.state = "TEXT"
            else:
                self.state = "FENCE_TAIL"
                self._text(out, ch)
            return
        # fewer than three backticks: ordinary text
        self.fence_buf = ""
        self._text(out, buf)
        self.state = "TEXT"
        self._st_text(ch, out)

    def _st_fence_tail(self, ch, out):
        # rest of a generic fence opener line
        self._text(out, ch)
        if ch == "\n":
            self.in_generic_fence = True
            self.state = "TEXT"

    # -- action block (JSON object between ```json and ```) -------------------

    def _consume(self, ch, out) -> bool:
        """Append to the raw register, degrading when the block outgrows its cap."""
        self.raw += ch
        if len(self.raw) > self.max_block:
            self._degrade(out)
            return False
        return True

    def _consume_run(self, seg: str, out) -> tuple[int, bool]:
        """Bulk _consume: takes at most up to the bound + 1 chars, char-exact."""
        allowed = self.max_block + 1 - len(self.raw)
        take = seg if len(seg) <= allowed else seg[:allowed]
        self.raw += take
        if len(self.raw) > self.max_block:
            self._degrade(out)
            return len(take), True
        return len(take), False

    def _st_j_pre_obj(self, ch, out):
        if not self._consume(ch, out):
            return
        if ch.isspace():
            return
        if ch == "{":
            self.state = "J_PRE_KEY"
            return
        self._degrade(out)

    def _st_j_pre_key(self, ch, out):
        if not self._consume(ch, out):
            return
        if ch.isspace():
            return
        if ch == '"':
            self.key_buf = ""
            self.esc = False
            self.u_buf = None
            self.state = "J_KEY"
            return
        self._degrade(out)

    def _string_char(self, ch) -> tuple[str | None, bool, bool]:
        """Incremental JSON string scanning.

        Returns (emitted_char, closed, bad). Raw control characters are kept
        literally and unknown escapes degrade to their literal spelling:
        models violate JSON more often than they need these chars.
        """
        if self.u_buf is not None:
            if ch in "0123456789abcdefABCDEF":
                self.u_buf += ch
                if len(self.u_buf) == 4:
                    code = int(self.u_buf, 16)
                    self.u_buf = None
                    return chr(code), False, False
                return None, False, False
            self.u_buf = None
            return None, False, True
        if self.esc:
            self.esc = False
            if ch == "u":
                self.u_buf = ""
                return None, False, False
            return _JSON_ESCAPES.get(ch, "\\" + ch), False, False
        if ch == "\\":
            self.esc = True
            return None, False, False
        if ch == '"':
            return None, True, False
        return ch, False, False

    def _st_j_key(self, ch, out):
        if not self._consume(ch, out):
            return
        emitted, closed, bad = self._string_char(ch)
        if bad:
            self._degrade(out)
            return
        if emitted is not None:
            self.key_buf += emitted
        if closed:
            key = self.key_buf
            if key not in ("action", "action_input") or key in self.keys_seen:
                self._degrade(out)
                return
            self.keys_seen.add(key)
            self.current_key = key
            if not self.action_started:
                self.action_started = True
                out.append(ActionStart())
            self.state = "J_POST_KEY"

    def _st_j_post_key(self, ch, out):
        if not self._consume(ch, out):
            return
        if ch.isspace():
            return
        if ch == ":":
            self.state = "J_PRE_VALUE"
            return
        self._degrade(out)

    def _st_j_pre_value(self, ch, out):
        if not self._consume(ch, out):
            return
        if ch.isspace():
            return
        if ch == '"':
            self.esc = False
            self.u_buf = None
            self.state = "J_VALUE"
            return
        self._degrade(out)  # the schema allows string values only

    def _st_j_value(self, ch, out):
        if not self._consume(ch, out):
            return
        emitted, closed, bad = self._string_char(ch)
        if bad:
            self._degrade(out)
            return
        if emitted is not None:
            if self.current_key == "action":
                self.name_buf += emitted
            else:
                self.input_parts.append(emitted)
                if self.name_done:
                    out.append(ActionInputDelta(emitted))
                else:
                    self.pending_input.append(emitted)
        if closed:
            if self.current_key == "action":
                self.name_done = True
                out.append(ActionName(self.name_buf))
                if self.pending_input:
                    # input arrived before the name; flush it now to keep
                    # the name-before-input event order
                    out.append(ActionInputDelta("".join(self.pending_input)))
                    self.pending_input = []
            self.state = "J_POST_VALUE"

    def _st_j_post_value(self, ch, out):
        if not self._consume(ch, out):
            return
        if ch.isspace():
            return
        if ch == ",":
            self.state = "J_PRE_KEY"
            return
        if ch == "}":
            if not self.name_done:
                self._degrade(out)
                return
            self.close_ticks = 0
            self.state = "J_CLOSE"
            return
        self._degrade(out)

    def _st_j_close(self, ch, out):
        if not self._consume(ch, out):
            return
        if self.close_ticks == 0 and ch.isspace():
            return
        if ch == "`":
            self.close_ticks += 1
            if self.close_ticks == 3:
                out.append(ActionEnd(self.name_buf, "".join(self.input_parts)))
                self.trailing_armed = True
                self._reset_block()
                self.state = "TEXT"
                self.line_start = False
            return
        self._degrade(out)

    def finish(self, out: list[RoleEvent]) -> None:
        if self.state == "FENCE":
            # an incomplete delimiter is just text
            self._text(out, self.fence_buf)
            self.fence_buf = ""
        elif self.state.startswith("J_"):
            out.append(ParseWarning(UNTERMINATED, self.raw))
            self._text(out, self.raw)
            self._reset_block()
        self.state = "TEXT"


class _WebotMachine:
    """States: TEXT, TAG (open-tag matching), THOUGHT, TH_CLOSE, ACTION, ACT_CLOSE.

    Whitespace between structures is a separator, not content: it is held
    back until the next non-space character decides whether it belongs to
    surrounding text or should vanish before a tag.
    """

    def __init__(self, max_action: int):
        self.max_action = max_action
        self.state = "TEXT"
        self.pending_ws = ""
        self.tag_buf = ""
        self.close_buf = ""
        self.interior = ""
        self._handlers = {
            "TEXT": self._st_text,
            "TAG": self._st_tag,
            "THOUGHT": self._st_thought,
            "TH_CLOSE": self._st_th_close,
            "ACTION": self._st_action,
            "ACT_CLOSE": self._st_act_close,
        }

    def pending_len(self) -> int:
        return len(self.tag_buf) + len(self.close_buf)

    def _flush_ws(self, out):
        if self.pending_ws:
            out.append(TextDelta(self.pending_ws))
            self.pending_ws = ""

    def step(self, ch: str, out: list[RoleEvent]) -> None:
        self._handlers[self.state](ch, out)

    def run(self, text: str, i: int, out: list[RoleEvent]) -> int:
        """Bulk-scan the hot states between angle brackets."""
        state = self.state
        if state == "THOUGHT":
            j = _next_of(text, i, "<")
            if j > i:
                out.append(ThoughtDelta(text[i:j]))
                return j
        elif state == "ACTION":
            j = _next_of(text, i, "<")
            if j > i:
                allowed = self.max_action + 1 - len(self.interior)
                seg = text[i:j]
                take = seg if len(seg) <= allowed else seg[:allowed]
                self.interior += take
                if len(self.interior) > self.max_action:
                    self._degrade_action(out)
                return i + len(take)
        elif state == "TEXT":
            j = _next_of(text, i, "<")
            if j > i:
                seg = text[i:j]
                stripped = seg.rstrip()
                if stripped:
                    combined = self.pending_ws + seg[: len(stripped)]
                    self.pending_ws = ""
                    out.append(TextDelta(combined))
                self.pending_ws += seg[len(stripped):]
                return j
        self.step(text[i], out)
        return i + 1

    def _st_text(self, ch, out):
        if ch == "<":
            self.tag_buf = "<"
            self.state = "TAG"
            return
        if ch.isspace():
            self.pending_ws += ch
            return
        self._flush_ws(out)
        out.append(TextDelta(ch))

    def _st_tag(self, ch, out):
        candidate = self.tag_buf + ch
        if _THOUGHT_OPEN.startswith(candidate) or _ACTION_OPEN.startswith(candidate):
            self.tag_buf = candidate
            if candidate == _THOUGHT_OPEN:
                self.pending_ws = ""  # separator ws vanishes before a tag
                self.tag_buf = ""
                self.state = "THOUGHT"
            elif candidate == _ACTION_OPEN:
                self.pending_ws = ""
                self.tag_buf = ""
                self.interior = ""
                self.state = "ACTION"
            return
        # not a recognized tag: everything buffered is plain text
        buf = self.tag_buf
        self.tag_buf = ""
        self._flush_ws(out)
        out.append(TextDelta(buf))
        self.state = "TEXT"
        self._st_text(ch, out)

    def _st_thought(self, ch, out):
        if ch == "<":
            self.close_buf = "<"
            self.state = "TH_CLOSE"
            return
        out.append(ThoughtDelta(ch))

    def _st_th_close(self, ch, out):
        candidate = self.close_buf + ch
        if _THOUGHT_CLOSE.startswith(candidate):
            self.close_buf = candidate
            if candidate == _THOUGHT_CLOSE:
                self.close_buf = ""
                self.state = "TEXT"
            return
        buf = self.close_buf
        self.close_buf = ""
        out.append(ThoughtDelta(buf))
        self.state = "THOUGHT"
        self._st_thought(ch, out)

    def _st_action(self, ch, out):
        if ch == "<":
            self.close_buf = "<"
            self.state = "ACT_CLOSE"
            return
        self.interior += ch
        if len(self.interior) > self.max_action:
            self._degrade_action(out)

    def _st_act_close(self, ch, out):
        candidate = self.close_buf + ch
        if _ACTION_CLOSE.startswith(candidate):
            self.close_buf = candidate
            if candidate == _ACTION_CLOSE:
                self.close_buf = ""
                self._emit_action(out)
                self.state = "TEXT"
            return
        self.interior += self.close_buf
        self.close_buf = ""
        self.state = "ACTION"
        self._st_action(ch, out)

    def _degrade_action(self, out):
        raw = _ACTION_OPEN + self.interior + self.close_buf
        out.append(ParseWarning(MALFORMED_ACTION, raw))
        out.append(TextDelta(raw))
        self.interior = ""
        self.close_buf = ""
        self.state = "TEXT"

    def _emit_action(self, out):
        parsed = split_call(self.interior)
        if parsed is None:
            raw = _ACTION_OPEN + self.interior + _ACTION_CLOSE
            out.append(ParseWarning(MALFORMED_ACTION, raw))
            out.append(TextDelta(raw))
        else:
            name, args, raw_args = parsed
            out.append(WebActionCall(name, args, raw_args))
        self.interior = ""

    def finish(self, out: list[RoleEvent]) -> None:
        if self.state == "TAG":
            self._flush_ws(out)
            out.append(TextDelta(self.tag_buf))
            self.tag_buf = ""
        elif self.state == "THOUGHT":
            out.append(ParseWarning(UNTERMINATED, _THOUGHT_OPEN))
        elif self.state == "TH_CLOSE":
            out.append(ParseWarning(UNTERMINATED, _THOUGHT_OPEN))
            out.append(ThoughtDelta(self.close_buf))
            self.close_buf = ""
        elif self.state in ("ACTION", "ACT_CLOSE"):
            raw = _ACTION_OPEN + self.interior + self.close_buf
            out.append(ParseWarning(UNTERMINATED, raw))
            out.append(TextDelta(raw))
            self.interior = ""
            self.close_buf = ""
        # trailing separator whitespace is dropped
        self.pending_ws = ""
        self.state = "TEXT"


def split_call(raw: str):
    """Split ``name(args)`` into (name, arg tuple, raw interior).

    Comma-splitting is quote aware; surrounding quotes are stripped and their
    escapes resolved. Returns None when the shape does not parse.
    """
    m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$", raw, re.S)
    if m is None:
        return None
    name, inner = m.group(1), m.group(2)
    # balanced-paren check over the interior, outside quotes
    depth = 0
    quote = None
    i = 0
    parts: list[str] = []
    cur: list[str] = []
    while i < len(inner):
        c = inner[i]
        if quote is not None:
            if c == "\\" and i + 1 < len(inner):
                cur.append(inner[i : i + 2])
                i += 2
                continue
            cur.append(c)
            if c == quote:
                quote = None
        elif c in "\"'":
            quote = c
            cur.append(c)
        elif c == "(":
            depth += 1
            cur.append(c)
        elif c == ")":
            depth -= 1
            if depth < 0:
                return None
            cur.append(c)
        elif c == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
        i += 1
    if depth != 0 or quote is not None:
        return None
    if cur or parts:
        parts.append("".join(cur))
    args = tuple(_unquote(p.strip()) for p in parts if p.strip() != "" or len(parts) > 1)
    return name, args, inner


def _unquote(s: str) -> str:
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        body = s[1:-1]
        return body.replace('\\"', '"').replace("\\'", "'").replace("\\\\", "\\")
    return s


class StreamParser:
    """Feed chunks of any size; role events come out identical regardless."""

    def __init__(self, grammar: str = GRAMMAR_CHAT, max_block: int = 262144, max_action: int = 8192):
        if grammar == GRAMMAR_CHAT:
            self._machine = _ChatMachine(max_block)
        elif grammar == GRAMMAR_WEBOT:
            self._machine = _WebotMachine(max_action)
        else:
            raise ValueError(f"unknown grammar {grammar!r}")
        self.grammar = grammar
        self.done = False

    def pending_len(self) -> int:
        """Length of the unconsumed delimiter buffer (memory-guard probe)."""
        return self._machine.pending_len()

    def feed(self, chunk: str) -> list[RoleEvent]:
        if self.done:
            raise RuntimeError("parser already finished")
        out: list[RoleEvent] = []
        i, n = 0, len(chunk)
        while i < n:
            i = self._machine.run(chunk, i, out)
        return coalesce(out)

    def finish(self) -> list[RoleEvent]:
        if self.done:
            return []
        self.done = True
        out: list[RoleEvent] = []
        self._machine.finish(out)
        return coalesce(out)


def parse_full(text: str, grammar: str = GRAMMAR_CHAT) -> list[RoleEvent]:
    """Whole-string parse: the reference the incremental path must match."""
    p = StreamParser(grammar)
    events = p.feed(text)
    events += p.finish()
    return coalesce(events)
