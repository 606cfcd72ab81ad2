"""Conversation structure and token-budget truncation.

A round is one user message plus the agent's full response chain. Histories
are immutable; truncation returns a new history that is always a suffix of
the input's round list, dropping whole rounds oldest-first. The most recent
round survives even when it alone exceeds the budget; in that case it is
marked with a tightened per-round character budget so prompt assembly
linearizes its artifacts into less space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from .artifacts import Artifact, from_record, to_record
from .linearize import linearize

DEFAULT_ARTIFACT_BUDGET = 2000  # chars per artifact when assembling context


class Role(str, Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"
    TOOL_OBSERVATION = "tool_observation"


@dataclass(frozen=True)
class Message:
    role: Role
    blocks: tuple[Artifact, ...]
    round_index: int

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("message must carry at least one artifact")


@dataclass(frozen=True)
class Round:
    index: int
    messages: tuple[Message, ...]
    # Set only by truncation when this round alone exceeds the token budget.
    char_budget: int | None = None


@dataclass(frozen=True)
class ChatHistory:
    rounds: tuple[Round, ...] = ()

    def __post_init__(self):
        indices = [r.index for r in self.rounds]
        if indices != sorted(indices):
            raise ValueError("rounds must be ordered by round_index")

    def append(self, round_: Round) -> "ChatHistory":
        return ChatHistory(self.rounds + (round_,))


class TokenCounter:
    """Counting modes: cheap character approximation or a pluggable tokenizer."""

    def count(self, text: str) -> int:
        raise NotImplementedError


class ApproxCounter(TokenCounter):
    """ceil(len/ratio): >=1 for non-empty text, monotone under concatenation."""

    def __init__(self, chars_per_token: int = 4):
        if chars_per_token < 1:
            raise ValueError("chars_per_token must be >= 1")
        self.chars_per_token = chars_per_token

    def count(self, text: str) -> int:
        return math.ceil(len(text) / self.chars_per_token)


class PluggableCounter(TokenCounter):
    def __init__(self, tokenizer_id: str, fn: Callable[[str], int]):
        self.tokenizer_id = tokenizer_id
        self._fn = fn

    def count(self, text: str) -> int:
        n = self._fn(text)
        if text and n < 1:
            raise ValueError("tokenizer returned < 1 for non-empty text")
        return n


def _per_artifact_budget(round_: Round, artifact_budget: int) -> int:
    if round_.char_budget is None:
        return artifact_budget
    n = sum(len(m.blocks) for m in round_.messages) or 1
    return max(1, min(artifact_budget, round_.char_budget // n))


def message_texts(round_: Round, artifact_budget: int = DEFAULT_ARTIFACT_BUDGET) -> list[tuple[Role, str]]:
    """Per-message context renderings, honoring a tightened round budget."""
    per = _per_artifact_budget(round_, artifact_budget)
    return [
        (m.role, "\n".join(linearize(a, per) for a in m.blocks))
        for m in round_.messages
    ]


def round_context_text(round_: Round, artifact_budget: int = DEFAULT_ARTIFACT_BUDGET) -> str:
    """The text this round contributes to the model context."""
    return "\n".join(text for _, text in message_texts(round_, artifact_budget))


def round_tokens(round_: Round, counter: TokenCounter, artifact_budget: int = DEFAULT_ARTIFACT_BUDGET) -> int:
    return counter.count(round_context_text(round_, artifact_budget))


def _tighten(round_: Round, token_budget: int, counter: TokenCounter, artifact_budget: int) -> Round:
    """Find the largest char_budget that brings a lone oversized round under budget."""
    base = replace(round_, char_budget=None)
    n_artifacts = sum(len(m.blocks) for m in base.messages) or 1

    def used(mark: int) -> int:
        return round_tokens(replace(base, char_budget=mark), counter, artifact_budget)

    floor = n_artifacts  # one char per artifact; cannot render smaller
    hi = max(floor, token_budget * 4)
    if used(hi) <= token_budget:
        return replace(base, char_budget=hi)
    if used(floor) > token_budget:
        # Degenerate budget: even the minimal rendering overflows; keep it.
        return replace(base, char_budget=floor)
    lo = floor
    while lo + 1 < hi:  # used() is monotone in the mark
        mid = (lo + hi) // 2
        if used(mid) <= token_budget:
            lo = mid
        else:
            hi = mid
    return replace(base, char_budget=lo)


def truncate_history(
    history: ChatHistory,
    token_budget: int,
    counter: TokenCounter,
    artifact_budget: int = DEFAULT_ARTIFACT_BUDGET,
) -> ChatHistory:
    """Drop whole rounds from the front until the history fits the budget.

    The returned history is a contiguous suffix of the input rounds. The
    latest round is always retained; if it alone exceeds the budget it is
    marked with a tightened char_budget instead of being dropped.
    """
    if token_budget <= 0:
        raise ValueError("token_budget must be positive")
    if not history.rounds:
        return history

    kept: list[Round] = []
    total = 0
    for round_ in reversed(history.rounds):
        used = round_tokens(round_, counter, artifact_budget)
        if kept and total + used > token_budget:
            break
        if not kept and used > token_budget:
            # Sole-round case: keep the newest round under a tighter rendering.
            return ChatHistory((_tighten(round_, token_budget, counter, artifact_budget),))
        kept.append(round_)
        total += used
    return ChatHistory(tuple(reversed(kept)))


def history_tokens(history: ChatHistory, counter: TokenCounter, artifact_budget: int = DEFAULT_ARTIFACT_BUDGET) -> int:
    return sum(round_tokens(r, counter, artifact_budget) for r in history.rounds)


# --- storage records -------------------------------------------------------

def round_to_record(round_: Round) -> dict:
    return {
        "index": round_.index,
        "char_budget": round_.char_budget,
        "messages": [
            {"role": m.role.value, "round_index": m.round_index, "blocks": [to_record(a) for a in m.blocks]}
            for m in round_.messages
        ],
    }


def round_from_record(rec: dict) -> Round:
    messages = tuple(
        Message(Role(m["role"]), tuple(from_record(b) for b in m["blocks"]), m["round_index"])
        for m in rec["messages"]
    )
    return Round(rec["index"], messages, rec.get("char_budget"))
