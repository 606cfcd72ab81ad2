"""Prompt catalog: template files, placeholder rendering, drift detection.

Templates live as UTF-8 data files next to this module. Rendering replaces
only the named placeholders a template declares; literal braces (the JSON
schema blocks) pass through untouched. Checksums let golden tests detect any
accidental edit to the shipped prompt text.
"""

from __future__ import annotations

import hashlib
import re
from pathlib import Path

from .. import errors
from ..errors import PlatformError

PROMPTS_DIR = Path(__file__).parent / "prompts"

# Every placeholder any template may carry. Rendering never treats other
# brace spans as placeholders.
PLACEHOLDERS = frozenset(
    {
        "tool_names",
        "input",
        "observation",
        "current_date",
        "plan",
        "formattedActions",
        "user_query",
        "previous_actions_string",
        "current_time",
        "processed_html",
        "retry_message",
        "specs_str",
        "input_str",
        "trial_history",
        "api_output",
        "chat_history",
        "dialect",
        "table_info",
        "question",
    }
)

_SLOT_RE = re.compile(r"\{(" + "|".join(sorted(PLACEHOLDERS)) + r")\}")


class UnboundPlaceholder(PlatformError):
    category = errors.UNBOUND_PLACEHOLDER


def load_prompt(name: str) -> str:
    return (PROMPTS_DIR / f"{name}.txt").read_text(encoding="utf-8")


def placeholders_in(template: str) -> set[str]:
    return set(_SLOT_RE.findall(template))


def render(template: str, **bindings: str) -> str:
    """Substitute the template's placeholders; every one must be bound."""
    needed = placeholders_in(template)
    missing = needed - bindings.keys()
    if missing:
        raise UnboundPlaceholder(f"unbound placeholders: {sorted(missing)}")
    return _SLOT_RE.sub(lambda m: str(bindings[m.group(1)]), template)


def render_prompt(name: str, **bindings: str) -> str:
    return render(load_prompt(name), **bindings)


def checksum(name: str) -> str:
    data = (PROMPTS_DIR / f"{name}.txt").read_bytes()
    return hashlib.sha256(data).hexdigest()


def catalog_names() -> list[str]:
    return sorted(p.stem for p in PROMPTS_DIR.glob("*.txt"))
