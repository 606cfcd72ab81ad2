"""Agent profiles: the per-kind prompt bundle and iteration budget."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import load_prompt

PROFILE_DATA = "data"
PROFILE_PLUGINS = "plugins"
PROFILE_WEB = "web"

PROFILE_KINDS = (PROFILE_DATA, PROFILE_PLUGINS, PROFILE_WEB)

# tool-iteration caps the runtime enforces, matching the instruction text
# inside the corresponding tool-response templates
MAX_ITERATIONS = {PROFILE_DATA: 3, PROFILE_PLUGINS: 5, PROFILE_WEB: 3}


@dataclass(frozen=True)
class AgentProfile:
    kind: str
    system_prompt: str
    format_instructions: str
    suffix: str
    tool_response_template: str
    max_tool_iterations: int


def load_profile(kind: str) -> AgentProfile:
    if kind not in PROFILE_KINDS:
        raise ValueError(f"unknown profile kind {kind!r}")
    return AgentProfile(
        kind=kind,
        system_prompt=load_prompt(f"{kind}_system"),
        format_instructions=load_prompt(f"{kind}_format_instructions"),
        suffix=load_prompt(f"{kind}_suffix"),
        tool_response_template=load_prompt(f"{kind}_tool_response"),
        max_tool_iterations=MAX_ITERATIONS[kind],
    )
