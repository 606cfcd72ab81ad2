from .catalog import UnboundPlaceholder, catalog_names, checksum, load_prompt, render, render_prompt
from .loop import (
    ENDED_CANCELLED,
    ENDED_CAP,
    ENDED_ERROR,
    ENDED_FINAL,
    AgentLoop,
    AssistantText,
    ErrorEvent,
    FinalAnswer,
    FinalAnswerEvent,
    ObservationEvent,
    TurnEvent,
    TurnTranscript,
    build_prompt,
    compose_observation,
)
from .profiles import MAX_ITERATIONS, PROFILE_DATA, PROFILE_KINDS, PROFILE_PLUGINS, PROFILE_WEB, AgentProfile, load_profile
from .types import (
    OBS_INTERRUPTED,
    OBS_OK,
    OBS_TOOL_ERROR,
    Observation,
    ToolCall,
    ToolContext,
    ToolExecutor,
)

__all__ = [
    "UnboundPlaceholder", "catalog_names", "checksum", "load_prompt", "render", "render_prompt",
    "ENDED_CANCELLED", "ENDED_CAP", "ENDED_ERROR", "ENDED_FINAL",
    "AgentLoop", "AssistantText", "ErrorEvent", "FinalAnswer", "FinalAnswerEvent",
    "ObservationEvent", "TurnEvent", "TurnTranscript", "build_prompt", "compose_observation",
    "MAX_ITERATIONS", "PROFILE_DATA", "PROFILE_KINDS", "PROFILE_PLUGINS", "PROFILE_WEB",
    "AgentProfile", "load_profile",
    "OBS_INTERRUPTED", "OBS_OK", "OBS_TOOL_ERROR",
    "Observation", "ToolCall", "ToolContext", "ToolExecutor",
]
