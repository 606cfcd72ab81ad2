from .dom import INTERACTABLE_TAGS, PageElement, PageSnapshot, process_dom
from .driver import (
    BrowserDriver,
    DriverError,
    NavigationError,
    SimulatorDriver,
    StaleElement,
    WebAction,
)
from .executor import WebotExecutor, WebStepEvent
from .runner import (
    DEFAULT_STEP_CAP,
    ENDED_ERROR,
    ENDED_FINISH,
    ENDED_INTERRUPTED,
    ENDED_STEP_CAP,
    FORMATTED_ACTIONS,
    Attempt,
    StreamEmitter,
    WebRunReport,
    WebStep,
    format_previous_actions,
    web_task,
)

__all__ = [
    "INTERACTABLE_TAGS", "PageElement", "PageSnapshot", "process_dom",
    "BrowserDriver", "DriverError", "NavigationError", "SimulatorDriver", "StaleElement", "WebAction",
    "WebotExecutor", "WebStepEvent",
    "DEFAULT_STEP_CAP", "ENDED_ERROR", "ENDED_FINISH", "ENDED_INTERRUPTED", "ENDED_STEP_CAP",
    "FORMATTED_ACTIONS", "Attempt", "StreamEmitter", "WebRunReport", "WebStep",
    "format_previous_actions", "web_task",
]
