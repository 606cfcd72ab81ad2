"""Wire frames for the streaming turn endpoint.

One server-sent event per frame: `data: {json}` with a blank-line
terminator. Every frame carries the schema version, an event kind, a
payload, and a per-turn sequence number. A turn is exactly one frame
sequence matching:

    (text.delta | thought.delta | action-group | observation | block | error)* done
    action-group = action.start action.name action.input.delta*
"""

from __future__ import annotations

import json

FRAME_VERSION = 1

TEXT_DELTA = "text.delta"
THOUGHT_DELTA = "thought.delta"
ACTION_START = "action.start"
ACTION_NAME = "action.name"
ACTION_INPUT_DELTA = "action.input.delta"
OBSERVATION = "observation"
BLOCK = "block"
ERROR = "error"
DONE = "done"

FRAME_EVENTS = (
    TEXT_DELTA,
    THOUGHT_DELTA,
    ACTION_START,
    ACTION_NAME,
    ACTION_INPUT_DELTA,
    OBSERVATION,
    BLOCK,
    ERROR,
    DONE,
)


def make_frame(event: str, data: dict, seq: int) -> dict:
    if event not in FRAME_EVENTS:
        raise ValueError(f"unknown frame event {event!r}")
    return {"v": FRAME_VERSION, "event": event, "data": data, "seq": seq}


def frame_to_sse(frame: dict) -> str:
    return "data: " + json.dumps(frame, sort_keys=True, separators=(",", ":")) + "\n\n"


def parse_sse_log(text: str) -> list[dict]:
    frames = []
    for line in text.splitlines():
        if line.startswith("data: "):
            frames.append(json.loads(line[len("data: ") :]))
    return frames


def validate_frame_sequence(frames: list[dict]) -> None:
    """Machine check of the frame grammar; raises ValueError on violations."""
    if not frames:
        raise ValueError("empty frame sequence")
    state = "normal"  # normal | expect_name | in_inputs
    for i, fr in enumerate(frames):
        if fr.get("v") != FRAME_VERSION:
            raise ValueError(f"frame {i}: bad version {fr.get('v')!r}")
        if fr.get("seq") != i:
            raise ValueError(f"frame {i}: seq {fr.get('seq')} has gaps or disorder")
        event = fr.get("event")
        if event not in FRAME_EVENTS:
            raise ValueError(f"frame {i}: unknown event {event!r}")
        if state == "expect_name":
            if event != ACTION_NAME:
                raise ValueError(f"frame {i}: action.start must be followed by action.name, got {event}")
            state = "in_inputs"
            continue
        if event == ACTION_START:
            state = "expect_name"
            continue
        if event == ACTION_INPUT_DELTA:
            if state != "in_inputs":
                raise ValueError(f"frame {i}: action.input.delta outside an action group")
            continue
        state = "normal"
        if event == DONE and i != len(frames) - 1:
            raise ValueError(f"frame {i}: done must be the last frame")
    if frames[-1].get("event") != DONE:
        raise ValueError("frame sequence does not end with done")
    if sum(1 for f in frames if f.get("event") == DONE) != 1:
        raise ValueError("exactly one done frame is required")
