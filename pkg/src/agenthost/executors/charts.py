"""Chart-spec generation: a model call yields a neutral JSON chart document.

Spec dialect (renderable by any charting frontend):
{chart_type: "bar"|"line"|"pie"|"scatter", title, x: {name, values[]}, series: [{name, values[]}]}
"""

from __future__ import annotations

import json
import re

from .. import errors
from ..datamodel import Artifact, ArtifactFactory, Kind, linearize
from ..errors import PlatformError
from ..llm import ChatMessage, CompletionRequest, LlmClient

CHART_TYPES = ("bar", "line", "pie", "scatter")

CHART_PROMPT = """Design a chart for the request below over the given table.

Reply with exactly one JSON document (inside a ``` fence) of the shape:
{"chart_type": "bar"|"line"|"pie"|"scatter", "title": "...", "x": {"name": "...", "values": [...]}, "series": [{"name": "...", "values": [...]}]}

Table:
{table}

Request:
{request}
"""

RETRY_SUFFIX = """

Your previous reply was not a valid chart document ({reason}). Reply again with only the JSON document.
"""


class SpecInvalid(PlatformError):
    category = errors.SPEC_INVALID


_FENCE_RE = re.compile(r"```(?:json)?\s*\n?(.*?)```", re.S)


def validate_chart_spec(doc) -> str | None:
    """None when valid; otherwise a short reason."""
    if not isinstance(doc, dict):
        return "not an object"
    if doc.get("chart_type") not in CHART_TYPES:
        return f"chart_type must be one of {CHART_TYPES}"
    if not isinstance(doc.get("title"), str):
        return "title must be a string"
    x = doc.get("x")
    if not isinstance(x, dict) or not isinstance(x.get("name"), str) or not isinstance(x.get("values"), list):
        return "x must be {name, values[]}"
    series = doc.get("series")
    if not isinstance(series, list):
        return "series must be a list"
    for s in series:
        if not isinstance(s, dict) or not isinstance(s.get("name"), str) or not isinstance(s.get("values"), list):
            return "each series must be {name, values[]}"
        if len(s["values"]) != len(x["values"]):
            return "series values must align with x values"
    return None


def _extract_spec(reply: str):
    m = _FENCE_RE.search(reply)
    candidate = m.group(1) if m else reply
    start, end = candidate.find("{"), candidate.rfind("}")
    if start < 0 or end <= start:
        return None, "no JSON object in reply"
    try:
        return json.loads(candidate[start : end + 1]), None
    except json.JSONDecodeError as e:
        return None, f"unparseable JSON: {e}"


def build_chart(
    nl_query: str,
    table_artifact: Artifact,
    llm: LlmClient,
    factory: ArtifactFactory,
    table_budget: int = 1200,
    profile: str = "",
) -> Artifact:
    """One model call, one corrective retry, then SpecInvalid."""
    if table_artifact.kind != Kind.TABLE:
        raise ValueError("build_chart requires a Table artifact")
    base = CHART_PROMPT.replace("{table}", linearize(table_artifact, table_budget)).replace(
        "{request}", nl_query
    )
    prompt = base
    reason = ""
    for _ in range(2):
        reply = llm.complete(
            CompletionRequest(messages=[ChatMessage("user", prompt)], stream=False, profile=profile)
        )
        doc, parse_err = _extract_spec(reply)
        reason = parse_err or (validate_chart_spec(doc) or "")
        if not reason:
            return factory.chart_spec(doc, name=doc.get("title") or "chart")
        prompt = base + RETRY_SUFFIX.replace("{reason}", reason)
    raise SpecInvalid(f"chart spec invalid after retry: {reason}")
