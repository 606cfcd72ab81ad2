"""API-plugin execution: model-selected endpoint, HTTP call, validity check.

The three prompt stages (select, retry with trial history, yes/no stop
check) drive a bounded trial loop. Every failure is categorized and carried
in the trial history so the model can change the endpoint or arguments.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import httpx

from .. import errors
from ..agents.catalog import render_prompt
from ..agents.types import OBS_OK, OBS_TOOL_ERROR, Observation, ToolContext
from ..datamodel import Artifact, ArtifactFactory, Table, linearize
from ..errors import PlatformError
from ..llm import ChatMessage, CompletionRequest, LlmClient
from ..tools.registry import AuthBinding, EndpointSpec, ToolDescriptor

DEFAULT_MAX_TRIALS = 3
TRIAL_OUTPUT_CAP = 2048  # chars of output stored per trial for the retry prompt
RESPONSE_BUDGET = 4096  # chars kept from an overlength response body


class LlmFormatError(PlatformError):
    category = errors.LLM_FORMAT


class UnknownEndpoint(PlatformError):
    category = errors.UNKNOWN_ENDPOINT


class HttpCallError(PlatformError):
    category = errors.HTTP_ERROR

    def __init__(self, detail: str, status: int):
        super().__init__(detail)
        self.status = status


class Exhausted(PlatformError):
    category = errors.EXHAUSTED

    def __init__(self, detail: str, trials: list["Trial"]):
        super().__init__(detail)
        self.trials = trials


@dataclass
class Trial:
    endpoint: str
    input_json: dict
    output: str = ""  # truncated before storage
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "input_json": self.input_json,
            "output": self.output[:TRIAL_OUTPUT_CAP],
            "errors": self.error or "",
        }


@dataclass
class ApiRunResult:
    artifact: Artifact
    trials: list[Trial]
    validated: bool


def specs_str(endpoints) -> str:
    """Endpoint specs rendered for the selection prompts."""
    return json.dumps(
        [
            {
                "endpoint": e.operation_id,
                "method": e.method,
                "path": e.url_template,
                "summary": e.summary,
                "params": e.param_schema,
            }
            for e in endpoints
            if not e.disabled
        ],
        indent=2,
        sort_keys=True,
    )


_FENCE_RE = re.compile(r"```(?:json)?\s*\n?(.*?)```", re.S)


def extract_reply_json(reply: str) -> dict:
    """The selection reply: a fenced JSON object, or bare JSON as fallback."""
    m = _FENCE_RE.search(reply)
    candidate = m.group(1) if m else reply
    start = candidate.find("{")
    end = candidate.rfind("}")
    if start < 0 or end <= start:
        raise LlmFormatError(f"no JSON object in reply: {reply[:200]!r}")
    try:
        doc = json.loads(candidate[start : end + 1])
    except json.JSONDecodeError as e:
        raise LlmFormatError(f"unparseable selection reply: {e}") from e
    if not isinstance(doc, dict):
        raise LlmFormatError("selection reply is not an object")
    return doc


def coerce_input(input_json: dict, schema: dict) -> dict:
    """Schema-guided coercion: numeric strings become numbers, and so on."""
    props = schema.get("properties", {})
    out = {}
    for key, value in input_json.items():
        typ = (props.get(key) or {}).get("type")
        if isinstance(value, str):
            if typ == "integer":
                try:
                    value = int(value.strip())
                except ValueError:
                    pass
            elif typ == "number":
                try:
                    value = float(value.strip())
                except ValueError:
                    pass
            elif typ == "boolean" and value.strip().lower() in ("true", "false"):
                value = value.strip().lower() == "true"
        out[key] = value
    return out


def _complete(llm: LlmClient, user_text: str, profile: str) -> str:
    req = CompletionRequest(
        messages=[
            ChatMessage("system", render_prompt("api_system").strip()),
            ChatMessage("user", user_text),
        ],
        stream=False,
        profile=profile,
    )
    return llm.complete(req)


def select_and_fill(endpoints, input_str: str, llm: LlmClient, profile: str = "") -> tuple[EndpointSpec, dict]:
    reply = _complete(llm, render_prompt("api_select", specs_str=specs_str(endpoints), input_str=input_str), profile)
    return _parse_selection(reply, endpoints)


def select_with_history(endpoints, input_str: str, trials: list[Trial], llm: LlmClient,
                        profile: str = "") -> tuple[EndpointSpec, dict]:
    prompt = render_prompt(
        "api_retry",
        specs_str=specs_str(endpoints),
        input_str=input_str,
        trial_history=json.dumps([t.to_dict() for t in trials], indent=2),
    )
    return _parse_selection(_complete(llm, prompt, profile), endpoints)


def _parse_selection(reply: str, endpoints) -> tuple[EndpointSpec, dict]:
    doc = extract_reply_json(reply)
    name = doc.get("endpoint")
    input_json = doc.get("input_json")
    if not isinstance(name, str) or not isinstance(input_json, dict):
        raise LlmFormatError(f"selection reply missing endpoint/input_json: {doc}")
    by_id = {e.operation_id: e for e in endpoints if not e.disabled}
    if name not in by_id:
        raise UnknownEndpoint(f"endpoint {name!r} not in spec (have: {sorted(by_id)})")
    endpoint = by_id[name]
    return endpoint, coerce_input(input_json, endpoint.param_schema)


def invoke(
    endpoint: EndpointSpec,
    input_json: dict,
    base_url: str,
    auth: AuthBinding | None,
    factory: ArtifactFactory,
    client: httpx.Client | None = None,
    timeout_s: float = 30.0,
    response_budget: int = RESPONSE_BUDGET,
) -> Artifact:
    """Perform the HTTP call and wrap the response as a Text or Table artifact."""
    client = client or httpx.Client()
    url_path = endpoint.url_template
    params: dict = {}
    body: dict = {}
    headers: dict = {}
    for key, value in input_json.items():
        where = endpoint.param_locations.get(key, "query")
        if where == "path":
            url_path = url_path.replace("{" + key + "}", str(value))
        elif where == "body":
            body[key] = value
        elif where == "header":
            headers[key] = str(value)
        else:
            params[key] = value
    if auth is not None:
        if auth.kind == "bearer":
            headers["Authorization"] = f"Bearer {auth.secret()}"
        elif auth.kind == "header":
            headers[auth.name] = auth.secret()
        elif auth.kind == "query":
            params[auth.name] = auth.secret()
    try:
        resp = client.request(
            endpoint.method,
            base_url.rstrip("/") + url_path,
            params=params or None,
            json=body or None,
            headers=headers or None,
            timeout=timeout_s,
        )
    except httpx.TimeoutException as e:
        raise PlatformError(f"API call timed out after {timeout_s}s", category=errors.TIMEOUT) from e
    except httpx.HTTPError as e:
        raise PlatformError(f"connection failed: {e}", category=errors.CONNECTION_FAILED) from e
    if not 200 <= resp.status_code < 300:
        raise HttpCallError(f"API returned {resp.status_code}: {resp.text[:200]}", resp.status_code)

    text = resp.text
    try:
        doc = resp.json()
    except (json.JSONDecodeError, ValueError):
        doc = None
    if isinstance(doc, list) and doc and all(isinstance(row, dict) for row in doc):
        columns: list[str] = []
        for row in doc:
            for k in row:
                if k not in columns:
                    columns.append(k)
        rows = [tuple(row.get(c) for c in columns) for row in doc]
        return factory.table(columns, rows, name=endpoint.operation_id)
    art = factory.text(text, name=endpoint.operation_id)
    if len(text) > response_budget:
        # overlength bodies are kept in their budgeted linearized form
        art = factory.text(linearize(art, response_budget), name=endpoint.operation_id)
    return art


_ALPHA_RE = re.compile(r"[A-Za-z]+")


def validate(output: str, input_str: str, endpoints, llm: LlmClient, profile: str = "") -> bool:
    """Yes/no model check on the API output; anything unclear counts as no."""
    prompt = render_prompt(
        "api_stop", specs_str=specs_str(endpoints), input_str=input_str, api_output=output[:TRIAL_OUTPUT_CAP]
    )
    reply = _complete(llm, prompt, profile)
    m = _ALPHA_RE.search(reply)
    token = m.group(0).lower() if m else ""
    return token == "yes"


def run(
    endpoints,
    input_str: str,
    llm: LlmClient,
    base_url: str,
    factory: ArtifactFactory,
    auth: AuthBinding | None = None,
    client: httpx.Client | None = None,
    max_trials: int = DEFAULT_MAX_TRIALS,
    timeout_s: float = 30.0,
    profile: str = "",
) -> ApiRunResult:
    """Trial loop: select, invoke, validate; retry with accumulated history."""
    if max_trials < 1:
        raise ValueError("max_trials must be >= 1")
    trials: list[Trial] = []
    last_output: Artifact | None = None
    for trial_no in range(1, max_trials + 1):
        try:
            if trial_no == 1:
                endpoint, input_json = select_and_fill(endpoints, input_str, llm, profile)
            else:
                endpoint, input_json = select_with_history(endpoints, input_str, trials, llm, profile)
        except (LlmFormatError, UnknownEndpoint) as e:
            trials.append(Trial(endpoint="", input_json={}, error=f"{e.category}: {e.detail}"))
            continue
        try:
            artifact = invoke(
                endpoint, input_json, base_url, auth, factory, client=client, timeout_s=timeout_s
            )
        except PlatformError as e:
            trials.append(
                Trial(endpoint.operation_id, input_json, error=f"{e.category}: {e.detail}")
            )
            continue
        output_text = linearize(artifact, TRIAL_OUTPUT_CAP)
        ok = validate(output_text, input_str, endpoints, llm, profile)
        trials.append(
            Trial(endpoint.operation_id, input_json, output=output_text,
                  error=None if ok else "output did not validate against the request")
        )
        last_output = artifact
        if ok:
            return ApiRunResult(artifact, trials, validated=True)
    if last_output is not None:
        return ApiRunResult(last_output, trials, validated=False)
    raise Exhausted(f"no usable API output after {max_trials} trials", trials)


class ApiPluginExecutor:
    """ToolExecutor adapter: one registered OpenAPI plugin as a chat tool."""

    def __init__(self, descriptor: ToolDescriptor, client: httpx.Client | None = None,
                 max_trials: int = DEFAULT_MAX_TRIALS, timeout_s: float = 30.0):
        self.name = descriptor.name
        self.description = descriptor.description
        self.descriptor = descriptor
        self._client = client
        self.max_trials = max_trials
        self.timeout_s = timeout_s

    def run(self, action_input: str, ctx: ToolContext) -> Observation:
        try:
            result = run(
                self.descriptor.endpoints,
                action_input,
                ctx.llm,
                self.descriptor.base_url,
                ctx.factory,
                auth=self.descriptor.auth,
                client=self._client,
                max_trials=self.max_trials,
                timeout_s=self.timeout_s,
                profile=ctx.profile,
            )
        except Exhausted as e:
            detail = "; ".join(t.error or "unvalidated" for t in e.trials)
            return Observation(
                (ctx.factory.error(errors.EXHAUSTED, f"{self.name} failed after {len(e.trials)} trials: {detail}"),),
                OBS_TOOL_ERROR,
            )
        artifacts = [result.artifact]
        if not result.validated:
            artifacts.insert(0, ctx.factory.text("[unvalidated output] the API reply may not fully answer the query"))
        return Observation(tuple(artifacts), OBS_OK)
