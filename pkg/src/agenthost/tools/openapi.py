"""OpenAPI 3.x ingestion: documents in, flat endpoint specs out."""

from __future__ import annotations

import json
import re

import yaml

from .. import errors
from ..errors import PlatformError

HTTP_METHODS = ("get", "put", "post", "delete", "options", "head", "patch")

# auth schemes the invoker can satisfy with static keys/headers
SUPPORTED_AUTH_TYPES = {"apiKey", "http", None}


class SpecParseError(PlatformError):
    category = errors.SPEC_PARSE


def parse_document(text: str) -> dict:
    """Parse an OpenAPI document from JSON or YAML, reporting the position."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    else:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
            problem = getattr(e, "problem", None) or str(e)
            raise SpecParseError(f"{where}{problem}") from e
    if not isinstance(doc, dict):
        raise SpecParseError("document is not a mapping")
    version = str(doc.get("openapi", ""))
    if not version.startswith("3"):
        raise SpecParseError(f"unsupported or missing openapi version: {version!r}")
    if not isinstance(doc.get("paths"), dict):
        raise SpecParseError("document has no paths object")
    return doc


def _resolve_ref(doc: dict, node):
    if isinstance(node, dict) and "$ref" in node:
        ref = node["$ref"]
        if not ref.startswith("#/"):
            return {}
        target = doc
        for part in ref[2:].split("/"):
            if not isinstance(target, dict) or part not in target:
                return {}
            target = target[part]
        return target
    return node


def _scheme_supported(doc: dict, requirement: list) -> bool:
    """True when every referenced security scheme uses static credentials."""
    schemes = (doc.get("components") or {}).get("securitySchemes") or {}
    for req in requirement:
        for name in req:
            scheme = _resolve_ref(doc, schemes.get(name, {}))
            if scheme.get("type") not in SUPPORTED_AUTH_TYPES:
                return False
    return True


def _slug(path: str, method: str) -> str:
    cleaned = re.sub(r"[{}/]+", "_", path).strip("_") or "root"
    return f"{method}_{cleaned}"


def extract_endpoints(doc: dict) -> list[dict]:
    """Flatten paths x methods into endpoint dicts.

    Each endpoint carries operation_id, method, url_template, a JSON-schema
    fragment for its parameters, per-parameter locations, a summary, and a
    disabled flag for endpoints behind unsupported auth schemes.
    """
    endpoints = []
    global_security = doc.get("security") or []
    for path, item in sorted(doc["paths"].items()):
        item = _resolve_ref(doc, item) or {}
        shared_params = [_resolve_ref(doc, p) for p in item.get("parameters", [])]
        for method in HTTP_METHODS:
            if method not in item:
                continue
            op = _resolve_ref(doc, item[method]) or {}
            params = shared_params + [_resolve_ref(doc, p) for p in op.get("parameters", [])]
            properties: dict = {}
            required: list[str] = []
            locations: dict[str, str] = {}
            for p in params:
                name = p.get("name")
                if not name:
                    continue
                schema = _resolve_ref(doc, p.get("schema", {})) or {}
                properties[name] = schema
                locations[name] = p.get("in", "query")
                if p.get("required") or locations[name] == "path":
                    required.append(name)
            body = _resolve_ref(doc, op.get("requestBody", {})) or {}
            body_schema = _resolve_ref(
                doc, ((body.get("content") or {}).get("application/json") or {}).get("schema", {})
            ) or {}
            for name, schema in (body_schema.get("properties") or {}).items():
                properties[name] = _resolve_ref(doc, schema) or {}
                locations[name] = "body"
            required += [n for n in body_schema.get("required", []) if n in properties]
            security = op["security"] if "security" in op else global_security
            endpoints.append(
                {
                    "operation_id": op.get("operationId") or _slug(path, method),
                    "method": method.upper(),
                    "url_template": path,
                    "param_schema": {
                        "type": "object",
                        "properties": properties,
                        "required": sorted(set(required)),
                    },
                    "param_locations": locations,
                    "summary": op.get("summary") or op.get("description") or "",
                    "disabled": not _scheme_supported(doc, security),
                }
            )
    return endpoints
