"""Tool/plugin registry: descriptors, catalog loading, auto-selection."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from .. import errors
from ..errors import PlatformError
from .embedding import EmbeddingVector, cosine
from .openapi import extract_endpoints, parse_document

KIND_BUILTIN = "builtin"
KIND_OPENAPI = "openapi_plugin"
KIND_WEBBOT = "webbot"


class DuplicateName(PlatformError):
    category = errors.DUPLICATE_NAME


@dataclass(frozen=True)
class EndpointSpec:
    operation_id: str
    method: str
    url_template: str
    param_schema: dict
    param_locations: dict
    summary: str
    disabled: bool = False

    def __post_init__(self):
        # url template params must be declared in the schema
        import re

        declared = set(self.param_schema.get("properties", {}))
        for p in re.findall(r"\{([^{}]+)\}", self.url_template):
            if p not in declared:
                raise ValueError(f"path param {p!r} missing from schema of {self.operation_id}")


@dataclass(frozen=True)
class AuthBinding:
    """Static credential placement: a header, query param, or bearer token."""

    kind: str  # "header" | "query" | "bearer" | "none"
    name: str = ""  # header/param name
    env_var: str = ""  # credential comes from this environment variable
    value: str = ""  # or inline (tests)

    def secret(self) -> str:
        return self.value or os.environ.get(self.env_var, "")


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    kind: str = KIND_BUILTIN
    endpoints: tuple[EndpointSpec, ...] = ()
    base_url: str = ""
    auth: AuthBinding | None = None
    enabled: bool = True
    embedding: EmbeddingVector | None = field(default=None, compare=False)
    spec_digest: str = ""  # identity of the ingested document

    def __post_init__(self):
        if not self.description:
            raise ValueError("descriptor needs a non-empty description")
        if self.kind == KIND_OPENAPI and not self.endpoints:
            raise ValueError("openapi plugin descriptor needs endpoint specs")


def ingest_openapi(document: str, name: str, description: str, base_url: str = "",
                   auth: AuthBinding | None = None) -> ToolDescriptor:
    """Build a plugin descriptor from an OpenAPI 3.x document (JSON or YAML)."""
    doc = parse_document(document)
    endpoints = tuple(EndpointSpec(**e) for e in extract_endpoints(doc))
    digest = __import__("hashlib").sha256(document.encode()).hexdigest()
    servers = doc.get("servers") or []
    url = base_url or (servers[0].get("url", "") if servers else "")
    return ToolDescriptor(
        name=name,
        description=description,
        kind=KIND_OPENAPI,
        endpoints=endpoints,
        base_url=url,
        auth=auth,
        spec_digest=digest,
    )


class ToolRegistry:
    """Read-mostly catalog with synchronized writes and snapshot reads."""

    def __init__(self):
        self._tools: dict[str, ToolDescriptor] = {}
        self._lock = threading.Lock()

    def add(self, descriptor: ToolDescriptor) -> ToolDescriptor:
        """Register a descriptor; re-adding an identical document is a no-op."""
        with self._lock:
            existing = self._tools.get(descriptor.name)
            if existing is not None:
                if existing.spec_digest == descriptor.spec_digest and existing.kind == descriptor.kind:
                    return existing
                raise DuplicateName(f"tool {descriptor.name!r} already registered with different contents")
            self._tools[descriptor.name] = descriptor
            return descriptor

    def remove(self, name: str) -> None:
        with self._lock:
            self._tools.pop(name, None)

    def replace_all(self, descriptors) -> None:
        with self._lock:
            self._tools = {d.name: d for d in descriptors}

    def get(self, name: str) -> ToolDescriptor | None:
        with self._lock:
            return self._tools.get(name)

    def all(self) -> list[ToolDescriptor]:
        with self._lock:
            return sorted(self._tools.values(), key=lambda d: d.name)

    def enabled(self) -> list[ToolDescriptor]:
        return [d for d in self.all() if d.enabled]

    def fill_embedding(self, name: str, vector: EmbeddingVector) -> None:
        with self._lock:
            d = self._tools.get(name)
            if d is not None and d.embedding is None:
                self._tools[name] = replace(d, embedding=vector)


def auto_select(instruction: str, catalog, k: int, embedder) -> list[tuple[ToolDescriptor, float]]:
    """Rank enabled descriptors by cosine similarity to the instruction.

    Ties break by descriptor name ascending; the result is deterministic for
    identical inputs. Description embeddings are computed (and cached on the
    descriptor) on first use.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = [d for d in catalog if d.enabled]
    if not pool:
        return []
    query = embedder.embed(instruction)
    scored = []
    for d in pool:
        vec = d.embedding
        if vec is None:
            vec = embedder.embed(d.description)
            object.__setattr__(d, "embedding", vec)  # frozen dataclass; embedding excluded from equality
        scored.append((d, cosine(query, vec)))
    scored.sort(key=lambda pair: (-pair[1], pair[0].name))
    return scored[: min(k, len(scored))]


# --- plugin catalog directory ------------------------------------------------

def load_catalog_dir(path: str | Path) -> list[ToolDescriptor]:
    """One folder per plugin: manifest.json + openapi.{json|yaml|yml}."""
    out = []
    root = Path(path)
    for plugin_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        manifest_path = plugin_dir / "manifest.json"
        if not manifest_path.exists():
            continue
        manifest = json.loads(manifest_path.read_text())
        doc_path = next(
            (plugin_dir / f"openapi.{ext}" for ext in ("json", "yaml", "yml") if (plugin_dir / f"openapi.{ext}").exists()),
            None,
        )
        if doc_path is None:
            continue
        auth = None
        if "auth" in manifest:
            a = manifest["auth"]
            auth = AuthBinding(kind=a.get("kind", "header"), name=a.get("name", ""), env_var=a.get("env", ""))
        out.append(
            ingest_openapi(
                doc_path.read_text(),
                name=manifest["name"],
                description=manifest["description"],
                base_url=manifest.get("base_url", ""),
                auth=auth,
            )
        )
    return out
