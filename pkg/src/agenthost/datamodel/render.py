"""Frontend renderings: every artifact maps to one display block document."""

from __future__ import annotations

from .artifacts import Artifact, Kind

BLOCK_TYPES = ("markdown", "code", "table", "image", "chart", "console", "error", "card")


def render_frontend(artifact: Artifact) -> dict:
    """Total mapping from artifact kind to a JSON display block.

    The result is {"block_type", "payload", "name"} and survives JSON
    serialization byte-identically (no non-JSON values allowed in).
    """
    k = artifact.kind
    name = artifact.name
    if k == Kind.TEXT:
        block, payload = "markdown", {"text": artifact.payload}
    elif k == Kind.CODE:
        block, payload = "code", {"text": artifact.payload, "language": artifact.lang or ""}
    elif k == Kind.CONSOLE_OUTPUT:
        block, payload = "console", {"text": artifact.payload}
    elif k == Kind.TABLE:
        t = artifact.payload
        block = "table"
        payload = {"columns": list(t.columns), "rows": [list(r) for r in t.rows], "total_rows": t.n_rows}
    elif k == Kind.IMAGE:
        blob = artifact.payload
        block, payload = "image", {"name": name, "mime": artifact.mime, "size": blob.size}
    elif k == Kind.CHART_SPEC:
        block, payload = "chart", artifact.payload
    elif k == Kind.ERROR:
        block, payload = "error", {"category": artifact.payload.category, "message": artifact.payload.message}
    elif k == Kind.CARD:
        block, payload = "card", artifact.payload
    else:  # FILE_REF / DATABASE_REF display as file cards
        blob = artifact.payload
        block = "card"
        payload = {
            "title": name or artifact.id,
            "subtitle": artifact.mime or "",
            "size": blob.size,
            "ref_kind": k.value,
        }
    return {"block_type": block, "payload": payload, "name": name}
