"""Model-context renderings of artifacts under a hard character budget."""

from __future__ import annotations

import json

from .artifacts import Artifact, Kind, Table

ELLIPSIS = "…"
TABLE_DELIM = " | "


def _clip(text: str, budget: int) -> str:
    """Tail-truncate with a marker; result length never exceeds budget."""
    if len(text) <= budget:
        return text
    if budget <= 1:
        return ELLIPSIS[:budget]
    return text[: budget - 1] + ELLIPSIS


def _table_text(table: Table, budget: int) -> str:
    header = TABLE_DELIM.join(table.columns)
    row_lines = [TABLE_DELIM.join(str(c) for c in row) for row in table.rows]
    full = "\n".join([header] + row_lines)
    if len(full) <= budget:
        return full
    marker = f"{ELLIPSIS} ({table.n_rows} rows total)"
    kept: list[str] = [header]
    for line in row_lines:
        candidate = "\n".join(kept + [line, marker])
        if len(candidate) > budget:
            break
        kept.append(line)
    out = "\n".join(kept + [marker])
    # Degenerate budgets: even header + marker may not fit.
    return _clip(out, budget)


def linearize(artifact: Artifact, char_budget: int) -> str:
    """Render any artifact as an LLM-context string of at most char_budget chars.

    Tables keep the header plus as many leading rows as fit, with an elision
    marker carrying the total row count when truncated. Binary kinds collapse
    into a bracketed placeholder naming the file and media type.
    """
    if char_budget <= 0:
        raise ValueError("char_budget must be positive")
    k = artifact.kind
    if k in (Kind.TEXT, Kind.CODE, Kind.CONSOLE_OUTPUT):
        return _clip(artifact.payload, char_budget)
    if k == Kind.TABLE:
        return _table_text(artifact.payload, char_budget)
    if k == Kind.CHART_SPEC or k == Kind.CARD:
        return _clip(json.dumps(artifact.payload, sort_keys=True), char_budget)
    if k == Kind.ERROR:
        return _clip(f"[error: {artifact.payload.category}] {artifact.payload.message}", char_budget)
    # IMAGE / FILE_REF / DATABASE_REF placeholder form
    word = {Kind.IMAGE: "image", Kind.FILE_REF: "file", Kind.DATABASE_REF: "database"}[k]
    name = artifact.name or artifact.id
    mime = artifact.mime or "unknown"
    return _clip(f"[{word}: {name} ({mime})]", char_budget)
