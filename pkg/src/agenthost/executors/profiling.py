"""Heuristic data profiling: per-column types, nulls, distincts, ranges."""

from __future__ import annotations

from ..datamodel import Artifact, ArtifactFactory, Kind, Table

DISTINCT_ESTIMATION_THRESHOLD = 10_000  # above this, distincts come from a prefix sample


def _infer_type(values) -> str:
    present = [v for v in values if v is not None]
    if not present:
        return "empty"
    if all(isinstance(v, bool) for v in present):
        return "boolean"
    if all(isinstance(v, int) and not isinstance(v, bool) for v in present):
        return "integer"
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in present):
        return "number"
    if all(isinstance(v, str) for v in present):
        return "text"
    return "mixed"


def profile_table(table: Table) -> Table:
    """Reference profiler over a Table payload; exact up to the sample threshold."""
    rows = table.rows
    sampled = rows[:DISTINCT_ESTIMATION_THRESHOLD]
    estimated = len(rows) > DISTINCT_ESTIMATION_THRESHOLD
    out_rows = []
    for i, col in enumerate(table.columns):
        values = [r[i] for r in rows]
        sample_values = [r[i] for r in sampled]
        col_type = _infer_type(values)
        nulls = sum(1 for v in values if v is None)
        distinct = len({v for v in sample_values if v is not None})
        distinct_text = f"~{distinct}" if estimated else str(distinct)
        if col_type in ("integer", "number"):
            present = [v for v in values if v is not None]
            lo = min(present) if present else None
            hi = max(present) if present else None
        else:
            lo = hi = None  # min/max only make sense for numerics
        out_rows.append((col, col_type, nulls, distinct_text, lo, hi))
    return Table(("column", "type", "nulls", "distinct", "min", "max"), tuple(out_rows))


def profile_data(table_artifact: Artifact, factory: ArtifactFactory) -> Artifact:
    if table_artifact.kind != Kind.TABLE:
        raise ValueError("profile_data requires a Table artifact")
    table: Table = table_artifact.payload
    report = profile_table(table)
    name = f"profile of {table_artifact.name or table_artifact.id}: {table.n_rows} rows × {len(table.columns)} columns"
    return factory.table(report.columns, report.rows, name=name)
