"""Table ingestion from CSV (RFC 4180) and JSON-lines files."""

from __future__ import annotations

import csv
import io
import json
import re
from typing import Any

from .artifacts import Table

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def _coerce(cell: str) -> Any:
    if cell == "":
        return None
    if _INT_RE.match(cell):
        try:
            return int(cell)
        except ValueError:
            return cell
    if _FLOAT_RE.match(cell):
        try:
            return float(cell)
        except ValueError:
            return cell
    return cell


def table_from_csv(text: str) -> Table:
    """First row is the header; numeric-looking cells become int/float."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ValueError("empty CSV")
    header = tuple(rows[0])
    if not header or all(h == "" for h in header):
        raise ValueError("CSV has no header row")
    width = len(header)
    data = []
    for i, raw in enumerate(rows[1:]):
        if len(raw) != width:
            raise ValueError(f"CSV row {i + 1} has {len(raw)} cells, expected {width}")
        data.append(tuple(_coerce(c) for c in raw))
    return Table(header, tuple(data))


def table_from_jsonl(text: str) -> Table:
    """One JSON object per line; columns are the union of keys, in first-seen order."""
    columns: list[str] = []
    objs: list[dict] = []
    for i, line in enumerate(text.splitlines()):
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if not isinstance(obj, dict):
            raise ValueError(f"line {i + 1} is not a JSON object")
        objs.append(obj)
        for k in obj:
            if k not in columns:
                columns.append(k)
    if not objs:
        raise ValueError("empty JSON-lines input")
    rows = tuple(tuple(obj.get(c) for c in columns) for obj in objs)
    return Table(tuple(columns), rows)
