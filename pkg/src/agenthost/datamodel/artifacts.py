"""Typed content artifacts.

An Artifact is the single unit of content that flows between executors, the
model context, the frontend, and persistent storage. Each kind has exactly
one payload shape; converters for the three render targets live in
``linearize`` (model context), ``render`` (frontend), and ``to_record`` /
``from_record`` here (storage).
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from ..errors import CATEGORIES

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class Kind(str, Enum):
    TEXT = "text"
    CODE = "code"
    TABLE = "table"
    IMAGE = "image"
    FILE_REF = "file_ref"
    DATABASE_REF = "database_ref"
    CHART_SPEC = "chart_spec"
    CONSOLE_OUTPUT = "console_output"
    ERROR = "error"
    CARD = "card"


@dataclass(frozen=True)
class Table:
    """Columnar payload: every row has exactly one cell per column."""

    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row {i} has {len(row)} cells, expected {len(self.columns)}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class FileBlob:
    """Reference to stored bytes: a path on disk, inline data, or both."""

    size: int
    path: str | None = None
    data: bytes | None = None

    def read(self) -> bytes:
        if self.data is not None:
            return self.data
        assert self.path is not None
        with open(self.path, "rb") as f:
            return f.read()


@dataclass(frozen=True)
class ErrorInfo:
    category: str
    message: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown error category: {self.category}")


@dataclass(frozen=True)
class Artifact:
    id: str
    kind: Kind
    payload: Any
    name: str | None = None
    mime: str | None = None
    lang: str | None = None  # language tag, CODE only
    created_at: datetime = field(default=EPOCH)

    def __post_init__(self):
        _check_payload(self.kind, self.payload)


_PAYLOAD_TYPES: dict[Kind, type | tuple[type, ...]] = {
    Kind.TEXT: str,
    Kind.CODE: str,
    Kind.CONSOLE_OUTPUT: str,
    Kind.TABLE: Table,
    Kind.IMAGE: FileBlob,
    Kind.FILE_REF: FileBlob,
    Kind.DATABASE_REF: FileBlob,
    Kind.CHART_SPEC: dict,
    Kind.CARD: dict,
    Kind.ERROR: ErrorInfo,
}


def _check_payload(kind: Kind, payload: Any) -> None:
    expected = _PAYLOAD_TYPES[kind]
    if not isinstance(payload, expected):
        raise TypeError(f"{kind.value} payload must be {expected}, got {type(payload)}")
    if kind in (Kind.CHART_SPEC, Kind.CARD):
        json.dumps(payload)  # must be a well-formed JSON document


class ArtifactIds:
    """Session-owned monotonic id generator; keeps golden tests deterministic."""

    def __init__(self, prefix: str = "a"):
        self._prefix = prefix
        self._n = 0

    def next(self) -> str:
        self._n += 1
        return f"{self._prefix}-{self._n}"


class ArtifactFactory:
    """Convenience constructors bound to one id generator and clock."""

    def __init__(self, ids: ArtifactIds | None = None, clock=None):
        self.ids = ids or ArtifactIds()
        self._clock = clock

    def _at(self) -> datetime:
        return self._clock.now() if self._clock is not None else EPOCH

    def text(self, body: str, name: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.TEXT, body, name=name, created_at=self._at())

    def code(self, body: str, lang: str = "python", name: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.CODE, body, name=name, lang=lang, created_at=self._at())

    def console(self, body: str, name: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.CONSOLE_OUTPUT, body, name=name, created_at=self._at())

    def table(self, columns, rows, name: str | None = None) -> Artifact:
        tbl = Table(tuple(columns), tuple(tuple(r) for r in rows))
        return Artifact(self.ids.next(), Kind.TABLE, tbl, name=name, created_at=self._at())

    def image(self, blob: FileBlob, name: str | None = None, mime: str = "image/png") -> Artifact:
        return Artifact(self.ids.next(), Kind.IMAGE, blob, name=name, mime=mime, created_at=self._at())

    def file_ref(self, blob: FileBlob, name: str | None = None, mime: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.FILE_REF, blob, name=name, mime=mime, created_at=self._at())

    def database_ref(self, blob: FileBlob, name: str | None = None) -> Artifact:
        return Artifact(
            self.ids.next(), Kind.DATABASE_REF, blob, name=name,
            mime="application/vnd.sqlite3", created_at=self._at(),
        )

    def chart_spec(self, spec: dict, name: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.CHART_SPEC, spec, name=name, created_at=self._at())

    def card(self, card: dict, name: str | None = None) -> Artifact:
        return Artifact(self.ids.next(), Kind.CARD, card, name=name, created_at=self._at())

    def error(self, category: str, message: str, name: str | None = None) -> Artifact:
        return Artifact(
            self.ids.next(), Kind.ERROR, ErrorInfo(category, message), name=name, created_at=self._at()
        )


def to_record(a: Artifact) -> dict:
    """Storage rendering: a JSON-safe dict that round-trips via from_record."""
    payload: Any
    if isinstance(a.payload, Table):
        payload = {"columns": list(a.payload.columns), "rows": [list(r) for r in a.payload.rows]}
    elif isinstance(a.payload, FileBlob):
        payload = {
            "size": a.payload.size,
            "path": a.payload.path,
            "data_b64": base64.b64encode(a.payload.data).decode() if a.payload.data is not None else None,
        }
    elif isinstance(a.payload, ErrorInfo):
        payload = {"category": a.payload.category, "message": a.payload.message}
    else:
        payload = a.payload
    return {
        "id": a.id,
        "kind": a.kind.value,
        "payload": payload,
        "name": a.name,
        "mime": a.mime,
        "lang": a.lang,
        "created_at": a.created_at.isoformat(),
    }


def from_record(rec: dict) -> Artifact:
    kind = Kind(rec["kind"])
    raw = rec["payload"]
    payload: Any
    if kind == Kind.TABLE:
        payload = Table(tuple(raw["columns"]), tuple(tuple(r) for r in raw["rows"]))
    elif kind in (Kind.IMAGE, Kind.FILE_REF, Kind.DATABASE_REF):
        data = base64.b64decode(raw["data_b64"]) if raw.get("data_b64") else None
        payload = FileBlob(size=raw["size"], path=raw.get("path"), data=data)
    elif kind == Kind.ERROR:
        payload = ErrorInfo(raw["category"], raw["message"])
    else:
        payload = raw
    return Artifact(
        id=rec["id"],
        kind=kind,
        payload=payload,
        name=rec.get("name"),
        mime=rec.get("mime"),
        lang=rec.get("lang"),
        created_at=datetime.fromisoformat(rec["created_at"]),
    )
