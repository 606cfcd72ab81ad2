"""Sessions: per-conversation state, the grounding pool, file upload."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from .. import errors
from ..clock import Clock, SystemClock
from ..datamodel import (
    Artifact,
    ArtifactFactory,
    ChatHistory,
    FileBlob,
    Round,
    round_from_record,
    round_to_record,
    table_from_csv,
    table_from_jsonl,
)
from ..errors import PlatformError
from .documents import DocumentStore, StoreUnavailable

DEFAULT_UPLOAD_CAP = 32 * 1024 * 1024

TOOLS_AUTO = "auto"


class TooLarge(PlatformError):
    category = errors.TOO_LARGE


class GroundingPool:
    """User-uploaded grounding sources, keyed by file name.

    Name collisions resolve deterministically by suffixing before the
    extension: a.csv, a-2.csv, a-3.csv, ...
    """

    def __init__(self):
        self._entries: dict[str, Artifact] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def names(self) -> list[str]:
        return list(self._entries)

    def get(self, name: str) -> Artifact | None:
        return self._entries.get(name)

    def items(self):
        return self._entries.items()

    def resolve_name(self, name: str) -> str:
        if name not in self._entries:
            return name
        if "." in name:
            stem, ext = name.rsplit(".", 1)
            pattern = lambda n: f"{stem}-{n}.{ext}"  # noqa: E731
        else:
            pattern = lambda n: f"{name}-{n}"  # noqa: E731
        n = 2
        while pattern(n) in self._entries:
            n += 1
        return pattern(n)

    def register(self, name: str, artifact: Artifact) -> str:
        key = self.resolve_name(name)
        self._entries[key] = artifact
        return key


@dataclass
class Session:
    id: str
    user_id: str
    profile_kind: str
    workspace: Path
    factory: ArtifactFactory
    history: ChatHistory = field(default_factory=ChatHistory)
    grounding: GroundingPool = field(default_factory=GroundingPool)
    selected_tools: tuple[str, ...] | str = ()  # names, or the TOOLS_AUTO marker
    created_at: str = ""
    cancel: threading.Event = field(default_factory=threading.Event)
    turn_lock: threading.Lock = field(default_factory=threading.Lock)
    extras: dict = field(default_factory=dict)
    pending_persists: list[Round] = field(default_factory=list)

    @property
    def busy(self) -> bool:
        return self.turn_lock.locked()


class SessionManager:
    def __init__(self, workspace_root: str | Path, clock: Clock | None = None):
        self.workspace_root = Path(workspace_root)
        self.clock = clock or SystemClock()
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, profile_kind: str, user_id: str) -> Session:
        with self._lock:
            self._counter += 1
            session_id = f"sess-{self._counter:04d}"
        workspace = self.workspace_root / session_id
        (workspace / "inputs").mkdir(parents=True, exist_ok=True)
        (workspace / "outputs").mkdir(parents=True, exist_ok=True)
        session = Session(
            id=session_id,
            user_id=user_id,
            profile_kind=profile_kind,
            workspace=workspace,
            factory=ArtifactFactory(clock=self.clock),
            created_at=self.clock.now().isoformat(),
        )
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def all(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())


# --- upload ------------------------------------------------------------------

_PNG = b"\x89PNG\r\n\x1a\n"
_JPEG = b"\xff\xd8\xff"
_GIF = (b"GIF87a", b"GIF89a")
_SQLITE = b"SQLite format 3\x00"

_IMAGE_MIMES = {_PNG: "image/png", _JPEG: "image/jpeg", _GIF[0]: "image/gif", _GIF[1]: "image/gif"}


def _sniff_image(data: bytes) -> str | None:
    for magic, mime in _IMAGE_MIMES.items():
        if data.startswith(magic):
            return mime
    return None


def upload_file(
    session: Session,
    name: str,
    data: bytes,
    declared_mime: str = "",
    size_cap: int = DEFAULT_UPLOAD_CAP,
) -> Artifact:
    """Content-sniffed ingestion into the grounding pool and the workspace.

    CSV and JSON-lines become Table artifacts, images become Image, SQLite
    files become DatabaseRef; anything unreadable falls back to FileRef
    rather than being rejected.
    """
    if len(data) > size_cap:
        raise TooLarge(f"upload of {len(data)} bytes exceeds the {size_cap} byte cap")
    factory = session.factory
    key = session.grounding.resolve_name(name)
    path = session.workspace / "inputs" / key
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    blob = FileBlob(size=len(data), path=str(path))

    artifact: Artifact | None = None
    image_mime = _sniff_image(data)
    if image_mime is not None:
        artifact = factory.image(blob, name=key, mime=image_mime)
    elif data.startswith(_SQLITE):
        artifact = factory.database_ref(blob, name=key)
    else:
        lowered = name.lower()
        try:
            text = data.decode("utf-8")
            if lowered.endswith(".csv") or declared_mime == "text/csv":
                table = table_from_csv(text)
                artifact = factory.table(table.columns, table.rows, name=key)
            elif lowered.endswith((".jsonl", ".ndjson")) or declared_mime == "application/x-ndjson":
                table = table_from_jsonl(text)
                artifact = factory.table(table.columns, table.rows, name=key)
        except (ValueError, UnicodeDecodeError):
            artifact = None  # unreadable content: keep the bytes as a plain file
    if artifact is None:
        artifact = factory.file_ref(blob, name=key, mime=declared_mime or "application/octet-stream")
    session.grounding.register(key, artifact)
    return artifact


# --- persistence -------------------------------------------------------------

def persist_round(session: Session, round_: Round, store: DocumentStore) -> bool:
    """Durably record a finished round; failures never block the reply.

    Returns True when stored; on failure the round queues for retry and the
    health status reflects the backlog.
    """
    pending = session.pending_persists + [round_]
    session.pending_persists = []
    stored = True
    for item in pending:
        try:
            store.put(session.user_id, session.id, round_to_record(item))
        except StoreUnavailable:
            session.pending_persists.append(item)
            stored = False
    return stored


def load_history(store: DocumentStore, user_id: str, session_id: str) -> ChatHistory:
    rounds = tuple(round_from_record(rec) for rec in store.get(user_id, session_id))
    return ChatHistory(rounds)
