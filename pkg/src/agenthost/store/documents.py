"""Document tier for conversation records.

Reference implementations: an in-memory store for tests and a file-backed
store (append-only JSON-lines per user, plus a per-user index mapping
session ids to line numbers) durable across restarts.

File layout under the root directory:
    <user_id>.jsonl        one {"session_id", "round"} record per line
    <user_id>.index.json   {"<session_id>": [line_no, ...]}
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .. import errors
from ..errors import PlatformError


class StoreUnavailable(PlatformError):
    category = errors.STORE_UNAVAILABLE


class DocumentStore:
    def put(self, user_id: str, session_id: str, record: dict) -> None:
        raise NotImplementedError

    def get(self, user_id: str, session_id: str) -> list[dict]:
        raise NotImplementedError

    def query_by_user(self, user_id: str) -> list[tuple[str, dict]]:
        """All (session_id, record) pairs for a user, in insertion order."""
        raise NotImplementedError


class InMemoryDocumentStore(DocumentStore):
    def __init__(self):
        self._rows: list[tuple[str, str, dict]] = []
        self._lock = threading.Lock()

    def put(self, user_id, session_id, record):
        with self._lock:
            self._rows.append((user_id, session_id, json.loads(json.dumps(record))))

    def get(self, user_id, session_id):
        with self._lock:
            return [r for u, s, r in self._rows if u == user_id and s == session_id]

    def query_by_user(self, user_id):
        with self._lock:
            return [(s, r) for u, s, r in self._rows if u == user_id]


def _safe_user(user_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in user_id) or "_"


class FileDocumentStore(DocumentStore):
    """Durable before acknowledgment: every put is flushed and fsynced."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _paths(self, user_id: str) -> tuple[Path, Path]:
        safe = _safe_user(user_id)
        return self.root / f"{safe}.jsonl", self.root / f"{safe}.index.json"

    def put(self, user_id, session_id, record):
        data_path, index_path = self._paths(user_id)
        line = json.dumps({"session_id": session_id, "round": record}, sort_keys=True)
        with self._lock:
            try:
                index = json.loads(index_path.read_text()) if index_path.exists() else {}
                line_no = sum(1 for _ in data_path.open()) if data_path.exists() else 0
                with data_path.open("a", encoding="utf-8") as f:
                    f.write(line + "\n")
                    f.flush()
                    os.fsync(f.fileno())
                index.setdefault(session_id, []).append(line_no)
                tmp = index_path.with_suffix(".json.tmp")
                with tmp.open("w", encoding="utf-8") as f:
                    f.write(json.dumps(index, sort_keys=True))
                    f.flush()
                    os.fsync(f.fileno())
                tmp.replace(index_path)
            except OSError as e:
                raise StoreUnavailable(f"document store write failed: {e}") from e

    def _read_lines(self, user_id) -> list[dict]:
        data_path, _ = self._paths(user_id)
        if not data_path.exists():
            return []
        out = []
        with data_path.open(encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out

    def get(self, user_id, session_id):
        return [row["round"] for row in self._read_lines(user_id) if row["session_id"] == session_id]

    def query_by_user(self, user_id):
        return [(row["session_id"], row["round"]) for row in self._read_lines(user_id)]
