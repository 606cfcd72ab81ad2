from .documents import DocumentStore, FileDocumentStore, InMemoryDocumentStore, StoreUnavailable
from .kv import InMemoryKVStore, KVStore
from .sessions import (
    DEFAULT_UPLOAD_CAP,
    TOOLS_AUTO,
    GroundingPool,
    Session,
    SessionManager,
    TooLarge,
    load_history,
    persist_round,
    upload_file,
)

__all__ = [
    "DocumentStore", "FileDocumentStore", "InMemoryDocumentStore", "StoreUnavailable",
    "InMemoryKVStore", "KVStore",
    "DEFAULT_UPLOAD_CAP", "TOOLS_AUTO", "GroundingPool", "Session", "SessionManager",
    "TooLarge", "load_history", "persist_round", "upload_file",
]
