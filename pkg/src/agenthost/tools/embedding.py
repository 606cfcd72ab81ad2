"""Text embeddings for tool auto-selection.

Two providers share one interface: a remote embedding API client for
deployments, and a seeded feature-hashing embedder that makes ranking
behavior fully testable offline. Vectors are unit-normalized on ingest so
cosine similarity is a plain dot product.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

import httpx

from .. import errors
from ..errors import PlatformError

DEFAULT_DIM = 256
_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbedderUnavailable(PlatformError):
    category = errors.EMBEDDER_UNAVAILABLE


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)


def normalized(values) -> EmbeddingVector:
    norm = math.sqrt(sum(v * v for v in values))
    if norm == 0.0:
        return EmbeddingVector(tuple(0.0 for _ in values))
    return EmbeddingVector(tuple(v / norm for v in values))


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    return sum(x * y for x, y in zip(a.values, b.values))


class HashingEmbedder:
    """Deterministic term-frequency feature hashing, fixed dimension.

    Token index and sign come from a seeded SHA-256, so rankings are stable
    across processes and platforms.
    """

    def __init__(self, dim: int = DEFAULT_DIM, seed: str = "agenthost-embed-v1"):
        self.dim = dim
        self.seed = seed

    def embed(self, text: str) -> EmbeddingVector:
        acc = [0.0] * self.dim
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.sha256(f"{self.seed}:{token}".encode()).digest()
            idx = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] & 1 else -1.0
            acc[idx] += sign
        return normalized(acc)


class RemoteEmbedder:
    """Client for a hosted embeddings endpoint (JSON in, vector list out)."""

    def __init__(self, base_url: str, model_id: str = "default", api_key: str = "", dim: int | None = None,
                 client: httpx.Client | None = None, timeout_s: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.api_key = api_key
        self.dim = dim
        self._client = client or httpx.Client()
        self.timeout_s = timeout_s

    def embed(self, text: str) -> EmbeddingVector:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = self._client.post(
                f"{self.base_url}/embeddings",
                json={"model": self.model_id, "input": text},
                headers=headers,
                timeout=self.timeout_s,
            )
        except httpx.HTTPError as e:
            raise EmbedderUnavailable(f"embedding call failed: {e}") from e
        if resp.status_code != 200:
            raise EmbedderUnavailable(f"embedding endpoint returned {resp.status_code}")
        try:
            values = resp.json()["data"][0]["embedding"]
        except (KeyError, IndexError, ValueError) as e:
            raise EmbedderUnavailable(f"undecodable embedding payload: {e}") from e
        vec = normalized(values)
        if self.dim is None:
            self.dim = vec.dim
        return vec
