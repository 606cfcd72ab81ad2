"""Dataset search behind a pluggable client: live HTTP or offline fixture."""

from __future__ import annotations

import httpx

from .. import errors
from ..datamodel import Artifact, ArtifactFactory
from ..errors import PlatformError


class ClientUnavailable(PlatformError):
    category = errors.CLIENT_UNAVAILABLE


class FixtureSearchClient:
    """Canned result cards for offline runs."""

    def __init__(self, cards: list[dict] | None = None):
        self.cards = cards if cards is not None else []
        self.queries: list[str] = []

    def search(self, query: str) -> list[dict]:
        self.queries.append(query)
        return list(self.cards)


class HttpSearchClient:
    def __init__(self, base_url: str, client: httpx.Client | None = None, timeout_s: float = 15.0):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client()
        self.timeout_s = timeout_s

    def search(self, query: str) -> list[dict]:
        try:
            resp = self._client.get(
                f"{self.base_url}/datasets/search", params={"q": query}, timeout=self.timeout_s
            )
        except httpx.HTTPError as e:
            raise ClientUnavailable(f"dataset search unreachable: {e}") from e
        if resp.status_code != 200:
            raise ClientUnavailable(f"dataset search returned {resp.status_code}")
        try:
            docs = resp.json()
        except ValueError as e:
            raise ClientUnavailable(f"undecodable dataset search payload: {e}") from e
        return [d for d in docs if isinstance(d, dict)]


def dataset_search(query: str, client, factory: ArtifactFactory) -> list[Artifact]:
    """Returns one card artifact per result: {title, url, size}."""
    cards = client.search(query)
    return [
        factory.card(
            {"title": c.get("title", "dataset"), "url": c.get("url", ""), "size": c.get("size", "")},
            name=c.get("title", "dataset"),
        )
        for c in cards
    ]
