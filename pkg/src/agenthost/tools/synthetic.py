"""Synthetic plugin catalog: 200 descriptors with templated descriptions.

Exercises auto-selection and ingestion at the scale the platform targets,
without any real marketplace data.
"""

from __future__ import annotations

import json

from .registry import ToolDescriptor, ingest_openapi

_TOPICS = [
    "weather forecasts", "stock prices", "flight tickets", "hotel rooms", "restaurant menus",
    "movie showtimes", "news headlines", "currency exchange rates", "sports scores", "traffic conditions",
    "recipe ideas", "nutrition facts", "workout plans", "meditation sessions", "sleep tracking",
    "house listings", "used cars", "job openings", "college courses", "research papers",
    "song lyrics", "concert tickets", "podcast episodes", "book summaries", "art galleries",
    "museum hours", "train schedules", "bus routes", "bike rentals", "parking spots",
    "package tracking", "grocery delivery", "pharmacy stock", "doctor appointments", "pet care tips",
    "plant watering", "garden planning", "home repair", "cleaning services", "moving quotes",
]

_VERBS = ["search", "look up", "compare", "track", "summarize"]


def _description(i: int) -> str:
    topic = _TOPICS[i % len(_TOPICS)]
    verb = _VERBS[(i // len(_TOPICS)) % len(_VERBS)]
    return f"{verb.capitalize()} {topic} for any location or query via a hosted API."


def _minimal_spec(name: str) -> str:
    return json.dumps(
        {
            "openapi": "3.0.0",
            "info": {"title": name, "version": "1.0.0"},
            "paths": {
                "/query": {
                    "get": {
                        "operationId": "query",
                        "summary": f"Run a {name} query",
                        "parameters": [
                            {"name": "q", "in": "query", "required": True, "schema": {"type": "string"}}
                        ],
                    }
                }
            },
        }
    )


def generate_catalog(n: int = 200) -> list[ToolDescriptor]:
    return [
        ingest_openapi(_minimal_spec(f"tool_{i:03d}"), name=f"tool_{i:03d}", description=_description(i))
        for i in range(n)
    ]
