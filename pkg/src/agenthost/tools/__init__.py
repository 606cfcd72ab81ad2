from .embedding import (
    DEFAULT_DIM,
    EmbedderUnavailable,
    EmbeddingVector,
    HashingEmbedder,
    RemoteEmbedder,
    cosine,
    normalized,
)
from .openapi import SpecParseError, extract_endpoints, parse_document
from .registry import (
    KIND_BUILTIN,
    KIND_OPENAPI,
    KIND_WEBBOT,
    AuthBinding,
    DuplicateName,
    EndpointSpec,
    ToolDescriptor,
    ToolRegistry,
    auto_select,
    ingest_openapi,
    load_catalog_dir,
)
from .synthetic import generate_catalog

__all__ = [
    "DEFAULT_DIM", "EmbedderUnavailable", "EmbeddingVector", "HashingEmbedder", "RemoteEmbedder",
    "cosine", "normalized",
    "SpecParseError", "extract_endpoints", "parse_document",
    "KIND_BUILTIN", "KIND_OPENAPI", "KIND_WEBBOT",
    "AuthBinding", "DuplicateName", "EndpointSpec", "ToolDescriptor", "ToolRegistry",
    "auto_select", "ingest_openapi", "load_catalog_dir",
    "generate_catalog",
]
