"""Bundled IDMEF schema and the 14-message evaluation corpus."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .binding import BindingManifest, build_manifest
from .minifier import MinificationResult, minify
from .schema import SchemaDocument, parse_schema

SCHEMA_NAME = "idmef.xsd"
_ORDER_PREFIX = re.compile(r"^\d+-")


def schema_bytes() -> bytes:
    return (resources.files("xsdmin") / "data" / SCHEMA_NAME).read_bytes()


def load_corpus(directory=None) -> list[tuple[str, bytes]]:
    """``(name, xml bytes)`` pairs sorted by file name; a leading ``NN-``
    ordering prefix is stripped from the name."""
    if directory is None:
        root = resources.files("xsdmin") / "data" / "corpus"
        files = sorted((p for p in root.iterdir() if p.name.endswith(".xml")), key=lambda p: p.name)
    else:
        files = sorted(Path(directory).glob("*.xml"))
    return [(_ORDER_PREFIX.sub("", p.name[:-4]), p.read_bytes()) for p in files]


@dataclass(frozen=True)
class Pipeline:
    schema: SchemaDocument
    result: MinificationResult
    manifest: BindingManifest


def _no_references(location: str) -> bytes:
    raise FileNotFoundError(location)


@lru_cache(maxsize=1)
def idmef_pipeline() -> Pipeline:
    """Minified bundled schema and its manifest (computed once per process)."""
    doc = parse_schema(schema_bytes(), SCHEMA_NAME)
    result = minify(doc, _no_references)
    return Pipeline(doc, result, build_manifest([doc], result))
