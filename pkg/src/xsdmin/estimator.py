"""scikit-learn style facade over the minify / bind / transcode pipeline."""

from __future__ import annotations

from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import codec
from .binding import build_manifest
from .corpus import idmef_pipeline
from .minifier import minify
from .schema import SchemaSet, parse_schema, resolve_references


class MinifiedTranscoder(TransformerMixin, BaseEstimator):
    """Learns the name dictionary of a schema and transcodes messages with it.

    ``fit`` minifies the schema (the bundled IDMEF model when ``schema`` is
    None) and derives the binding manifest. ``transform`` maps XML messages
    to wire payloads; ``inverse_transform`` maps payloads back to canonical
    XML.

    >>> t = MinifiedTranscoder(encoding="min_json").fit()
    >>> t.manifest_.type("Heartbeat").by_readable["Analyzer"].wire_name
    'b'
    """

    def __init__(self, schema=None, encoding="min_json", compression="none", gzip_level=6, validate=True):
        self.schema = schema
        self.encoding = encoding
        self.compression = compression
        self.gzip_level = gzip_level
        self.validate = validate

    def fit(self, X=None, y=None):
        if self.encoding not in codec.ENCODINGS:
            raise ValueError(f"encoding must be one of {codec.ENCODINGS}, got {self.encoding!r}")
        if self.compression not in codec.COMPRESSIONS:
            raise ValueError(f"compression must be one of {codec.COMPRESSIONS}, got {self.compression!r}")
        if self.schema is None:
            p = idmef_pipeline()
            docs, result, manifest = [p.schema], p.result, p.manifest
        else:
            path = Path(self.schema)
            root = parse_schema(path.read_bytes(), path.name)
            loader = lambda loc: (path.parent / loc).read_bytes()  # noqa: E731
            docs = resolve_references(root, loader)
            result = minify(docs[-1], loader)
            manifest = build_manifest(docs, result)
        self.schema_set_ = SchemaSet(docs)
        self.minification_ = result
        self.manifest_ = manifest
        self.n_types_ = len(manifest.types)
        if X is not None:
            for message in X:
                self._tree(message)
        return self

    def _tree(self, message) -> codec.InstanceTree:
        if isinstance(message, codec.InstanceTree):
            if self.validate:
                codec.validate(message, self.schema_set_)
            return message
        return codec.parse_instance(message, self.schema_set_ if self.validate else None)

    def transform(self, X) -> list[bytes]:
        check_is_fitted(self, "manifest_")
        return [
            codec.encode(self._tree(m), self.encoding, self.manifest_, self.compression, self.gzip_level).payload
            for m in X
        ]

    def inverse_transform(self, X) -> list[bytes]:
        check_is_fitted(self, "manifest_")
        out = []
        for payload in X:
            tree = codec.decode(codec.WireMessage(payload, self.encoding, self.compression), self.manifest_)
            if self.validate:
                codec.validate(tree, self.schema_set_)
            out.append(codec.to_xml(tree))
        return out
