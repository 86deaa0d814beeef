"""Schema-driven name minification and wire transcoding for XML messages."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .binding import BindingManifest, BoundMember, BoundType, build_manifest, emit_source
from .codec import InstanceTree, StructureMetrics, WireMessage, decode, encode, parse_instance
from .minifier import MinificationResult, NameDictionary, minify, short_name
from .schema import ComponentPath, QualifiedName, SchemaDocument, parse_schema

__all__ = [
    "BindingManifest", "BoundMember", "BoundType", "ComponentPath", "InstanceTree", "MinificationResult",
    "MinifiedTranscoder", "NameDictionary", "QualifiedName", "SchemaDocument", "StructureMetrics",
    "WireMessage", "build_manifest", "decode", "emit_source", "encode", "minify", "parse_instance",
    "parse_schema", "short_name",
]


def __getattr__(name):
    # the estimator pulls in scikit-learn; load it only on demand
    if name == "MinifiedTranscoder":
        from .estimator import MinifiedTranscoder

        return MinifiedTranscoder
    raise AttributeError(name)
