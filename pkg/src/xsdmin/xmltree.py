"""Minimal expat-backed XML reader.

ElementTree drops source line numbers and namespace declarations, both of
which the schema parser and the whitespace minifier need, so documents are
read into this small node type instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from .errors import MalformedXml


@dataclass
class ProcessingInstruction:
    target: str
    data: str


@dataclass
class XmlNode:
    tag: str
    attrs: list[tuple[str, str]] = field(default_factory=list)
    content: list = field(default_factory=list)  # XmlNode | str | ProcessingInstruction
    line: int = 0
    nsdecls: list[tuple[str, str]] = field(default_factory=list)

    @property
    def children(self) -> list[XmlNode]:
        return [c for c in self.content if isinstance(c, XmlNode)]

    @property
    def text(self) -> str:
        return "".join(c for c in self.content if isinstance(c, str))

    def attr(self, name, default=None):
        for key, value in self.attrs:
            if key == name:
                return value
        return default


@dataclass
class XmlDocument:
    root: XmlNode
    declaration: tuple | None = None  # (version, encoding, standalone)
    prolog: list = field(default_factory=list)  # PIs before the root
    epilog: list = field(default_factory=list)


def split_tag(tag: str) -> tuple[str, str]:
    """Split a ``{uri}local`` tag into ``(uri, local)``."""
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        return uri, local
    return "", tag


def parse_xml(data: bytes, namespaces: bool = True) -> XmlDocument:
    """Parse ``data`` into an :class:`XmlDocument`.

    With ``namespaces=True`` tags and attribute names use ``{uri}local``
    notation and ``xmlns`` attributes are reported through ``nsdecls``.
    With ``namespaces=False`` names are kept lexically (``idmef:real``) and
    namespace declarations stay ordinary attributes.

    DTDs are rejected outright; nothing in this project needs them and they
    open the door to entity expansion attacks.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate("UTF-8", " " if namespaces else None)
    parser.ordered_attributes = True
    parser.buffer_text = True

    stack: list[XmlNode] = []
    pending_ns: list[tuple[str, str]] = []
    doc = XmlDocument(root=None)  # type: ignore[arg-type]

    def name(raw: str) -> str:
        if namespaces and " " in raw:
            uri, local = raw.split(" ", 1)
            return "{%s}%s" % (uri, local)
        return raw

    def start(tag, attrs):
        node = XmlNode(
            tag=name(tag),
            attrs=[(name(attrs[i]), attrs[i + 1]) for i in range(0, len(attrs), 2)],
            line=parser.CurrentLineNumber,
            nsdecls=pending_ns[:],
        )
        pending_ns.clear()
        if stack:
            stack[-1].content.append(node)
        elif doc.root is None:
            doc.root = node
        stack.append(node)

    def end(tag):
        stack.pop()

    def chars(text):
        if stack:
            stack[-1].content.append(text)

    def start_ns(prefix, uri):
        pending_ns.append((prefix or "", uri or ""))

    def pi(target, data_):
        item = ProcessingInstruction(target, data_)
        if stack:
            stack[-1].content.append(item)
        elif doc.root is None:
            doc.prolog.append(item)
        else:
            doc.epilog.append(item)

    def xmldecl(version, encoding, standalone):
        doc.declaration = (version, encoding, standalone)

    def doctype(*_):
        raise MalformedXml("DTD declarations are not accepted", parser.CurrentLineNumber)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.ProcessingInstructionHandler = pi
    parser.XmlDeclHandler = xmldecl
    parser.StartDoctypeDeclHandler = doctype
    if namespaces:
        parser.StartNamespaceDeclHandler = start_ns
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise MalformedXml(expat.ErrorString(exc.code), exc.lineno) from None
    if doc.root is None:
        raise MalformedXml("document has no root element")
    _merge_text(doc.root)
    return doc


def _merge_text(node: XmlNode) -> None:
    merged: list = []
    for item in node.content:
        if isinstance(item, str) and merged and isinstance(merged[-1], str):
            merged[-1] += item
        else:
            merged.append(item)
        if isinstance(item, XmlNode):
            _merge_text(item)
    node.content = merged


def escape_text(text: str) -> str:
    # a literal CR would be normalised to LF by any parser
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")


def escape_attr(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace('"', "&quot;")
        .replace("\t", "&#9;")
        .replace("\n", "&#10;")
        .replace("\r", "&#13;")
    )
