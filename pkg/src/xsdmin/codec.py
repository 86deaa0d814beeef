"""Instance trees and the four wire encodings.

``xml``       canonical pretty-printed XML with readable names
``min_xml``   compact XML using minified names, namespace and enum values
``json``      compact JSON keyed by readable names
``min_json``  compact JSON keyed by wire names, enums as digit strings

Every encoder has an inverse and all of them agree on one
:class:`InstanceTree` for a schema-valid message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .binding import BindingManifest, BoundMember, BoundType
from .errors import (
    EncodeError,
    EnumOutOfRange,
    JsonSyntax,
    MalformedXml,
    MixedContent,
    SchemaViolation,
    UnknownMember,
    UnknownWireMember,
)
from .schema import (
    ANY,
    ANY_ATTRIBUTE,
    ATTRIBUTE,
    CHOICE,
    ELEMENT,
    SEQUENCE,
    SIMPLE_CONTENT,
    SIMPLE_TYPE,
    QualifiedName,
    SchemaComponent,
    SchemaDocument,
    SchemaSet,
)
from .xmltree import XmlNode, escape_attr, escape_text, parse_xml, split_tag

ENCODINGS = ("xml", "min_xml", "json", "min_json")
COMPRESSIONS = ("none", "gzip")
WILDCARD_KEY = "#any"
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'


@dataclass(frozen=True)
class InstanceTree:
    element: QualifiedName
    attributes: tuple[tuple[str, str], ...] = ()
    text: str | None = None
    children: tuple[InstanceTree, ...] = ()

    def iter(self) -> Iterable[InstanceTree]:
        yield self
        for child in self.children:
            yield from child.iter()


@dataclass(frozen=True)
class WireMessage:
    payload: bytes
    encoding: str
    compression: str = "none"

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.compression not in COMPRESSIONS:
            raise ValueError(f"unknown compression {self.compression!r}")


@dataclass(frozen=True)
class StructureMetrics:
    byte_size: int
    node_count: int
    attribute_count: int
    depth: int


# ---------------------------------------------------------------------------
# XML <-> tree


def as_schema_set(schemas) -> SchemaSet | None:
    if schemas is None or isinstance(schemas, SchemaSet):
        return schemas
    if isinstance(schemas, SchemaDocument):
        return SchemaSet([schemas])
    return SchemaSet(schemas)


def tree_from_node(node: XmlNode, path: str = "") -> InstanceTree:
    ns, local = split_tag(node.tag)
    here = f"{path}/{local}"
    children = node.children
    text = node.text
    if children:
        if text.strip():
            raise MixedContent(here)
        text = None
    return InstanceTree(
        QualifiedName(ns, local),
        tuple(node.attrs),
        text or None,
        tuple(tree_from_node(c, here) for c in children),
    )


def parse_instance(data: bytes, schemas=None) -> InstanceTree:
    """Parse an XML instance; validate it when ``schemas`` is given."""
    tree = tree_from_node(parse_xml(data).root)
    schema_set = as_schema_set(schemas)
    if schema_set is not None:
        validate(tree, schema_set)
    return tree


def _write_xml(tree: InstanceTree, out: list[str], indent: str | None, depth: int,
               default_ns: str | None, prefixes: dict[str, str]):
    pad = "" if indent is None else indent * depth
    nl = "" if indent is None else "\n"
    ns = tree.element.namespace
    prefix = prefixes.get(ns)
    tag = f"{prefix}:{tree.element.local}" if prefix else tree.element.local
    attrs = []
    extra = 0
    for name, value in tree.attributes:
        if name.startswith("{"):
            ans, local = split_tag(name)
            extra += 1
            attrs.append(f' xmlns:n{extra}="{escape_attr(ans)}" n{extra}:{local}="{escape_attr(value)}"')
        else:
            attrs.append(f' {name}="{escape_attr(value)}"')
    if depth == 0:
        for uri, p in prefixes.items():
            attrs.append(f' xmlns:{p}="{escape_attr(uri)}"')
    if not prefix and ns != default_ns:
        attrs.append(f' xmlns="{escape_attr(ns)}"')
        default_ns = ns
    head = f"{pad}<{tag}{''.join(attrs)}"
    if not tree.children and tree.text is None:
        out.append(f"{head}/>{nl}")
    elif not tree.children:
        out.append(f"{head}>{escape_text(tree.text)}</{tag}>{nl}")
    else:
        out.append(f"{head}>{nl}")
        for child in tree.children:
            _write_xml(child, out, indent, depth + 1, default_ns, prefixes)
        out.append(f"{pad}</{tag}>{nl}")


def _used_prefixes(tree: InstanceTree, prefixes: dict[str, str] | None) -> dict[str, str]:
    if not prefixes:
        return {}
    used = {node.element.namespace for node in tree.iter()}
    return {uri: p for uri, p in prefixes.items() if uri in used and uri and p}


def to_xml(tree: InstanceTree, prefixes: dict[str, str] | None = None) -> bytes:
    """Canonical rendering: XML declaration, 2-space indent, LF line ends,
    attributes in document order.

    Namespaces listed in ``prefixes`` (URI -> prefix) are written with that
    prefix and declared on the root after its attributes; any other
    namespace becomes the default namespace where it starts.
    """
    out = [XML_DECLARATION, "\n"]
    _write_xml(tree, out, "  ", 0, "", _used_prefixes(tree, prefixes))
    return "".join(out).encode("utf-8")


def compact_xml(tree: InstanceTree, prefixes: dict[str, str] | None = None) -> str:
    out: list[str] = []
    _write_xml(tree, out, None, 0, "", _used_prefixes(tree, prefixes))
    return "".join(out)


def schema_prefixes(schema_set) -> dict[str, str]:
    """Namespace -> prefix as declared in the schema documents (first wins)."""
    schema_set = as_schema_set(schema_set)
    out: dict[str, str] = {}
    for doc in schema_set.documents:
        for p, uri in doc.prefixes:
            if p and uri == doc.target_namespace and uri not in out:
                out[uri] = p
    return out


def to_min_xml_whitespace(data: bytes) -> bytes:
    """Strip comments and inter-element whitespace, collapse empty tags.

    Works lexically: prefixes, namespace declarations and the XML
    declaration are kept as written.
    """
    doc = parse_xml(data, namespaces=False)
    out: list[str] = []
    if doc.declaration is not None:
        version, encoding, standalone = doc.declaration
        decl = f'<?xml version="{version or "1.0"}"'
        if encoding:
            decl += f' encoding="{encoding}"'
        if standalone != -1 and standalone is not None:
            decl += f' standalone="{"yes" if standalone else "no"}"'
        out.append(decl + "?>")
    for pi in doc.prolog:
        out.append(f"<?{pi.target} {pi.data}?>" if pi.data else f"<?{pi.target}?>")

    def emit(node: XmlNode):
        attrs = "".join(f' {k}="{escape_attr(v)}"' for k, v in node.attrs)
        has_elements = any(isinstance(c, XmlNode) for c in node.content)
        mixed = has_elements and node.text.strip()
        content = [
            c for c in node.content
            if not (isinstance(c, str) and has_elements and not mixed and not c.strip())
        ]
        if not content:
            out.append(f"<{node.tag}{attrs}/>")
            return
        out.append(f"<{node.tag}{attrs}>")
        for item in content:
            if isinstance(item, str):
                out.append(escape_text(item))
            elif isinstance(item, XmlNode):
                emit(item)
            else:
                out.append(f"<?{item.target} {item.data}?>" if item.data else f"<?{item.target}?>")
        out.append(f"</{node.tag}>")

    emit(doc.root)
    for pi in doc.epilog:
        out.append(f"<?{pi.target} {pi.data}?>" if pi.data else f"<?{pi.target}?>")
    return "".join(out).encode("utf-8")


def analyze_structure(tree: InstanceTree, serialized: bytes) -> StructureMetrics:
    nodes = attrs = depth = 0
    stack = [(tree, 1)]
    while stack:
        node, level = stack.pop()
        nodes += 1
        attrs += len(node.attributes)
        depth = max(depth, level)
        stack.extend((c, level + 1) for c in node.children)
    return StructureMetrics(len(serialized), nodes, attrs, depth)


# ---------------------------------------------------------------------------
# structural validation


def validate(tree: InstanceTree, schema_set: SchemaSet) -> None:
    """Check ``tree`` against the element/attribute structure of ``schema_set``.

    Only structure and enumeration membership are checked; lexical forms of
    built-in types are not.
    """
    entry = schema_set.elements.get(tree.element)
    if entry is None:
        expected = [str(q) for q in schema_set.elements]
        raise SchemaViolation(f"/{tree.element.local}", f"unknown root element '{tree.element}'", expected)
    _validate_element(tree, entry[0], schema_set, f"/{tree.element.local}")


def _attribute_decls(ctype: SchemaComponent):
    decls, wildcard = [], False
    for child in ctype.children:
        if child.kind == ATTRIBUTE:
            decls.append(child)
        elif child.kind == ANY_ATTRIBUTE:
            wildcard = True
        elif child.kind == SIMPLE_CONTENT:
            for sub in child.children:
                if sub.kind == ATTRIBUTE:
                    decls.append(sub)
                elif sub.kind == ANY_ATTRIBUTE:
                    wildcard = True
    return decls, wildcard


def _check_enum(value: str | None, simple: SchemaComponent | None, schema_set: SchemaSet, where: str):
    values = schema_set.enum_values(simple)
    if values is not None and (value or "") not in values:
        raise SchemaViolation(where, f"value {value!r} is not an allowed enumeration value", values)


def _validate_element(node: InstanceTree, decl: SchemaComponent, schema_set: SchemaSet, path: str):
    ctype = schema_set.type_of(decl)
    if ctype is None or ctype.kind == SIMPLE_TYPE:
        if node.attributes:
            raise SchemaViolation(path, f"unexpected attribute '{node.attributes[0][0]}' on simple element")
        if node.children:
            raise SchemaViolation(path, f"unexpected child '{node.children[0].element.local}' in simple element")
        _check_enum(node.text, ctype, schema_set, path)
        return
    doc = schema_set.owner[decl.path] if decl.path in schema_set.owner else None
    type_doc = schema_set.owner[ctype.path]
    attr_ns = type_doc.target_namespace if type_doc.attribute_form_qualified else ""
    decls, any_attr = _attribute_decls(ctype)
    by_name = {(str(QualifiedName(attr_ns, d.name)) if attr_ns else d.name): d for d in decls}
    seen = set()
    for name, value in node.attributes:
        if name in seen:
            raise SchemaViolation(path, f"duplicate attribute '{name}'")
        seen.add(name)
        d = by_name.get(name)
        if d is None:
            if any_attr:
                continue
            raise SchemaViolation(path, f"unexpected attribute '{name}'", list(by_name))
        _check_enum(value, schema_set.type_of(d), schema_set, f"{path}/@{name}")
    for key, d in by_name.items():
        if d.prop("use") == "required" and key not in seen:
            raise SchemaViolation(path, f"missing required attribute '{key}'")

    simple = next((c for c in ctype.children if c.kind == SIMPLE_CONTENT), None)
    if simple is not None:
        if node.children:
            raise SchemaViolation(path, f"unexpected child '{node.children[0].element.local}' in simple content")
        _check_enum(node.text, schema_set.resolve_type(simple.type_ref), schema_set, path)
        return
    if node.text is not None and node.text.strip():
        raise SchemaViolation(path, "text is not allowed in element-only content")
    particle = next((c for c in ctype.children if c.kind in (SEQUENCE, CHOICE)), None)
    kids = node.children
    if particle is None:
        if kids:
            raise SchemaViolation(path, f"unexpected child '{kids[0].element.local}' in empty content")
        return
    elem_ns = type_doc.target_namespace if type_doc.element_form_qualified else ""
    matcher = _Matcher(kids, elem_ns, type_doc.target_namespace)
    binding = matcher.run(particle)
    if binding is None:
        bad = kids[matcher.furthest] if matcher.furthest < len(kids) else None
        expected = sorted({c.name for c in particle.walk() if c.kind == ELEMENT})
        if bad is None:
            raise SchemaViolation(path, "content ended early; required element missing", expected)
        name = bad.element.local
        if name in expected:  # right name, wrong namespace
            name = f"{{{bad.element.namespace}}}{name}" if bad.element.namespace else f"{name} (no namespace)"
        raise SchemaViolation(path, f"unexpected element '{name}'", expected)
    counts: dict[str, int] = {}
    for kid, d in zip(kids, binding):
        counts[kid.element.local] = counts.get(kid.element.local, 0) + 1
        here = f"{path}/{kid.element.local}"
        if d.kind == ELEMENT:
            _validate_element(kid, d, schema_set, here)
        else:
            _validate_wildcard(kid, d, schema_set, here)


def _validate_wildcard(node: InstanceTree, wildcard: SchemaComponent, schema_set: SchemaSet, path: str):
    mode = wildcard.prop("processContents", "strict")
    if mode == "skip":
        return
    entry = schema_set.elements.get(node.element)
    if entry is not None:
        _validate_element(node, entry[0], schema_set, path)
    elif mode == "strict":
        raise SchemaViolation(path, f"no declaration for wildcard element '{node.element}'")


def _namespace_allowed(ns: str, constraint: str, tns: str) -> bool:
    tokens = constraint.split()
    if "##any" in tokens:
        return True
    if "##other" in tokens:
        return ns not in (tns, "")
    for tok in tokens:
        if tok == "##targetNamespace" and ns == tns:
            return True
        if tok == "##local" and ns == "":
            return True
        if tok == ns:
            return True
    return False


class _Matcher:
    """Backtracking match of a child sequence against a content particle."""

    def __init__(self, kids, elem_ns: str, tns: str):
        self.kids = kids
        self.elem_ns = elem_ns
        self.tns = tns
        self.furthest = 0

    def run(self, particle):
        for end, binding in self.repeat(particle, 0):
            if end == len(self.kids):
                return binding
        return None

    def note(self, i):
        self.furthest = max(self.furthest, i)

    def repeat(self, p: SchemaComponent, i: int):
        lo, hi = p.occurs.min, p.occurs.max

        def rec(count, pos, acc):
            if count >= lo:
                yield pos, acc
            if hi is not None and count >= hi:
                return
            for end, b in self.once(p, pos):
                if end == pos and count >= lo:
                    continue
                yield from rec(count + 1, end, acc + b)

        yield from rec(0, i, ())

    def once(self, p: SchemaComponent, i: int):
        kids = self.kids
        if p.kind == ELEMENT:
            if i < len(kids) and kids[i].element == QualifiedName(self.elem_ns, p.name):
                self.note(i + 1)
                yield i + 1, (p,)
            return
        if p.kind == ANY:
            if i < len(kids) and _namespace_allowed(
                kids[i].element.namespace, p.prop("namespace", "##any"), self.tns
            ):
                self.note(i + 1)
                yield i + 1, (p,)
            return
        if p.kind == CHOICE:
            for item in p.children:
                yield from self.repeat(item, i)
            return
        # sequence
        def chain(k, pos, acc):
            if k == len(p.children):
                yield pos, acc
                return
            for end, b in self.repeat(p.children[k], pos):
                yield from chain(k + 1, end, acc + b)

        yield from chain(0, i, ())


# ---------------------------------------------------------------------------
# tree <-> JSON (readable or wire names)


def _enum_type(manifest: BindingManifest, type_ref: str) -> BoundType | None:
    t = manifest.type(type_ref)
    seen = set()
    while t is not None and t.kind == "simple" and t.readable_name not in seen:
        if t.enum_values is not None:
            return t
        seen.add(t.readable_name)
        t = manifest.type(t.base) if t.base else None
    return None


def _scalar_out(value: str, type_ref: str, manifest: BindingManifest, wire: bool, where: str) -> str:
    enum = _enum_type(manifest, type_ref)
    if enum is None:
        return value
    try:
        return enum.enum_to_wire[value] if wire else (value if value in enum.enum_to_wire else _raise())
    except (KeyError, ValueError):
        raise SchemaViolation(where, f"value {value!r} is not an allowed enumeration value",
                              list(enum.enum_to_wire)) from None


def _raise():
    raise ValueError


def _scalar_in(value, type_ref: str, manifest: BindingManifest, wire: bool, where: str) -> str:
    if not isinstance(value, str):
        raise JsonSyntax(f"{where}: expected a JSON string, got {type(value).__name__}")
    enum = _enum_type(manifest, type_ref)
    if enum is None:
        return value
    if wire:
        if not value.isdigit() or value != str(int(value)):
            raise EnumOutOfRange(f"{where}: enumeration wire value {value!r} is not a decimal index")
        readable = enum.enum_to_readable.get(value)
        if readable is None:
            raise EnumOutOfRange(
                f"{where}: wire value {value} out of range for '{enum.readable_name}' "
                f"({len(enum.enum_values)} values)"
            )
        return readable
    if value not in enum.enum_to_wire:
        raise SchemaViolation(where, f"value {value!r} is not an allowed enumeration value", list(enum.enum_to_wire))
    return value


def _member_matches(m: BoundMember, q: QualifiedName) -> bool:
    return m.kind == "child_element" and m.readable_name == q.local and m.namespace == q.namespace


def _attr_key(m: BoundMember) -> str:
    return "{%s}%s" % (m.namespace, m.readable_name) if m.namespace else m.readable_name


class _JsonCodec:
    def __init__(self, manifest: BindingManifest, wire: bool):
        self.manifest = manifest
        self.wire = wire
        self.unknown = UnknownWireMember if wire else UnknownMember

    def key(self, m: BoundMember) -> str:
        return m.wire_name if self.wire else m.readable_name

    # encode ---------------------------------------------------------------
    def encode_root(self, tree: InstanceTree):
        root = self.manifest.roots_by_readable.get((tree.element.namespace, tree.element.local))
        if root is None or root.kind != "child_element":
            raise SchemaViolation(f"/{tree.element.local}", f"unknown root element '{tree.element}'")
        return {self.key(root): self.encode_value(tree, root.type_ref, f"/{tree.element.local}")}

    def encode_value(self, node: InstanceTree, type_ref: str, path: str):
        t = self.manifest.type(type_ref)
        if t is None or t.kind == "simple":
            if node.attributes or node.children:
                raise SchemaViolation(path, "simple element carries attributes or children")
            return _scalar_out(node.text or "", type_ref, self.manifest, self.wire, path)
        obj: dict = {}
        attr_members = {_attr_key(m): m for m in t.members if m.kind == "attribute"}
        for name, value in node.attributes:
            m = attr_members.get(name)
            if m is None:
                raise SchemaViolation(path, f"unexpected attribute '{name}'", list(attr_members))
            obj[self.key(m)] = _scalar_out(value, m.type_ref, self.manifest, self.wire, f"{path}/@{name}")
        if node.text is not None:
            tm = t.text_member
            if tm is None:
                raise SchemaViolation(path, "text is not allowed in element-only content")
            obj[self.key(tm)] = _scalar_out(node.text, tm.type_ref, self.manifest, self.wire, path)
        closed: set[str] = set()
        current = None
        for child in node.children:
            m = next((m for m in t.members if _member_matches(m, child.element)), None)
            key = WILDCARD_KEY if m is None else self.key(m)
            if m is None and not t.wildcard:
                raise SchemaViolation(path, f"unexpected element '{child.element.local}'")
            if key != current:
                if key in closed or key in obj:
                    raise EncodeError(
                        f"{path}: repeated member '{child.element.local}' is not contiguous and "
                        f"cannot be represented as one JSON member"
                    )
                if current is not None:
                    closed.add(current)
                current = key
            here = f"{path}/{child.element.local}"
            if m is None:
                obj.setdefault(WILDCARD_KEY, []).append(compact_xml(child))
            elif m.repeated:
                obj.setdefault(key, []).append(self.encode_value(child, m.type_ref, here))
            elif key in obj:
                raise SchemaViolation(path, f"element '{child.element.local}' may occur at most once")
            else:
                obj[key] = self.encode_value(child, m.type_ref, here)
        return obj

    # decode ---------------------------------------------------------------
    def decode_root(self, doc) -> InstanceTree:
        if not isinstance(doc, dict) or len(doc) != 1:
            raise JsonSyntax("message must be an object with exactly one root member")
        (key, value), = doc.items()
        if self.wire:
            matches = [m for m in self.manifest.roots if m.wire_name == key and m.kind == "child_element"]
        else:
            matches = [m for m in self.manifest.roots if m.readable_name == key and m.kind == "child_element"]
        if len(matches) != 1:
            raise self.unknown(key, "#root")
        root = matches[0]
        return self.decode_value(value, root, f"/{root.readable_name}")

    def decode_value(self, value, member: BoundMember, path: str) -> InstanceTree:
        qname = QualifiedName(member.namespace, member.readable_name)
        t = self.manifest.type(member.type_ref)
        if t is None or t.kind == "simple":
            return InstanceTree(qname, text=_scalar_in(value, member.type_ref, self.manifest, self.wire, path) or None)
        if not isinstance(value, dict):
            raise JsonSyntax(f"{path}: expected a JSON object for type '{t.readable_name}'")
        table = t.by_wire if self.wire else t.by_readable
        attrs: list[tuple[str, str]] = []
        text = None
        children: list[InstanceTree] = []
        for key, item in value.items():
            if key == WILDCARD_KEY and t.wildcard:
                if not isinstance(item, list) or not all(isinstance(s, str) for s in item):
                    raise JsonSyntax(f"{path}: '{WILDCARD_KEY}' must be a list of XML strings")
                for raw in item:
                    try:
                        children.append(tree_from_node(parse_xml(raw.encode("utf-8")).root, path))
                    except MalformedXml as exc:
                        raise JsonSyntax(f"{path}: bad passthrough XML: {exc}") from None
                continue
            m = table.get(key)
            if m is None:
                raise self.unknown(key, t.readable_name)
            here = f"{path}/{m.readable_name}"
            if m.kind == "attribute":
                attrs.append((_attr_key(m), _scalar_in(item, m.type_ref, self.manifest, self.wire, here)))
            elif m.kind == "text_content":
                text = _scalar_in(item, m.type_ref, self.manifest, self.wire, path) or None
            elif m.repeated:
                if not isinstance(item, list):
                    raise JsonSyntax(f"{here}: repeated member must be a JSON array")
                children.extend(self.decode_value(v, m, here) for v in item)
            else:
                if isinstance(item, list):
                    raise JsonSyntax(f"{here}: single-valued member must not be an array")
                children.append(self.decode_value(item, m, here))
        return InstanceTree(qname, tuple(attrs), text, tuple(children))


def _dumps(obj) -> bytes:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise JsonSyntax(f"duplicate member '{k}'")
        out[k] = v
    return out


def _loads(data: bytes):
    try:
        return json.loads(data, object_pairs_hook=_no_duplicates)
    except JsonSyntax:
        raise
    except (ValueError, UnicodeDecodeError) as exc:
        raise JsonSyntax(str(exc)) from None


def to_json(tree: InstanceTree, manifest: BindingManifest) -> bytes:
    return _dumps(_JsonCodec(manifest, wire=False).encode_root(tree))


def from_json(data: bytes, manifest: BindingManifest) -> InstanceTree:
    return _JsonCodec(manifest, wire=False).decode_root(_loads(data))


def to_min_json(tree: InstanceTree, manifest: BindingManifest) -> bytes:
    return _dumps(_JsonCodec(manifest, wire=True).encode_root(tree))


def from_min_json(data: bytes, manifest: BindingManifest) -> InstanceTree:
    return _JsonCodec(manifest, wire=True).decode_root(_loads(data))


# ---------------------------------------------------------------------------
# tree <-> minified XML


def _rename(tree: InstanceTree, manifest: BindingManifest, to_wire: bool) -> InstanceTree:
    """Swap readable and wire names throughout ``tree`` (wildcards untouched)."""
    if to_wire:
        root = manifest.roots_by_readable.get((tree.element.namespace, tree.element.local))
    else:
        root = manifest.roots_by_wire.get((tree.element.namespace, tree.element.local))
    if root is None:
        raise (SchemaViolation(f"/{tree.element.local}", f"unknown root element '{tree.element}'")
               if to_wire else UnknownWireMember(tree.element.local, "#root"))
    return _rename_node(tree, root, manifest, to_wire, f"/{root.readable_name}")


def _rename_node(node, member: BoundMember, manifest, to_wire, path) -> InstanceTree:
    if to_wire:
        qname = QualifiedName(manifest.wire_namespace(member.namespace), member.wire_name)
    else:
        qname = QualifiedName(member.namespace, member.readable_name)
    t = manifest.type(member.type_ref)
    if t is None or t.kind == "simple":
        if node.attributes or node.children:
            raise SchemaViolation(path, "simple element carries attributes or children")
        text = node.text
        if _enum_type(manifest, member.type_ref) is not None:
            text = (_scalar_out if to_wire else _scalar_in)(node.text or "", member.type_ref, manifest, True, path)
        return InstanceTree(qname, text=text or None)
    attr_table = {}
    for m in t.members:
        if m.kind != "attribute":
            continue
        if to_wire:
            attr_table[_attr_key(m)] = (m, m.wire_name if not m.namespace else
                                        "{%s}%s" % (manifest.wire_namespace(m.namespace), m.wire_name))
        else:
            key = m.wire_name if not m.namespace else "{%s}%s" % (manifest.wire_namespace(m.namespace), m.wire_name)
            attr_table[key] = (m, _attr_key(m))
    attrs = []
    for name, value in node.attributes:
        if name not in attr_table:
            if to_wire:
                raise SchemaViolation(path, f"unexpected attribute '{name}'")
            raise UnknownWireMember(name, t.readable_name)
        m, new_name = attr_table[name]
        conv = _scalar_out if to_wire else _scalar_in
        attrs.append((new_name, conv(value, m.type_ref, manifest, True, f"{path}/@{m.readable_name}")))
    text = node.text
    if text is not None:
        tm = t.text_member
        if tm is None:
            raise SchemaViolation(path, "text is not allowed in element-only content")
        text = (_scalar_out if to_wire else _scalar_in)(text, tm.type_ref, manifest, True, path) or None
    children = []
    for child in node.children:
        if to_wire:
            m = next((m for m in t.members if _member_matches(m, child.element)), None)
        else:
            m = next(
                (m for m in t.members if m.kind == "child_element" and m.wire_name == child.element.local
                 and manifest.wire_namespace(m.namespace) == child.element.namespace),
                None,
            )
        if m is None:
            if t.wildcard:
                children.append(child)
                continue
            if to_wire:
                raise SchemaViolation(path, f"unexpected element '{child.element.local}'")
            raise UnknownWireMember(child.element.local, t.readable_name)
        children.append(_rename_node(child, m, manifest, to_wire, f"{path}/{m.readable_name}"))
    return InstanceTree(qname, tuple(attrs), text, tuple(children))


def to_min_xml(tree: InstanceTree, manifest: BindingManifest) -> bytes:
    """Compact XML with minified names; the optional XML declaration is dropped."""
    return compact_xml(_rename(tree, manifest, to_wire=True)).encode("utf-8")


def from_min_xml(data: bytes, manifest: BindingManifest, min_schemas=None) -> InstanceTree:
    wire_tree = tree_from_node(parse_xml(data).root)
    schema_set = as_schema_set(min_schemas)
    if schema_set is not None:
        validate(wire_tree, schema_set)
    return _rename(wire_tree, manifest, to_wire=False)


# ---------------------------------------------------------------------------
# dispatch


def encode(tree: InstanceTree, encoding: str, manifest: BindingManifest | None = None,
           compression: str = "none", level: int = 6) -> WireMessage:
    if encoding == "xml":
        payload = to_xml(tree)
    elif encoding == "min_xml":
        payload = to_min_xml(tree, manifest)
    elif encoding == "json":
        payload = to_json(tree, manifest)
    elif encoding == "min_json":
        payload = to_min_json(tree, manifest)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    if compression == "gzip":
        from .compressor import gzip_compress

        payload = gzip_compress(payload, level)
    return WireMessage(payload, encoding, compression)


def decode(message: WireMessage, manifest: BindingManifest | None = None, schemas=None) -> InstanceTree:
    """Decode ``message``; XML payloads are validated when ``schemas`` is given,
    JSON payloads are always checked member-by-member against the manifest."""
    payload = message.payload
    if message.compression == "gzip":
        from .compressor import gzip_decompress

        payload = gzip_decompress(payload)
    if message.encoding == "xml":
        return parse_instance(payload, schemas)
    if message.encoding == "min_xml":
        return from_min_xml(payload, manifest)
    if message.encoding == "json":
        return from_json(payload, manifest)
    return from_min_json(payload, manifest)
