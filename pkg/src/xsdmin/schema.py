"""In-memory model of the XML Schema subset used by xsdmin.

Supported constructs: ``element``, ``attribute``, ``complexType``,
``simpleType``, ``sequence``, ``choice``, ``simpleContent/extension``,
``restriction`` with ``enumeration`` facets, ``any``/``anyAttribute``
(kept verbatim as extension points), ``import``, ``include`` and
``annotation`` (dropped). Everything else raises
:class:`~xsdmin.errors.UnsupportedConstruct`.
"""

from __future__ import annotations

import posixpath
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import (
    CircularReference,
    DuplicateName,
    LoadFailure,
    NamespaceMismatch,
    UnsupportedConstruct,
)
from .xmltree import XmlNode, escape_attr, parse_xml, split_tag

XSD_NS = "http://www.w3.org/2001/XMLSchema"

ELEMENT = "element"
ATTRIBUTE = "attribute"
COMPLEX_TYPE = "complex_type"
SIMPLE_TYPE = "simple_type"
ENUMERATION = "enumeration_facet"
SEQUENCE = "sequence"
CHOICE = "choice"
SIMPLE_CONTENT = "simple_content"
RESTRICTION = "restriction"
ANY = "any"
ANY_ATTRIBUTE = "any_attribute"

COMPOSITORS = (SEQUENCE, CHOICE)

_XSD_TAG = {
    ELEMENT: "xsd:element",
    ATTRIBUTE: "xsd:attribute",
    COMPLEX_TYPE: "xsd:complexType",
    SIMPLE_TYPE: "xsd:simpleType",
    ENUMERATION: "xsd:enumeration",
    SEQUENCE: "xsd:sequence",
    CHOICE: "xsd:choice",
    SIMPLE_CONTENT: "xsd:simpleContent",
    RESTRICTION: "xsd:restriction",
    ANY: "xsd:any",
    ANY_ATTRIBUTE: "xsd:anyAttribute",
}

# XSD attributes accepted on each construct; anything else is unsupported.
_ALLOWED_ATTRS = {
    "schema": {"targetNamespace", "elementFormDefault", "attributeFormDefault", "version", "id"},
    "element": {"name", "type", "minOccurs", "maxOccurs", "default", "fixed", "id"},
    "attribute": {"name", "type", "use", "default", "fixed", "id"},
    "complexType": {"name", "id"},
    "simpleType": {"name", "id"},
    "sequence": {"minOccurs", "maxOccurs", "id"},
    "choice": {"minOccurs", "maxOccurs", "id"},
    "simpleContent": {"id"},
    "extension": {"base", "id"},
    "restriction": {"base", "id"},
    "enumeration": {"value", "id"},
    "any": {"namespace", "processContents", "minOccurs", "maxOccurs", "id"},
    "anyAttribute": {"namespace", "processContents", "id"},
    "import": {"namespace", "schemaLocation", "id"},
    "include": {"schemaLocation", "id"},
}

# Attributes copied through to re-serialized schemas untouched.
_PASSTHROUGH = ("use", "default", "fixed", "namespace", "processContents")


@dataclass(frozen=True)
class QualifiedName:
    namespace: str
    local: str

    def __post_init__(self):
        if not self.local or re.search(r"[\s/]", self.local):
            raise ValueError(f"invalid local name {self.local!r}")
        if re.search(r"\s", self.namespace):
            raise ValueError(f"invalid namespace URI {self.namespace!r}")

    def __str__(self):
        return "{%s}%s" % (self.namespace, self.local) if self.namespace else self.local


@dataclass(frozen=True)
class Occurs:
    min: int = 1
    max: int | None = 1  # None means unbounded

    @property
    def repeated(self) -> bool:
        return self.max is None or self.max > 1

    def __mul__(self, other: Occurs) -> Occurs:
        hi = None if self.max is None or other.max is None else self.max * other.max
        if self.max == 0 or other.max == 0:
            hi = 0
        return Occurs(self.min * other.min, hi)


_SEGMENT_RE = re.compile(r"(xsd:[A-Za-z]+)(?:\[([^\],\n]*)\])?")


@dataclass(frozen=True)
class ComponentPath:
    """Location of a component rendered as ``xsd:schema/xsd:element[name=X]``."""

    segments: tuple[tuple[str, str], ...] = (("xsd:schema", ""),)

    def child(self, node_kind: str, selector: str = "") -> ComponentPath:
        return ComponentPath(self.segments + ((node_kind, selector),))

    @property
    def parent(self) -> ComponentPath:
        return ComponentPath(self.segments[:-1])

    def __post_init__(self):
        for kind, sel in self.segments:
            if re.search(r"[\],\n\r]", sel):
                raise ValueError(f"path selector {sel!r} cannot be rendered")

    def __str__(self):
        return "/".join(f"{kind}[{sel}]" if sel else kind for kind, sel in self.segments)

    @property
    def leaf_name(self) -> str:
        """Original name or value carried by the last segment."""
        sel = self.segments[-1][1]
        return sel.partition("=")[2]

    @classmethod
    def parse(cls, text: str) -> ComponentPath:
        segments = []
        pos = 0
        while True:
            m = _SEGMENT_RE.match(text, pos)
            if not m:
                raise ValueError(f"bad path segment at offset {pos} in {text!r}")
            segments.append((m.group(1), m.group(2) or ""))
            pos = m.end()
            if pos == len(text):
                break
            if text[pos] != "/":
                raise ValueError(f"unexpected {text[pos]!r} at offset {pos} in {text!r}")
            pos += 1
        if not segments or segments[0][0] != "xsd:schema":
            raise ValueError("path must start at xsd:schema")
        return cls(tuple(segments))


@dataclass(frozen=True)
class SchemaReference:
    kind: str  # "import" | "include"
    schema_location: str
    namespace: str | None = None


@dataclass(frozen=True)
class SchemaComponent:
    kind: str
    name_or_value: str | None
    path: ComponentPath
    type_ref: QualifiedName | None = None
    children: tuple[SchemaComponent, ...] = ()
    occurs: Occurs = Occurs()
    props: tuple[tuple[str, str], ...] = ()
    line: int = field(default=0, compare=False)  # diagnostics only

    @property
    def name(self) -> str | None:
        return self.name_or_value

    def prop(self, key, default=None):
        for k, v in self.props:
            if k == key:
                return v
        return default

    def walk(self) -> Iterator[SchemaComponent]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class SchemaDocument:
    target_namespace: str
    location: str
    references: tuple[SchemaReference, ...] = ()
    components: tuple[SchemaComponent, ...] = ()
    prefixes: tuple[tuple[str, str], ...] = ()
    element_form_qualified: bool = False
    attribute_form_qualified: bool = False
    root_path: ComponentPath = field(default_factory=ComponentPath)

    def walk(self) -> Iterator[SchemaComponent]:
        for comp in self.components:
            yield from comp.walk()


# ---------------------------------------------------------------------------
# parsing


def root_path_for(location: str, primary: bool) -> ComponentPath:
    """Path of a document's schema node; non-primary documents are qualified by
    location so that paths stay unique across the loaded set."""
    if primary:
        return ComponentPath()
    return ComponentPath((("xsd:schema", f"location={location}"),))


def parse_schema(data: bytes, location: str = "", primary: bool = True) -> SchemaDocument:
    """Parse one XSD document."""
    doc = parse_xml(data)
    root = doc.root
    ns, local = split_tag(root.tag)
    if ns != XSD_NS or local != "schema":
        raise UnsupportedConstruct(f"root element {local}", root.line, location)
    return _SchemaParser(location, root_path_for(location, primary)).parse(root)


class _SchemaParser:
    def __init__(self, location: str, root_path: ComponentPath):
        self.location = location
        self.root_path = root_path
        self.prefix_scope: list[dict[str, str]] = []

    def unsupported(self, what, node):
        raise UnsupportedConstruct(what, node.line, self.location)

    def xsd_children(self, node: XmlNode) -> list[tuple[str, XmlNode]]:
        out = []
        for child in node.children:
            ns, local = split_tag(child.tag)
            if ns != XSD_NS:
                self.unsupported(f"foreign element {child.tag}", child)
            if local == "annotation":
                continue
            out.append((local, child))
        if node.text.strip():
            self.unsupported("text content in schema", node)
        return out

    def check_attrs(self, local: str, node: XmlNode):
        allowed = _ALLOWED_ATTRS.get(local)
        if allowed is None:
            self.unsupported(local, node)
        for key, _ in node.attrs:
            if key.startswith("{"):
                continue  # foreign attributes carry no schema meaning
            if key not in allowed:
                self.unsupported(f"{local}/@{key}", node)

    def qname(self, text: str, node: XmlNode) -> QualifiedName:
        prefix, _, local = text.rpartition(":")
        scope = self.prefix_scope[-1]
        if prefix not in scope and prefix:
            raise NamespaceMismatch(f"{self.location}:{node.line}: undeclared prefix '{prefix}'")
        return QualifiedName(scope.get(prefix, ""), local)

    def enter(self, node: XmlNode):
        scope = dict(self.prefix_scope[-1]) if self.prefix_scope else {}
        scope.update(dict(node.nsdecls))
        self.prefix_scope.append(scope)

    def parse(self, root: XmlNode) -> SchemaDocument:
        self.enter(root)
        self.check_attrs("schema", root)
        tns = root.attr("targetNamespace", "")
        refs: list[SchemaReference] = []
        comps: list[SchemaComponent] = []
        seen: dict[tuple[str, str], int] = {}
        for local, child in self.xsd_children(root):
            self.check_attrs(local, child)
            if local in ("import", "include"):
                if comps:
                    self.unsupported(f"{local} after declarations", child)
                loc = child.attr("schemaLocation")
                if not loc:
                    self.unsupported(f"{local} without schemaLocation", child)
                if local == "import":
                    ns = child.attr("namespace")
                    if ns is None or ns == tns:
                        raise NamespaceMismatch(
                            f"{self.location}:{child.line}: import must name a namespace "
                            f"other than the target namespace"
                        )
                    refs.append(SchemaReference("import", loc, ns))
                else:
                    refs.append(SchemaReference("include", loc))
                continue
            if local == "element":
                comp = self.element(child, self.root_path, top=True)
            elif local == "attribute":
                comp = self.attribute(child, self.root_path, top=True)
            elif local == "complexType":
                comp = self.complex_type(child, self.root_path, child.attr("name"))
            elif local == "simpleType":
                comp = self.simple_type(child, self.root_path, child.attr("name"))
            else:
                self.unsupported(local, child)
            space = "type" if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE) else comp.kind
            key = (space, comp.name)
            if key in seen:
                raise DuplicateName(
                    f"{self.location}:{child.line}: duplicate top-level {space} '{comp.name}' "
                    f"(first declared on line {seen[key]})"
                )
            seen[key] = child.line
            comps.append(comp)
        return SchemaDocument(
            target_namespace=tns,
            location=self.location,
            references=tuple(refs),
            components=tuple(comps),
            prefixes=tuple(root.nsdecls),
            element_form_qualified=root.attr("elementFormDefault") == "qualified",
            attribute_form_qualified=root.attr("attributeFormDefault") == "qualified",
            root_path=self.root_path,
        )

    def occurs(self, node: XmlNode) -> Occurs:
        lo = node.attr("minOccurs", "1")
        hi = node.attr("maxOccurs", "1")
        try:
            lo_i = int(lo)
            hi_i = None if hi == "unbounded" else int(hi)
        except ValueError:
            self.unsupported(f"occurs value {lo!r}/{hi!r}", node)
        if lo_i < 0 or (hi_i is not None and hi_i < lo_i):
            self.unsupported(f"occurs range {lo}..{hi}", node)
        return Occurs(lo_i, hi_i)

    def props(self, node: XmlNode) -> tuple[tuple[str, str], ...]:
        return tuple((k, node.attr(k)) for k in _PASSTHROUGH if node.attr(k) is not None)

    def element(self, node: XmlNode, parent: ComponentPath, top=False) -> SchemaComponent:
        self.enter(node)
        try:
            self.check_attrs("element", node)
            name = node.attr("name")
            if name is None:
                self.unsupported("element without name (ref)", node)
            if top and (node.attr("minOccurs") or node.attr("maxOccurs")):
                self.unsupported("occurs on global element", node)
            path = parent.child("xsd:element", f"name={name}")
            type_ref = self.qname(node.attr("type"), node) if node.attr("type") else None
            children = []
            for local, child in self.xsd_children(node):
                if type_ref is not None or children:
                    self.unsupported(f"element with both type and inline {local}", child)
                if local == "complexType":
                    children.append(self.complex_type(child, path, None))
                elif local == "simpleType":
                    children.append(self.simple_type(child, path, None))
                else:
                    self.unsupported(local, child)
            if type_ref is None and not children:
                type_ref = QualifiedName(XSD_NS, "anyType")
            return SchemaComponent(
                ELEMENT, name, path, type_ref, tuple(children),
                Occurs() if top else self.occurs(node), self.props(node), node.line,
            )
        finally:
            self.prefix_scope.pop()

    def attribute(self, node: XmlNode, parent: ComponentPath, top=False) -> SchemaComponent:
        self.enter(node)
        try:
            self.check_attrs("attribute", node)
            name = node.attr("name")
            if name is None:
                self.unsupported("attribute without name (ref)", node)
            path = parent.child("xsd:attribute", f"name={name}")
            type_ref = self.qname(node.attr("type"), node) if node.attr("type") else None
            children = []
            for local, child in self.xsd_children(node):
                if local != "simpleType" or type_ref is not None or children:
                    self.unsupported(f"attribute/{local}", child)
                children.append(self.simple_type(child, path, None))
            if type_ref is None and not children:
                type_ref = QualifiedName(XSD_NS, "string")
            use = node.attr("use", "optional")
            if use not in ("optional", "required") or (top and node.attr("use")):
                self.unsupported(f"attribute use={use}", node)
            return SchemaComponent(
                ATTRIBUTE, name, path, type_ref, tuple(children), Occurs(), self.props(node), node.line
            )
        finally:
            self.prefix_scope.pop()

    def complex_type(self, node: XmlNode, parent: ComponentPath, name: str | None) -> SchemaComponent:
        self.enter(node)
        try:
            self.check_attrs("complexType", node)
            path = parent.child("xsd:complexType", f"name={name}" if name else "anon")
            children: list[SchemaComponent] = []
            state = "start"
            for local, child in self.xsd_children(node):
                if local in COMPOSITOR_TAGS and state == "start":
                    children.append(self.compositor(child, path))
                    state = "particle"
                elif local == "attribute" and state in ("start", "particle", "attrs"):
                    children.append(self.attribute(child, path))
                    state = "attrs"
                elif local == "anyAttribute" and state != "done":
                    self.check_attrs("anyAttribute", child)
                    children.append(SchemaComponent(
                        ANY_ATTRIBUTE, None, path.child("xsd:anyAttribute"), props=self.props(child),
                        line=child.line,
                    ))
                    state = "done"
                elif local == "simpleContent" and state == "start":
                    children.append(self.simple_content(child, path))
                    state = "done"
                else:
                    self.unsupported(local if local not in COMPOSITOR_TAGS else f"{local} after content", child)
            return SchemaComponent(COMPLEX_TYPE, name, path, children=tuple(children), line=node.line)
        finally:
            self.prefix_scope.pop()

    def compositor(self, node: XmlNode, parent: ComponentPath) -> SchemaComponent:
        self.enter(node)
        try:
            local = split_tag(node.tag)[1]
            self.check_attrs(local, node)
            path = parent.child(f"xsd:{local}")
            children = []
            for sub, child in self.xsd_children(node):
                if sub == "element":
                    children.append(self.element(child, path))
                elif sub in COMPOSITOR_TAGS:
                    children.append(self.compositor(child, path))
                elif sub == "any":
                    self.check_attrs("any", child)
                    children.append(SchemaComponent(
                        ANY, None, path.child("xsd:any"), occurs=self.occurs(child),
                        props=self.props(child), line=child.line,
                    ))
                else:
                    self.unsupported(sub, child)
            kind = SEQUENCE if local == "sequence" else CHOICE
            return SchemaComponent(kind, None, path, children=tuple(children), occurs=self.occurs(node), line=node.line)
        finally:
            self.prefix_scope.pop()

    def simple_content(self, node: XmlNode, parent: ComponentPath) -> SchemaComponent:
        self.check_attrs("simpleContent", node)
        path = parent.child("xsd:simpleContent")
        kids = self.xsd_children(node)
        if len(kids) != 1 or kids[0][0] != "extension":
            self.unsupported("simpleContent without a single extension", node)
        ext = kids[0][1]
        self.enter(ext)
        try:
            self.check_attrs("extension", ext)
            base = ext.attr("base")
            if not base:
                self.unsupported("extension without base", ext)
            ext_path = path.child("xsd:extension")
            attrs = []
            for local, child in self.xsd_children(ext):
                if local == "attribute":
                    attrs.append(self.attribute(child, ext_path))
                elif local == "anyAttribute":
                    self.check_attrs("anyAttribute", child)
                    attrs.append(SchemaComponent(
                        ANY_ATTRIBUTE, None, ext_path.child("xsd:anyAttribute"),
                        props=self.props(child), line=child.line,
                    ))
                else:
                    self.unsupported(f"extension/{local}", child)
            return SchemaComponent(
                SIMPLE_CONTENT, None, path, self.qname(base, ext), tuple(attrs), line=node.line
            )
        finally:
            self.prefix_scope.pop()

    def simple_type(self, node: XmlNode, parent: ComponentPath, name: str | None) -> SchemaComponent:
        self.enter(node)
        try:
            self.check_attrs("simpleType", node)
            path = parent.child("xsd:simpleType", f"name={name}" if name else "anon")
            kids = self.xsd_children(node)
            if len(kids) != 1 or kids[0][0] != "restriction":
                what = kids[0][0] if kids else "empty simpleType"
                self.unsupported(what, kids[0][1] if kids else node)
            rnode = kids[0][1]
            self.enter(rnode)
            try:
                self.check_attrs("restriction", rnode)
                rpath = path.child("xsd:restriction")
                facets = []
                seen = set()
                for local, child in self.xsd_children(rnode):
                    if local != "enumeration":
                        self.unsupported(f"facet {local}", child)
                    self.check_attrs("enumeration", child)
                    value = child.attr("value")
                    if value is None:
                        self.unsupported("enumeration without value", child)
                    if value in seen:
                        raise DuplicateName(f"{self.location}:{child.line}: duplicate enumeration value '{value}'")
                    seen.add(value)
                    facets.append(SchemaComponent(
                        ENUMERATION, value, rpath.child("xsd:enumeration", f"value={value}"), line=child.line
                    ))
                base = rnode.attr("base")
                if not base:
                    self.unsupported("restriction without base", rnode)
                restriction = SchemaComponent(
                    RESTRICTION, None, rpath, self.qname(base, rnode), tuple(facets), line=rnode.line
                )
            finally:
                self.prefix_scope.pop()
            return SchemaComponent(SIMPLE_TYPE, name, path, children=(restriction,), line=node.line)
        finally:
            self.prefix_scope.pop()


COMPOSITOR_TAGS = ("sequence", "choice")


# ---------------------------------------------------------------------------
# references


Loader = Callable[[str], bytes]


def file_loader(location: str) -> bytes:
    return Path(location).read_bytes()


def join_location(base: str, relative: str) -> str:
    if "://" in relative or relative.startswith("/"):
        return relative
    return posixpath.normpath(posixpath.join(posixpath.dirname(base), relative))


def resolve_references(root: SchemaDocument, loader: Loader = file_loader) -> list[SchemaDocument]:
    """Return ``root`` and every transitively referenced schema, referenced
    documents before the documents that reference them."""
    loaded = {root.location: root}
    state: dict[str, str] = {}
    order: list[SchemaDocument] = []

    def load(location: str) -> SchemaDocument:
        if location not in loaded:
            try:
                data = loader(location)
            except Exception as exc:  # loader is user supplied
                raise LoadFailure(location, exc) from exc
            loaded[location] = parse_schema(data, location, primary=False)
        return loaded[location]

    def visit(doc: SchemaDocument, trail: list[str]):
        state[doc.location] = "active"
        for ref in doc.references:
            loc = join_location(doc.location, ref.schema_location)
            if state.get(loc) == "active":
                raise CircularReference(trail[trail.index(loc):] + [loc])
            if state.get(loc) == "done":
                continue
            child = load(loc)
            if ref.kind == "include" and child.target_namespace != doc.target_namespace:
                raise NamespaceMismatch(
                    f"{doc.location} includes {loc} whose target namespace "
                    f"'{child.target_namespace}' differs from '{doc.target_namespace}'"
                )
            if ref.kind == "import" and child.target_namespace != ref.namespace:
                raise NamespaceMismatch(
                    f"{doc.location} imports {loc} as '{ref.namespace}' but it declares "
                    f"'{child.target_namespace}'"
                )
            visit(child, trail + [loc])
        state[doc.location] = "done"
        order.append(doc)

    visit(root, [root.location])
    return order


def load_schema_set(path: str | Path, loader: Loader = file_loader) -> list[SchemaDocument]:
    location = str(path)
    return resolve_references(parse_schema(loader(location), location), loader)


# ---------------------------------------------------------------------------
# lookup index


@dataclass(frozen=True)
class ScopeMember:
    """One name-bearing slot inside a naming scope, in assignment order."""

    kind: str  # "attribute" | "text_content" | "child_element"
    name: str | None
    path: ComponentPath
    component: SchemaComponent | None
    namespace: str
    occurs: Occurs


class SchemaSet:
    """Name lookups across a resolved list of schema documents."""

    def __init__(self, documents: Iterable[SchemaDocument]):
        self.documents = tuple(documents)
        self.elements: dict[QualifiedName, tuple[SchemaComponent, SchemaDocument]] = {}
        self.attributes: dict[QualifiedName, tuple[SchemaComponent, SchemaDocument]] = {}
        self.types: dict[QualifiedName, tuple[SchemaComponent, SchemaDocument]] = {}
        self.owner: dict[ComponentPath, SchemaDocument] = {}
        for doc in self.documents:
            ns = doc.target_namespace
            for comp in doc.components:
                table = {ELEMENT: self.elements, ATTRIBUTE: self.attributes}.get(comp.kind, self.types)
                key = QualifiedName(ns, comp.name)
                if key in table:
                    raise DuplicateName(f"'{key}' declared in both {table[key][1].location} and {doc.location}")
                table[key] = (comp, doc)
            for comp in doc.walk():
                self.owner[comp.path] = doc

    def __iter__(self):
        return iter(self.documents)

    @property
    def primary(self) -> SchemaDocument:
        return self.documents[-1]

    def resolve_type(self, ref: QualifiedName | None) -> SchemaComponent | None:
        """Named type for ``ref``; ``None`` for XSD built-ins."""
        if ref is None or ref.namespace == XSD_NS:
            return None
        try:
            return self.types[ref][0]
        except KeyError:
            raise NamespaceMismatch(f"reference to undeclared type '{ref}'") from None

    def type_of(self, comp: SchemaComponent) -> SchemaComponent | None:
        """Type component of an element or attribute (inline or named)."""
        for child in comp.children:
            if child.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                return child
        return self.resolve_type(comp.type_ref)

    def enum_values(self, simple: SchemaComponent | None) -> list[str] | None:
        """Enumeration values of a simple type, following restriction bases."""
        seen = set()
        while simple is not None and simple.kind == SIMPLE_TYPE:
            if simple.path in seen:
                return None
            seen.add(simple.path)
            restriction = simple.children[0]
            if restriction.children:
                return [f.name_or_value for f in restriction.children]
            simple = self.resolve_type(restriction.type_ref)
        return None

    def namespace_of(self, comp: SchemaComponent) -> str:
        return self.owner[comp.path].target_namespace


def scope_members(comp: SchemaComponent | SchemaDocument, doc: SchemaDocument) -> list[ScopeMember]:
    """Members of a naming scope in short-name assignment order.

    For a complex type: attributes in declaration order, then the text
    content slot (simple content only), then child elements depth first
    through the compositors. For a schema document: global elements and
    attributes in declaration order.
    """
    tns = doc.target_namespace
    if isinstance(comp, SchemaDocument):
        return [
            ScopeMember(
                "child_element" if c.kind == ELEMENT else "attribute",
                c.name, c.path, c, tns, c.occurs,
            )
            for c in comp.components
            if c.kind in (ELEMENT, ATTRIBUTE)
        ]
    attrs: list[ScopeMember] = []
    text: list[ScopeMember] = []
    elements: list[ScopeMember] = []
    attr_ns = tns if doc.attribute_form_qualified else ""
    elem_ns = tns if doc.element_form_qualified else ""
    for child in comp.children:
        if child.kind == ATTRIBUTE:
            attrs.append(ScopeMember("attribute", child.name, child.path, child, attr_ns, _attr_occurs(child)))
        elif child.kind == SIMPLE_CONTENT:
            for a in child.children:
                if a.kind == ATTRIBUTE:
                    attrs.append(ScopeMember("attribute", a.name, a.path, a, attr_ns, _attr_occurs(a)))
            text.append(ScopeMember("text_content", None, child.path, child, "", Occurs(0, 1)))
        elif child.kind in COMPOSITORS:
            for elem, occ in _particle_elements(child, Occurs()):
                elements.append(ScopeMember("child_element", elem.name, elem.path, elem, elem_ns, occ))
    return attrs + text + elements


def _attr_occurs(attr: SchemaComponent) -> Occurs:
    return Occurs(1 if attr.prop("use") == "required" else 0, 1)


def _particle_elements(comp: SchemaComponent, outer: Occurs):
    here = outer * comp.occurs
    if comp.kind == ELEMENT:
        yield comp, here
        return
    if comp.kind == CHOICE and len(comp.children) > 1:
        here = Occurs(0, here.max)
    for child in comp.children:
        if child.kind in (ELEMENT, SEQUENCE, CHOICE):
            yield from _particle_elements(child, here)


def has_wildcard(comp: SchemaComponent) -> bool:
    return any(c.kind == ANY for c in comp.walk())


# ---------------------------------------------------------------------------
# serialization


def serialize_schema(doc: SchemaDocument, pretty: bool = False) -> bytes:
    """Render ``doc`` as XSD text; compact unless ``pretty``."""
    prefixes = list(doc.prefixes)
    xsd_prefix = next((p for p, uri in prefixes if uri == XSD_NS), None)
    if xsd_prefix is None:
        xsd_prefix = "xsd"
        prefixes.insert(0, ("xsd", XSD_NS))
    by_uri: dict[str, str] = {}
    for p, uri in prefixes:
        by_uri.setdefault(uri, p)

    def qn(ref: QualifiedName) -> str:
        if ref.namespace not in by_uri:
            raise NamespaceMismatch(f"no prefix declared for namespace '{ref.namespace}'")
        p = by_uri[ref.namespace]
        return f"{p}:{ref.local}" if p else ref.local

    out: list[str] = []
    nl = "\n" if pretty else ""

    def tag(local, attrs, depth, children=None):
        ind = "  " * depth if pretty else ""
        attr_text = "".join(f' {k}="{escape_attr(v)}"' for k, v in attrs)
        if not children:
            out.append(f"{ind}<{xsd_prefix}:{local}{attr_text}/>{nl}")
            return
        out.append(f"{ind}<{xsd_prefix}:{local}{attr_text}>{nl}")
        children(depth + 1)
        out.append(f"{ind}</{xsd_prefix}:{local}>{nl}")

    def occurs_attrs(o: Occurs):
        attrs = []
        if o.min != 1:
            attrs.append(("minOccurs", str(o.min)))
        if o.max != 1:
            attrs.append(("maxOccurs", "unbounded" if o.max is None else str(o.max)))
        return attrs

    def emit(comp: SchemaComponent, depth: int, top=False):
        kids = comp.children
        body = (lambda d: [emit(c, d) for c in kids]) if kids else None
        if comp.kind == ELEMENT:
            attrs = [("name", comp.name)]
            if comp.type_ref is not None and not kids:
                attrs.append(("type", qn(comp.type_ref)))
            if not top:
                attrs += occurs_attrs(comp.occurs)
            tag("element", attrs + list(comp.props), depth, body)
        elif comp.kind == ATTRIBUTE:
            attrs = [("name", comp.name)]
            if comp.type_ref is not None and not kids:
                attrs.append(("type", qn(comp.type_ref)))
            tag("attribute", attrs + list(comp.props), depth, body)
        elif comp.kind == COMPLEX_TYPE:
            tag("complexType", [("name", comp.name)] if comp.name else [], depth, body)
        elif comp.kind == SIMPLE_TYPE:
            tag("simpleType", [("name", comp.name)] if comp.name else [], depth, body)
        elif comp.kind == RESTRICTION:
            tag("restriction", [("base", qn(comp.type_ref))], depth, body)
        elif comp.kind == ENUMERATION:
            tag("enumeration", [("value", comp.name_or_value)], depth)
        elif comp.kind in COMPOSITORS:
            tag(comp.kind, occurs_attrs(comp.occurs), depth, body)
        elif comp.kind == SIMPLE_CONTENT:
            tag("simpleContent", [], depth, lambda d: tag("extension", [("base", qn(comp.type_ref))], d, body))
        elif comp.kind == ANY:
            tag("any", list(comp.props) + occurs_attrs(comp.occurs), depth)
        elif comp.kind == ANY_ATTRIBUTE:
            tag("anyAttribute", list(comp.props), depth)
        else:  # pragma: no cover - kinds are closed
            raise AssertionError(comp.kind)

    root_attrs = [(f"xmlns:{p}" if p else "xmlns", uri) for p, uri in prefixes]
    if doc.target_namespace:
        root_attrs.append(("targetNamespace", doc.target_namespace))
    if doc.element_form_qualified:
        root_attrs.append(("elementFormDefault", "qualified"))
    if doc.attribute_form_qualified:
        root_attrs.append(("attributeFormDefault", "qualified"))

    def body(depth):
        for ref in doc.references:
            attrs = [("namespace", ref.namespace)] if ref.kind == "import" else []
            tag(ref.kind, attrs + [("schemaLocation", ref.schema_location)], depth)
        for comp in doc.components:
            emit(comp, depth, top=True)

    out.append('<?xml version="1.0" encoding="UTF-8"?>' + nl)
    tag("schema", root_attrs, 0, body if (doc.references or doc.components) else None)
    return "".join(out).encode("utf-8")


def structural_fingerprint(doc: SchemaDocument, renamed: dict | None = None) -> tuple:
    """Name-free shape of a document: kinds, arities, occurs and the reference
    topology expressed as component positions."""
    positions: dict[tuple[str, str], int] = {}
    for i, comp in enumerate(doc.components):
        positions[("type" if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE) else comp.kind, comp.name)] = i

    def ref(r):
        if r is None:
            return None
        if r.namespace == XSD_NS:
            return ("builtin", r.local)
        if r.namespace == doc.target_namespace and ("type", r.local) in positions:
            return ("local", positions[("type", r.local)])
        return ("external",)

    def fp(comp):
        return (comp.kind, comp.occurs, ref(comp.type_ref), tuple(fp(c) for c in comp.children))

    return (len(doc.references), tuple(fp(c) for c in doc.components))


__all__ = [
    "XSD_NS",
    "QualifiedName",
    "Occurs",
    "ComponentPath",
    "SchemaReference",
    "SchemaComponent",
    "SchemaDocument",
    "SchemaSet",
    "ScopeMember",
    "parse_schema",
    "resolve_references",
    "load_schema_set",
    "file_loader",
    "join_location",
    "scope_members",
    "serialize_schema",
    "structural_fingerprint",
    "has_wildcard",
]
