"""Binding manifest: readable member names paired with wire names.

The manifest is the language-neutral contract that generated code (and the
codec) is driven by. Each bound type lists its members in short-name
assignment order, with the readable name, the wire name, the member kind
and the readable name of the member's type.
"""

from __future__ import annotations

import hashlib
import json
import keyword
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

from .errors import ChecksumMismatch, DuplicateName, TemplateError, XsdMinError
from .minifier import MinificationResult, assign_names, write_dictionary
from .schema import (
    ATTRIBUTE,
    COMPLEX_TYPE,
    ELEMENT,
    SIMPLE_TYPE,
    XSD_NS,
    QualifiedName,
    SchemaComponent,
    SchemaDocument,
    SchemaSet,
    has_wildcard,
    scope_members,
)

MANIFEST_FORMAT = "xsdmin-manifest/1"
TEXT_MEMBER = "value"


@dataclass(frozen=True)
class BoundMember:
    readable_name: str
    wire_name: str
    kind: str  # "attribute" | "text_content" | "child_element"
    type_ref: str
    occurs: tuple[int, int | None] = (1, 1)
    namespace: str = ""

    @property
    def repeated(self) -> bool:
        hi = self.occurs[1]
        return hi is None or hi > 1


@dataclass(frozen=True)
class BoundType:
    readable_name: str
    members: tuple[BoundMember, ...] = ()
    enum_values: tuple[tuple[str, str], ...] | None = None
    wire_name: str | None = None
    kind: str = "complex"  # "complex" | "simple"
    namespace: str = ""
    wildcard: bool = False
    base: str | None = None

    @cached_property
    def by_readable(self) -> dict[str, BoundMember]:
        return {m.readable_name: m for m in self.members}

    @cached_property
    def by_wire(self) -> dict[str, BoundMember]:
        return {m.wire_name: m for m in self.members}

    @cached_property
    def text_member(self) -> BoundMember | None:
        return next((m for m in self.members if m.kind == "text_content"), None)

    @cached_property
    def enum_to_wire(self) -> dict[str, str] | None:
        return None if self.enum_values is None else dict(self.enum_values)

    @cached_property
    def enum_to_readable(self) -> dict[str, str] | None:
        return None if self.enum_values is None else {w: r for r, w in self.enum_values}


@dataclass(frozen=True)
class BindingManifest:
    types: tuple[BoundType, ...]
    schema_namespace: str
    dictionary_checksum: str
    roots: tuple[BoundMember, ...] = ()
    minified_namespace: str = ""
    namespace_map: tuple[tuple[str, str], ...] = ()

    @cached_property
    def type_index(self) -> dict[str, BoundType]:
        return {t.readable_name: t for t in self.types}

    def type(self, name: str) -> BoundType | None:
        """Bound type named ``name``; ``None`` for XSD built-ins."""
        return self.type_index.get(name)

    @cached_property
    def roots_by_readable(self) -> dict[tuple[str, str], BoundMember]:
        return {(m.namespace, m.readable_name): m for m in self.roots}

    @cached_property
    def roots_by_wire(self) -> dict[tuple[str, str], BoundMember]:
        return {(self.wire_namespace(m.namespace), m.wire_name): m for m in self.roots}

    @cached_property
    def _ns_map(self) -> dict[str, str]:
        return dict(self.namespace_map)

    @cached_property
    def _ns_unmap(self) -> dict[str, str]:
        return {v: k for k, v in self.namespace_map}

    def wire_namespace(self, namespace: str) -> str:
        return self._ns_map.get(namespace, namespace)

    def readable_namespace(self, namespace: str) -> str:
        return self._ns_unmap.get(namespace, namespace)

    def member_count(self) -> int:
        return len(self.roots) + sum(len(t.members) for t in self.types)


def dictionary_checksum(dic_bytes: bytes) -> str:
    return hashlib.sha256(dic_bytes).hexdigest()


def build_manifest(original, result: MinificationResult) -> BindingManifest:
    """Derive the binding manifest for ``original`` from a minification result."""
    schema_set = original if isinstance(original, SchemaSet) else SchemaSet(original)
    dic_bytes = write_dictionary(result.dictionary)
    if write_dictionary(assign_names(schema_set)) != dic_bytes:
        raise ChecksumMismatch("dictionary does not correspond to the given schema set")
    names = result.dictionary.as_map()
    primary_ns = schema_set.primary.target_namespace if schema_set.documents else ""

    type_keys: dict = {}  # component path -> readable type key

    def named_key(ns: str, local: str) -> str:
        return local if ns == primary_ns else "{%s}%s" % (ns, local)

    for doc in schema_set.documents:
        for comp in doc.components:
            if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                type_keys[comp.path] = named_key(doc.target_namespace, comp.name)

    def collect_anon(comp: SchemaComponent, prefix: str):
        for child in comp.children:
            if child.kind in (ELEMENT, ATTRIBUTE):
                for sub in child.children:
                    if sub.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                        key = f"{prefix}.{child.name}" if prefix else child.name
                        type_keys[sub.path] = key
                        collect_anon(sub, key)
            else:
                collect_anon(child, prefix)

    for doc in schema_set.documents:
        for comp in doc.components:
            if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                collect_anon(comp, type_keys[comp.path])
            else:
                collect_anon(SchemaComponent("wrap", None, comp.path.parent, children=(comp,)), "")
    seen_keys: dict[str, object] = {}
    for path, key in type_keys.items():
        if key in seen_keys:
            raise DuplicateName(f"bound type name '{key}' is ambiguous")
        seen_keys[key] = path

    def type_name(comp: SchemaComponent) -> str:
        inline = next((c for c in comp.children if c.kind in (COMPLEX_TYPE, SIMPLE_TYPE)), None)
        if inline is not None:
            return type_keys[inline.path]
        ref = comp.type_ref
        if ref.namespace == XSD_NS:
            return f"xsd:{ref.local}"
        target = schema_set.resolve_type(ref)
        return type_keys[target.path]

    def bind_members(scope, doc: SchemaDocument, owner: str) -> tuple[BoundMember, ...]:
        members = []
        seen: set[str] = set()
        for m in scope_members(scope, doc):
            if m.kind == "text_content":
                readable = TEXT_MEMBER
                tref = type_name_of_base(m.component)
            else:
                readable = m.name
                tref = type_name(m.component)
            if readable in seen:
                raise DuplicateName(f"type '{owner}' has two members named '{readable}'")
            seen.add(readable)
            members.append(BoundMember(
                readable, names[m.path], m.kind, tref, (m.occurs.min, m.occurs.max), m.namespace
            ))
        return tuple(members)

    def type_name_of_base(simple_content: SchemaComponent) -> str:
        ref = simple_content.type_ref
        if ref.namespace == XSD_NS:
            return f"xsd:{ref.local}"
        return type_keys[schema_set.resolve_type(ref).path]

    types: list[BoundType] = []

    def bind_type(comp: SchemaComponent, doc: SchemaDocument):
        key = type_keys[comp.path]
        wire = names.get(comp.path)
        if comp.kind == SIMPLE_TYPE:
            restriction = comp.children[0]
            enum = None
            if restriction.children:
                enum = tuple((f.name_or_value, names[f.path]) for f in restriction.children)
            base = restriction.type_ref
            types.append(BoundType(
                key, (), enum, wire, "simple", doc.target_namespace,
                base=f"xsd:{base.local}" if base.namespace == XSD_NS else type_keys[schema_set.resolve_type(base).path],
            ))
            return
        types.append(BoundType(
            key, bind_members(comp, doc, key), None, wire, "complex", doc.target_namespace,
            wildcard=has_wildcard(comp),
        ))

    def visit(comp: SchemaComponent, doc: SchemaDocument):
        if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
            bind_type(comp, doc)
        for child in comp.children:
            if child.kind in (ELEMENT, ATTRIBUTE, COMPLEX_TYPE, SIMPLE_TYPE) or child.kind in ("sequence", "choice", "simple_content"):
                visit(child, doc)

    roots: list[BoundMember] = []
    for doc in schema_set.documents:
        roots.extend(bind_members(doc, doc, "#schema"))
        for comp in doc.components:
            visit(comp, doc)

    return BindingManifest(
        types=tuple(types),
        schema_namespace=primary_ns,
        dictionary_checksum=dictionary_checksum(dic_bytes),
        roots=tuple(roots),
        minified_namespace=result.namespace_map.get(primary_ns, primary_ns),
        namespace_map=tuple(sorted(result.namespace_map.items())),
    )


# ---------------------------------------------------------------------------
# manifest.json


def _member_json(m: BoundMember) -> dict:
    return {
        "name": m.readable_name,
        "wire": m.wire_name,
        "kind": m.kind,
        "type": m.type_ref,
        "min": m.occurs[0],
        "max": m.occurs[1],
        "namespace": m.namespace,
    }


def _member_from(d: dict) -> BoundMember:
    return BoundMember(d["name"], d["wire"], d["kind"], d["type"], (d["min"], d["max"]), d["namespace"])


def manifest_to_json(manifest: BindingManifest) -> bytes:
    doc = {
        "format": MANIFEST_FORMAT,
        "schema_namespace": manifest.schema_namespace,
        "minified_namespace": manifest.minified_namespace,
        "dictionary_checksum": manifest.dictionary_checksum,
        "namespace_map": [list(p) for p in manifest.namespace_map],
        "roots": [_member_json(m) for m in manifest.roots],
        "types": [
            {
                "name": t.readable_name,
                "wire": t.wire_name,
                "kind": t.kind,
                "namespace": t.namespace,
                "base": t.base,
                "wildcard": t.wildcard,
                "members": [_member_json(m) for m in t.members],
                "enum": None if t.enum_values is None else [list(p) for p in t.enum_values],
            }
            for t in manifest.types
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def manifest_from_json(data: bytes, dic_bytes: bytes | None = None) -> BindingManifest:
    """Load a manifest; when ``dic_bytes`` is given its checksum must match."""
    try:
        doc = json.loads(data)
    except ValueError as exc:
        raise XsdMinError(f"manifest is not valid JSON: {exc}") from None
    if doc.get("format") != MANIFEST_FORMAT:
        raise XsdMinError(f"unsupported manifest format {doc.get('format')!r}")
    manifest = BindingManifest(
        types=tuple(
            BoundType(
                t["name"],
                tuple(_member_from(m) for m in t["members"]),
                None if t["enum"] is None else tuple(tuple(p) for p in t["enum"]),
                t["wire"],
                t["kind"],
                t["namespace"],
                t["wildcard"],
                t["base"],
            )
            for t in doc["types"]
        ),
        schema_namespace=doc["schema_namespace"],
        dictionary_checksum=doc["dictionary_checksum"],
        roots=tuple(_member_from(m) for m in doc["roots"]),
        minified_namespace=doc["minified_namespace"],
        namespace_map=tuple(tuple(p) for p in doc["namespace_map"]),
    )
    if dic_bytes is not None and dictionary_checksum(dic_bytes) != manifest.dictionary_checksum:
        raise ChecksumMismatch("manifest was generated from a different dictionary")
    return manifest


# ---------------------------------------------------------------------------
# source emission

_PLACEHOLDER = re.compile(r"\{\{\s*([A-Za-z_][A-Za-z0-9_]*)\s*\}\}")
REQUIRED_TEMPLATES = ("module", "type", "member", "enum", "enum_value")


def identifier(name: str) -> str:
    """Host-language identifier for a readable schema name."""
    ident = re.sub(r"\W", "_", name)
    if not ident or ident[0].isdigit():
        ident = "_" + ident
    if keyword.iskeyword(ident) or keyword.issoftkeyword(ident):
        ident += "_"
    return ident


def expand(template_name: str, template: str, values: dict[str, str]) -> str:
    def sub(m):
        key = m.group(1)
        if key not in values:
            raise TemplateError(template_name, f"no value for placeholder '{{{{{key}}}}}'")
        return values[key]

    return _PLACEHOLDER.sub(sub, template)


def load_templates(directory=None) -> dict[str, str]:
    """Read ``*.tmpl`` files from ``directory`` (default: bundled Python set)."""
    if directory is None:
        root = resources.files("xsdmin") / "data" / "templates" / "python"
        return {p.name[:-5]: p.read_text(encoding="utf-8") for p in root.iterdir() if p.name.endswith(".tmpl")}
    from pathlib import Path

    return {p.stem: p.read_text(encoding="utf-8") for p in sorted(Path(directory).glob("*.tmpl"))}


def emit_source(manifest: BindingManifest, template_set: dict[str, str], module_name: str = "bindings") -> list[tuple[str, bytes]]:
    """Expand ``template_set`` over ``manifest``; returns ``[(filename, bytes)]``."""
    for name in REQUIRED_TEMPLATES:
        if name not in template_set:
            raise TemplateError(name, "template missing from set")

    blocks = []
    for t in manifest.types:
        cls = identifier(t.readable_name)
        if t.kind == "simple":
            if t.enum_values is None:
                continue
            values = "".join(
                expand("enum_value", template_set["enum_value"], {
                    "const": identifier(readable),
                    "readable": json.dumps(readable),
                    "wire": wire,
                })
                for readable, wire in t.enum_values
            )
            blocks.append(expand("enum", template_set["enum"], {
                "class": cls,
                "type_name": json.dumps(t.readable_name),
                "values": values,
            }))
            continue
        members = "".join(
            expand("member", template_set["member"], {
                "prop": identifier(m.readable_name),
                "wire": "_" + m.wire_name,
                "readable": json.dumps(m.readable_name),
            })
            for m in t.members
        )
        table = ", ".join(
            "(%s, %s, %s, %s, %d, %s, %s)" % (
                json.dumps(m.readable_name), json.dumps(m.wire_name), json.dumps(m.kind),
                json.dumps(m.type_ref), m.occurs[0], "None" if m.occurs[1] is None else m.occurs[1],
                json.dumps(m.namespace),
            )
            for m in t.members
        )
        blocks.append(expand("type", template_set["type"], {
            "class": cls,
            "type_name": json.dumps(t.readable_name),
            "slots": ", ".join(json.dumps("_" + m.wire_name) for m in t.members) + ("," if len(t.members) == 1 else ""),
            "members_table": table + ("," if len(t.members) == 1 else ""),
            "members": members or "    pass\n",
        }))
    roots = ", ".join(
        "(%s, %s, %s)" % (json.dumps(m.namespace), json.dumps(m.readable_name), json.dumps(m.type_ref))
        for m in manifest.roots
    )
    text = expand("module", template_set["module"], {
        "namespace": json.dumps(manifest.schema_namespace),
        "checksum": manifest.dictionary_checksum,
        "classes": "\n\n".join(blocks),
        "roots": roots + ("," if len(manifest.roots) == 1 else ""),
    })
    return [(f"{module_name}.py", text.encode("utf-8"))]
