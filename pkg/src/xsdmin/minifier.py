"""Two-pass schema minification.

Pass one walks import/include references and stacks the schema set so that
referenced documents come first. Pass two pops each document, gives it a
new target namespace, points its references at the minified files, then
renames every named component (letter series) and every enumeration value
(digit series). Names are scoped: two components with different parent
paths may share a short name.
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass, field, replace

from .errors import DicSyntaxError, InternalCollision
from .schema import (
    ATTRIBUTE,
    COMPLEX_TYPE,
    ELEMENT,
    SIMPLE_CONTENT,
    SIMPLE_TYPE,
    XSD_NS,
    ComponentPath,
    QualifiedName,
    SchemaComponent,
    SchemaDocument,
    SchemaReference,
    SchemaSet,
    file_loader,
    join_location,
    resolve_references,
    root_path_for,
    scope_members,
    serialize_schema,
)

MIN_NAMESPACE_SUFFIX = "-min"


def short_name(index: int) -> str:
    """Bijective base-26 name: 0 -> a, 25 -> z, 26 -> aa."""
    if index < 0:
        raise ValueError("index must be non-negative")
    n = index + 1
    letters = []
    while n:
        n, rem = divmod(n - 1, 26)
        letters.append(chr(ord("a") + rem))
    return "".join(reversed(letters))


@dataclass(frozen=True)
class NameDictionary:
    entries: tuple[tuple[str, ComponentPath], ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def as_map(self) -> dict[ComponentPath, str]:
        return {path: short for short, path in self.entries}


@dataclass(frozen=True)
class MinificationResult:
    minified_schemas: tuple[SchemaDocument, ...]
    dictionary: NameDictionary
    namespace_map: dict[str, str]
    original_schemas: tuple[SchemaDocument, ...] = ()
    file_names: dict[str, str] = field(default_factory=dict)

    @property
    def dictionary_name(self) -> str:
        primary = self.minified_schemas[-1].location
        return primary[: -len(".min.xsd")] + ".dic" if primary.endswith(".min.xsd") else primary + ".dic"


def minified_namespace(namespace: str) -> str:
    return namespace + MIN_NAMESPACE_SUFFIX if namespace else ""


def _minified_file_names(docs) -> dict[str, str]:
    out: dict[str, str] = {}
    used: set[str] = set()
    for doc in docs:
        base = posixpath.basename(doc.location) or "schema.xsd"
        stem = base[:-4] if base.endswith(".xsd") else base
        candidate = f"{stem}.min.xsd"
        n = 1
        while candidate in used:
            n += 1
            candidate = f"{stem}-{n}.min.xsd"
        used.add(candidate)
        out[doc.location] = candidate
    return out


def assign_names(schema_set: SchemaSet) -> NameDictionary:
    """Short-name assignment for every named component of ``schema_set``.

    Documents are visited in the given (dependency-first) order. Global
    elements and attributes share one counter per target namespace, named
    types share another. Each complex type is its own scope.
    """
    entries: list[tuple[str, ComponentPath]] = []
    global_counts: dict[str, int] = {}
    type_counts: dict[str, int] = {}
    scopes: dict[tuple, set[str]] = {}

    def emit(scope_key, name, path):
        taken = scopes.setdefault(scope_key, set())
        if name in taken:
            raise InternalCollision(f"short name '{name}' assigned twice in scope {scope_key}")
        taken.add(name)
        entries.append((name, path))

    def visit_type(comp: SchemaComponent, doc: SchemaDocument):
        if comp.kind == SIMPLE_TYPE:
            restriction = comp.children[0]
            for i, facet in enumerate(restriction.children):
                emit(("enum", comp.path), str(i), facet.path)
            return
        members = scope_members(comp, doc)
        for i, member in enumerate(members):
            emit(("type", comp.path), short_name(i), member.path)
        for member in members:
            visit_inline(member.component, doc)

    def visit_inline(comp: SchemaComponent | None, doc: SchemaDocument):
        if comp is None or comp.kind not in (ELEMENT, ATTRIBUTE):
            return
        for child in comp.children:
            if child.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                visit_type(child, doc)

    for doc in schema_set.documents:
        ns = doc.target_namespace
        for comp in doc.components:
            if comp.kind in (ELEMENT, ATTRIBUTE):
                i = global_counts.get(ns, 0)
                global_counts[ns] = i + 1
                emit(("global", ns), short_name(i), comp.path)
        for comp in doc.components:
            if comp.kind in (COMPLEX_TYPE, SIMPLE_TYPE):
                i = type_counts.get(ns, 0)
                type_counts[ns] = i + 1
                emit(("types", ns), short_name(i), comp.path)
                visit_type(comp, doc)
            else:
                visit_inline(comp, doc)
    return NameDictionary(tuple(entries))


def minify(root: SchemaDocument, loader=file_loader) -> MinificationResult:
    """Minify ``root`` and everything it references."""
    # pass 1: dependency stack, popped referenced-first
    docs = resolve_references(root, loader)
    schema_set = SchemaSet(docs)
    namespace_map = {doc.target_namespace: minified_namespace(doc.target_namespace) for doc in docs}
    file_names = _minified_file_names(docs)
    dictionary = assign_names(schema_set)
    names = dictionary.as_map()

    def map_ref(ref: QualifiedName | None) -> QualifiedName | None:
        if ref is None or ref.namespace == XSD_NS:
            return ref
        target = schema_set.types.get(ref)
        if target is None:
            return ref
        return QualifiedName(namespace_map[ref.namespace], names[target[0].path])

    def enum_index(comp: SchemaComponent, value: str) -> str:
        values = schema_set.enum_values(schema_set.type_of(comp))
        if values is None:
            return value
        return str(values.index(value))

    def rewrite(comp: SchemaComponent, parent: ComponentPath, old_parent: ComponentPath) -> SchemaComponent:
        # the text slot's short name lives in the dictionary only
        named = comp.kind != SIMPLE_CONTENT
        new_name = names.get(comp.path, comp.name_or_value) if named else comp.name_or_value
        # keep intermediate segments such as xsd:extension
        *between, (kind, sel) = comp.path.segments[len(old_parent.segments):]
        if sel.startswith("name="):
            sel = f"name={new_name}"
        elif sel.startswith("value="):
            sel = f"value={new_name}"
        path = ComponentPath(parent.segments + tuple(between) + ((kind, sel),))
        props = comp.props
        if comp.kind in (ELEMENT, ATTRIBUTE):
            props = tuple(
                (k, enum_index(comp, v)) if k in ("default", "fixed") else (k, v) for k, v in props
            )
        return replace(
            comp,
            name_or_value=new_name,
            path=path,
            type_ref=map_ref(comp.type_ref),
            children=tuple(rewrite(c, path, comp.path) for c in comp.children),
            props=props,
        )

    minified = []
    # pass 2: pop referenced documents first, rewriting names as we go
    for index, doc in enumerate(docs):
        primary = index == len(docs) - 1
        location = file_names[doc.location]
        root_path = root_path_for(location, primary)
        refs = []
        for ref in doc.references:
            target = join_location(doc.location, ref.schema_location)
            refs.append(SchemaReference(
                ref.kind,
                file_names[target],
                namespace_map.get(ref.namespace, ref.namespace) if ref.namespace is not None else None,
            ))
        minified.append(SchemaDocument(
            target_namespace=namespace_map[doc.target_namespace],
            location=location,
            references=tuple(refs),
            components=tuple(rewrite(c, root_path, doc.root_path) for c in doc.components),
            prefixes=tuple((p, namespace_map.get(uri, uri)) for p, uri in doc.prefixes),
            element_form_qualified=doc.element_form_qualified,
            attribute_form_qualified=doc.attribute_form_qualified,
            root_path=root_path,
        ))

    # every reference in the output must resolve inside the output
    min_set = SchemaSet(minified)
    for doc in minified:
        for comp in doc.walk():
            min_set.resolve_type(comp.type_ref)

    return MinificationResult(
        minified_schemas=tuple(minified),
        dictionary=dictionary,
        namespace_map=namespace_map,
        original_schemas=tuple(docs),
        file_names=file_names,
    )


def write_dictionary(dictionary: NameDictionary) -> bytes:
    return "".join(f"{short},{path}\n" for short, path in dictionary.entries).encode("utf-8")


def parse_dictionary(data: bytes) -> NameDictionary:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DicSyntaxError(1, f"not UTF-8: {exc}") from None
    entries = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for no, line in enumerate(lines, 1):
        short, sep, path = line.partition(",")
        if not sep:
            raise DicSyntaxError(no, "expected 'short,path'")
        if not short or not (short.isalpha() and short.islower() or short.isdigit()):
            raise DicSyntaxError(no, f"bad short name {short!r}")
        try:
            entries.append((short, ComponentPath.parse(path)))
        except ValueError as exc:
            raise DicSyntaxError(no, str(exc)) from None
    return NameDictionary(tuple(entries))


def write_minified_schema(result: MinificationResult) -> list[tuple[str, bytes]]:
    return [(doc.location, serialize_schema(doc)) for doc in result.minified_schemas]
