"""Random schemas and random schema-valid instances, for fuzzing and tests."""

from __future__ import annotations

import random
import string

from .codec import InstanceTree, _attribute_decls
from .schema import (
    ANY,
    CHOICE,
    ELEMENT,
    SEQUENCE,
    SIMPLE_CONTENT,
    SIMPLE_TYPE,
    QualifiedName,
    SchemaComponent,
    SchemaSet,
)

# printable text that survives an XML round trip unchanged
_TEXT_ALPHABET = string.ascii_letters + string.digits + " .,:;-_/%#@!?'\"<>&\t\n\r" + "éßøλЖ中€"

_ENUM_ALPHABET = string.ascii_letters + string.digits + " -_.&<ø"


def random_text(rng: random.Random, max_len: int = 12, allow_empty: bool = True) -> str:
    n = rng.randint(0 if allow_empty else 1, max_len)
    return "".join(rng.choice(_TEXT_ALPHABET) for _ in range(n))


class InstanceGenerator:
    """Draws trees that validate against ``schema_set``.

    Optional members are included with probability ``p_optional``;
    repeated members get up to ``max_repeat`` occurrences. Past
    ``max_depth`` only required content is produced. Iterations of a
    repeated choice are grouped by branch so every instance is
    representable in the JSON encodings.
    """

    def __init__(self, schema_set: SchemaSet, rng: random.Random, max_depth: int = 6,
                 p_optional: float = 0.5, max_repeat: int = 3):
        self.ss = schema_set
        self.rng = rng
        self.max_depth = max_depth
        self.p_optional = p_optional
        self.max_repeat = max_repeat

    def instance(self, root: QualifiedName | None = None) -> InstanceTree:
        if root is None:
            root = self.rng.choice(sorted(self.ss.elements, key=str))
        decl = self.ss.elements[root][0]
        return self.element(decl, root, 1)

    def _value(self, simple: SchemaComponent | None) -> str | None:
        values = self.ss.enum_values(simple)
        if values is not None:
            return self.rng.choice(values) or None
        return random_text(self.rng) or None

    def element(self, decl: SchemaComponent, qname: QualifiedName, depth: int) -> InstanceTree:
        ctype = self.ss.type_of(decl)
        if ctype is None or ctype.kind == SIMPLE_TYPE:
            return InstanceTree(qname, text=self._value(ctype))
        doc = self.ss.owner[ctype.path]
        attr_ns = doc.target_namespace if doc.attribute_form_qualified else ""
        attrs = []
        decls, _ = _attribute_decls(ctype)
        for d in decls:
            if d.prop("use") == "required" or self.rng.random() < self.p_optional:
                name = "{%s}%s" % (attr_ns, d.name) if attr_ns else d.name
                attrs.append((name, self._value(self.ss.type_of(d)) or ""))
        simple = next((c for c in ctype.children if c.kind == SIMPLE_CONTENT), None)
        if simple is not None:
            base = self.ss.resolve_type(simple.type_ref)
            optional = self.ss.enum_values(base) is None
            text = self._value(base) if not optional or self.rng.random() < 0.8 else None
            return InstanceTree(qname, tuple(attrs), text)
        particle = next((c for c in ctype.children if c.kind in (SEQUENCE, CHOICE)), None)
        children: list[InstanceTree] = []
        if particle is not None:
            elem_ns = doc.target_namespace if doc.element_form_qualified else ""
            self._particle(particle, elem_ns, depth, children)
        return InstanceTree(qname, tuple(attrs), None, tuple(children))

    def _count(self, comp: SchemaComponent, depth: int) -> int:
        lo, hi = comp.occurs.min, comp.occurs.max
        if depth >= self.max_depth:
            return lo
        top = self.max_repeat if hi is None else min(hi, max(lo, self.max_repeat))
        if lo == 0 and self.rng.random() >= self.p_optional:
            return 0
        return self.rng.randint(max(lo, 1), max(top, 1))

    def _particle(self, comp: SchemaComponent, elem_ns: str, depth: int, out: list):
        count = self._count(comp, depth)
        if comp.kind == ELEMENT:
            for _ in range(count):
                out.append(self.element(comp, QualifiedName(elem_ns, comp.name), depth + 1))
        elif comp.kind == ANY:
            for _ in range(count):
                out.append(InstanceTree(QualifiedName("urn:example:extension", "item"),
                                        (("n", str(self.rng.randint(0, 99))),), random_text(self.rng) or None))
        elif comp.kind == SEQUENCE:
            # repeating a multi-member sequence interleaves members; keep one pass
            if count > 1 and len(comp.children) > 1:
                count = 1
            for _ in range(count):
                for child in comp.children:
                    self._particle(child, elem_ns, depth, out)
        else:
            branches = [self._branch(comp, depth) for _ in range(count)]
            for index in sorted(branches):
                self._particle(comp.children[index], elem_ns, depth, out)

    def _branch(self, choice: SchemaComponent, depth: int) -> int:
        if depth >= self.max_depth:
            # smallest required footprint: prefer branches that may be empty
            for i, c in enumerate(choice.children):
                if c.occurs.min == 0:
                    return i
        return self.rng.randrange(len(choice.children))


def random_instance(schema_set: SchemaSet, rng: random.Random, **kwargs) -> InstanceTree:
    return InstanceGenerator(schema_set, rng, **kwargs).instance()


# ---------------------------------------------------------------------------
# random schemas


def random_schema(rng: random.Random, namespace: str = "urn:example:random", n_types: int | None = None) -> bytes:
    """A random single-document XSD using the supported construct subset."""
    n_types = n_types if n_types is not None else rng.randint(1, 6)
    names = iter(f"T{i}{rng.choice(string.ascii_uppercase)}{rng.randint(0, 999)}" for i in range(10_000))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<xsd:schema xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:t="{namespace}" '
        f'targetNamespace="{namespace}" elementFormDefault="qualified">',
    ]
    enum_types = []
    for _ in range(rng.randint(0, 3)):
        name = next(names)
        enum_types.append(name)
        # dictionary paths are comma separated lines, so enum values avoid both
        values = sorted({"".join(rng.choice(_ENUM_ALPHABET) for _ in range(rng.randint(1, 6))).strip() or "v"
                         for _ in range(rng.randint(1, 5))})
        facets = "".join(f'<xsd:enumeration value="{_attr(v)}"/>' for v in values)
        lines.append(f'<xsd:simpleType name="{name}"><xsd:restriction base="xsd:string">{facets}'
                     f'</xsd:restriction></xsd:simpleType>')
    complex_types = [next(names) for _ in range(n_types)]

    def simple_ref():
        if enum_types and rng.random() < 0.4:
            return f"t:{rng.choice(enum_types)}"
        return rng.choice(["xsd:string", "xsd:integer", "xsd:dateTime", "xsd:boolean"])

    def member_block(i, depth):
        used = set()

        def fresh(prefix):
            while True:
                n = f"{prefix}{rng.randint(0, 99)}"
                if n not in used:
                    used.add(n)
                    return n

        if depth == 0 and rng.random() < 0.2:
            attrs = "".join(
                f'<xsd:attribute name="{fresh("a")}" type="{simple_ref()}"'
                f'{_use(rng)}/>'
                for _ in range(rng.randint(0, 3))
            )
            return (f'<xsd:simpleContent><xsd:extension base="{simple_ref()}">{attrs}'
                    f'</xsd:extension></xsd:simpleContent>')
        parts = []
        for _ in range(rng.randint(0, 4)):
            occurs = rng.choice(['', ' minOccurs="0"', ' maxOccurs="unbounded"', ' minOccurs="0" maxOccurs="3"'])
            roll = rng.random()
            if roll < 0.4 and i + 1 < len(complex_types):
                ref = f"t:{rng.choice(complex_types[i + 1:])}"
                parts.append(f'<xsd:element name="{fresh("E")}" type="{ref}"{occurs}/>')
            elif roll < 0.55 and depth < 2:
                parts.append(f'<xsd:element name="{fresh("E")}"{occurs}><xsd:complexType>'
                             f'{member_block(i, depth + 1)}</xsd:complexType></xsd:element>')
            else:
                parts.append(f'<xsd:element name="{fresh("e")}" type="{simple_ref()}"{occurs}/>')
        compositor = rng.choice(["sequence", "sequence", "choice"]) if parts else "sequence"
        if compositor == "choice" and len(parts) > 1:
            body = f'<xsd:choice minOccurs="0" maxOccurs="unbounded">{"".join(parts)}</xsd:choice>'
        else:
            body = f"<xsd:sequence>{''.join(parts)}</xsd:sequence>"
        attrs = "".join(
            f'<xsd:attribute name="{fresh("a")}" type="{simple_ref()}"'
            f'{_use(rng)}/>'
            for _ in range(rng.randint(0, 3))
        )
        return body + attrs

    for i, name in enumerate(complex_types):
        lines.append(f'<xsd:complexType name="{name}">{member_block(i, 0)}</xsd:complexType>')
    for j in range(rng.randint(1, 3)):
        lines.append(f'<xsd:element name="root{j}" type="t:{rng.choice(complex_types)}"/>')
    lines.append("</xsd:schema>")
    return "\n".join(lines).encode("utf-8")


def _use(rng: random.Random) -> str:
    return ' use="required"' if rng.random() < 0.3 else ""


def _attr(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")
            .replace("\t", "&#9;").replace("\n", "&#10;").replace("\r", "&#13;"))
