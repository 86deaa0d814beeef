import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xsdmin import codec
from xsdmin.errors import DicSyntaxError
from xsdmin.generate import random_schema
from xsdmin.minifier import (
    NameDictionary,
    minify,
    parse_dictionary,
    short_name,
    write_dictionary,
    write_minified_schema,
)
from xsdmin.schema import (
    ATTRIBUTE,
    COMPLEX_TYPE,
    ELEMENT,
    ENUMERATION,
    SIMPLE_CONTENT,
    SIMPLE_TYPE,
    ComponentPath,
    SchemaSet,
    parse_schema,
    resolve_references,
    structural_fingerprint,
)

XSD = "http://www.w3.org/2001/XMLSchema"


def xsd(body, tns="urn:test"):
    return (f'<xsd:schema xmlns:xsd="{XSD}" xmlns:t="{tns}" targetNamespace="{tns}">{body}</xsd:schema>').encode()


def no_refs(location):
    raise FileNotFoundError(location)


def minify_bytes(data, location="toy.xsd", files=None):
    root = parse_schema(data, location)
    loader = (lambda loc: files[loc]) if files else no_refs
    return minify(root, loader), resolve_references(root, loader)


def dic_lines(result):
    return write_dictionary(result.dictionary).decode().splitlines()


# short_name -----------------------------------------------------------------


@pytest.mark.parametrize("index, name", [(0, "a"), (1, "b"), (25, "z"), (26, "aa"), (27, "ab"),
                                         (51, "az"), (52, "ba"), (701, "zz"), (702, "aaa")])
def test_short_name_examples(index, name):
    assert short_name(index) == name


def test_short_name_injective():
    names = [short_name(i) for i in range(10_001)]
    assert len(set(names)) == len(names)
    assert all(n.isalpha() and n.islower() for n in names)


def test_short_name_length_grows_only_as_needed():
    assert all(len(short_name(i)) == 1 for i in range(26))
    assert all(len(short_name(i)) == 2 for i in range(26, 26 + 26 * 26))


def test_short_name_negative():
    with pytest.raises(ValueError):
        short_name(-1)


# minify ---------------------------------------------------------------------


def test_single_element_dictionary():
    result, _ = minify_bytes(xsd('<xsd:element name="IDMEF-Message" type="xsd:string"/>'))
    assert dic_lines(result) == ["a,xsd:schema/xsd:element[name=IDMEF-Message]"]
    ((name, data),) = write_minified_schema(result)
    assert name == "toy.min.xsd"
    doc = parse_schema(data, name)
    assert [c.name for c in doc.components] == ["a"]
    assert doc.target_namespace == "urn:test-min"
    assert result.namespace_map == {"urn:test": "urn:test-min"}


def test_enum_values_become_digits():
    result, _ = minify_bytes(xsd(
        '<xsd:simpleType name="usercategory"><xsd:restriction base="xsd:string">'
        '<xsd:enumeration value="unknown"/><xsd:enumeration value="application"/>'
        '<xsd:enumeration value="os-device"/></xsd:restriction></xsd:simpleType>'))
    facets = [line for line in dic_lines(result) if "enumeration" in line]
    assert [f.split(",")[0] for f in facets] == ["0", "1", "2"]
    assert facets[2].endswith("[value=os-device]")
    min_doc = result.minified_schemas[0]
    assert [c.name for c in min_doc.walk() if c.kind == ENUMERATION] == ["0", "1", "2"]


def test_sibling_types_reuse_short_names():
    result, _ = minify_bytes(xsd(
        '<xsd:complexType name="A"><xsd:attribute name="first" type="xsd:string"/></xsd:complexType>'
        '<xsd:complexType name="B"><xsd:attribute name="second" type="xsd:string"/></xsd:complexType>'))
    assert dic_lines(result) == [
        "a,xsd:schema/xsd:complexType[name=A]",
        "a,xsd:schema/xsd:complexType[name=A]/xsd:attribute[name=first]",
        "b,xsd:schema/xsd:complexType[name=B]",
        "a,xsd:schema/xsd:complexType[name=B]/xsd:attribute[name=second]",
    ]


def test_scope_order_attributes_text_elements(pipeline):
    by_path = {str(p): s for s, p in pipeline.result.dictionary}
    node = "xsd:schema/xsd:complexType[name=Node]"
    assert by_path[f"{node}/xsd:attribute[name=category]"] == "a"
    assert by_path[f"{node}/xsd:sequence/xsd:element[name=location]"] == "b"
    assert by_path[f"{node}/xsd:sequence/xsd:element[name=name]"] == "c"
    ct = "xsd:schema/xsd:complexType[name=TimeStamp]"  # type of CreateTime
    assert by_path[f"{ct}/xsd:simpleContent/xsd:extension/xsd:attribute[name=ntpstamp]"] == "a"
    assert by_path[f"{ct}/xsd:simpleContent"] == "b"


def test_idmef_fig6_lines(pipeline):
    lines = dic_lines(pipeline.result)
    assert lines[0] == "a,xsd:schema/xsd:element[name=IDMEF-Message]"
    assert "a,xsd:schema/xsd:complexType[name=IDMEF-Message]/xsd:attribute[name=version]" in lines


def test_include_points_at_minified_child():
    files = {"child.xsd": xsd('<xsd:complexType name="C"><xsd:attribute name="x" type="xsd:string"/>'
                              "</xsd:complexType>")}
    result, docs = minify_bytes(xsd('<xsd:include schemaLocation="child.xsd"/>'
                                    '<xsd:element name="Root" type="t:C"/>'), "parent.xsd", files)
    names = [n for n, _ in write_minified_schema(result)]
    assert names == ["child.min.xsd", "parent.min.xsd"]
    parent = result.minified_schemas[-1]
    assert parent.references[0].schema_location == "child.min.xsd"
    # the element's type reference follows the renamed child type
    root = parent.components[0]
    assert root.type_ref.local == "a" and root.type_ref.namespace == "urn:test-min"
    assert result.dictionary_name == "parent.dic"
    # non-primary documents carry their location in the path
    assert any(str(p).startswith("xsd:schema[location=child.xsd]") for _, p in result.dictionary)


def test_import_rewrites_namespace():
    files = {"other.xsd": xsd('<xsd:simpleType name="K"><xsd:restriction base="xsd:string">'
                              '<xsd:enumeration value="on"/></xsd:restriction></xsd:simpleType>', tns="urn:o")}
    body = ('<xsd:import namespace="urn:o" schemaLocation="other.xsd"/>'
            '<xsd:element name="R" type="o:K"/>')
    data = (f'<xsd:schema xmlns:xsd="{XSD}" xmlns:o="urn:o" targetNamespace="urn:test">{body}</xsd:schema>').encode()
    result, _ = minify_bytes(data, "main.xsd", files)
    main = result.minified_schemas[-1]
    assert main.references[0].namespace == "urn:o-min"
    assert main.components[0].type_ref.namespace == "urn:o-min"
    assert dict(main.prefixes)["o"] == "urn:o-min"


def test_idmef_minified_schema_self_consumable(pipeline):
    written = write_minified_schema(pipeline.result)
    docs = [parse_schema(data, name) for name, data in written]
    SchemaSet(docs)  # every reference resolves, no duplicates
    assert [d.components for d in docs] == [d.components for d in pipeline.result.minified_schemas]
    assert b"\n" not in written[0][1].split(b"?>", 1)[-1]


def test_no_dangling_type_refs(pipeline):
    min_set = SchemaSet(pipeline.result.minified_schemas)
    for doc in min_set:
        for comp in doc.walk():
            min_set.resolve_type(comp.type_ref)


def test_validity_transfer(pipeline, corpus_trees, manifest):
    min_set = SchemaSet(pipeline.result.minified_schemas)
    for tree in corpus_trees.values():
        codec.validate(codec.parse_instance(codec.to_min_xml(tree, manifest)), min_set)


def test_minify_deterministic(pipeline):
    from xsdmin.corpus import schema_bytes

    again, _ = minify_bytes(schema_bytes(), "idmef.xsd")
    assert write_dictionary(again.dictionary) == write_dictionary(pipeline.result.dictionary)
    assert write_minified_schema(again) == write_minified_schema(pipeline.result)


# dictionary file -------------------------------------------------------------


def test_dictionary_line_format():
    path = ComponentPath.parse("xsd:schema/xsd:element[name=IDMEF-Message]")
    assert write_dictionary(NameDictionary((("a", path),))) == b"a,xsd:schema/xsd:element[name=IDMEF-Message]\n"


def test_empty_dictionary():
    assert write_dictionary(NameDictionary()) == b""
    assert parse_dictionary(b"") == NameDictionary()


def test_dictionary_round_trip_with_reuse():
    result, _ = minify_bytes(xsd(
        '<xsd:complexType name="A"><xsd:attribute name="x" type="xsd:string"/></xsd:complexType>'
        '<xsd:complexType name="B"><xsd:attribute name="y" type="xsd:string"/></xsd:complexType>'))
    d = result.dictionary
    assert len(d) == 4 and [s for s, _ in d].count("a") == 3
    assert parse_dictionary(write_dictionary(d)) == d


@pytest.mark.parametrize("data, line", [
    (b"a,xsd:schema\nno comma here\n", 2),
    (b"A,xsd:schema\n", 1),
    (b"a,schema/element\n", 1),
    (b"a1,xsd:schema\n", 1),
    (b"\xff\xfe", 1),
])
def test_dictionary_syntax_errors(data, line):
    with pytest.raises(DicSyntaxError) as info:
        parse_dictionary(data)
    assert info.value.line_no == line


def test_enum_value_with_comma_cannot_be_recorded():
    with pytest.raises(ValueError):
        parse_schema(xsd('<xsd:simpleType name="K"><xsd:restriction base="xsd:string">'
                         '<xsd:enumeration value="a,b"/></xsd:restriction></xsd:simpleType>'))


# properties over random schemas ----------------------------------------------


def _expected_entries(docs):
    n = 0
    for doc in docs:
        for comp in doc.walk():
            if comp.kind in (ELEMENT, ATTRIBUTE, ENUMERATION, SIMPLE_CONTENT):
                n += 1
        n += sum(1 for c in doc.components if c.kind in (COMPLEX_TYPE, SIMPLE_TYPE))
    return n


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_schema_properties(rng):
    data = random_schema(rng)
    result, docs = minify_bytes(data, "r.xsd")
    entries = result.dictionary.entries
    # totality
    assert len(entries) == _expected_entries(docs)
    # reversibility: each path names exactly one original component
    originals = {}
    for doc in docs:
        for comp in doc.walk():
            originals.setdefault(comp.path, []).append(comp)
    for short, path in entries:
        (comp,) = originals[path]
        if comp.kind != SIMPLE_CONTENT:
            assert comp.name_or_value == path.leaf_name
    # uniqueness per scope and name-length bound
    scopes = {}
    for short, path in entries:
        scopes.setdefault((path.parent, short.isdigit()), []).append(short)
    for names in scopes.values():
        if len(names) <= 26:
            assert all(len(n) == 1 for n in names)
    # isomorphism under renaming
    for before, after in zip(docs, result.minified_schemas):
        assert structural_fingerprint(before) == structural_fingerprint(after)
    # self-consumable
    written = write_minified_schema(result)
    assert [parse_schema(d, n).components for n, d in written] == [d.components for d in result.minified_schemas]
    assert parse_dictionary(write_dictionary(result.dictionary)) == result.dictionary


def test_random_schema_is_reproducible():
    assert random_schema(random.Random(7)) == random_schema(random.Random(7))
