import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xsdmin import codec
from xsdmin.codec import InstanceTree, WireMessage
from xsdmin.errors import (
    CorruptStream,
    EncodeError,
    EnumOutOfRange,
    JsonSyntax,
    MalformedXml,
    MixedContent,
    SchemaViolation,
    UnknownMember,
    UnknownWireMember,
)
from xsdmin.generate import random_instance
from xsdmin.schema import QualifiedName, SchemaSet, parse_schema

IDMEF = "http://iana.org/idmef"
XSD = "http://www.w3.org/2001/XMLSchema"


def q(local, ns=IDMEF):
    return QualifiedName(ns, local)


def _node(tree, *path):
    for local in path:
        tree = next(c for c in tree.children if c.element.local == local)
    return tree


# parse_instance ---------------------------------------------------------------


def test_heartbeat_tree(heartbeat):
    assert heartbeat.element == q("IDMEF-Message")
    hb = _node(heartbeat, "Heartbeat")
    assert hb.attributes == (("messageid", "abc123456789"),)
    node = _node(hb, "Analyzer", "Node")
    assert [c.element.local for c in node.children] == ["location", "name"]
    assert _node(node, "location").text == "Headquarters DMZ Network"


def test_trivial_empty_element():
    doc = parse_schema(f'<xsd:schema xmlns:xsd="{XSD}" targetNamespace="urn:a" elementFormDefault="qualified">'
                       '<xsd:element name="a"><xsd:complexType/></xsd:element></xsd:schema>'.encode())
    tree = codec.parse_instance(b'<a xmlns="urn:a"/>', [doc])
    assert tree == InstanceTree(QualifiedName("urn:a", "a"))
    assert tree.children == () and tree.text is None


def test_bogus_attribute_rejected(corpus, schema_set):
    xml = dict(corpus)["heartbeat"].replace(b'messageid="abc123456789"', b'messageid="abc123456789" bogus="1"')
    with pytest.raises(SchemaViolation) as info:
        codec.parse_instance(xml, schema_set)
    assert "bogus" in str(info.value)


def test_unknown_element_names_expected(corpus, schema_set):
    xml = dict(corpus)["heartbeat"].replace(b"<location>", b"<place>").replace(b"</location>", b"</place>")
    with pytest.raises(SchemaViolation) as info:
        codec.parse_instance(xml, schema_set)
    assert "place" in str(info.value)
    assert info.value.path.startswith("/IDMEF-Message/Heartbeat")


def test_enum_value_checked(corpus, schema_set):
    xml = dict(corpus)["heartbeat"].replace(b'category="dns"', b'category="dnz"')
    with pytest.raises(SchemaViolation) as info:
        codec.parse_instance(xml, schema_set)
    assert "dns" in info.value.expected


@pytest.mark.parametrize("old, new", [
    (b' ntpstamp="0xbc722ebe.0x00000000"', b""),
    (b'<CreateTime ntpstamp="0xbc722ebe.0x00000000">2000-03-09T14:07:58Z</CreateTime>', b""),
])
def test_missing_required_member(corpus, schema_set, old, new):
    xml = dict(corpus)["heartbeat"]
    assert old in xml
    with pytest.raises(SchemaViolation):
        codec.parse_instance(xml.replace(old, new), schema_set)


def test_mixed_content_rejected(schema_set):
    xml = (b'<IDMEF-Message xmlns="http://iana.org/idmef" version="1.0">text'
           b'<Heartbeat><Analyzer analyzerid="x"/><CreateTime ntpstamp="1">t</CreateTime></Heartbeat>'
           b"</IDMEF-Message>")
    with pytest.raises(MixedContent):
        codec.parse_instance(xml, schema_set)


def test_malformed_instance():
    with pytest.raises(MalformedXml):
        codec.parse_instance(b"<a><b></a>")


def test_unvalidated_parse_accepts_anything():
    tree = codec.parse_instance(b'<a x="1"><b>t</b></a>')
    assert tree.children[0].text == "t"


# analyze_structure --------------------------------------------------------------


def test_metrics_examples(corpus_trees):
    for name, expected in (("empty-alert", (5, 7, 3)), ("heartbeat", (11, 9, 5))):
        tree = corpus_trees[name]
        xml = codec.to_xml(tree)
        m = codec.analyze_structure(tree, xml)
        assert (m.node_count, m.attribute_count, m.depth) == expected
        assert m.byte_size == len(xml)


def test_metrics_single_root():
    tree = InstanceTree(QualifiedName("", "r"))
    xml = codec.to_xml(tree)
    m = codec.analyze_structure(tree, xml)
    assert (m.byte_size, m.node_count, m.attribute_count, m.depth) == (len(xml), 1, 0, 1)


def _naive_counts(tree, level=1):
    nodes, attrs, depth = 1, len(tree.attributes), level
    for child in tree.children:
        n, a, d = _naive_counts(child, level + 1)
        nodes, attrs, depth = nodes + n, attrs + a, max(depth, d)
    return nodes, attrs, depth


def test_metrics_agree_with_naive_counter(schema_set):
    for seed in range(100):
        tree = random_instance(schema_set, random.Random(seed))
        m = codec.analyze_structure(tree, codec.to_xml(tree))
        assert (m.node_count, m.attribute_count, m.depth) == _naive_counts(tree)


# XML renderings ----------------------------------------------------------------


def test_canonical_xml_shape(heartbeat, corpus):
    xml = codec.to_xml(heartbeat)
    assert xml == dict(corpus)["heartbeat"]
    assert xml.startswith(b'<?xml version="1.0" encoding="UTF-8"?>\n<IDMEF-Message version="1.0" '
                          b'xmlns="http://iana.org/idmef">\n  <Heartbeat')
    assert b"\r" not in xml and xml.endswith(b"</IDMEF-Message>\n")


def test_prefixed_rendering_round_trips(heartbeat, schema_set):
    xml = codec.to_xml(heartbeat, codec.schema_prefixes(schema_set))
    assert b"<idmef:Heartbeat" in xml
    assert codec.parse_instance(xml, schema_set) == heartbeat


@pytest.mark.parametrize("given_, expected", [
    (b"<a>\n  <b/>\n</a>", b"<a><b/></a>"),
    (b"<x><y></y></x>", b"<x><y/></x>"),
    (b"<x><!-- note --><y>keep  this </y></x>", b"<x><y>keep  this </y></x>"),
])
def test_whitespace_minifier(given_, expected):
    assert codec.to_min_xml_whitespace(given_) == expected


def test_whitespace_minifier_reparse_equality(corpus):
    for _, xml in corpus:
        assert codec.parse_instance(codec.to_min_xml_whitespace(xml)) == codec.parse_instance(xml)


def test_whitespace_minifier_malformed():
    with pytest.raises(MalformedXml):
        codec.to_min_xml_whitespace(b"<a><b></a>")


def test_text_with_special_characters_round_trips(manifest):
    tree = InstanceTree(q("IDMEF-Message"), (("version", "1 & <2>\t\"x\""),), None, (
        InstanceTree(q("Heartbeat"), (), None, (
            InstanceTree(q("Analyzer"), (("analyzerid", "a\r\nb"),)),
            InstanceTree(q("CreateTime"), (("ntpstamp", "0x1"),), " lead\r\ntrail "),
        )),
    ))
    for enc in codec.ENCODINGS:
        assert codec.decode(codec.encode(tree, enc, manifest), manifest) == tree


# JSON ----------------------------------------------------------------------------


def test_json_matches_readable_shape(heartbeat, manifest):
    doc = json.loads(codec.to_json(heartbeat, manifest))
    hb = doc["IDMEF-Message"]["Heartbeat"][0]
    assert hb["CreateTime"] == {"ntpstamp": "0xbc722ebe.0x00000000", "value": "2000-03-09T14:07:58Z"}
    assert hb["Analyzer"]["Node"]["location"] == "Headquarters DMZ Network"
    assert [d["real"] for d in hb["AdditionalData"]] == ["62.5", "87.1"]
    assert b" " not in codec.to_json(heartbeat, manifest).replace(b"Headquarters DMZ Network", b"")


def test_single_repeat_is_still_an_array(heartbeat, manifest):
    hb = _node(heartbeat, "Heartbeat")
    one = InstanceTree(heartbeat.element, heartbeat.attributes, None, (
        InstanceTree(hb.element, hb.attributes, None, hb.children[:-1]),))
    doc = json.loads(codec.to_json(one, manifest))
    assert isinstance(doc["IDMEF-Message"]["Heartbeat"][0]["AdditionalData"], list)
    assert codec.from_json(codec.to_json(one, manifest), manifest) == one


def test_min_json_node(heartbeat, manifest):
    doc = json.loads(codec.to_min_json(heartbeat, manifest))
    node = doc["a"]["c"][0]["b"]["i"]
    # category is an enumeration, so its wire form is the value's index
    assert node == {"a": "5", "b": "Headquarters DMZ Network", "c": "analyzer01.example.com"}
    assert manifest.type("Node").by_wire["a"].readable_name == "category"


def test_size_ordering(corpus_trees, manifest):
    for name, tree in corpus_trees.items():
        xml = len(codec.to_xml(tree))
        assert len(codec.to_min_json(tree, manifest)) < len(codec.to_json(tree, manifest)) < xml, name
        assert len(codec.to_min_xml(tree, manifest)) < xml, name


def test_all_encodings_round_trip_corpus(corpus_trees, manifest, schema_set):
    for name, tree in corpus_trees.items():
        for enc in codec.ENCODINGS:
            for comp in codec.COMPRESSIONS:
                msg = codec.encode(tree, enc, manifest, comp)
                assert (msg.encoding, msg.compression) == (enc, comp)
                assert codec.decode(msg, manifest, schema_set) == tree, (name, enc, comp)


def test_wildcard_passthrough(corpus_trees, manifest):
    tree = corpus_trees["complete-alert"]
    packets = [n for n in tree.iter() if n.element.namespace == "urn:example:raw"]
    assert len(packets) == 1
    payload = codec.to_min_json(tree, manifest)
    assert b'"#any":["<packet len=\\"60\\" xmlns=\\"urn:example:raw\\">AAECAw==</packet>"]' in payload
    assert codec.from_min_json(payload, manifest) == tree


def test_min_xml_valid_against_minified_schema(pipeline, corpus_trees, manifest):
    min_set = SchemaSet(pipeline.result.minified_schemas)
    for tree in corpus_trees.values():
        data = codec.to_min_xml(tree, manifest)
        assert codec.from_min_xml(data, manifest, min_set) == tree


def _keys(obj, path=()):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield path, k
            yield from _keys(v, path + (k,))
    elif isinstance(obj, list):
        for v in obj:
            yield from _keys(v, path)


def _rename_key(obj, path, old, new):
    if isinstance(obj, list):
        return [_rename_key(v, path, old, new) for v in obj]
    if not isinstance(obj, dict):
        return obj
    if not path:
        return {(new if k == old else k): v for k, v in obj.items()}
    return {k: (_rename_key(v, path[1:], old, new) if k == path[0] else v) for k, v in obj.items()}


def test_mutated_wire_keys_never_bind(corpus_trees, manifest):
    rng = random.Random(3)
    for tree in corpus_trees.values():
        doc = json.loads(codec.to_min_json(tree, manifest))
        keys = [(p, k) for p, k in _keys(doc) if k != codec.WILDCARD_KEY]
        for path, key in rng.sample(keys, min(10, len(keys))):
            bad = json.dumps(_rename_key(doc, path, key, key + "zz")).encode()
            with pytest.raises((UnknownWireMember, SchemaViolation)):
                codec.from_min_json(bad, manifest)


def test_every_emitted_wire_key_is_in_manifest(corpus_trees, manifest):
    wires = {m.wire_name for t in manifest.types for m in t.members} | {m.wire_name for m in manifest.roots}
    for tree in corpus_trees.values():
        doc = json.loads(codec.to_min_json(tree, manifest))
        assert {k for _, k in _keys(doc)} - {codec.WILDCARD_KEY} <= wires


def test_enum_round_trip_all_values(manifest):
    for t in manifest.types:
        for readable, wire in t.enum_values or ():
            out = codec._scalar_out(readable, t.readable_name, manifest, True, "")
            assert out == wire
            assert codec._scalar_in(out, t.readable_name, manifest, True, "") == readable


def test_enum_out_of_range(heartbeat, manifest):
    data = codec.to_min_json(heartbeat, manifest).replace(b'"a":"7"', b'"a":"99"', 1)
    with pytest.raises(EnumOutOfRange):
        codec.from_min_json(data, manifest)


def test_enum_wire_value_must_be_digits(heartbeat, manifest):
    data = codec.to_min_json(heartbeat, manifest).replace(b'"a":"7"', b'"a":"real"', 1)
    with pytest.raises(EnumOutOfRange):
        codec.from_min_json(data, manifest)


def test_unknown_readable_member(heartbeat, manifest):
    data = codec.to_json(heartbeat, manifest).replace(b'"messageid"', b'"msgid"')
    with pytest.raises(UnknownMember) as info:
        codec.from_json(data, manifest)
    assert info.value.key == "msgid" and info.value.type_name == "Heartbeat"


@pytest.mark.parametrize("payload", [b"{", b"[]", b'{"a":1}{', b'{"a":{"a":"1","a":"2"}}', b"\xff"])
def test_json_syntax(payload, manifest):
    with pytest.raises((JsonSyntax, UnknownWireMember, SchemaViolation)) as info:
        codec.from_min_json(payload, manifest)
    if payload in (b"{", b'{"a":1}{', b"\xff", b'{"a":{"a":"1","a":"2"}}'):
        assert info.type is JsonSyntax


def test_interleaved_repeats_cannot_be_encoded(corpus_trees, manifest):
    alert = _node(corpus_trees["empty-alert"], "Alert")
    hb = _node(corpus_trees["heartbeat"], "Heartbeat")
    tree = InstanceTree(q("IDMEF-Message"), (("version", "1.0"),), None, (alert, hb, alert))
    assert codec.decode(codec.encode(tree, "min_xml", manifest), manifest) == tree
    with pytest.raises(EncodeError):
        codec.to_min_json(tree, manifest)


def test_corrupt_gzip_payload(heartbeat, manifest):
    msg = codec.encode(heartbeat, "min_json", manifest, "gzip")
    data = bytearray(msg.payload)
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(CorruptStream):
        codec.decode(WireMessage(bytes(data), "min_json", "gzip"), manifest)


def test_unknown_encoding(heartbeat, manifest):
    with pytest.raises(ValueError):
        codec.encode(heartbeat, "yaml", manifest)


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 8))
def test_random_instances_round_trip(schema_set, manifest, rng, depth):
    tree = random_instance(schema_set, rng, max_depth=depth)
    codec.validate(tree, schema_set)
    for enc in codec.ENCODINGS:
        assert codec.decode(codec.encode(tree, enc, manifest), manifest, schema_set) == tree
