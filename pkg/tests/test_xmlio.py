from __future__ import annotations

import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentag.core import AnnotationSet, GraphMeta, Span
from sentag.errors import (
    DanglingGraphNode,
    EmptyRange,
    InvalidNesting,
    MalformedXml,
    MultipleRoots,
)
from sentag.graph import ArgumentGraph
from sentag.xmlio import (
    XML_DECLARATION,
    check_representable,
    escape,
    parse_annotated,
    serialize,
)

from oracles import stripped_text


def make_set(text, spans=()):
    s = AnnotationSet("d1", "a1", len(text))
    for tag, start, end, *rest in spans:
        s.add_span(tag, start, end, rest[0] if rest else None)
    return s


def fingerprint(annotation_set):
    return sorted(
        (sp.tag, sp.start, sp.end, tuple(sorted(sp.attributes.items())))
        for sp in annotation_set
    )


class TestSerialize:
    def test_no_spans_identity_wrapping(self):
        doc = serialize("hello", make_set("hello"))
        assert doc.xml_text == f'{XML_DECLARATION}\n<doc>hello</doc>'

    def test_special_characters_escaped(self):
        doc = serialize("a<b", make_set("a<b"))
        assert "<doc>a&lt;b</doc>" in doc.xml_text
        assert escape("""&<>"'""") == "&amp;&lt;&gt;&quot;&apos;"

    def test_span_placement(self):
        text = "hello world"
        s = make_set(text, [("claim", 0, 5, {"id": "1"})])
        doc = serialize(text, s)
        assert '<doc><claim id="1">hello</claim> world</doc>' in doc.xml_text

    def test_nested_and_sibling_spans(self):
        text = "abcdefgh"
        s = make_set(text, [("a", 0, 4), ("b", 1, 3), ("c", 5, 7)])
        doc = serialize(text, s)
        assert "<doc><a>a<b>bc</b>d</a>e<c>fg</c>h</doc>" in doc.xml_text

    def test_identical_ranges_nest_by_creation_order(self):
        text = "xyz"
        s = make_set(text, [("outer", 0, 2), ("inner", 0, 2)])
        doc = serialize(text, s)
        assert "<outer><inner>xy</inner></outer>" in doc.xml_text

    def test_attribute_values_escaped(self):
        text = "hi"
        s = make_set(text, [("t", 0, 2, {"v": 'a"b&c<d\ne'})])
        doc = serialize(text, s)
        assert 'v="a&quot;b&amp;c&lt;d&#10;e"' in doc.xml_text

    def test_graph_attributes_injected(self):
        text = "one two"
        s = make_set(text, [("arg", 0, 3), ("arg", 4, 7)])
        n1, n2 = s.spans[0].id, s.spans[1].id
        graph = ArgumentGraph("d1", "a1")
        graph.nodes = {n1, n2}
        graph.add_edge(n1, n2)
        doc = serialize(text, s, graph)
        assert f'node_id="{n1}" ancestors="" descendants="{n2}"' in doc.xml_text
        assert f'node_id="{n2}" ancestors="{n1}" descendants=""' in doc.xml_text

    def test_dangling_graph_node(self):
        text = "one"
        s = make_set(text, [("arg", 0, 3)])
        graph = ArgumentGraph("d1", "a1")
        graph.nodes = {"ghost"}
        with pytest.raises(DanglingGraphNode):
            serialize(text, s, graph)

    def test_invalid_nesting_defensive_check(self):
        s = AnnotationSet("d1", "a1", 10)
        s._adopt([
            Span("s1", "a", 0, 5),
            Span("s2", "b", 3, 8),
        ])
        with pytest.raises(InvalidNesting):
            serialize("0123456789", s)

    def test_control_characters_rejected(self):
        with pytest.raises(ValueError):
            serialize("a\x07b", make_set("a\x07b"))
        with pytest.raises(ValueError):
            check_representable("bare\rcr")

    def test_output_is_well_formed_for_general_parser(self):
        text = "a<b>&\"'\n😀é"
        s = make_set(text, [("t", 0, 3), ("u", 4, 8)])
        doc = serialize(text, s)
        ET.fromstring(doc.xml_text)  # raises on malformed output


class TestParseAnnotated:
    def test_round_trip_simple(self):
        text = "hello world"
        s = make_set(text, [("claim", 0, 5, {"id": "1"})])
        doc = serialize(text, s)
        text2, s2 = parse_annotated(doc)
        assert text2 == text
        assert fingerprint(s2) == fingerprint(s)

    def test_nested_offsets(self):
        # stripped text is "xy": a covers both characters, b only the first
        xml = "<doc><a><b>x</b>y</a></doc>"
        assert stripped_text(xml) == "xy"
        text, s = parse_annotated(xml)
        assert text == "xy"
        spans = {sp.tag: (sp.start, sp.end) for sp in s}
        assert spans == {"a": (0, 2), "b": (0, 1)}

    def test_entity_unescaping(self):
        text, s = parse_annotated("<doc>&amp;</doc>")
        assert text == "&"
        assert len(s) == 0

    def test_reserved_attributes_become_graph_meta(self):
        xml = '<doc><arg node_id="n1" ancestors="" descendants="n2 n3">x</arg></doc>'
        _, s = parse_annotated(xml)
        span = s.spans[0]
        assert span.attributes == {}
        assert span.graph_meta == GraphMeta("n1", (), ("n2", "n3"))
        assert span.id == "n1"

    def test_reserved_attributes_stay_user_attrs_on_non_graph_tags(self, basic_tagset):
        xml = '<doc><note node_id="zz">x</note></doc>'
        _, s = parse_annotated(xml, basic_tagset)
        assert s.spans[0].attributes == {"node_id": "zz"}
        assert s.spans[0].graph_meta is None

    def test_defaults_filled_with_tagset(self, basic_tagset):
        xml = "<doc><premise>x</premise></doc>"
        _, s = parse_annotated(xml, basic_tagset)
        assert s.spans[0].attributes == {"stance": "pro"}

    def test_malformed(self):
        with pytest.raises(MalformedXml):
            parse_annotated("<doc><a>x</doc>")
        with pytest.raises(MalformedXml):
            parse_annotated("no xml at all")

    def test_multiple_roots(self):
        with pytest.raises(MultipleRoots):
            parse_annotated("<doc>a</doc><doc>b</doc>")

    def test_doctype_rejected(self):
        with pytest.raises(MalformedXml):
            parse_annotated('<!DOCTYPE doc [<!ENTITY x "y">]><doc>&x;</doc>')

    def test_empty_element_rejected(self):
        with pytest.raises(EmptyRange):
            parse_annotated("<doc><a/>text</doc>")

    def test_generated_ids_avoid_node_id_collisions(self):
        xml = '<doc><t>a</t><u node_id="s1" ancestors="" descendants="">b</u></doc>'
        _, s = parse_annotated(xml)
        ids = [sp.id for sp in s]
        assert len(set(ids)) == 2 and "s1" in ids


# --- property tests ---

TEXT_ALPHABET = st.sampled_from(list("ab <>&\"'\n.é漢😀z"))


@st.composite
def text_and_spans(draw):
    text = draw(st.text(alphabet=TEXT_ALPHABET, min_size=0, max_size=30))
    s = AnnotationSet("d", "a", len(text))
    n = draw(st.integers(0, 6))
    for i in range(n):
        if not text:
            break
        start = draw(st.integers(0, len(text) - 1))
        end = draw(st.integers(start + 1, len(text)))
        attrs = draw(
            st.dictionaries(
                st.sampled_from(["k", "v2", "w"]),
                st.text(alphabet=TEXT_ALPHABET, max_size=6),
                max_size=2,
            )
        )
        try:
            s.add_span(f"t{i % 3}", start, end, attrs)
        except Exception:
            pass
    return text, s


@settings(max_examples=250, deadline=None)
@given(case=text_and_spans())
def test_round_trip_property(case):
    text, s = case
    doc = serialize(text, s)
    text2, s2 = parse_annotated(doc)
    assert text2 == text
    assert fingerprint(s2) == fingerprint(s)
    # length law: stripped character data matches the input scalar count
    assert len(stripped_text(doc.xml_text)) == len(text)
    # general-purpose well-formedness
    ET.fromstring(doc.xml_text)


@settings(max_examples=100, deadline=None)
@given(case=text_and_spans())
def test_serialize_deterministic(case):
    text, s = case
    assert serialize(text, s).xml_text == serialize(text, s).xml_text


@settings(max_examples=150, deadline=None)
@given(case1=text_and_spans(), case2=text_and_spans())
def test_serialize_injective_up_to_span_ids(case1, case2):
    text1, s1 = case1
    text2, s2 = case2
    if text1 != text2 or fingerprint(s1) != fingerprint(s2):
        assert serialize(text1, s1).xml_text != serialize(text2, s2).xml_text
