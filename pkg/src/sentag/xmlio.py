"""Loss-free conversion between (document text + annotation set) and
inline-tagged XML.

The output is a single ``<doc>`` wrapper around the full text with each span
rendered as an inline element at its character range. No whitespace is ever
inserted inside the wrapper: indentation would corrupt character offsets.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

from .core import RESERVED_ATTRIBUTE_NAMES, AnnotationSet, GraphMeta, Span
from .errors import (
    DanglingGraphNode,
    EmptyRange,
    InvalidNesting,
    MalformedXml,
    MultipleRoots,
)

if TYPE_CHECKING:
    from .graph import ArgumentGraph
    from .schema import TagSet

XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'
ROOT_TAG = "doc"

_ESCAPES = str.maketrans({
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    '"': "&quot;",
    "'": "&apos;",
})

# Attribute values additionally need whitespace as character references:
# XML parsers normalize literal tabs/newlines in attributes to spaces.
_ATTR_ESCAPES = str.maketrans({
    "&": "&amp;",
    "<": "&lt;",
    ">": "&gt;",
    '"': "&quot;",
    "'": "&apos;",
    "\t": "&#9;",
    "\n": "&#10;",
    "\r": "&#13;",
})

# XML 1.0 cannot represent most C0 control characters at all, in any form;
# a bare CR cannot survive either (parsers fold it into LF), so it is
# rejected rather than silently corrupted.
_FORBIDDEN = {
    chr(c) for c in range(0x20) if chr(c) not in ("\t", "\n")
} | {chr(0x7F)}


@dataclass(frozen=True)
class XmlDocument:
    xml_text: str
    root_tag: str = ROOT_TAG

    def __str__(self) -> str:
        return self.xml_text

    def encode(self) -> bytes:
        return self.xml_text.encode("utf-8")


def escape(value: str) -> str:
    """Escape the five XML-special characters ``& < > " '``."""
    return value.translate(_ESCAPES)


def escape_attr(value: str) -> str:
    """Attribute-value escaping: the five specials plus tab/newline/CR as
    character references so they survive attribute-value normalization."""
    return value.translate(_ATTR_ESCAPES)


def check_representable(text: str) -> None:
    """Reject document text that cannot round-trip through XML 1.0:
    C0 control characters (other than tab and LF) and bare CR."""
    for ch in text:
        if ch in _FORBIDDEN:
            raise ValueError(
                f"text contains U+{ord(ch):04X}, not representable in XML 1.0"
            )


def serialize(
    text: str,
    annotation_set: AnnotationSet,
    graph: "ArgumentGraph | None" = None,
) -> XmlDocument:
    """Render the annotated document as inline XML.

    Nesting follows containment (outer span = outer element; identical
    ranges nest by creation order). When ``graph`` is given, graph-node
    spans are enriched with ``node_id``/``ancestors``/``descendants``
    attributes first; spans already carrying graph metadata render it
    either way.
    """
    check_representable(text)
    spans = annotation_set.in_document_order()

    for i, a in enumerate(spans):
        for b in spans[i + 1:]:
            overlap = max(a.start, b.start) < min(a.end, b.end)
            contained = a.contains(b) or b.contains(a)
            if overlap and not contained:
                raise InvalidNesting(
                    f"spans {a.id!r} and {b.id!r} partially overlap"
                )

    if graph is not None:
        from .graph import inject_graph_attributes

        known = {span.id for span in spans}
        missing = sorted(graph.nodes - known)
        if missing:
            raise DanglingGraphNode(
                f"graph node(s) without a span: {', '.join(missing)}",
                nodes=missing,
            )
        enriched = inject_graph_attributes(graph, annotation_set)
        spans = enriched.in_document_order()

    parts: list[str] = [XML_DECLARATION, "\n<", ROOT_TAG, ">"]
    position = 0
    open_stack: list[Span] = []

    def emit_text(upto: int) -> None:
        nonlocal position
        if upto > position:
            parts.append(escape(text[position:upto]))
            position = upto

    def close(span: Span) -> None:
        emit_text(span.end)
        parts.append(f"</{span.tag}>")

    for span in spans:
        while open_stack and open_stack[-1].end <= span.start:
            close(open_stack.pop())
        emit_text(span.start)
        parts.append(_start_tag(span))
        open_stack.append(span)
    while open_stack:
        close(open_stack.pop())
    emit_text(len(text))
    parts.append(f"</{ROOT_TAG}>")

    return XmlDocument(xml_text="".join(parts))


def _start_tag(span: Span) -> str:
    pieces = [f"<{span.tag}"]
    for name, value in span.attributes.items():
        pieces.append(f' {name}="{escape_attr(value)}"')
    meta = span.graph_meta
    if meta is not None:
        pieces.append(f' node_id="{escape_attr(meta.node_id)}"')
        pieces.append(f' ancestors="{escape_attr(" ".join(meta.ancestors))}"')
        pieces.append(f' descendants="{escape_attr(" ".join(meta.descendants))}"')
    pieces.append(">")
    return "".join(pieces)


@dataclass
class ScannedElement:
    """One non-root element seen by the low-level scanner, with offsets into
    the reconstructed text and attributes in document order."""

    tag: str
    start: int
    end: int
    attributes: dict[str, str]
    top_level: bool


@dataclass
class ScanResult:
    text: str
    root_tag: str
    elements: list[ScannedElement]  # start-tag document order


def scan(xml_text: str | XmlDocument) -> ScanResult:
    """Event-parse an XML document, tracking character offsets.

    Character data is concatenated with entities already decoded; each
    element's [start, end) indexes the reconstructed text. DOCTYPE
    declarations are rejected outright (outputs never contain one, and
    accepting them invites entity-expansion tricks).
    """
    if isinstance(xml_text, XmlDocument):
        xml_text = xml_text.xml_text

    parser = xml.parsers.expat.ParserCreate()
    parser.buffer_text = True
    parser.ordered_attributes = True  # document order, explicitly

    chunks: list[str] = []
    elements: list[ScannedElement] = []
    open_elements: list[ScannedElement] = []
    root_tag: list[str] = []
    position = 0

    def on_start(name: str, attr_pairs: list[str]) -> None:
        nonlocal position
        if not root_tag:
            root_tag.append(name)
            return
        element = ScannedElement(
            tag=name,
            start=position,
            end=-1,
            attributes=dict(zip(attr_pairs[0::2], attr_pairs[1::2])),
            top_level=len(open_elements) == 0,
        )
        elements.append(element)
        open_elements.append(element)

    def on_end(name: str) -> None:
        if open_elements:
            open_elements.pop().end = position

    def on_chars(data: str) -> None:
        nonlocal position
        chunks.append(data)
        position += len(data)

    def on_doctype(*args) -> None:
        raise MalformedXml("DOCTYPE declarations are not accepted")

    parser.StartElementHandler = on_start
    parser.EndElementHandler = on_end
    parser.CharacterDataHandler = on_chars
    parser.StartDoctypeDeclHandler = on_doctype

    try:
        parser.Parse(xml_text.encode("utf-8"), True)
    except MalformedXml:
        raise
    except xml.parsers.expat.ExpatError as exc:
        junk = xml.parsers.expat.errors.codes[
            xml.parsers.expat.errors.XML_ERROR_JUNK_AFTER_DOC_ELEMENT
        ]
        offset = _error_offset(xml_text, parser.ErrorByteIndex)
        if exc.code == junk:
            raise MultipleRoots(
                "more than one top-level element", offset=offset
            ) from exc
        raise MalformedXml(str(exc), offset=offset) from exc

    return ScanResult(text="".join(chunks), root_tag=root_tag[0], elements=elements)


def _error_offset(xml_text: str, byte_index: int) -> int:
    """Character offset (into the raw XML string) of an expat error position."""
    if byte_index <= 0:
        return 0
    prefix = xml_text.encode("utf-8")[:byte_index]
    return len(prefix.decode("utf-8", errors="ignore"))


def parse_annotated(
    xml_text: str | XmlDocument,
    tagset: "TagSet | None" = None,
) -> tuple[str, AnnotationSet]:
    """Inverse of :func:`serialize`: recover (text, annotation set).

    Reserved graph attributes become each span's ``graph_meta`` (using the
    stored ``node_id`` as the span id) rather than user attributes. With a
    tag set given, reserved-attribute capture is limited to declared graph
    tags, and declared defaults are filled in for omitted attributes, so a
    re-imported document behaves as if annotated interactively.
    """
    result = scan(xml_text)

    spans: list[Span] = []
    # node_id attributes claim their ids up front so generated ids for
    # unlabeled spans can never collide with them.
    used_ids = {
        element.attributes["node_id"]
        for element in result.elements
        if "node_id" in element.attributes
    }
    counter = 1
    for element in result.elements:
        if element.start >= element.end:
            raise EmptyRange(
                f"element <{element.tag}> covers no characters",
                tag=element.tag,
                start=element.start,
            )
        user_attrs: dict[str, str] = {}
        reserved: dict[str, str] = {}
        capture_reserved = tagset is None or (
            element.tag in tagset.tags and tagset.tags[element.tag].is_graph
        )
        for name, value in element.attributes.items():
            if name in RESERVED_ATTRIBUTE_NAMES and capture_reserved:
                reserved[name] = value
            else:
                user_attrs[name] = value

        if tagset is not None and element.tag in tagset.tags:
            for name, decl in tagset.tags[element.tag].attributes.items():
                if name not in user_attrs and decl.default is not None:
                    user_attrs[name] = decl.default

        if "node_id" in reserved:
            span_id = reserved["node_id"]
        else:
            while f"s{counter}" in used_ids:
                counter += 1
            span_id = f"s{counter}"
        used_ids.add(span_id)

        meta = None
        if reserved:
            meta = GraphMeta(
                node_id=reserved.get("node_id", span_id),
                ancestors=tuple(reserved.get("ancestors", "").split()),
                descendants=tuple(reserved.get("descendants", "").split()),
            )
        spans.append(
            Span(
                id=span_id,
                tag=element.tag,
                start=element.start,
                end=element.end,
                attributes=user_attrs,
                graph_meta=meta,
            )
        )

    annotation_set = AnnotationSet("", "", len(result.text), tagset)
    annotation_set._adopt(spans)
    return result.text, annotation_set


def strip_graph_meta(span: Span) -> Span:
    return replace(span, graph_meta=None) if span.graph_meta else span
