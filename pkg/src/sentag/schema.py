"""Schema handling: parse an uploaded XML schema into an enforceable tag
vocabulary and validate annotated documents against it.

Only a small, predictable slice of XSD is supported — exactly what tag/
attribute validation needs:

* ``xs:element`` with an optional inline ``xs:complexType``
* ``xs:attribute`` with ``name``, optional ``use="required"``, optional
  ``default``
* ``xs:simpleType`` / ``xs:restriction`` / ``xs:enumeration`` for attribute
  value sets

Anything else fails loudly with the offending construct named, rather than
being silently ignored. An attribute declaration named exactly ``GRAPH``
marks the tag as a graph-node tag and is consumed as a flag, not recorded
as a user attribute.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace

from . import xmlio
from .core import RESERVED_ATTRIBUTE_NAMES, AnnotationSet
from .errors import (
    DuplicateTag,
    MalformedSchema,
    MalformedXml,
    MultipleRoots,
    UnsupportedConstruct,
)

XSD_NAMESPACE = "http://www.w3.org/2001/XMLSchema"

GRAPH_MARKER = "GRAPH"

# Validation report entry codes.
CODE_MALFORMED_XML = "MalformedXml"
CODE_UNKNOWN_TAG = "UnknownTag"
CODE_MISSING_REQUIRED_ATTRIBUTE = "MissingRequiredAttribute"
CODE_UNDECLARED_ATTRIBUTE = "UndeclaredAttribute"
CODE_ENUMERATION_VIOLATION = "EnumerationViolation"
CODE_DISALLOWED_ROOT = "DisallowedRoot"

_STRING_TYPES = {"xs:string", "xsd:string", "string"}


@dataclass(frozen=True)
class AttrDecl:
    name: str
    required: bool = False
    enumeration: frozenset[str] | None = None
    default: str | None = None


@dataclass(frozen=True)
class TagDecl:
    name: str
    attributes: dict[str, AttrDecl] = field(default_factory=dict)
    is_graph: bool = False
    color_index: int = 0


@dataclass(frozen=True)
class TagSet:
    """Tag vocabulary extracted from a schema. ``root_allowed`` restricts
    which tags may appear at the top level of the annotated body; empty
    means any declared tag."""

    schema_id: str = ""
    tags: dict[str, TagDecl] = field(default_factory=dict)
    root_allowed: frozenset[str] = frozenset()

    def with_id(self, schema_id: str) -> TagSet:
        return replace(self, schema_id=schema_id)


@dataclass(frozen=True)
class ReportEntry:
    code: str
    message: str
    location: str | int


@dataclass
class ValidationReport:
    errors: list[ReportEntry] = field(default_factory=list)
    document_id: str = ""
    annotator_id: str = ""

    @property
    def passed(self) -> bool:
        return not self.errors

    def to_payload(self) -> dict:
        return {
            "document_id": self.document_id,
            "annotator_id": self.annotator_id,
            "passed": self.passed,
            "errors": [
                {"code": e.code, "message": e.message, "location": e.location}
                for e in self.errors
            ],
        }


def _local_name(tag: str) -> str:
    """Strip a ``{namespace}`` prefix, insisting on the XSD namespace."""
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        if uri != XSD_NAMESPACE:
            raise UnsupportedConstruct(
                f"element from foreign namespace {uri!r}", construct=tag
            )
        return local
    return tag


def _check_xml_name(name: str, what: str) -> None:
    """A name is usable iff it can appear as a tag in the output XML; the
    same parser that validates documents is the arbiter."""
    try:
        ET.fromstring(f"<{name}/>")
    except ET.ParseError:
        raise MalformedSchema(f"{what} {name!r} is not a valid XML name", name=name)


def parse_schema(schema_text: str, schema_id: str = "") -> TagSet:
    """Parse schema text into a :class:`TagSet`.

    Deterministic: identical text yields an identical tag set, including
    ``color_index`` assignment (lexicographic rank of the tag name).
    """
    try:
        root = ET.fromstring(schema_text)
    except ET.ParseError as exc:
        raise MalformedSchema(f"schema is not well-formed XML: {exc}") from exc

    if _local_name(root.tag) != "schema":
        raise UnsupportedConstruct(
            f"root element <{root.tag}> (expected a schema element)",
            construct=root.tag,
        )

    tags: dict[str, TagDecl] = {}
    for child in root:
        local = _local_name(child.tag)
        if local != "element":
            raise UnsupportedConstruct(
                f"top-level <{local}> is not supported", construct=local
            )
        decl = _parse_element(child)
        if decl.name in tags:
            raise DuplicateTag(
                f"tag {decl.name!r} declared more than once", tag=decl.name
            )
        tags[decl.name] = decl

    rank = {name: i for i, name in enumerate(sorted(tags))}
    tags = {name: replace(decl, color_index=rank[name]) for name, decl in tags.items()}
    return TagSet(schema_id=schema_id, tags=tags)


def _parse_element(node: ET.Element) -> TagDecl:
    name = node.get("name")
    if not name:
        raise UnsupportedConstruct(
            "element declaration without a name (ref is not supported)",
            construct="element",
        )
    for key in node.attrib:
        if key not in ("name",):
            raise UnsupportedConstruct(
                f"element attribute {key!r} is not supported", construct=key
            )
    _check_xml_name(name, "tag name")

    attributes: dict[str, AttrDecl] = {}
    is_graph = False
    for child in node:
        local = _local_name(child.tag)
        if local != "complexType":
            raise UnsupportedConstruct(
                f"<{local}> inside an element declaration is not supported",
                construct=local,
            )
        for attr_node in child:
            attr_local = _local_name(attr_node.tag)
            if attr_local != "attribute":
                raise UnsupportedConstruct(
                    f"<{attr_local}> inside a complexType is not supported",
                    construct=attr_local,
                )
            decl = _parse_attribute(attr_node)
            if decl is None:
                is_graph = True
                continue
            if decl.name in attributes:
                raise MalformedSchema(
                    f"attribute {decl.name!r} declared twice on tag {name!r}",
                    tag=name,
                    attribute=decl.name,
                )
            attributes[decl.name] = decl

    return TagDecl(name=name, attributes=attributes, is_graph=is_graph)


def _parse_attribute(node: ET.Element) -> AttrDecl | None:
    """Returns None for the GRAPH marker, an AttrDecl otherwise."""
    name = node.get("name")
    if not name:
        raise UnsupportedConstruct(
            "attribute declaration without a name", construct="attribute"
        )
    if name == GRAPH_MARKER:
        return None

    _check_xml_name(name, "attribute name")
    if name in RESERVED_ATTRIBUTE_NAMES:
        raise UnsupportedConstruct(
            f"attribute name {name!r} is reserved for graph metadata",
            construct=name,
        )

    use = node.get("use")
    if use not in (None, "optional", "required"):
        raise UnsupportedConstruct(f"use={use!r}", construct=f"use={use}")
    declared_type = node.get("type")
    if declared_type is not None and declared_type not in _STRING_TYPES:
        raise UnsupportedConstruct(
            f"attribute type {declared_type!r}", construct=declared_type
        )
    for key in node.attrib:
        if key not in ("name", "use", "default", "type"):
            raise UnsupportedConstruct(
                f"attribute property {key!r} is not supported", construct=key
            )

    enumeration = None
    for child in node:
        local = _local_name(child.tag)
        if local != "simpleType":
            raise UnsupportedConstruct(
                f"<{local}> inside an attribute declaration is not supported",
                construct=local,
            )
        enumeration = _parse_enumeration(child, name)

    default = node.get("default")
    if default is not None and enumeration is not None and default not in enumeration:
        raise MalformedSchema(
            f"default {default!r} for attribute {name!r} is outside its enumeration",
            attribute=name,
            default=default,
        )

    return AttrDecl(
        name=name,
        required=use == "required",
        enumeration=enumeration,
        default=default,
    )


def _parse_enumeration(node: ET.Element, attr_name: str) -> frozenset[str]:
    values: set[str] = set()
    for child in node:
        local = _local_name(child.tag)
        if local != "restriction":
            raise UnsupportedConstruct(
                f"<{local}> inside a simpleType is not supported", construct=local
            )
        for facet in child:
            facet_local = _local_name(facet.tag)
            if facet_local != "enumeration":
                raise UnsupportedConstruct(
                    f"restriction facet <{facet_local}> is not supported",
                    construct=facet_local,
                )
            value = facet.get("value")
            if value is None:
                raise MalformedSchema(
                    f"enumeration without a value on attribute {attr_name!r}",
                    attribute=attr_name,
                )
            values.add(value)
    if not values:
        raise MalformedSchema(
            f"empty enumeration on attribute {attr_name!r}", attribute=attr_name
        )
    return frozenset(values)


def validate(xml_text: str, tagset: TagSet) -> ValidationReport:
    """Check a serialized annotated document against the tag set.

    Never raises: every problem — including the input not being XML at
    all — becomes a report entry, in document order. The root element is
    the document wrapper and is itself exempt from tag checks; its direct
    children are the "top level" that ``root_allowed`` constrains.
    """
    report = ValidationReport()
    try:
        result = xmlio.scan(xml_text)
    except (MalformedXml, MultipleRoots) as exc:
        report.errors.append(
            ReportEntry(
                code=CODE_MALFORMED_XML,
                message=exc.message,
                location=exc.details.get("offset", 0),
            )
        )
        return report

    for element in result.elements:
        _check_element(
            report,
            tagset,
            tag=element.tag,
            attributes=element.attributes,
            location=element.start,
            top_level=element.top_level,
        )
    return report


def validate_spans(annotation_set: AnnotationSet, tagset: TagSet) -> ValidationReport:
    """Pre-serialization twin of :func:`validate`, reporting locations as
    span ids so the UI can anchor errors to the offending span."""
    report = ValidationReport(
        document_id=annotation_set.document_id,
        annotator_id=annotation_set.annotator_id,
    )
    ordered = annotation_set.in_document_order()
    # Same stack walk the serializer uses, so "top level" means exactly
    # "direct child of the wrapper" in the produced XML (identical ranges
    # nest by creation order).
    top_level_ids: set[str] = set()
    stack: list = []
    for span in ordered:
        while stack and stack[-1].end <= span.start:
            stack.pop()
        if not stack:
            top_level_ids.add(span.id)
        stack.append(span)
    for span in ordered:
        _check_element(
            report,
            tagset,
            tag=span.tag,
            attributes=span.attributes,
            location=span.id,
            top_level=span.id in top_level_ids,
        )
    return report


def _check_element(
    report: ValidationReport,
    tagset: TagSet,
    *,
    tag: str,
    attributes: dict[str, str],
    location: str | int,
    top_level: bool,
) -> None:
    decl = tagset.tags.get(tag)
    if decl is None:
        report.errors.append(
            ReportEntry(
                code=CODE_UNKNOWN_TAG,
                message=f"unknown tag <{tag}>",
                location=location,
            )
        )
        return  # attribute checks would only cascade noise

    if top_level and tagset.root_allowed and tag not in tagset.root_allowed:
        report.errors.append(
            ReportEntry(
                code=CODE_DISALLOWED_ROOT,
                message=f"tag <{tag}> is not allowed at the top level",
                location=location,
            )
        )

    for name, value in attributes.items():
        if name in RESERVED_ATTRIBUTE_NAMES and decl.is_graph:
            continue  # injected graph metadata, not a user attribute
        attr_decl = decl.attributes.get(name)
        if attr_decl is None:
            report.errors.append(
                ReportEntry(
                    code=CODE_UNDECLARED_ATTRIBUTE,
                    message=f"attribute {name!r} is not declared for <{tag}>",
                    location=location,
                )
            )
            continue
        if attr_decl.enumeration is not None and value not in attr_decl.enumeration:
            allowed = ", ".join(sorted(attr_decl.enumeration))
            report.errors.append(
                ReportEntry(
                    code=CODE_ENUMERATION_VIOLATION,
                    message=(
                        f"value {value!r} of attribute {name!r} on <{tag}> "
                        f"is not one of: {allowed}"
                    ),
                    location=location,
                )
            )

    for name, attr_decl in decl.attributes.items():
        if attr_decl.required and name not in attributes:
            report.errors.append(
                ReportEntry(
                    code=CODE_MISSING_REQUIRED_ATTRIBUTE,
                    message=f"required attribute {name!r} missing on <{tag}>",
                    location=location,
                )
            )
