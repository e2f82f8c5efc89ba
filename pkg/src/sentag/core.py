"""Domain model: documents, users, roles, assignments, spans, and the
annotation workflow state machine.

All character offsets throughout the system index Unicode scalar values of
the document text (``len`` of a Python str), 0-based, half-open.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Mapping

from .errors import (
    DuplicateSpan,
    EmptyRange,
    IllegalTransition,
    OffsetOutOfBounds,
    PartialOverlap,
    UndeclaredAttribute,
    UnknownSpan,
    UnknownTag,
    ValidationRequired,
)

if TYPE_CHECKING:
    from .schema import TagSet

# Attribute names injected into the XML output for graph nodes; never legal
# as user attributes.
RESERVED_ATTRIBUTE_NAMES = frozenset({"node_id", "ancestors", "descendants"})


class Role(Enum):
    ADMIN = "admin"
    EDITOR = "editor"
    ANNOTATOR = "annotator"


# Rights are strictly nested: every action an annotator may take is also
# permitted to editors and admins.
ACTIONS = frozenset({
    "create_user",
    "upload_schema",
    "upload_document",
    "assign",
    "view_agreement",
    "annotate",
    "validate_own",
    "edit_graph",
})

_ANNOTATOR_ACTIONS = frozenset({"annotate", "validate_own", "edit_graph"})
_EDITOR_ACTIONS = ACTIONS - {"create_user"}

_ROLE_ACTIONS: dict[Role, frozenset[str]] = {
    Role.ADMIN: ACTIONS,
    Role.EDITOR: _EDITOR_ACTIONS,
    Role.ANNOTATOR: _ANNOTATOR_ACTIONS,
}


def authorize(role: Role, action: str) -> bool:
    """Pure role/action decision. Ownership scoping (an annotator may only
    touch their own assignments) is enforced by the server layer."""
    if action not in ACTIONS:
        raise ValueError(f"unknown action: {action!r}")
    return action in _ROLE_ACTIONS[role]


@dataclass(frozen=True)
class User:
    id: str
    username: str
    role: Role
    credential_hash: str = ""


@dataclass(frozen=True)
class Document:
    """Immutable source text plus workflow metadata. Rebinding the schema
    produces a new value via ``dataclasses.replace``; the text never changes
    after upload."""

    id: str
    title: str
    text: str
    schema_id: str | None = None
    created_by: str | None = None

    def with_schema(self, schema_id: str) -> Document:
        return replace(self, schema_id=schema_id)


class AssignmentStatus(Enum):
    ASSIGNED = "ASSIGNED"
    IN_PROGRESS = "IN_PROGRESS"
    COMPLETED = "COMPLETED"
    VALIDATED = "VALIDATED"


_ALLOWED_TRANSITIONS = frozenset({
    (AssignmentStatus.ASSIGNED, AssignmentStatus.IN_PROGRESS),
    (AssignmentStatus.IN_PROGRESS, AssignmentStatus.COMPLETED),
    (AssignmentStatus.COMPLETED, AssignmentStatus.VALIDATED),
    # reopening a finished annotation
    (AssignmentStatus.COMPLETED, AssignmentStatus.IN_PROGRESS),
})


@dataclass
class Assignment:
    document_id: str
    annotator_id: str
    status: AssignmentStatus = AssignmentStatus.ASSIGNED
    last_modified: float = field(default_factory=time.time)


def transition(
    assignment: Assignment,
    new_status: AssignmentStatus,
    *,
    validation_passed: bool = False,
) -> Assignment:
    """Advance the workflow state machine in place.

    VALIDATED is reachable only from COMPLETED and only when the current
    spans have a zero-error validation report (``validation_passed``).
    VALIDATED is terminal here; editing the annotation set is the one thing
    that leaves it (see :func:`reset_after_edit`).
    """
    if (assignment.status, new_status) not in _ALLOWED_TRANSITIONS:
        raise IllegalTransition(
            f"cannot move {assignment.status.value} -> {new_status.value}",
            from_status=assignment.status.value,
            to_status=new_status.value,
        )
    if new_status is AssignmentStatus.VALIDATED and not validation_passed:
        raise ValidationRequired(
            "a zero-error validation report for the current spans is required"
        )
    assignment.status = new_status
    assignment.last_modified = time.time()
    return assignment


def reset_after_edit(assignment: Assignment) -> Assignment:
    """Any span mutation puts the assignment (back) into IN_PROGRESS: a
    validated document no longer matches its annotations once edited."""
    assignment.status = AssignmentStatus.IN_PROGRESS
    assignment.last_modified = time.time()
    return assignment


@dataclass(frozen=True)
class GraphMeta:
    """Graph attributes injected into a span's XML element; kept apart from
    user attributes so they never collide with schema-declared ones."""

    node_id: str
    ancestors: tuple[str, ...] = ()
    descendants: tuple[str, ...] = ()


@dataclass(frozen=True)
class Span:
    id: str
    tag: str
    start: int
    end: int
    attributes: dict[str, str] = field(default_factory=dict)
    graph_meta: GraphMeta | None = None

    def covers(self, position: int) -> bool:
        return self.start <= position < self.end

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end


def _ranges_conflict(s1: int, e1: int, s2: int, e2: int) -> bool:
    overlap = max(s1, s2) < min(e1, e2)
    contained = (s1 <= s2 and e2 <= e1) or (s2 <= s1 and e1 <= e2)
    return overlap and not contained


class AnnotationSet:
    """One annotator's spans over one document, in creation order.

    The set enforces well-nestedness (every pair of spans disjoint,
    identical, or strictly contained) so it is always representable as
    inline XML. When constructed with a tag set, tag names and attribute
    keys are checked against it and declared defaults are filled in.
    """

    def __init__(
        self,
        document_id: str,
        annotator_id: str,
        text_length: int,
        tagset: "TagSet | None" = None,
    ):
        self.document_id = document_id
        self.annotator_id = annotator_id
        self.text_length = text_length
        self.tagset = tagset
        self.spans: list[Span] = []
        self._next_id = 1

    def __iter__(self) -> Iterator[Span]:
        return iter(self.spans)

    def __len__(self) -> int:
        return len(self.spans)

    def get(self, span_id: str) -> Span:
        for span in self.spans:
            if span.id == span_id:
                return span
        raise UnknownSpan(f"no span with id {span_id!r}", span_id=span_id)

    def has(self, span_id: str) -> bool:
        return any(span.id == span_id for span in self.spans)

    def _generate_id(self) -> str:
        while True:
            candidate = f"s{self._next_id}"
            self._next_id += 1
            if not self.has(candidate):
                return candidate

    def add_span(
        self,
        tag: str,
        start: int,
        end: int,
        attributes: Mapping[str, str] | None = None,
        *,
        span_id: str | None = None,
    ) -> Span:
        """Add a span, preserving the nesting invariant.

        Optional attributes declared with defaults are filled in when
        omitted. Required attributes may stay empty here; the schema
        validator reports them later so annotators can fix batches.
        """
        if self.tagset is not None and tag not in self.tagset.tags:
            raise UnknownTag(f"tag {tag!r} is not in the schema", tag=tag)
        if start >= end:
            raise EmptyRange(f"empty span [{start}, {end})", start=start, end=end)
        if start < 0 or end > self.text_length:
            raise OffsetOutOfBounds(
                f"span [{start}, {end}) outside text of length {self.text_length}",
                start=start,
                end=end,
                text_length=self.text_length,
            )
        for existing in self.spans:
            if _ranges_conflict(existing.start, existing.end, start, end):
                raise PartialOverlap(
                    f"span [{start}, {end}) partially overlaps "
                    f"{existing.id!r} [{existing.start}, {existing.end})",
                    conflicting_span=existing.id,
                )

        attrs = dict(attributes or {})
        for name in attrs:
            if name in RESERVED_ATTRIBUTE_NAMES:
                raise UndeclaredAttribute(
                    f"attribute name {name!r} is reserved for graph metadata",
                    attribute=name,
                )
        if self.tagset is not None:
            decl = self.tagset.tags[tag]
            for name in attrs:
                if name not in decl.attributes:
                    raise UndeclaredAttribute(
                        f"attribute {name!r} is not declared for tag {tag!r}",
                        tag=tag,
                        attribute=name,
                    )
            for name, attr_decl in decl.attributes.items():
                if name not in attrs and attr_decl.default is not None:
                    attrs[name] = attr_decl.default

        if span_id is None:
            span_id = self._generate_id()
        elif self.has(span_id):
            raise DuplicateSpan(f"span id {span_id!r} already in set", span_id=span_id)

        span = Span(id=span_id, tag=tag, start=start, end=end, attributes=attrs)
        self.spans.append(span)
        return span

    def remove_span(self, span_id: str) -> Span:
        span = self.get(span_id)
        self.spans.remove(span)
        return span

    def in_document_order(self) -> list[Span]:
        """Spans ordered as their elements appear in the XML output:
        by start, outermost first, identical ranges by creation order."""
        indexed = sorted(
            enumerate(self.spans),
            key=lambda pair: (pair[1].start, -pair[1].end, pair[0]),
        )
        return [span for _, span in indexed]

    def _adopt(self, spans: list[Span]) -> None:
        """Install spans verbatim, bypassing per-span validation. Internal:
        used when reconstructing a set from already well-nested XML or when
        enriching spans with graph metadata."""
        self.spans = list(spans)
        self._next_id = len(spans) + 1

    def copy_with_spans(self, spans: list[Span]) -> AnnotationSet:
        clone = AnnotationSet(
            self.document_id, self.annotator_id, self.text_length, self.tagset
        )
        clone._adopt(spans)
        return clone
