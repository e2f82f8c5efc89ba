"""Domain error hierarchy.

Every error carries a stable machine-readable ``code`` (the class name) plus
optional structured ``details``; the HTTP layer maps these directly onto the
JSON error envelope.
"""

from __future__ import annotations

from typing import Any


class SenTagError(Exception):
    """Base class for all domain errors."""

    code = "Error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.code = cls.__name__


# --- span / annotation-set errors ---

class UnknownTag(SenTagError):
    """Tag name is not declared in the document's tag set."""


class EmptyRange(SenTagError):
    """Span covers zero characters (start >= end)."""


class PartialOverlap(SenTagError):
    """Span crosses an existing span's boundary; not representable inline."""


class OffsetOutOfBounds(SenTagError):
    """Span offsets fall outside the document text."""


class UndeclaredAttribute(SenTagError):
    """Attribute name not declared for the tag (or reserved)."""


class UnknownSpan(SenTagError):
    """No span with the given id in the set."""


class DuplicateSpan(SenTagError):
    """Span id already present in the set."""


# --- workflow errors ---

class IllegalTransition(SenTagError):
    """Assignment status change not permitted by the workflow."""


class ValidationRequired(SenTagError):
    """VALIDATED requires a zero-error validation report for the current spans."""


# --- schema errors ---

class MalformedSchema(SenTagError):
    """Schema text failed to parse or is semantically unusable."""


class UnsupportedConstruct(SenTagError):
    """Schema uses a feature outside the supported subset; names the construct."""


class DuplicateTag(SenTagError):
    """Two element declarations share a tag name."""


# --- xml i/o errors ---

class InvalidNesting(SenTagError):
    """Span set violates containment; unreachable through the public API."""


class DanglingGraphNode(SenTagError):
    """Graph references a node id with no corresponding span."""


class MalformedXml(SenTagError):
    """Input is not well-formed XML."""


class MultipleRoots(SenTagError):
    """Input has more than one top-level element."""


# --- argument-graph errors ---

class UnknownNode(SenTagError):
    """Node id is not in the graph."""


class SelfLoop(SenTagError):
    """Edge endpoints are the same node."""


class DuplicateEdge(SenTagError):
    """Edge already present."""


class CycleDetected(SenTagError):
    """Edge insertion would create a cycle; details carry the node sequence."""

    def __init__(self, message: str, cycle: list[str], **details: Any):
        super().__init__(message, cycle=cycle, **details)
        self.cycle = cycle


class UnknownEdge(SenTagError):
    """Edge not present in the graph."""


# --- agreement errors ---

class InsufficientData(SenTagError):
    """Fewer than two pairable values across the whole document."""
