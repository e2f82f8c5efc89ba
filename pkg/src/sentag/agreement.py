"""Inter-annotator agreement: chance-corrected nominal-metric coefficient
over per-character tag labels.

Unitization: each character position of the document is one unit, labeled
with the innermost covering span's tag. Untagged text is the codable
category :data:`UNTAGGED` (an annotator who finished the document has judged
that text to carry no tag); a genuinely absent judgment is ``None`` and is
excluded from pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Hashable, Sequence

from .core import Assignment, AssignmentStatus, AnnotationSet
from .errors import InsufficientData

if TYPE_CHECKING:
    from .schema import ValidationReport

Category = Hashable


class _Untagged:
    """Distinguished category for text no span covers. A class instance so
    it can never collide with a tag name."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return "UNTAGGED"


UNTAGGED = _Untagged()

UNDEFINED = "undefined"
INSUFFICIENT = "insufficient"


@dataclass(frozen=True)
class LabelMatrix:
    """annotators x units grid of categories; ``None`` marks a missing value."""

    rows: tuple[tuple[Category | None, ...], ...]

    def __post_init__(self):
        lengths = {len(row) for row in self.rows}
        if len(lengths) > 1:
            raise ValueError("label matrix rows have differing lengths")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Category | None]]) -> LabelMatrix:
        return cls(tuple(tuple(row) for row in rows))

    @property
    def annotators(self) -> int:
        return len(self.rows)

    @property
    def units(self) -> int:
        return len(self.rows[0]) if self.rows else 0


@dataclass(frozen=True)
class CoincidenceMatrix:
    """Symmetric label-coincidence counts. ``o[(c, k)]`` is how often the
    pair (c, k) co-occurs within a unit, each unit's ordered pairs weighted
    by 1/(m_u - 1); ``n_c`` are the per-category marginals and ``n`` the
    total number of pairable values."""

    o: dict[tuple[Category, Category], float]
    n_c: dict[Category, int]
    n: int

    def categories(self) -> list[Category]:
        return list(self.n_c)


def labels_from_spans(doc_length: int, annotation_set: AnnotationSet) -> list:
    """One label per character position: the innermost covering span's tag,
    or UNTAGGED. For nested spans the smaller range wins; for identical
    ranges the later-created (inner) span wins."""
    row: list[Category] = [UNTAGGED] * doc_length
    by_size = sorted(
        enumerate(annotation_set.spans),
        key=lambda pair: (-(pair[1].end - pair[1].start), pair[0]),
    )
    for _, span in by_size:
        for position in range(span.start, span.end):
            row[position] = span.tag
    return row


def coincidences(matrix: LabelMatrix) -> CoincidenceMatrix:
    """Tally the coincidence matrix. Units with fewer than two non-missing
    values contribute nothing."""
    o: dict[tuple[Category, Category], float] = {}
    n_c: dict[Category, int] = {}
    n = 0
    for u in range(matrix.units):
        values = [row[u] for row in matrix.rows if row[u] is not None]
        m_u = len(values)
        if m_u < 2:
            continue
        n += m_u
        weight = 1.0 / (m_u - 1)
        for i, c in enumerate(values):
            n_c[c] = n_c.get(c, 0) + 1
            for j, k in enumerate(values):
                if i != j:
                    o[(c, k)] = o.get((c, k), 0.0) + weight
    return CoincidenceMatrix(o=o, n_c=n_c, n=n)


def alpha_nominal(cm: CoincidenceMatrix) -> float | str:
    """Chance-corrected agreement, 1 - D_o/D_e, with the nominal metric
    (any category mismatch counts as full disagreement).

    Returns UNDEFINED when expected disagreement is zero (every value in a
    single category); raises InsufficientData when fewer than two pairable
    values exist at all. Algebraically rearranged so that perfect agreement
    is exactly 1.0 with no rounding residue.
    """
    if cm.n < 2:
        raise InsufficientData(
            f"need at least 2 pairable values, have {cm.n}", n=cm.n
        )
    expected_pairs = 0
    for c, count_c in cm.n_c.items():
        for k, count_k in cm.n_c.items():
            if c != k:
                expected_pairs += count_c * count_k
    if expected_pairs == 0:
        return UNDEFINED
    observed_off_diagonal = math.fsum(
        value for (c, k), value in cm.o.items() if c != k
    )
    return 1.0 - observed_off_diagonal * (cm.n - 1) / expected_pairs


@dataclass(frozen=True)
class AnnotatorStanding:
    annotator_id: str
    completed: bool
    validated: bool
    report_passed: bool | None = None


@dataclass
class AgreementReport:
    document_id: str
    alpha: float | str  # a number, or UNDEFINED / INSUFFICIENT
    per_annotator: list[AnnotatorStanding] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "document_id": self.document_id,
            "alpha": self.alpha,
            "per_annotator": [
                {
                    "annotator_id": s.annotator_id,
                    "completed": s.completed,
                    "validated": s.validated,
                    "report_passed": s.report_passed,
                }
                for s in self.per_annotator
            ],
        }


def document_agreement(
    document_id: str,
    text_length: int,
    work: Sequence[tuple[Assignment, AnnotationSet | None, "ValidationReport | None"]],
) -> AgreementReport:
    """Agreement over the annotators who finished the document.

    Only assignments in COMPLETED or VALIDATED enter the label matrix;
    fewer than two of those yields INSUFFICIENT. Every assignment appears
    in ``per_annotator`` regardless, with its status and latest validation
    outcome."""
    standings: list[AnnotatorStanding] = []
    rows: list[list[Category]] = []
    for assignment, annotation_set, report in work:
        completed = assignment.status in (
            AssignmentStatus.COMPLETED,
            AssignmentStatus.VALIDATED,
        )
        standings.append(
            AnnotatorStanding(
                annotator_id=assignment.annotator_id,
                completed=completed,
                validated=assignment.status is AssignmentStatus.VALIDATED,
                report_passed=None if report is None else report.passed,
            )
        )
        if completed:
            spans = annotation_set or AnnotationSet(
                assignment.document_id, assignment.annotator_id, text_length
            )
            rows.append(labels_from_spans(text_length, spans))

    if len(rows) < 2:
        return AgreementReport(
            document_id=document_id, alpha=INSUFFICIENT, per_annotator=standings
        )
    try:
        alpha = alpha_nominal(coincidences(LabelMatrix.from_rows(rows)))
    except InsufficientData:
        alpha = INSUFFICIENT
    return AgreementReport(
        document_id=document_id, alpha=alpha, per_annotator=standings
    )
