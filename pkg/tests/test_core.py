from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentag.core import (
    ACTIONS,
    AnnotationSet,
    Assignment,
    AssignmentStatus,
    Role,
    authorize,
    reset_after_edit,
    transition,
)
from sentag.errors import (
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

from oracles import well_nested


def make_set(length=11, tagset=None):
    return AnnotationSet("d1", "a1", length, tagset)


class TestAddSpan:
    def test_first_span_on_empty_set(self):
        s = make_set()  # "hello world"
        span = s.add_span("claim", 0, 5)
        assert (span.start, span.end) == (0, 5)
        assert len(s) == 1

    def test_nested_span_accepted(self):
        s = make_set()
        s.add_span("claim", 2, 8)
        s.add_span("premise", 4, 6)
        assert len(s) == 2

    def test_partial_overlap_rejected_names_conflict(self):
        s = make_set(12)
        outer = s.add_span("claim", 2, 8)
        with pytest.raises(PartialOverlap) as exc:
            s.add_span("premise", 5, 12)
        assert exc.value.details["conflicting_span"] == outer.id
        assert len(s) == 1

    def test_identical_ranges_allowed(self):
        s = make_set()
        s.add_span("claim", 1, 4)
        s.add_span("premise", 1, 4)
        assert len(s) == 2

    def test_empty_range(self):
        s = make_set()
        with pytest.raises(EmptyRange):
            s.add_span("claim", 3, 3)
        with pytest.raises(EmptyRange):
            s.add_span("claim", 5, 2)

    def test_out_of_bounds(self):
        s = make_set(5)
        with pytest.raises(OffsetOutOfBounds):
            s.add_span("claim", 0, 6)
        with pytest.raises(OffsetOutOfBounds):
            s.add_span("claim", -1, 3)

    def test_unknown_tag_with_tagset(self, basic_tagset):
        s = make_set(tagset=basic_tagset)
        with pytest.raises(UnknownTag):
            s.add_span("clam", 0, 3)

    def test_undeclared_attribute(self, basic_tagset):
        s = make_set(tagset=basic_tagset)
        with pytest.raises(UndeclaredAttribute):
            s.add_span("claim", 0, 3, {"id": "1", "bogus": "x"})

    def test_reserved_attribute_names_rejected(self):
        s = make_set()
        with pytest.raises(UndeclaredAttribute):
            s.add_span("claim", 0, 3, {"node_id": "n1"})

    def test_defaults_filled_for_omitted_optionals(self, basic_tagset):
        s = make_set(tagset=basic_tagset)
        span = s.add_span("premise", 0, 3)
        assert span.attributes == {"stance": "pro"}

    def test_explicit_value_not_overridden_by_default(self, basic_tagset):
        s = make_set(tagset=basic_tagset)
        span = s.add_span("premise", 0, 3, {"stance": "con"})
        assert span.attributes == {"stance": "con"}

    def test_duplicate_span_id(self):
        s = make_set()
        s.add_span("claim", 0, 2, span_id="x")
        with pytest.raises(DuplicateSpan):
            s.add_span("claim", 4, 6, span_id="x")


class TestRemoveSpan:
    def test_remove_only_span(self):
        s = make_set()
        span = s.add_span("claim", 0, 5)
        s.remove_span(span.id)
        assert len(s) == 0

    def test_remove_inner_keeps_outer(self):
        s = make_set()
        outer = s.add_span("claim", 0, 8)
        inner = s.add_span("premise", 2, 4)
        s.remove_span(inner.id)
        assert [sp.id for sp in s] == [outer.id]

    def test_remove_unknown(self):
        s = make_set()
        with pytest.raises(UnknownSpan):
            s.remove_span("nope")

    def test_remove_then_readd_restores_set(self):
        s = make_set()
        s.add_span("claim", 0, 8)
        span = s.add_span("premise", 2, 4, {"k": "v"})
        before = [(sp.id, sp.tag, sp.start, sp.end, sp.attributes) for sp in s]
        s.remove_span(span.id)
        s.add_span(span.tag, span.start, span.end, span.attributes, span_id=span.id)
        after = [(sp.id, sp.tag, sp.start, sp.end, sp.attributes) for sp in s]
        assert sorted(before) == sorted(after)


class TestTransition:
    def test_happy_path(self):
        a = Assignment("d1", "a1")
        transition(a, AssignmentStatus.IN_PROGRESS)
        transition(a, AssignmentStatus.COMPLETED)
        transition(a, AssignmentStatus.VALIDATED, validation_passed=True)
        assert a.status is AssignmentStatus.VALIDATED

    def test_cannot_skip_completed(self):
        a = Assignment("d1", "a1", AssignmentStatus.IN_PROGRESS)
        with pytest.raises(IllegalTransition):
            transition(a, AssignmentStatus.VALIDATED, validation_passed=True)

    def test_validated_requires_clean_report(self):
        a = Assignment("d1", "a1", AssignmentStatus.COMPLETED)
        with pytest.raises(ValidationRequired):
            transition(a, AssignmentStatus.VALIDATED)
        assert a.status is AssignmentStatus.COMPLETED

    def test_reopen_completed(self):
        a = Assignment("d1", "a1", AssignmentStatus.COMPLETED)
        transition(a, AssignmentStatus.IN_PROGRESS)
        assert a.status is AssignmentStatus.IN_PROGRESS

    def test_validated_is_terminal_for_transition(self):
        a = Assignment("d1", "a1", AssignmentStatus.VALIDATED)
        for target in AssignmentStatus:
            with pytest.raises(IllegalTransition):
                transition(a, target, validation_passed=True)

    def test_edit_resets_validated_to_in_progress(self):
        a = Assignment("d1", "a1", AssignmentStatus.VALIDATED)
        reset_after_edit(a)
        assert a.status is AssignmentStatus.IN_PROGRESS


class TestAuthorize:
    EXPECTED = {
        Role.ADMIN: ACTIONS,
        Role.EDITOR: ACTIONS - {"create_user"},
        Role.ANNOTATOR: {"annotate", "validate_own", "edit_graph"},
    }

    @pytest.mark.parametrize("role", list(Role))
    @pytest.mark.parametrize("action", sorted(ACTIONS))
    def test_full_table(self, role, action):
        assert authorize(role, action) == (action in self.EXPECTED[role])

    def test_spec_examples(self):
        assert not authorize(Role.ANNOTATOR, "upload_schema")
        assert authorize(Role.ADMIN, "create_user")
        assert authorize(Role.EDITOR, "annotate")

    def test_monotone_in_role_rank(self):
        ranked = [Role.ANNOTATOR, Role.EDITOR, Role.ADMIN]
        for action in ACTIONS:
            for lower, higher in zip(ranked, ranked[1:]):
                if authorize(lower, action):
                    assert authorize(higher, action)

    def test_unknown_action_rejected(self):
        with pytest.raises(ValueError):
            authorize(Role.ADMIN, "reboot")


@settings(max_examples=200, deadline=None)
@given(
    ops=st.lists(
        st.tuples(st.integers(0, 20), st.integers(0, 20)),
        max_size=30,
    )
)
def test_nesting_invariant_under_random_inserts(ops):
    """Every accepted state is well-nested by the exhaustive pair oracle."""
    s = AnnotationSet("d", "a", 20)
    for start, end in ops:
        try:
            s.add_span("t", start, end)
        except (PartialOverlap, EmptyRange, OffsetOutOfBounds):
            pass
        assert well_nested([(sp.start, sp.end) for sp in s])


@settings(max_examples=100, deadline=None)
@given(
    ops=st.lists(
        st.tuples(st.integers(0, 12), st.integers(0, 12), st.booleans()),
        max_size=25,
    )
)
def test_nesting_invariant_under_random_removals(ops):
    s = AnnotationSet("d", "a", 12)
    for start, end, remove_one in ops:
        if remove_one and len(s):
            s.remove_span(s.spans[start % len(s)].id)
        else:
            try:
                s.add_span("t", start, end)
            except (PartialOverlap, EmptyRange, OffsetOutOfBounds):
                pass
        assert well_nested([(sp.start, sp.end) for sp in s])
