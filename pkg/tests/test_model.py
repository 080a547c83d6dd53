"""Core model: construction operations, invariants, structural queries."""

import random

import pytest

from eacase import model
from eacase.model import (
    AlreadyClosed,
    AudienceTier,
    BraceInSlot,
    Challenge,
    ChallengeState,
    CycleIntroduced,
    DanglingEndpoint,
    DanglingTarget,
    DuplicateId,
    Element,
    ElementKind,
    EmptySlot,
    GoalSlots,
    IncompatibleKinds,
    InvalidId,
    KindInvariantViolation,
    Link,
    LinkKind,
    MissingNote,
    NotFound,
    PhaseTag,
    Qualifier,
    QualifierLabel,
    Scope,
)
from eacase.stages import LifecycleStage

from gencases import random_case


def goal(element_id="G1", system="tool", context="clinic", value="equity"):
    slots = GoalSlots(system=system, context=context, goal=value)
    return Element(
        id=element_id,
        kind=ElementKind.GOAL,
        text=model.render_goal_text(slots),
        slots=slots,
    )


def claim(element_id="C1", stage=None):
    return Element(
        id=element_id,
        kind=ElementKind.PROPERTY_CLAIM,
        text="A property holds.",
        scope=Scope.SYSTEM,
        stage=stage,
    )


def simple(element_id, kind, text="Some text."):
    locator = "files/x.pdf" if kind == ElementKind.EVIDENCE else None
    return Element(id=element_id, kind=kind, text=text, locator=locator)


def base_case():
    case = model.new_case("c1", "A case", PhaseTag.PRELIMINARY)
    case = model.add_element(case, goal())
    case = model.add_element(case, claim())
    return model.add_link(case, Link("s1", LinkKind.SUPPORTS, "C1", "G1"))


class TestNewCase:
    def test_stamps_timestamps(self):
        case = model.new_case("c1", "Title", PhaseTag.INTERIM)
        assert case.id == "c1"
        assert case.phase is PhaseTag.INTERIM
        assert case.created is not None and case.created == case.modified

    def test_rejects_bad_id(self):
        with pytest.raises(InvalidId):
            model.new_case("1bad", "Title", PhaseTag.PRELIMINARY)

    def test_rejects_empty_title(self):
        with pytest.raises(KindInvariantViolation):
            model.new_case("c1", "   ", PhaseTag.PRELIMINARY)


class TestGoalTemplate:
    def test_template_round_trip(self):
        text, slots = model.goal_from_template("tool", "clinic", "equity")
        assert slots == GoalSlots("tool", "clinic", "equity")
        assert model.extract_goal_slots(text) == slots

    def test_rendered_text_keeps_braces(self):
        text, _ = model.goal_from_template("tool", "clinic", "equity")
        assert "{tool}" in text and "{clinic}" in text and "{equity}" in text

    def test_extract_rejects_free_text(self):
        assert model.extract_goal_slots("The tool is fair.") is None

    def test_empty_slot_rejected(self):
        with pytest.raises(EmptySlot):
            model.goal_from_template("tool", " ", "equity")

    def test_brace_in_slot_rejected(self):
        with pytest.raises(BraceInSlot):
            model.goal_from_template("tool", "cli{nic", "equity")


class TestAddElement:
    def test_add_and_query(self):
        case = model.add_element(model.new_case("c1", "T", PhaseTag.PRELIMINARY), goal())
        assert case.element("G1").kind is ElementKind.GOAL
        with pytest.raises(NotFound):
            case.element("nope")

    def test_duplicate_id(self):
        case = model.add_element(model.new_case("c1", "T", PhaseTag.PRELIMINARY), goal())
        with pytest.raises(DuplicateId):
            model.add_element(case, goal())

    def test_invalid_id(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(InvalidId):
            model.add_element(case, simple("no spaces", ElementKind.WARRANT))

    def test_goal_requires_slots(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        bare = Element(id="G1", kind=ElementKind.GOAL, text="Fair.")
        with pytest.raises(KindInvariantViolation):
            model.add_element(case, bare)

    def test_goal_text_must_match_slots(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        slots = GoalSlots("tool", "clinic", "equity")
        mismatched = Element(id="G1", kind=ElementKind.GOAL, text="Other.", slots=slots)
        with pytest.raises(KindInvariantViolation):
            model.add_element(case, mismatched)

    def test_scope_only_on_property_claims(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(
                case,
                Element(id="W1", kind=ElementKind.WARRANT, text="W.", scope=Scope.SYSTEM),
            )

    def test_stage_only_on_property_claims(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(
                case,
                Element(
                    id="W1",
                    kind=ElementKind.WARRANT,
                    text="W.",
                    stage=LifecycleStage.DATA_ANALYSIS,
                ),
            )

    def test_property_claim_needs_scope(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(
                case, Element(id="C1", kind=ElementKind.PROPERTY_CLAIM, text="C.")
            )

    def test_evidence_needs_locator(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(case, Element(id="E1", kind=ElementKind.EVIDENCE, text="E."))

    def test_locator_only_on_evidence(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(
                case,
                Element(id="W1", kind=ElementKind.WARRANT, text="W.", locator="x.pdf"),
            )

    def test_empty_text_rejected(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        with pytest.raises(KindInvariantViolation):
            model.add_element(case, simple("W1", ElementKind.WARRANT, text="  "))

    def test_original_case_unchanged(self):
        before = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        model.add_element(before, goal())
        assert before.elements == {}


class TestAddLink:
    def test_supports_claim_to_goal(self):
        case = base_case()
        assert case.link("s1").kind is LinkKind.SUPPORTS

    def test_dangling_source(self):
        case = model.add_element(model.new_case("c1", "T", PhaseTag.PRELIMINARY), goal())
        with pytest.raises(DanglingEndpoint):
            model.add_link(case, Link("s1", LinkKind.SUPPORTS, "C9", "G1"))

    def test_dangling_target(self):
        case = model.add_element(model.new_case("c1", "T", PhaseTag.PRELIMINARY), claim())
        with pytest.raises(DanglingEndpoint):
            model.add_link(case, Link("s1", LinkKind.SUPPORTS, "C1", "G9"))

    def test_evidence_cannot_support_goal(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        case = model.add_element(case, goal())
        case = model.add_element(case, simple("E1", ElementKind.EVIDENCE))
        with pytest.raises(IncompatibleKinds):
            model.add_link(case, Link("s1", LinkKind.SUPPORTS, "E1", "G1"))

    def test_context_of_allows_goal_and_claim_targets(self):
        case = base_case()
        case = model.add_element(case, simple("CTX1", ElementKind.CONTEXT))
        case = model.add_link(case, Link("x1", LinkKind.CONTEXT_OF, "CTX1", "G1"))
        case = model.add_link(case, Link("x2", LinkKind.CONTEXT_OF, "CTX1", "C1"))
        assert len(case.links) == 3

    def test_assumption_may_evidence(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        case = model.add_element(case, simple("EC1", ElementKind.EVIDENTIAL_CLAIM))
        case = model.add_element(case, simple("A1", ElementKind.ASSUMPTION))
        case = model.add_link(case, Link("e1", LinkKind.EVIDENCES, "A1", "EC1"))
        assert case.links_into("EC1", LinkKind.EVIDENCES)[0].source == "A1"

    def test_evidences_target_must_be_evidential_claim(self):
        case = base_case()
        case = model.add_element(case, simple("E1", ElementKind.EVIDENCE))
        with pytest.raises(IncompatibleKinds):
            model.add_link(case, Link("e1", LinkKind.EVIDENCES, "E1", "C1"))

    def test_qualifier_only_on_supports(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        case = model.add_element(case, goal())
        case = model.add_element(case, simple("CTX1", ElementKind.CONTEXT))
        qualified = Link(
            "x1", LinkKind.CONTEXT_OF, "CTX1", "G1", qualifier=Qualifier(QualifierLabel.LIKELY)
        )
        with pytest.raises(KindInvariantViolation):
            model.add_link(case, qualified)

    def test_warrants_targets_a_supports_link(self):
        case = base_case()
        case = model.add_element(case, simple("EC1", ElementKind.EVIDENTIAL_CLAIM))
        case = model.add_link(case, Link("t1", LinkKind.SUPPORTS, "EC1", "C1"))
        case = model.add_element(case, simple("W1", ElementKind.WARRANT))
        case = model.add_link(case, Link("w1", LinkKind.WARRANTS, "W1", "t1"))
        assert case.warrants_for("t1")[0].source == "W1"

    def test_warrants_source_must_be_warrant(self):
        case = base_case()
        case = model.add_element(case, simple("EC1", ElementKind.EVIDENTIAL_CLAIM))
        case = model.add_link(case, Link("t1", LinkKind.SUPPORTS, "EC1", "C1"))
        case = model.add_element(case, simple("CTX1", ElementKind.CONTEXT))
        with pytest.raises(IncompatibleKinds):
            model.add_link(case, Link("w1", LinkKind.WARRANTS, "CTX1", "t1"))

    def test_warrants_rejects_element_target(self):
        case = base_case()
        case = model.add_element(case, simple("W1", ElementKind.WARRANT))
        with pytest.raises(DanglingEndpoint):
            model.add_link(case, Link("w1", LinkKind.WARRANTS, "W1", "C1"))

    def test_warrants_rejects_claim_level_supports(self):
        # s1 runs from a PropertyClaim, so it needs no warrant and takes none.
        case = base_case()
        case = model.add_element(case, simple("W1", ElementKind.WARRANT))
        with pytest.raises(IncompatibleKinds):
            model.add_link(case, Link("w1", LinkKind.WARRANTS, "W1", "s1"))

    def test_two_cycle_rejected(self):
        case = base_case()
        case = model.add_element(case, claim("C2"))
        case = model.add_link(case, Link("a", LinkKind.SUPPORTS, "C2", "C1"))
        with pytest.raises(CycleIntroduced) as err:
            model.add_link(case, Link("b", LinkKind.SUPPORTS, "C1", "C2"))
        path = err.value.path
        assert path[0] == path[-1] and set(path) == {"C1", "C2"}

    def test_self_loop_rejected(self):
        case = base_case()
        with pytest.raises(CycleIntroduced):
            model.add_link(case, Link("a", LinkKind.SUPPORTS, "C1", "C1"))

    def test_long_cycle_rejected(self):
        case = model.new_case("c1", "T", PhaseTag.PRELIMINARY)
        for name in ("A", "B", "C", "D"):
            case = model.add_element(case, claim(name))
        case = model.add_link(case, Link("l1", LinkKind.SUPPORTS, "A", "B"))
        case = model.add_link(case, Link("l2", LinkKind.SUPPORTS, "B", "C"))
        case = model.add_link(case, Link("l3", LinkKind.SUPPORTS, "C", "D"))
        with pytest.raises(CycleIntroduced):
            model.add_link(case, Link("l4", LinkKind.SUPPORTS, "D", "A"))

    def test_diamond_is_not_a_cycle(self):
        case = base_case()
        case = model.add_element(case, claim("C2"))
        case = model.add_element(case, claim("C3"))
        case = model.add_link(case, Link("a", LinkKind.SUPPORTS, "C2", "G1"))
        case = model.add_link(case, Link("b", LinkKind.SUPPORTS, "C3", "C1"))
        case = model.add_link(case, Link("c", LinkKind.SUPPORTS, "C3", "C2"))
        assert len(case.links) == 4

    def test_ids_share_one_namespace(self):
        case = base_case()
        with pytest.raises(DuplicateId):
            model.add_element(case, claim("s1"))


class TestChallenges:
    def test_attach_and_resolve(self):
        case = base_case()
        case = model.attach_challenge(case, Challenge("ch1", "C1", "rev", "Doubt."))
        assert case.challenge("ch1").state is ChallengeState.OPEN
        closed = model.resolve_challenge(case, "ch1", ChallengeState.RESOLVED, "Fixed.")
        assert closed.challenge("ch1").resolution_note == "Fixed."
        # the original is untouched
        assert case.challenge("ch1").state is ChallengeState.OPEN

    def test_attach_requires_open_state(self):
        case = base_case()
        closed = Challenge("ch1", "C1", "rev", "Doubt.", state=ChallengeState.SUSTAINED)
        with pytest.raises(KindInvariantViolation):
            model.attach_challenge(case, closed)

    def test_attach_rejects_note(self):
        case = base_case()
        noted = Challenge("ch1", "C1", "rev", "Doubt.", resolution_note="early")
        with pytest.raises(KindInvariantViolation):
            model.attach_challenge(case, noted)

    def test_attach_rejects_blank_author_or_text(self):
        case = base_case()
        with pytest.raises(KindInvariantViolation):
            model.attach_challenge(case, Challenge("ch1", "C1", " ", "Doubt."))
        with pytest.raises(KindInvariantViolation):
            model.attach_challenge(case, Challenge("ch1", "C1", "rev", " "))

    def test_challenge_may_target_a_link(self):
        case = base_case()
        case = model.attach_challenge(case, Challenge("ch1", "s1", "rev", "Weak step."))
        assert case.challenges_on("s1")[0].id == "ch1"

    def test_dangling_target_rejected(self):
        case = base_case()
        with pytest.raises(DanglingTarget):
            model.attach_challenge(case, Challenge("ch1", "zz", "rev", "Doubt."))

    def test_sustained_needs_note(self):
        case = model.attach_challenge(base_case(), Challenge("ch1", "C1", "rev", "Doubt."))
        with pytest.raises(MissingNote):
            model.resolve_challenge(case, "ch1", ChallengeState.SUSTAINED)

    def test_resolved_needs_note(self):
        case = model.attach_challenge(base_case(), Challenge("ch1", "C1", "rev", "Doubt."))
        with pytest.raises(MissingNote):
            model.resolve_challenge(case, "ch1", ChallengeState.RESOLVED, "  ")

    def test_withdrawn_needs_no_note(self):
        case = model.attach_challenge(base_case(), Challenge("ch1", "C1", "rev", "Doubt."))
        case = model.resolve_challenge(case, "ch1", ChallengeState.WITHDRAWN)
        assert case.challenge("ch1").state is ChallengeState.WITHDRAWN

    def test_cannot_close_twice(self):
        case = model.attach_challenge(base_case(), Challenge("ch1", "C1", "rev", "Doubt."))
        case = model.resolve_challenge(case, "ch1", ChallengeState.WITHDRAWN)
        with pytest.raises(AlreadyClosed):
            model.resolve_challenge(case, "ch1", ChallengeState.SUSTAINED, "n")

    def test_cannot_reopen(self):
        case = model.attach_challenge(base_case(), Challenge("ch1", "C1", "rev", "Doubt."))
        with pytest.raises(KindInvariantViolation):
            model.resolve_challenge(case, "ch1", ChallengeState.OPEN)


class TestQueries:
    def test_links_into_filters_by_kind(self):
        case = base_case()
        case = model.add_element(case, simple("CTX1", ElementKind.CONTEXT))
        case = model.add_link(case, Link("x1", LinkKind.CONTEXT_OF, "CTX1", "G1"))
        assert [l.id for l in case.links_into("G1")] == ["s1", "x1"]
        assert [l.id for l in case.links_into("G1", LinkKind.SUPPORTS)] == ["s1"]

    def test_root_goals_excludes_subgoals(self):
        case = base_case()
        case = model.add_element(case, goal("G2", value="explainability"))
        case = model.add_link(case, Link("s2", LinkKind.SUPPORTS, "G2", "G1"))
        assert [g.id for g in case.goals()] == ["G1", "G2"]
        assert [g.id for g in case.root_goals()] == ["G1"]

    def test_same_structure_ignores_id_and_timestamps(self):
        one = base_case()
        two = model.new_case("other", "A case", PhaseTag.PRELIMINARY)
        two = model.add_element(two, goal())
        two = model.add_element(two, claim())
        two = model.add_link(two, Link("s1", LinkKind.SUPPORTS, "C1", "G1"))
        assert one.same_structure(two)
        assert not one.same_structure(
            model.attach_challenge(two, Challenge("ch1", "C1", "rev", "Doubt."))
        )


class TestGeneratedCases:
    def test_generator_output_is_always_valid(self):
        # Rebuilding every generated case through the strict operations
        # must never raise; this guards the generator itself.
        rng = random.Random(7)
        for _ in range(50):
            case = random_case(rng, with_appraisals=True)
            rebuilt = model.new_case(case.id, case.title, case.phase)
            for element in case.elements.values():
                rebuilt = model.add_element(rebuilt, element)
            ordered = [l for l in case.links.values() if l.kind is not LinkKind.WARRANTS]
            ordered += [l for l in case.links.values() if l.kind is LinkKind.WARRANTS]
            for link in ordered:
                rebuilt = model.add_link(rebuilt, link)
            assert rebuilt.elements == case.elements
            assert rebuilt.links == case.links
