"""Core data model for ethical assurance cases.

An assurance case is a goal-structured argument: normative goals sit at the
top, property claims about a project or system support them, evidential
claims ground those property claims, and evidence artefacts anchor the
whole structure. Warrants license individual inferential steps and
challenges record reviewer dissent against any element or link.

All values are frozen dataclasses. Update operations never mutate their
inputs; each returns a new :class:`Case` that shares unchanged entries with
the old one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum, IntEnum
from typing import TYPE_CHECKING, Iterable

from .stages import LifecycleStage

if TYPE_CHECKING:
    from .appraisal import AppraisalRecord

ElementId = str
LinkId = str
ChallengeId = str

_ID_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

GOAL_TEMPLATE = "The use of the {system} by {context} can help advance {goal}."

# Rendered goal texts keep the braces around each slot value, so the three
# bindings can be recovered verbatim from the text alone.
_GOAL_TEXT_RE = re.compile(
    r"^The use of the \{([^{}]*)\} by \{([^{}]*)\} can help advance \{([^{}]*)\}\.$"
)


class ElementKind(str, Enum):
    """The seven element kinds of the argument vocabulary."""

    GOAL = "Goal"
    CONTEXT = "Context"
    PROPERTY_CLAIM = "PropertyClaim"
    EVIDENTIAL_CLAIM = "EvidentialClaim"
    EVIDENCE = "Evidence"
    WARRANT = "Warrant"
    ASSUMPTION = "Assumption"


class LinkKind(str, Enum):
    SUPPORTS = "supports"
    CONTEXT_OF = "contextOf"
    EVIDENCES = "evidences"
    WARRANTS = "warrants"


class Scope(str, Enum):
    """Whether a property claim is about the system or the project around it."""

    SYSTEM = "system"
    PROJECT = "project"


class ChallengeState(str, Enum):
    OPEN = "open"
    WITHDRAWN = "withdrawn"
    SUSTAINED = "sustained"
    RESOLVED = "resolved"


class QualifierLabel(str, Enum):
    """Closed scale of inference-strength qualifiers on supports links."""

    CERTAINLY = "certainly"
    VERY_LIKELY = "very-likely"
    LIKELY = "likely"
    PLAUSIBLY = "plausibly"


class AudienceTier(IntEnum):
    """Disclosure tiers, ordered from most to least restricted view."""

    PUBLIC = 0
    STAKEHOLDER = 1
    AUDITOR = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "AudienceTier":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"unknown audience tier: {label!r}") from None


class PhaseTag(IntEnum):
    """Maturity phase of a case, in escalation order."""

    PRELIMINARY = 0
    INTERIM = 1
    OPERATIONAL = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "PhaseTag":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"unknown phase: {label!r}") from None


class CaseError(Exception):
    """Base class for structural errors raised by case operations."""


class EmptySlot(CaseError):
    def __init__(self, slot: str):
        super().__init__(f"goal slot {slot!r} is empty")
        self.slot = slot


class BraceInSlot(CaseError):
    def __init__(self, slot: str):
        super().__init__(f"goal slot {slot!r} contains a brace character")
        self.slot = slot


class DuplicateId(CaseError):
    def __init__(self, entity_id: str):
        super().__init__(f"id {entity_id!r} is already in use")
        self.entity_id = entity_id


class InvalidId(CaseError):
    def __init__(self, entity_id: str):
        super().__init__(f"id {entity_id!r} is not a valid identifier")
        self.entity_id = entity_id


class KindInvariantViolation(CaseError):
    pass


class DanglingEndpoint(CaseError):
    def __init__(self, endpoint: str):
        super().__init__(f"link endpoint {endpoint!r} does not exist")
        self.endpoint = endpoint


class IncompatibleKinds(CaseError):
    pass


class CycleIntroduced(CaseError):
    def __init__(self, path: tuple[str, ...]):
        super().__init__("link would close a cycle: " + " -> ".join(path))
        self.path = path


class DanglingTarget(CaseError):
    def __init__(self, target: str):
        super().__init__(f"challenge target {target!r} does not exist")
        self.target = target


class NotFound(CaseError):
    def __init__(self, entity_id: str):
        super().__init__(f"no entity with id {entity_id!r}")
        self.entity_id = entity_id


class AlreadyClosed(CaseError):
    def __init__(self, challenge_id: str):
        super().__init__(f"challenge {challenge_id!r} is already closed")
        self.challenge_id = challenge_id


class MissingNote(CaseError):
    def __init__(self, challenge_id: str, outcome: ChallengeState):
        super().__init__(
            f"challenge {challenge_id!r} needs a resolution note to be {outcome.value}"
        )
        self.challenge_id = challenge_id


@dataclass(frozen=True, slots=True)
class GoalSlots:
    """The three bindings of the goal template: system, context, and value."""

    system: str
    context: str
    goal: str

    def as_dict(self) -> dict[str, str]:
        return {"system": self.system, "context": self.context, "goal": self.goal}


@dataclass(frozen=True, slots=True)
class Qualifier:
    label: QualifierLabel
    note: str | None = None


@dataclass(frozen=True, slots=True)
class Element:
    """A node of the argument graph.

    Optional fields are kind-specific: ``scope`` and ``stage`` belong to
    property claims, ``slots`` to goals, ``locator`` to evidence. The strict
    constructors (:func:`add_element`, the parser) enforce those invariants;
    the dataclass itself stays permissive so that validation can describe
    malformed cases instead of refusing to represent them.
    """

    id: ElementId
    kind: ElementKind
    text: str
    scope: Scope | None = None
    stage: LifecycleStage | None = None
    slots: GoalSlots | None = None
    locator: str | None = None
    tier: AudienceTier = AudienceTier.PUBLIC


@dataclass(frozen=True, slots=True)
class Link:
    """A typed edge. ``target`` names an element, or a link for warrants."""

    id: LinkId
    kind: LinkKind
    source: ElementId
    target: str
    qualifier: Qualifier | None = None


@dataclass(frozen=True, slots=True)
class Challenge:
    """A reviewer's recorded dissent against an element or a link."""

    id: ChallengeId
    target: str
    author: str
    text: str
    state: ChallengeState = ChallengeState.OPEN
    resolution_note: str | None = None


# Admissible (source kind, target kind) pairs per element-to-element link kind.
# Assumptions may stand in for evidence so that self-evident or already well
# established evidential claims need no artefact behind them.
KIND_TABLE: dict[LinkKind, tuple[frozenset[ElementKind], frozenset[ElementKind]]] = {
    LinkKind.SUPPORTS: (
        frozenset(
            {ElementKind.PROPERTY_CLAIM, ElementKind.EVIDENTIAL_CLAIM, ElementKind.GOAL}
        ),
        frozenset({ElementKind.PROPERTY_CLAIM, ElementKind.GOAL}),
    ),
    LinkKind.CONTEXT_OF: (
        frozenset({ElementKind.CONTEXT}),
        frozenset({ElementKind.GOAL, ElementKind.PROPERTY_CLAIM}),
    ),
    LinkKind.EVIDENCES: (
        frozenset({ElementKind.EVIDENCE, ElementKind.ASSUMPTION}),
        frozenset({ElementKind.EVIDENTIAL_CLAIM}),
    ),
}

# Link kinds that carry argumentative support, used for status propagation,
# sufficiency, and cycle detection.
SUPPORT_LINK_KINDS = frozenset({LinkKind.SUPPORTS, LinkKind.EVIDENCES})

CLAIM_KINDS = frozenset(
    {ElementKind.GOAL, ElementKind.PROPERTY_CLAIM, ElementKind.EVIDENTIAL_CLAIM}
)


@dataclass(frozen=True)
class Case:
    """A complete assurance case: elements, links, challenges, appraisals.

    Collections are keyed by id. Instances are treated as immutable values;
    ids share one namespace across elements, links, and challenges so that
    challenge targets stay unambiguous.
    """

    id: str
    title: str
    phase: PhaseTag
    elements: dict[ElementId, Element] = field(default_factory=dict)
    links: dict[LinkId, Link] = field(default_factory=dict)
    challenges: dict[ChallengeId, Challenge] = field(default_factory=dict)
    appraisals: dict[ElementId, "AppraisalRecord"] = field(default_factory=dict)
    created: datetime | None = None
    modified: datetime | None = None

    def element(self, element_id: ElementId) -> Element:
        try:
            return self.elements[element_id]
        except KeyError:
            raise NotFound(element_id) from None

    def link(self, link_id: LinkId) -> Link:
        try:
            return self.links[link_id]
        except KeyError:
            raise NotFound(link_id) from None

    def challenge(self, challenge_id: ChallengeId) -> Challenge:
        try:
            return self.challenges[challenge_id]
        except KeyError:
            raise NotFound(challenge_id) from None

    def links_into(self, element_id: ElementId, *kinds: LinkKind) -> list[Link]:
        """Links whose target is the given element, optionally kind-filtered."""
        wanted = set(kinds) if kinds else None
        return [
            link
            for link in sorted(self.links.values(), key=lambda l: l.id)
            if link.target == element_id and (wanted is None or link.kind in wanted)
        ]

    def links_from(self, element_id: ElementId, *kinds: LinkKind) -> list[Link]:
        wanted = set(kinds) if kinds else None
        return [
            link
            for link in sorted(self.links.values(), key=lambda l: l.id)
            if link.source == element_id and (wanted is None or link.kind in wanted)
        ]

    def warrants_for(self, link_id: LinkId) -> list[Link]:
        """Warrants links targeting the given link, in id order."""
        return [
            link
            for link in sorted(self.links.values(), key=lambda l: l.id)
            if link.kind == LinkKind.WARRANTS and link.target == link_id
        ]

    def challenges_on(self, target_id: str) -> list[Challenge]:
        return [
            ch
            for ch in sorted(self.challenges.values(), key=lambda c: c.id)
            if ch.target == target_id
        ]

    def elements_of_kind(self, kind: ElementKind) -> list[Element]:
        return [
            el
            for el in sorted(self.elements.values(), key=lambda e: e.id)
            if el.kind == kind
        ]

    def goals(self) -> list[Element]:
        return self.elements_of_kind(ElementKind.GOAL)

    def root_goals(self) -> list[Element]:
        """Goals that do not themselves support another element."""
        return [
            goal
            for goal in self.goals()
            if not self.links_from(goal.id, LinkKind.SUPPORTS)
        ]

    def same_structure(self, other: "Case") -> bool:
        """Structural equality: ignores id, timestamps, and appraisals.

        This is the equivalence preserved by the text format, which carries
        the argument itself but no authoring metadata.
        """
        return (
            self.title == other.title
            and self.phase == other.phase
            and self.elements == other.elements
            and self.links == other.links
            and self.challenges == other.challenges
        )


def _utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def new_case(case_id: str, title: str, phase: PhaseTag) -> Case:
    """Create an empty case stamped with the current time."""
    if not _ID_RE.match(case_id):
        raise InvalidId(case_id)
    if not title.strip():
        raise KindInvariantViolation("case title must not be empty")
    now = _utc_now()
    return Case(id=case_id, title=title, phase=phase, created=now, modified=now)


def valid_id(entity_id: str) -> bool:
    return bool(_ID_RE.match(entity_id))


def goal_from_template(system: str, context: str, goal: str) -> tuple[str, GoalSlots]:
    """Render the goal template over three slot values.

    Returns the rendered text and the slot record. Values must be non-empty
    after trimming and may not contain brace characters, so the rendering is
    injective: the values can always be read back from the text.
    """
    values = {"system": system, "context": context, "goal": goal}
    for name, value in values.items():
        if not value.strip():
            raise EmptySlot(name)
        if "{" in value or "}" in value:
            raise BraceInSlot(name)
    slots = GoalSlots(system=system, context=context, goal=goal)
    return render_goal_text(slots), slots


def render_goal_text(slots: GoalSlots) -> str:
    """The goal sentence with each slot value kept inside braces."""
    return (
        f"The use of the {{{slots.system}}} by {{{slots.context}}} "
        f"can help advance {{{slots.goal}}}."
    )


def extract_goal_slots(text: str) -> GoalSlots | None:
    """Recover slot values from a rendered goal text, if it matches."""
    match = _GOAL_TEXT_RE.match(text)
    if match is None:
        return None
    return GoalSlots(system=match.group(1), context=match.group(2), goal=match.group(3))


def check_fresh_id(case: Case, entity_id: str) -> None:
    if not _ID_RE.match(entity_id):
        raise InvalidId(entity_id)
    if entity_id in case.elements or entity_id in case.links or entity_id in case.challenges:
        raise DuplicateId(entity_id)


def check_element_invariants(
    element: Element,
    require_goal_slots: bool = True,
    allow_slot_braces: bool = False,
) -> None:
    """Raise if the element violates its kind-specific invariants.

    ``require_goal_slots=False`` admits goals without slot bindings. The
    text formats use this so an underspecified goal can be represented and
    then reported by validation, rather than rejected outright.
    ``allow_slot_braces=True`` admits {placeholder} slot values; pattern
    skeletons need this, finished cases never do.
    """
    if not element.text.strip():
        raise KindInvariantViolation(f"element {element.id!r} has empty text")
    if element.kind == ElementKind.PROPERTY_CLAIM:
        if element.scope is None:
            raise KindInvariantViolation(f"property claim {element.id!r} needs a scope")
    else:
        if element.scope is not None:
            raise KindInvariantViolation(f"{element.kind.value} {element.id!r} may not have a scope")
        if element.stage is not None:
            raise KindInvariantViolation(f"{element.kind.value} {element.id!r} may not have a stage")
    if element.kind == ElementKind.GOAL:
        if element.slots is None:
            if require_goal_slots:
                raise KindInvariantViolation(f"goal {element.id!r} slots-missing")
        else:
            for name, value in element.slots.as_dict().items():
                if not value.strip():
                    raise EmptySlot(name)
                if not allow_slot_braces and ("{" in value or "}" in value):
                    raise BraceInSlot(name)
            if element.text != render_goal_text(element.slots):
                raise KindInvariantViolation(
                    f"goal {element.id!r} text does not match its rendered slots"
                )
    elif element.slots is not None:
        raise KindInvariantViolation(f"{element.kind.value} {element.id!r} may not have slots")
    if element.kind == ElementKind.EVIDENCE:
        if not element.locator or not element.locator.strip():
            raise KindInvariantViolation(f"evidence {element.id!r} needs a locator")
    elif element.locator is not None:
        raise KindInvariantViolation(f"{element.kind.value} {element.id!r} may not have a locator")


def add_element(case: Case, element: Element) -> Case:
    """Add one element, enforcing id freshness and kind invariants."""
    check_fresh_id(case, element.id)
    check_element_invariants(element)
    return replace(case, elements={**case.elements, element.id: element})


def support_cycle(
    links: Iterable[Link], start: ElementId
) -> tuple[str, ...] | None:
    """Return a cycle path through element-to-element links, if one exists.

    The search starts at ``start`` and follows links from source to target.
    The returned path repeats the first node, e.g. ``("A", "B", "A")``.
    """
    adjacency: dict[str, list[str]] = {}
    for link in links:
        if link.kind == LinkKind.WARRANTS:
            continue
        adjacency.setdefault(link.source, []).append(link.target)
    for targets in adjacency.values():
        targets.sort()

    path: list[str] = []
    on_path: set[str] = set()
    done: set[str] = set()

    def visit(node: str) -> tuple[str, ...] | None:
        if node in on_path:
            return tuple(path[path.index(node):] + [node])
        if node in done:
            return None
        on_path.add(node)
        path.append(node)
        for nxt in adjacency.get(node, ()):  # deterministic order
            found = visit(nxt)
            if found is not None:
                return found
        on_path.discard(node)
        path.pop()
        done.add(node)
        return None

    return visit(start)


def add_link(case: Case, link: Link) -> Case:
    """Add one link, enforcing endpoint existence, kind table, acyclicity."""
    check_fresh_id(case, link.id)
    if link.source not in case.elements:
        raise DanglingEndpoint(link.source)
    source = case.elements[link.source]

    if link.qualifier is not None and link.kind != LinkKind.SUPPORTS:
        raise KindInvariantViolation(
            f"link {link.id!r}: qualifier admissible only on supports links"
        )

    if link.kind == LinkKind.WARRANTS:
        if source.kind != ElementKind.WARRANT:
            raise IncompatibleKinds(
                f"link {link.id!r}: warrants source must be a Warrant, got {source.kind.value}"
            )
        target_link = case.links.get(link.target)
        if target_link is None:
            raise DanglingEndpoint(link.target)
        if target_link.kind != LinkKind.SUPPORTS:
            raise IncompatibleKinds(
                f"link {link.id!r}: warrants must target a supports link"
            )
        target_source = case.elements[target_link.source]
        if target_source.kind != ElementKind.EVIDENTIAL_CLAIM:
            raise IncompatibleKinds(
                f"link {link.id!r}: warrants must target a supports link "
                "whose source is an EvidentialClaim"
            )
    else:
        if link.target not in case.elements:
            raise DanglingEndpoint(link.target)
        target = case.elements[link.target]
        sources, targets = KIND_TABLE[link.kind]
        if source.kind not in sources or target.kind not in targets:
            raise IncompatibleKinds(
                f"link {link.id!r}: {source.kind.value} -{link.kind.value}-> "
                f"{target.kind.value} is not admissible"
            )

    updated = replace(case, links={**case.links, link.id: link})
    if link.kind != LinkKind.WARRANTS:
        cycle = support_cycle(updated.links.values(), link.target)
        if cycle is not None:
            raise CycleIntroduced(cycle)
    return updated


def attach_challenge(case: Case, challenge: Challenge) -> Case:
    """Attach a reviewer challenge to an existing element or link."""
    check_fresh_id(case, challenge.id)
    if challenge.state != ChallengeState.OPEN:
        raise KindInvariantViolation(
            f"challenge {challenge.id!r} must be open at creation"
        )
    if challenge.resolution_note is not None:
        raise KindInvariantViolation(
            f"challenge {challenge.id!r} may not carry a resolution note while open"
        )
    if not challenge.text.strip():
        raise KindInvariantViolation(f"challenge {challenge.id!r} has empty text")
    if not challenge.author.strip():
        raise KindInvariantViolation(f"challenge {challenge.id!r} has empty author")
    if challenge.target not in case.elements and challenge.target not in case.links:
        raise DanglingTarget(challenge.target)
    return replace(case, challenges={**case.challenges, challenge.id: challenge})


def resolve_challenge(
    case: Case,
    challenge_id: ChallengeId,
    outcome: ChallengeState,
    note: str | None = None,
) -> Case:
    """Close an open challenge as withdrawn, sustained, or resolved."""
    challenge = case.challenge(challenge_id)
    if challenge.state != ChallengeState.OPEN:
        raise AlreadyClosed(challenge_id)
    if outcome == ChallengeState.OPEN:
        raise KindInvariantViolation(f"challenge {challenge_id!r} is already open")
    if outcome in (ChallengeState.SUSTAINED, ChallengeState.RESOLVED):
        if note is None or not note.strip():
            raise MissingNote(challenge_id, outcome)
    closed = replace(challenge, state=outcome, resolution_note=note)
    return replace(case, challenges={**case.challenges, challenge_id: closed})
