"""Defeasibility-aware validation and argument status computation.

Statuses form a five-point lattice, weakest first::

    Defeated < Contested < Undeveloped < Assumed < Supported

Support propagates bottom-up through supports and evidences links and a
parent is only as strong as its weakest child. Challenges cap whatever they
target: an open challenge caps at Contested, a sustained one at Defeated,
and withdrawn or resolved challenges have no effect. A supports link from
an evidential claim additionally needs a warrant; without one the inference
is capped at Undeveloped.

Validation applies the structural rules R1 to R6 with phase gating:
warrant and evidence obligations are warnings early on and harden into
errors as the case matures towards the operational phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from .model import (
    Case,
    ChallengeState,
    ElementKind,
    Link,
    LinkKind,
    NotFound,
    PhaseTag,
    SUPPORT_LINK_KINDS,
)

# Stable finding codes. The *-MISSING-WARRANT and *-UNEVIDENCED pairs share
# one rule each; the severity prefix tracks the phase gate.
E_UNDERSPECIFIED_GOAL = "E-UNDERSPECIFIED-GOAL"
E_NO_GOAL = "E-NO-GOAL"
E_MISSING_CONTEXT = "E-MISSING-CONTEXT"
E_MISSING_WARRANT = "E-MISSING-WARRANT"
W_MISSING_WARRANT = "W-MISSING-WARRANT"
E_UNEVIDENCED = "E-UNEVIDENCED"
W_UNEVIDENCED = "W-UNEVIDENCED"
W_ORPHAN = "W-ORPHAN"


class Status(IntEnum):
    """Argument status; numeric order is lattice order, so min() works."""

    DEFEATED = 0
    CONTESTED = 1
    UNDEVELOPED = 2
    ASSUMED = 3
    SUPPORTED = 4

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, label: str) -> "Status":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"unknown status: {label!r}") from None


@dataclass(frozen=True, slots=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    target_id: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    phase: PhaseTag
    findings: tuple[Finding, ...]
    statuses: dict[str, Status]

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


def _challenge_cap(case: Case, target_id: str) -> Status:
    """The strongest status the challenges on a target allow it to have."""
    cap = Status.SUPPORTED
    for challenge in case.challenges.values():
        if challenge.target != target_id:
            continue
        if challenge.state == ChallengeState.OPEN:
            cap = min(cap, Status.CONTESTED)
        elif challenge.state == ChallengeState.SUSTAINED:
            cap = min(cap, Status.DEFEATED)
    return cap


def _warrant_factor(case: Case, link: Link) -> Status:
    """How strongly a supports link from an evidential claim is warranted.

    No warrant at all caps the inference at Undeveloped. Otherwise the best
    (least challenged) warrant wins: alternatives, not conjuncts.
    """
    warrants = case.warrants_for(link.id)
    if not warrants:
        return Status.UNDEVELOPED
    best = Status.DEFEATED
    for wlink in warrants:
        strength = min(
            _challenge_cap(case, wlink.id), _challenge_cap(case, wlink.source)
        )
        best = max(best, strength)
    return best


def _needs_warrant(case: Case, link: Link) -> bool:
    return (
        link.kind == LinkKind.SUPPORTS
        and link.source in case.elements
        and case.elements[link.source].kind == ElementKind.EVIDENTIAL_CLAIM
    )


_LEAF_STATUS = {
    ElementKind.ASSUMPTION: Status.ASSUMED,
    ElementKind.EVIDENCE: Status.SUPPORTED,
    ElementKind.WARRANT: Status.SUPPORTED,
    ElementKind.CONTEXT: Status.SUPPORTED,
}


def _node_status(case: Case, element_id: str, child_status: dict[str, Status]) -> Status:
    element = case.elements[element_id]
    if element.kind in _LEAF_STATUS:
        base = _LEAF_STATUS[element.kind]
    else:
        contributions: list[Status] = []
        for link in case.links_into(element_id, *SUPPORT_LINK_KINDS):
            value = child_status.get(link.source, Status.UNDEVELOPED)
            if _needs_warrant(case, link):
                value = min(value, _warrant_factor(case, link))
            contributions.append(value)
        base = min(contributions) if contributions else Status.UNDEVELOPED
    cap = _challenge_cap(case, element_id)
    for link in case.links_into(element_id):
        cap = min(cap, _challenge_cap(case, link.id))
    return min(base, cap)


def compute_status(case: Case) -> dict[str, Status]:
    """Status for every element, propagated bottom-up over support links."""
    incoming: dict[str, int] = {eid: 0 for eid in case.elements}
    dependants: dict[str, list[str]] = {eid: [] for eid in case.elements}
    for link in case.links.values():
        if link.kind in SUPPORT_LINK_KINDS and link.target in incoming:
            incoming[link.target] += 1
            dependants[link.source].append(link.target)

    statuses: dict[str, Status] = {}
    ready = sorted(eid for eid, deg in incoming.items() if deg == 0)
    pending = dict(incoming)
    while ready:
        element_id = ready.pop(0)
        statuses[element_id] = _node_status(case, element_id, statuses)
        newly_ready = []
        for parent in dependants[element_id]:
            pending[parent] -= 1
            if pending[parent] == 0:
                newly_ready.append(parent)
        ready.extend(sorted(newly_ready))

    # A support cycle cannot be built through the constructors or the text
    # formats; if a hand-assembled case has one, still return a total map.
    for element_id in sorted(case.elements):
        if element_id not in statuses:
            statuses[element_id] = _node_status(case, element_id, statuses)
    return {eid: statuses[eid] for eid in sorted(statuses)}


@dataclass(frozen=True)
class ExplanationNode:
    """One step of a status explanation: which rule produced the minimum."""

    element_id: str
    status: Status
    rule: str
    children: tuple["ExplanationNode", ...] = ()


def explain_status(case: Case, element_id: str) -> ExplanationNode:
    """Explain an element's status as a tree following the weakest path."""
    if element_id not in case.elements:
        raise NotFound(element_id)
    statuses = compute_status(case)
    return _explain(case, element_id, statuses)


def _explain(case: Case, element_id: str, statuses: dict[str, Status]) -> ExplanationNode:
    element = case.elements[element_id]
    status = statuses[element_id]

    # Candidates: (value, tie-priority, sort-key, rule, child-id-or-None).
    candidates: list[tuple[Status, int, str, str, str | None]] = []
    for challenge in case.challenges_on(element_id):
        value = _single_challenge_cap(challenge.state)
        if value is not None:
            candidates.append((value, 0, challenge.id, f"challenge {challenge.id}", None))
    for link in case.links_into(element_id):
        for challenge in case.challenges_on(link.id):
            value = _single_challenge_cap(challenge.state)
            if value is not None:
                candidates.append(
                    (value, 1, challenge.id, f"challenge {challenge.id}", None)
                )
    if element.kind in _LEAF_STATUS:
        rule = {
            ElementKind.ASSUMPTION: "assumption",
            ElementKind.EVIDENCE: "evidence-artefact",
            ElementKind.WARRANT: "warrant",
            ElementKind.CONTEXT: "context",
        }[element.kind]
        candidates.append((_LEAF_STATUS[element.kind], 4, element_id, rule, None))
    else:
        support_links = case.links_into(element_id, *SUPPORT_LINK_KINDS)
        if not support_links:
            candidates.append((Status.UNDEVELOPED, 4, element_id, "no-support", None))
        for link in support_links:
            child_value = statuses.get(link.source, Status.UNDEVELOPED)
            if _needs_warrant(case, link):
                factor = _warrant_factor(case, link)
                if factor < child_value:
                    candidates.append(
                        (factor, 2, link.id, _warrant_rule(case, link, factor), None)
                    )
                    continue
            candidates.append(
                (child_value, 3, link.source, f"weakest-child {link.source}", link.source)
            )

    value, _, _, rule, child_id = min(candidates, key=lambda c: (c[0], c[1], c[2]))
    children: tuple[ExplanationNode, ...] = ()
    if child_id is not None:
        children = (_explain(case, child_id, statuses),)
    return ExplanationNode(element_id=element_id, status=status, rule=rule, children=children)


def _single_challenge_cap(state: ChallengeState) -> Status | None:
    if state == ChallengeState.OPEN:
        return Status.CONTESTED
    if state == ChallengeState.SUSTAINED:
        return Status.DEFEATED
    return None


def _warrant_rule(case: Case, link: Link, factor: Status) -> str:
    warrants = case.warrants_for(link.id)
    if not warrants:
        return f"missing-warrant {link.id}"
    # Name the challenge holding back the best warrant.
    for wlink in warrants:
        strength = min(_challenge_cap(case, wlink.id), _challenge_cap(case, wlink.source))
        if strength == factor:
            for target in (wlink.id, wlink.source):
                for challenge in case.challenges_on(target):
                    if _single_challenge_cap(challenge.state) == factor:
                        return f"challenge {challenge.id}"
    return f"missing-warrant {link.id}"


_SEVERITY_RANK = {"error": 0, "warning": 1}


def validate(case: Case, phase: PhaseTag | None = None) -> ValidationReport:
    """Apply rules R1 to R6 at the given (or the case's own) phase."""
    at = case.phase if phase is None else phase
    findings: list[Finding] = []

    goals = case.goals()

    # R1: goals must bind the system/context/value slots.
    for goal in goals:
        if goal.slots is None:
            findings.append(
                Finding(
                    "error",
                    E_UNDERSPECIFIED_GOAL,
                    goal.id,
                    "goal does not bind the system, context, and value slots",
                )
            )

    # R1b: a maturing case needs at least one goal.
    if at >= PhaseTag.INTERIM and not goals:
        findings.append(
            Finding("error", E_NO_GOAL, case.id, "case has no goal element")
        )

    # R2: from the interim phase on, every goal needs context.
    if at >= PhaseTag.INTERIM:
        for goal in goals:
            if not case.links_into(goal.id, LinkKind.CONTEXT_OF):
                findings.append(
                    Finding(
                        "error",
                        E_MISSING_CONTEXT,
                        goal.id,
                        "goal has no contextOf link from a Context element",
                    )
                )

    # R3: supports links from evidential claims must be warranted.
    for link in sorted(case.links.values(), key=lambda l: l.id):
        if _needs_warrant(case, link) and not case.warrants_for(link.id):
            hardened = at >= PhaseTag.OPERATIONAL
            findings.append(
                Finding(
                    "error" if hardened else "warning",
                    E_MISSING_WARRANT if hardened else W_MISSING_WARRANT,
                    link.id,
                    f"supports link {link.id} from evidential claim "
                    f"{link.source} has no warrant",
                )
            )

    # R4: evidential claims need evidence, or an assumption standing in.
    for eclaim in case.elements_of_kind(ElementKind.EVIDENTIAL_CLAIM):
        if not case.links_into(eclaim.id, LinkKind.EVIDENCES):
            hardened = at >= PhaseTag.INTERIM
            findings.append(
                Finding(
                    "error" if hardened else "warning",
                    E_UNEVIDENCED if hardened else W_UNEVIDENCED,
                    eclaim.id,
                    f"evidential claim {eclaim.id} has no evidence "
                    "and no covering assumption",
                )
            )

    # R5: property claims should feed into some goal. Only meaningful once
    # the case has goals at all; before that everything would be an orphan.
    if goals:
        reaching = {goal.id for goal in goals}
        changed = True
        while changed:
            changed = False
            for link in case.links.values():
                if (
                    link.kind == LinkKind.SUPPORTS
                    and link.target in reaching
                    and link.source not in reaching
                ):
                    reaching.add(link.source)
                    changed = True
        for claim in case.elements_of_kind(ElementKind.PROPERTY_CLAIM):
            if claim.id not in reaching:
                findings.append(
                    Finding(
                        "warning",
                        W_ORPHAN,
                        claim.id,
                        f"property claim {claim.id} lies on no path to a goal",
                    )
                )

    findings.sort(key=lambda f: (_SEVERITY_RANK[f.severity], f.target_id, f.code))
    return ValidationReport(
        phase=at, findings=tuple(findings), statuses=compute_status(case)
    )
