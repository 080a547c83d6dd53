"""Audience-tier filtering and the two human renderings (DOT, markdown).

A filter is conjunctive: an element is shown when its tier is within the
viewer's tier AND it lies on a path into a selected goal AND it belongs to
a selected stage neighbourhood. Hidden elements are summarised as a count,
never echoed; values that rest on hidden evidence render as withheld.
"""

from __future__ import annotations

import textwrap
from dataclasses import dataclass, replace

from .appraisal import DEFAULT_THRESHOLD, SufficiencyReport, sufficiency
from .model import (
    AudienceTier,
    Case,
    ChallengeState,
    Element,
    ElementKind,
    LinkKind,
)
from .stages import LifecycleStage
from .validation import Status, compute_status

_ELEMENT_LINK_KINDS = (LinkKind.SUPPORTS, LinkKind.CONTEXT_OF, LinkKind.EVIDENCES)


@dataclass(frozen=True)
class TierFilter:
    """What a viewer may see. The default filter hides nothing."""

    tier: AudienceTier = AudienceTier.AUDITOR
    goals: frozenset[str] | None = None
    stages: frozenset[LifecycleStage] | None = None


@dataclass(frozen=True)
class View:
    """A case narrowed to one viewer's filter."""

    case: Case
    redacted: int
    hidden_elements: frozenset[str]


def _tier_visible(case: Case, tier: AudienceTier) -> set[str]:
    return {e.id for e in case.elements.values() if e.tier <= tier}


def _goal_visible(case: Case, goals: frozenset[str]) -> set[str]:
    reach = {goal_id for goal_id in goals if goal_id in case.elements}
    grew = True
    while grew:
        grew = False
        for link in case.links.values():
            if link.kind == LinkKind.WARRANTS:
                target_link = case.links.get(link.target)
                joins = target_link is not None and target_link.source in reach
            else:
                joins = link.target in reach
            if joins and link.source not in reach:
                reach.add(link.source)
                grew = True
    return reach


def _stage_visible(case: Case, stages: frozenset[LifecycleStage]) -> set[str]:
    kept_claims = {
        e.id
        for e in case.elements_of_kind(ElementKind.PROPERTY_CLAIM)
        if e.stage is not None and e.stage in stages
    }
    # Non-claim neighbours inherit visibility, but a hidden claim blocks.
    adjacency: dict[str, set[str]] = {eid: set() for eid in case.elements}
    for link in case.links.values():
        if link.kind == LinkKind.WARRANTS:
            target_link = case.links.get(link.target)
            if target_link is not None:
                adjacency[link.source].add(target_link.source)
                adjacency[target_link.source].add(link.source)
        else:
            adjacency[link.source].add(link.target)
            adjacency[link.target].add(link.source)
    visible = set(kept_claims)
    frontier = list(kept_claims)
    while frontier:
        current = frontier.pop()
        for neighbour in adjacency[current]:
            if neighbour in visible:
                continue
            if case.elements[neighbour].kind == ElementKind.PROPERTY_CLAIM:
                continue
            visible.add(neighbour)
            frontier.append(neighbour)
    return visible


def visible_elements(case: Case, filt: TierFilter) -> frozenset[str]:
    shown = _tier_visible(case, filt.tier)
    if filt.goals is not None:
        shown &= _goal_visible(case, filt.goals)
    if filt.stages is not None:
        shown &= _stage_visible(case, filt.stages)
    return frozenset(shown)


def restrict(case: Case, filt: TierFilter) -> View:
    """Drop everything the filter hides; links need both endpoints."""
    shown = visible_elements(case, filt)
    elements = {eid: e for eid, e in case.elements.items() if eid in shown}
    links = {}
    for link_id, link in sorted(case.links.items()):
        if link.kind == LinkKind.WARRANTS:
            if link.source in shown and link.target in links:
                links[link_id] = link
        elif link.source in shown and link.target in shown:
            links[link_id] = link
    # A warrants link may precede its target link in id order; settle again.
    for link_id, link in sorted(case.links.items()):
        if link.kind == LinkKind.WARRANTS and link.source in shown and link.target in links:
            links[link_id] = link
    challenges = {
        cid: c
        for cid, c in case.challenges.items()
        if c.target in elements or c.target in links
    }
    appraisals = {eid: r for eid, r in case.appraisals.items() if eid in shown}
    view_case = replace(
        case, elements=elements, links=links, challenges=challenges, appraisals=appraisals
    )
    return View(
        case=view_case,
        redacted=len(case.elements) - len(elements),
        hidden_elements=frozenset(case.elements) - shown,
    )


_SHAPES = {
    ElementKind.GOAL: 'shape=box, style="bold,filled"',
    ElementKind.PROPERTY_CLAIM: 'shape=box, style="rounded,filled"',
    ElementKind.EVIDENTIAL_CLAIM: 'shape=parallelogram, style=filled',
    ElementKind.EVIDENCE: 'shape=ellipse, style=filled',
    ElementKind.WARRANT: 'shape=note, style=filled',
    ElementKind.CONTEXT: 'shape=box, style="rounded,dashed,filled"',
    ElementKind.ASSUMPTION: 'shape=ellipse, style="dashed,filled"',
}

_STATUS_FILL = {
    Status.SUPPORTED: "#d5e8d4",
    Status.ASSUMED: "#dae8fc",
    Status.UNDEVELOPED: "#eeeeee",
    Status.CONTESTED: "#ffe6cc",
    Status.DEFEATED: "#f8cecc",
}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_label(element: Element) -> str:
    wrapped = textwrap.fill(element.text, width=28)
    return _dot_escape(f"{element.id}\n{wrapped}").replace("\n", "\\n")


def to_dot(case: Case, filt: TierFilter | None = None) -> str:
    """GraphViz rendering of the visible argument, goal at the top."""
    statuses = compute_status(case)
    view = restrict(case, filt or TierFilter())
    shown = view.case
    lines = [
        "digraph case {",
        "  rankdir=BT;",
        '  node [fontname="Helvetica", fontsize=10];',
        '  edge [fontname="Helvetica", fontsize=9];',
    ]
    if view.redacted:
        lines.append(f'  label="{view.redacted} elements redacted"; labelloc=t;')
    for element in sorted(shown.elements.values(), key=lambda e: e.id):
        status = statuses.get(element.id)
        fill = _STATUS_FILL[status] if status is not None else "#ffffff"
        lines.append(
            f'  "{element.id}" [{_SHAPES[element.kind]}, fillcolor="{fill}", '
            f'label="{_dot_label(element)}"];'
        )
    for link in sorted(shown.links.values(), key=lambda l: l.id):
        if link.kind == LinkKind.SUPPORTS:
            attr = "style=solid"
            if link.qualifier is not None:
                attr += f', label="{_dot_escape(link.qualifier.label.value)}"'
        elif link.kind == LinkKind.EVIDENCES:
            attr = "style=solid, arrowhead=onormal"
        elif link.kind == LinkKind.CONTEXT_OF:
            attr = "style=dashed, arrowhead=none"
        else:
            target_link = shown.links.get(link.target)
            if target_link is None:
                continue
            lines.append(
                f'  "{link.source}" -> "{target_link.source}" '
                f'[style=dotted, label="warrants {link.target}"];'
            )
            continue
        lines.append(f'  "{link.source}" -> "{link.target}" [{attr}];')
    for challenge in sorted(shown.challenges.values(), key=lambda c: c.id):
        node = f"challenge_{challenge.id}"
        open_mark = "!" if challenge.state == ChallengeState.OPEN else ""
        lines.append(
            f'  "{node}" [shape=octagon, color="#b85450", fontcolor="#b85450", '
            f'label="{_dot_escape(challenge.id + open_mark)}"];'
        )
        if challenge.target in shown.elements:
            anchor = challenge.target
            label = ""
        else:
            target_link = shown.links.get(challenge.target)
            if target_link is None:
                continue
            anchor = target_link.source
            label = f', label="on {_dot_escape(challenge.target)}"'
        lines.append(f'  "{node}" -> "{anchor}" [style=dotted, color="#b85450"{label}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _evidence_cone(case: Case, claim_id: str) -> set[str]:
    """Ids of evidence elements under a claim via support links."""
    seen: set[str] = set()
    frontier = [claim_id]
    cone: set[str] = set()
    while frontier:
        current = frontier.pop()
        if current in seen:
            continue
        seen.add(current)
        element = case.elements.get(current)
        if element is not None and element.kind == ElementKind.EVIDENCE:
            cone.add(current)
        for link in case.links_into(current, LinkKind.SUPPORTS, LinkKind.EVIDENCES):
            frontier.append(link.source)
    return cone


def _emphasise_slots(element: Element) -> str:
    text = element.text
    if element.slots is None:
        return text
    for value in element.slots.as_dict().values():
        text = text.replace("{" + value + "}", "**{" + value + "}**")
    return text


def _fmt_value(value: float | None) -> str:
    return "unassessed" if value is None else f"{value:.2f}"


def to_report(
    case: Case, filt: TierFilter | None = None, threshold: float = DEFAULT_THRESHOLD
) -> str:
    """Markdown review report of the visible part of the case."""
    filt = filt or TierFilter()
    statuses = compute_status(case)
    view = restrict(case, filt)
    shown = view.case
    hidden_evidence = {
        eid
        for eid in view.hidden_elements
        if case.elements[eid].kind == ElementKind.EVIDENCE
    }

    suff: SufficiencyReport | None = None
    if case.goals():
        suff = sufficiency(case, threshold)

    def claim_value_cell(claim_id: str) -> str:
        if suff is None:
            return "unassessed"
        if _evidence_cone(case, claim_id) & hidden_evidence:
            return "withheld"
        entry = suff.per_claim.get(claim_id)
        return _fmt_value(entry.value) if entry else "unassessed"

    lines: list[str] = [f"# {case.title}", ""]
    lines.append(
        f"Case `{case.id}`, phase {case.phase.label}, audience tier {filt.tier.label}."
    )
    lines.append("")

    goals = [e for e in shown.elements.values() if e.kind == ElementKind.GOAL]
    lines.append("## Goals")
    lines.append("")
    if goals:
        for goal in sorted(goals, key=lambda e: e.id):
            status = statuses.get(goal.id)
            badge = status.label if status is not None else "?"
            lines.append(f"- **{goal.id}** ({badge}): {_emphasise_slots(goal)}")
    else:
        lines.append("_No goals visible._")
    lines.append("")

    if suff is not None:
        if hidden_evidence:
            case_cell = "withheld"
        else:
            case_cell = _fmt_value(suff.case_value)
            case_cell += f" ({suff.case_verdict})"
        lines.append(f"Case sufficiency at threshold {threshold:.2f}: {case_cell}.")
        lines.append("")

    lines.append("## Stage coverage")
    lines.append("")
    lines.append("| Stage | Macro-stage | Claims |")
    lines.append("| --- | --- | ---: |")
    visible_claims = [
        e for e in shown.elements.values() if e.kind == ElementKind.PROPERTY_CLAIM
    ]
    for stage in LifecycleStage:
        count = sum(1 for c in visible_claims if c.stage == stage)
        lines.append(f"| {stage.value} | {stage.macro.value} | {count} |")
    untagged = sorted(c.id for c in visible_claims if c.stage is None)
    lines.append("")
    if untagged:
        lines.append("Untagged claims: " + ", ".join(f"`{cid}`" for cid in untagged) + ".")
        lines.append("")

    lines.append("## Claims")
    lines.append("")
    claim_like = [
        e
        for e in shown.elements.values()
        if e.kind in (ElementKind.PROPERTY_CLAIM, ElementKind.EVIDENTIAL_CLAIM)
    ]
    if claim_like:
        lines.append("| Id | Kind | Scope | Stage | Status | Sufficiency | Text |")
        lines.append("| --- | --- | --- | --- | --- | --- | --- |")
        for element in sorted(claim_like, key=lambda e: e.id):
            status = statuses.get(element.id)
            lines.append(
                "| `{id}` | {kind} | {scope} | {stage} | {status} | {value} | {text} |".format(
                    id=element.id,
                    kind=element.kind.value,
                    scope=element.scope.value if element.scope else "",
                    stage=element.stage.value if element.stage else "",
                    status=status.label if status is not None else "?",
                    value=claim_value_cell(element.id),
                    text=element.text.replace("|", "\\|"),
                )
            )
    else:
        lines.append("_No claims visible._")
    lines.append("")

    lines.append("## Evidence")
    lines.append("")
    evidence = [e for e in shown.elements.values() if e.kind == ElementKind.EVIDENCE]
    if evidence:
        lines.append("| Id | Locator | Appraised value | Text |")
        lines.append("| --- | --- | --- | --- |")
        for element in sorted(evidence, key=lambda e: e.id):
            record = case.appraisals.get(element.id)
            value = "unassessed" if record is None else f"{record.effective_value():.2f}"
            lines.append(
                f"| `{element.id}` | {element.locator} | {value} | "
                f"{element.text.replace('|', chr(92) + '|')} |"
            )
    else:
        lines.append("_No evidence visible._")
    lines.append("")

    lines.append("## Challenges")
    lines.append("")
    if shown.challenges:
        lines.append("| Id | Target | State | Author | Text |")
        lines.append("| --- | --- | --- | --- | --- |")
        for challenge in sorted(shown.challenges.values(), key=lambda c: c.id):
            lines.append(
                f"| `{challenge.id}` | `{challenge.target}` | {challenge.state.value} | "
                f"{challenge.author} | {challenge.text.replace('|', chr(92) + '|')} |"
            )
    else:
        lines.append("_No challenges visible._")
    lines.append("")

    lines.append("## Redactions")
    lines.append("")
    if view.redacted:
        plural = "element" if view.redacted == 1 else "elements"
        lines.append(
            f"{view.redacted} {plural} withheld from the {filt.tier.label} tier view."
        )
    else:
        lines.append("Nothing was withheld from this view.")
    lines.append("")
    return "\n".join(lines)
