"""Interchange format: one canonical JSON document per case.

The document is deterministic (sorted keys, id-sorted arrays, two-space
indent, trailing newline) so the same case always yields the same bytes.
Import is strict: unknown keys, unknown enum values, and references to
absent elements are diagnostics carrying a JSON pointer to the offending
spot, never silent repairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import date as date_type
from datetime import datetime, timezone

from . import dsl, model
from .appraisal import AppraisalRecord, Criterion
from .model import (
    AudienceTier,
    Case,
    Challenge,
    ChallengeState,
    Element,
    ElementKind,
    GoalSlots,
    Link,
    LinkKind,
    PhaseTag,
    Qualifier,
    QualifierLabel,
    Scope,
)
from .stages import parse_stage

VERSION = "1"

E_SCHEMA = "E-SCHEMA"
E_VERSION = "E-VERSION"
E_RANGE = "E-RANGE"

_TIME_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

_CRITERION_WORDS = {
    "relevance": ("relevant", "irrelevant"),
    "materiality": ("material", "immaterial"),
    "admissibility": ("admissible", "inadmissible"),
}


@dataclass(frozen=True, slots=True)
class ImportIssue:
    code: str
    message: str
    pointer: str

    def __str__(self) -> str:
        return f"{self.pointer or '/'}: {self.code} {self.message}"


@dataclass(frozen=True)
class ImportResult:
    case: Case | None
    issues: tuple[ImportIssue, ...]

    @property
    def ok(self) -> bool:
        return self.case is not None


class InterchangeError(model.CaseError):
    def __init__(self, issues: tuple[ImportIssue, ...]):
        super().__init__("; ".join(str(issue) for issue in issues))
        self.issues = issues


def _time_out(value: datetime | None) -> str | None:
    if value is None:
        return None
    return value.astimezone(timezone.utc).strftime(_TIME_FORMAT)


def element_out(element: Element) -> dict:
    out: dict = {"id": element.id, "kind": element.kind.value, "text": element.text}
    if element.scope is not None:
        out["scope"] = element.scope.value
    if element.stage is not None:
        out["stage"] = element.stage.value
    if element.slots is not None:
        out["slots"] = element.slots.as_dict()
    if element.locator is not None:
        out["locator"] = element.locator
    if element.tier != AudienceTier.PUBLIC:
        out["tier"] = element.tier.label
    return out


def link_out(link: Link) -> dict:
    out: dict = {
        "id": link.id,
        "kind": link.kind.value,
        "from": link.source,
        "to": link.target,
    }
    if link.qualifier is not None:
        qualifier: dict = {"label": link.qualifier.label.value}
        if link.qualifier.note is not None:
            qualifier["note"] = link.qualifier.note
        out["qualifier"] = qualifier
    return out


def _challenge_out(challenge: Challenge) -> dict:
    out: dict = {
        "id": challenge.id,
        "target": challenge.target,
        "author": challenge.author,
        "text": challenge.text,
        "state": challenge.state.value,
    }
    if challenge.resolution_note is not None:
        out["resolutionNote"] = challenge.resolution_note
    return out


def _criterion_out(criterion: Criterion, which: str) -> dict:
    positive, negative = _CRITERION_WORDS[which]
    out: dict = {"verdict": positive if criterion.verdict else negative}
    if criterion.note is not None:
        out["note"] = criterion.note
    return out


def _appraisal_out(record: AppraisalRecord) -> dict:
    return {
        "evidenceId": record.evidence_id,
        "relevance": _criterion_out(record.relevance, "relevance"),
        "materiality": _criterion_out(record.materiality, "materiality"),
        "admissibility": _criterion_out(record.admissibility, "admissibility"),
        "probativeValue": record.probative_value,
        "assessor": record.assessor,
        "date": record.date.isoformat(),
    }


def document(case: Case) -> dict:
    """The case as a JSON-ready dictionary."""
    head: dict = {"id": case.id, "title": case.title, "phase": case.phase.label}
    created = _time_out(case.created)
    modified = _time_out(case.modified)
    if created is not None:
        head["created"] = created
    if modified is not None:
        head["modified"] = modified
    return {
        "version": VERSION,
        "case": head,
        "elements": [
            element_out(e) for e in sorted(case.elements.values(), key=lambda e: e.id)
        ],
        "links": [link_out(l) for l in sorted(case.links.values(), key=lambda l: l.id)],
        "challenges": [
            _challenge_out(c) for c in sorted(case.challenges.values(), key=lambda c: c.id)
        ],
        "appraisals": [
            _appraisal_out(record)
            for _, record in sorted(case.appraisals.items())
        ],
    }


def to_interchange(case: Case) -> str:
    """Canonical JSON text for the case."""
    return json.dumps(document(case), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class _Issues:
    def __init__(self) -> None:
        self.items: list[ImportIssue] = []

    def add(self, code: str, message: str, pointer: str) -> None:
        self.items.append(ImportIssue(code, message, pointer))


def _need(obj: dict, key: str, kind: type, issues: _Issues, pointer: str):
    value = obj.get(key)
    if not isinstance(value, kind) or (kind is str and not value.strip()):
        issues.add(E_SCHEMA, f"field {key!r} must be a non-empty {kind.__name__}", f"{pointer}/{key}")
        return None
    return value


def _opt(obj: dict, key: str, kind: type, issues: _Issues, pointer: str):
    if key not in obj:
        return None
    value = obj[key]
    if not isinstance(value, kind):
        issues.add(E_SCHEMA, f"field {key!r} must be a {kind.__name__}", f"{pointer}/{key}")
        return None
    return value


def _reject_unknown(obj: dict, allowed: set[str], issues: _Issues, pointer: str) -> None:
    for key in sorted(set(obj) - allowed):
        issues.add(E_SCHEMA, f"unknown field {key!r}", f"{pointer}/{key}")


def _element_in(obj: object, index: int, issues: _Issues) -> Element | None:
    pointer = f"/elements/{index}"
    if not isinstance(obj, dict):
        issues.add(E_SCHEMA, "element must be an object", pointer)
        return None
    _reject_unknown(
        obj, {"id", "kind", "text", "scope", "stage", "slots", "locator", "tier"}, issues, pointer
    )
    element_id = _need(obj, "id", str, issues, pointer)
    kind_name = _need(obj, "kind", str, issues, pointer)
    text = _need(obj, "text", str, issues, pointer)
    if element_id is None or kind_name is None or text is None:
        return None
    if not model.valid_id(element_id):
        issues.add(dsl.E_ID, f"{element_id!r} is not a valid identifier", f"{pointer}/id")
        return None
    try:
        kind = ElementKind(kind_name)
    except ValueError:
        issues.add(dsl.E_KIND, f"unknown element kind {kind_name!r}", f"{pointer}/kind")
        return None

    scope = None
    scope_name = _opt(obj, "scope", str, issues, pointer)
    if scope_name is not None:
        try:
            scope = Scope(scope_name)
        except ValueError:
            issues.add(dsl.E_SCOPE, f"unknown scope {scope_name!r}", f"{pointer}/scope")
            return None

    stage = None
    stage_name = _opt(obj, "stage", str, issues, pointer)
    if stage_name is not None:
        stage = parse_stage(stage_name)
        if stage is None:
            issues.add(dsl.E_STAGE, f"unknown lifecycle stage {stage_name!r}", f"{pointer}/stage")
            return None

    slots = None
    slots_obj = _opt(obj, "slots", dict, issues, pointer)
    if slots_obj is not None:
        _reject_unknown(slots_obj, {"system", "context", "goal"}, issues, f"{pointer}/slots")
        system = _need(slots_obj, "system", str, issues, f"{pointer}/slots")
        context = _need(slots_obj, "context", str, issues, f"{pointer}/slots")
        goal = _need(slots_obj, "goal", str, issues, f"{pointer}/slots")
        if system is None or context is None or goal is None:
            return None
        slots = GoalSlots(system=system, context=context, goal=goal)

    tier = AudienceTier.PUBLIC
    tier_name = _opt(obj, "tier", str, issues, pointer)
    if tier_name is not None:
        try:
            tier = AudienceTier.from_label(tier_name)
        except ValueError:
            issues.add(dsl.E_TIER, f"unknown tier {tier_name!r}", f"{pointer}/tier")
            return None

    locator = _opt(obj, "locator", str, issues, pointer)
    element = Element(
        id=element_id,
        kind=kind,
        text=text,
        scope=scope,
        stage=stage,
        slots=slots,
        locator=locator,
        tier=tier,
    )
    try:
        model.check_element_invariants(element, require_goal_slots=False)
    except model.CaseError as exc:
        issues.add(dsl.E_KIND, str(exc), pointer)
        return None
    return element


def _link_in(obj: object, index: int, issues: _Issues) -> Link | None:
    pointer = f"/links/{index}"
    if not isinstance(obj, dict):
        issues.add(E_SCHEMA, "link must be an object", pointer)
        return None
    _reject_unknown(obj, {"id", "kind", "from", "to", "qualifier"}, issues, pointer)
    link_id = _need(obj, "id", str, issues, pointer)
    kind_name = _need(obj, "kind", str, issues, pointer)
    source = _need(obj, "from", str, issues, pointer)
    target = _need(obj, "to", str, issues, pointer)
    if link_id is None or kind_name is None or source is None or target is None:
        return None
    for key, value in (("id", link_id), ("from", source), ("to", target)):
        if not model.valid_id(value):
            issues.add(dsl.E_ID, f"{value!r} is not a valid identifier", f"{pointer}/{key}")
            return None
    try:
        kind = LinkKind(kind_name)
    except ValueError:
        issues.add(dsl.E_KIND, f"unknown link kind {kind_name!r}", f"{pointer}/kind")
        return None
    qualifier = None
    qualifier_obj = _opt(obj, "qualifier", dict, issues, pointer)
    if qualifier_obj is not None:
        _reject_unknown(qualifier_obj, {"label", "note"}, issues, f"{pointer}/qualifier")
        label_name = _need(qualifier_obj, "label", str, issues, f"{pointer}/qualifier")
        if label_name is None:
            return None
        try:
            label = QualifierLabel(label_name)
        except ValueError:
            issues.add(
                dsl.E_QUALIFIER,
                f"unknown qualifier {label_name!r}",
                f"{pointer}/qualifier/label",
            )
            return None
        note = _opt(qualifier_obj, "note", str, issues, f"{pointer}/qualifier")
        qualifier = Qualifier(label=label, note=note)
    return Link(id=link_id, kind=kind, source=source, target=target, qualifier=qualifier)


def _challenge_in(obj: object, index: int, issues: _Issues) -> Challenge | None:
    pointer = f"/challenges/{index}"
    if not isinstance(obj, dict):
        issues.add(E_SCHEMA, "challenge must be an object", pointer)
        return None
    _reject_unknown(
        obj, {"id", "target", "author", "text", "state", "resolutionNote"}, issues, pointer
    )
    challenge_id = _need(obj, "id", str, issues, pointer)
    target = _need(obj, "target", str, issues, pointer)
    author = _need(obj, "author", str, issues, pointer)
    text = _need(obj, "text", str, issues, pointer)
    if challenge_id is None or target is None or author is None or text is None:
        return None
    if not model.valid_id(challenge_id):
        issues.add(dsl.E_ID, f"{challenge_id!r} is not a valid identifier", f"{pointer}/id")
        return None
    state = ChallengeState.OPEN
    state_name = _opt(obj, "state", str, issues, pointer)
    if state_name is not None:
        try:
            state = ChallengeState(state_name)
        except ValueError:
            issues.add(dsl.E_STATE, f"unknown challenge state {state_name!r}", f"{pointer}/state")
            return None
    note = _opt(obj, "resolutionNote", str, issues, pointer)
    if state in (ChallengeState.SUSTAINED, ChallengeState.RESOLVED) and note is None:
        issues.add(
            dsl.E_NOTE, f"state {state.value} requires a resolution note", f"{pointer}/state"
        )
        return None
    if state == ChallengeState.OPEN and note is not None:
        issues.add(
            dsl.E_NOTE,
            "an open challenge may not carry a resolution note",
            f"{pointer}/resolutionNote",
        )
        return None
    return Challenge(
        id=challenge_id,
        target=target,
        author=author,
        text=text,
        state=state,
        resolution_note=note,
    )


def _criterion_in(obj: object, which: str, issues: _Issues, pointer: str) -> Criterion | None:
    pointer = f"{pointer}/{which}"
    if not isinstance(obj, dict):
        issues.add(E_SCHEMA, f"{which} must be an object", pointer)
        return None
    _reject_unknown(obj, {"verdict", "note"}, issues, pointer)
    verdict = _need(obj, "verdict", str, issues, pointer)
    if verdict is None:
        return None
    positive, negative = _CRITERION_WORDS[which]
    if verdict not in (positive, negative):
        issues.add(
            E_SCHEMA,
            f"{which} verdict must be {positive!r} or {negative!r}",
            f"{pointer}/verdict",
        )
        return None
    note = _opt(obj, "note", str, issues, pointer)
    return Criterion(verdict=verdict == positive, note=note)


def _appraisal_in(obj: object, index: int, issues: _Issues) -> AppraisalRecord | None:
    pointer = f"/appraisals/{index}"
    if not isinstance(obj, dict):
        issues.add(E_SCHEMA, "appraisal must be an object", pointer)
        return None
    _reject_unknown(
        obj,
        {
            "evidenceId",
            "relevance",
            "materiality",
            "admissibility",
            "probativeValue",
            "assessor",
            "date",
        },
        issues,
        pointer,
    )
    evidence_id = _need(obj, "evidenceId", str, issues, pointer)
    assessor = _need(obj, "assessor", str, issues, pointer)
    date_text = _need(obj, "date", str, issues, pointer)
    relevance = _criterion_in(obj.get("relevance"), "relevance", issues, pointer)
    materiality = _criterion_in(obj.get("materiality"), "materiality", issues, pointer)
    admissibility = _criterion_in(obj.get("admissibility"), "admissibility", issues, pointer)
    value = obj.get("probativeValue")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        issues.add(E_SCHEMA, "probativeValue must be a number", f"{pointer}/probativeValue")
        return None
    if not 0.0 <= float(value) <= 1.0:
        issues.add(
            E_RANGE, "probativeValue must be within [0, 1]", f"{pointer}/probativeValue"
        )
        return None
    if None in (evidence_id, assessor, date_text, relevance, materiality, admissibility):
        return None
    try:
        day = date_type.fromisoformat(date_text)
    except ValueError:
        issues.add(E_SCHEMA, f"date {date_text!r} is not an ISO date", f"{pointer}/date")
        return None
    return AppraisalRecord(
        evidence_id=evidence_id,
        relevance=relevance,
        materiality=materiality,
        admissibility=admissibility,
        probative_value=float(value),
        assessor=assessor,
        date=day,
    )


def _time_in(value: str | None, key: str, issues: _Issues) -> datetime | None:
    if value is None:
        return None
    try:
        return datetime.strptime(value, _TIME_FORMAT).replace(tzinfo=timezone.utc)
    except ValueError:
        issues.add(E_SCHEMA, f"{key} {value!r} is not a UTC timestamp", f"/case/{key}")
        return None


def from_interchange(text: str | bytes) -> ImportResult:
    """Parse an interchange document; diagnostics carry JSON pointers."""
    issues = _Issues()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        issues.add(E_SCHEMA, f"not valid JSON: {exc.msg} at line {exc.lineno}", "")
        return ImportResult(None, tuple(issues.items))
    if not isinstance(data, dict):
        issues.add(E_SCHEMA, "top level must be an object", "")
        return ImportResult(None, tuple(issues.items))
    _reject_unknown(
        data, {"version", "case", "elements", "links", "challenges", "appraisals"}, issues, ""
    )
    version = data.get("version")
    if version != VERSION:
        issues.add(E_VERSION, f"unsupported version {version!r}, expected {VERSION!r}", "/version")
        return ImportResult(None, tuple(issues.items))

    head = data.get("case")
    if not isinstance(head, dict):
        issues.add(E_SCHEMA, "field 'case' must be an object", "/case")
        return ImportResult(None, tuple(issues.items))
    _reject_unknown(head, {"id", "title", "phase", "created", "modified"}, issues, "/case")
    case_id = _need(head, "id", str, issues, "/case")
    title = _need(head, "title", str, issues, "/case")
    phase_name = _need(head, "phase", str, issues, "/case")
    phase = None
    if phase_name is not None:
        try:
            phase = PhaseTag.from_label(phase_name)
        except ValueError:
            issues.add(dsl.E_PHASE, f"unknown phase {phase_name!r}", "/case/phase")
    if case_id is not None and not model.valid_id(case_id):
        issues.add(dsl.E_ID, f"{case_id!r} is not a valid identifier", "/case/id")
        case_id = None
    created = _time_in(_opt(head, "created", str, issues, "/case"), "created", issues)
    modified = _time_in(_opt(head, "modified", str, issues, "/case"), "modified", issues)

    def array(key: str) -> list:
        value = data.get(key, [] if key == "appraisals" else None)
        if value is None:
            issues.add(E_SCHEMA, f"field {key!r} must be an array", f"/{key}")
            return []
        if not isinstance(value, list):
            issues.add(E_SCHEMA, f"field {key!r} must be an array", f"/{key}")
            return []
        return value

    elements: dict[str, Element] = {}
    seen: set[str] = set()
    for index, item in enumerate(array("elements")):
        element = _element_in(item, index, issues)
        if element is None:
            continue
        if element.id in seen:
            issues.add(dsl.E_DUPLICATE_ID, f"duplicate id {element.id!r}", f"/elements/{index}/id")
            continue
        seen.add(element.id)
        elements[element.id] = element

    scratch = Case(
        id=case_id or "imported",
        title=title or "untitled",
        phase=phase if phase is not None else PhaseTag.PRELIMINARY,
        elements=elements,
        links={},
        challenges={},
        appraisals={},
        created=created,
        modified=modified,
    )

    incoming: list[tuple[int, Link]] = []
    for index, item in enumerate(array("links")):
        link = _link_in(item, index, issues)
        if link is None:
            continue
        if link.id in seen:
            issues.add(dsl.E_DUPLICATE_ID, f"duplicate id {link.id!r}", f"/links/{index}/id")
            continue
        seen.add(link.id)
        incoming.append((index, link))
    incoming.sort(key=lambda pair: (pair[1].kind == LinkKind.WARRANTS, pair[0]))
    for index, link in incoming:
        try:
            scratch = model.add_link(scratch, link)
        except model.CaseError as exc:
            issues.add(_link_issue_code(exc), str(exc), f"/links/{index}")

    challenges: dict[str, Challenge] = {}
    for index, item in enumerate(array("challenges")):
        challenge = _challenge_in(item, index, issues)
        if challenge is None:
            continue
        if challenge.id in seen:
            issues.add(
                dsl.E_DUPLICATE_ID, f"duplicate id {challenge.id!r}", f"/challenges/{index}/id"
            )
            continue
        if challenge.target not in scratch.elements and challenge.target not in scratch.links:
            issues.add(
                dsl.E_DANGLING,
                f"challenge {challenge.id!r} targets unknown id {challenge.target!r}",
                f"/challenges/{index}/target",
            )
            continue
        seen.add(challenge.id)
        challenges[challenge.id] = challenge

    appraisals: dict[str, AppraisalRecord] = {}
    for index, item in enumerate(array("appraisals")):
        record = _appraisal_in(item, index, issues)
        if record is None:
            continue
        element = scratch.elements.get(record.evidence_id)
        if element is None or element.kind != ElementKind.EVIDENCE:
            issues.add(
                dsl.E_DANGLING,
                f"appraisal names {record.evidence_id!r}, which is not an evidence element",
                f"/appraisals/{index}/evidenceId",
            )
            continue
        if record.evidence_id in appraisals:
            issues.add(
                dsl.E_DUPLICATE_ID,
                f"duplicate appraisal for {record.evidence_id!r}",
                f"/appraisals/{index}/evidenceId",
            )
            continue
        appraisals[record.evidence_id] = record

    if issues.items:
        return ImportResult(None, tuple(issues.items))
    return ImportResult(
        replace(scratch, challenges=challenges, appraisals=appraisals), ()
    )


def _link_issue_code(exc: model.CaseError) -> str:
    if isinstance(exc, model.DanglingEndpoint):
        return dsl.E_DANGLING
    if isinstance(exc, model.CycleIntroduced):
        return dsl.E_CYCLE
    if isinstance(exc, model.DuplicateId):
        return dsl.E_DUPLICATE_ID
    return dsl.E_KIND


def from_interchange_strict(text: str | bytes) -> Case:
    result = from_interchange(text)
    if result.case is None:
        raise InterchangeError(result.issues)
    return result.case
