"""Lifecycle coverage, phased snapshots, and snapshot diffs.

Coverage counts property claims per lifecycle stage so reviewers can see
which stages the argument touches and which it is silent about. Snapshots
freeze the canonical text of a case together with a content digest; diffs
between snapshots report structural change, status movement, and the
finding churn caused by re-gating severities when the phase advances.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from . import dsl
from .model import Case, CaseError, Challenge, Element, ElementKind, Link
from .stages import LifecycleStage
from .validation import compute_status, validate

_LABEL_RE = re.compile(r"^[A-Za-z0-9._-]+$")
_HEADER_RE = re.compile(
    r"^eac-snapshot (?P<label>[A-Za-z0-9._-]+) (?P<taken>\S+) sha256:(?P<digest>[0-9a-f]{64})$"
)

DIGEST_ALGORITHM = "sha256"


class InvalidLabel(CaseError):
    def __init__(self, label: str):
        super().__init__(
            f"snapshot label {label!r} must contain only letters, digits, dot, dash, underscore"
        )
        self.label = label


class SnapshotCorrupt(CaseError):
    """The snapshot text does not match its recorded digest or shape."""

    def __init__(self, label: str, reason: str):
        super().__init__(f"snapshot {label!r} is corrupt: {reason}")
        self.label = label
        self.reason = reason


def case_digest(case: Case) -> str:
    """Hex digest of the canonical serialization; stable across reorderings."""
    return hashlib.sha256(dsl.serialize(case).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CoverageReport:
    """How many tagged property claims each lifecycle stage carries."""

    counts: dict[LifecycleStage, int]
    untagged: tuple[str, ...]

    @property
    def covered(self) -> tuple[LifecycleStage, ...]:
        return tuple(s for s in LifecycleStage if self.counts.get(s, 0) > 0)

    @property
    def uncovered(self) -> tuple[LifecycleStage, ...]:
        return tuple(s for s in LifecycleStage if self.counts.get(s, 0) == 0)

    @property
    def covered_count(self) -> int:
        return len(self.covered)

    @property
    def total_stages(self) -> int:
        return len(LifecycleStage)

    def to_json_dict(self) -> dict:
        return {
            "counts": {stage.value: self.counts.get(stage, 0) for stage in LifecycleStage},
            "covered": [stage.value for stage in self.covered],
            "uncovered": [stage.value for stage in self.uncovered],
            "untagged": list(self.untagged),
        }


def coverage(case: Case) -> CoverageReport:
    counts: dict[LifecycleStage, int] = {stage: 0 for stage in LifecycleStage}
    untagged: list[str] = []
    for element in case.elements_of_kind(ElementKind.PROPERTY_CLAIM):
        if element.stage is None:
            untagged.append(element.id)
        else:
            counts[element.stage] += 1
    return CoverageReport(counts=counts, untagged=tuple(sorted(untagged)))


@dataclass(frozen=True)
class Snapshot:
    """A labelled, digest-sealed freeze of a case's canonical text."""

    label: str
    taken_at: datetime
    frozen: str
    digest: str

    def header(self) -> str:
        taken = self.taken_at.strftime("%Y-%m-%dT%H:%M:%SZ")
        return f"eac-snapshot {self.label} {taken} sha256:{self.digest}"

    def to_text(self) -> str:
        return self.header() + "\n" + self.frozen

    def case(self) -> Case:
        """Parse the frozen text back into a case."""
        return dsl.parse_strict(self.frozen)


def snapshot(case: Case, label: str, taken_at: datetime | None = None) -> Snapshot:
    if not _LABEL_RE.match(label):
        raise InvalidLabel(label)
    if taken_at is None:
        taken_at = datetime.now(timezone.utc)
    frozen = dsl.serialize(case)
    return Snapshot(
        label=label,
        taken_at=taken_at,
        frozen=frozen,
        digest=hashlib.sha256(frozen.encode("utf-8")).hexdigest(),
    )


def parse_snapshot(text: str) -> Snapshot:
    """Load a snapshot from its text form, verifying the digest seal."""
    head, sep, frozen = text.partition("\n")
    match = _HEADER_RE.match(head)
    if not match or not sep:
        raise SnapshotCorrupt("<unknown>", "missing or malformed snapshot header")
    label = match.group("label")
    try:
        taken_at = datetime.strptime(match.group("taken"), "%Y-%m-%dT%H:%M:%SZ").replace(
            tzinfo=timezone.utc
        )
    except ValueError as exc:
        raise SnapshotCorrupt(label, f"bad timestamp: {match.group('taken')}") from exc
    recomputed = hashlib.sha256(frozen.encode("utf-8")).hexdigest()
    if recomputed != match.group("digest"):
        raise SnapshotCorrupt(label, "digest mismatch, content was altered after sealing")
    return Snapshot(label=label, taken_at=taken_at, frozen=frozen, digest=recomputed)


@dataclass(frozen=True, slots=True)
class FieldChange:
    field: str
    before: str | None
    after: str | None


@dataclass(frozen=True, slots=True)
class ModifiedEntry:
    id: str
    fields: tuple[FieldChange, ...]


@dataclass(frozen=True)
class ChangeSet:
    """Structured difference between two snapshots of a case."""

    from_label: str
    to_label: str
    added_elements: tuple[str, ...] = ()
    removed_elements: tuple[str, ...] = ()
    modified_elements: tuple[ModifiedEntry, ...] = ()
    added_links: tuple[str, ...] = ()
    removed_links: tuple[str, ...] = ()
    modified_links: tuple[ModifiedEntry, ...] = ()
    added_challenges: tuple[str, ...] = ()
    removed_challenges: tuple[str, ...] = ()
    modified_challenges: tuple[ModifiedEntry, ...] = ()
    phase_change: tuple[str, str] | None = None
    title_change: tuple[str, str] | None = None
    status_deltas: dict[str, tuple[str, str]] = field(default_factory=dict)
    finding_additions: tuple[str, ...] = ()
    finding_removals: tuple[str, ...] = ()

    @property
    def empty(self) -> bool:
        return not (
            self.added_elements
            or self.removed_elements
            or self.modified_elements
            or self.added_links
            or self.removed_links
            or self.modified_links
            or self.added_challenges
            or self.removed_challenges
            or self.modified_challenges
            or self.phase_change
            or self.title_change
            or self.status_deltas
            or self.finding_additions
            or self.finding_removals
        )

    def to_json_dict(self) -> dict:
        def entries(items: tuple[ModifiedEntry, ...]) -> list[dict]:
            return [
                {
                    "id": entry.id,
                    "fields": [
                        {"field": c.field, "before": c.before, "after": c.after}
                        for c in entry.fields
                    ],
                }
                for entry in items
            ]

        return {
            "from": self.from_label,
            "to": self.to_label,
            "empty": self.empty,
            "elements": {
                "added": list(self.added_elements),
                "removed": list(self.removed_elements),
                "modified": entries(self.modified_elements),
            },
            "links": {
                "added": list(self.added_links),
                "removed": list(self.removed_links),
                "modified": entries(self.modified_links),
            },
            "challenges": {
                "added": list(self.added_challenges),
                "removed": list(self.removed_challenges),
                "modified": entries(self.modified_challenges),
            },
            "phaseChange": list(self.phase_change) if self.phase_change else None,
            "titleChange": list(self.title_change) if self.title_change else None,
            "statusDeltas": {
                key: {"before": before, "after": after}
                for key, (before, after) in sorted(self.status_deltas.items())
            },
            "findings": {
                "added": list(self.finding_additions),
                "removed": list(self.finding_removals),
            },
        }


def _element_fields(element: Element) -> dict[str, str | None]:
    slots = element.slots.as_dict() if element.slots else None
    return {
        "kind": element.kind.value,
        "text": element.text,
        "scope": element.scope.value if element.scope else None,
        "stage": element.stage.value if element.stage else None,
        "slots": str(slots) if slots else None,
        "locator": element.locator,
        "tier": element.tier.label,
    }


def _link_fields(link: Link) -> dict[str, str | None]:
    qualifier = None
    if link.qualifier is not None:
        qualifier = link.qualifier.label.value
        if link.qualifier.note:
            qualifier += f" ({link.qualifier.note})"
    return {
        "kind": link.kind.value,
        "source": link.source,
        "target": link.target,
        "qualifier": qualifier,
    }


def _challenge_fields(challenge: Challenge) -> dict[str, str | None]:
    return {
        "target": challenge.target,
        "author": challenge.author,
        "text": challenge.text,
        "state": challenge.state.value,
        "resolutionNote": challenge.resolution_note,
    }


def _diff_table(
    before: dict[str, dict[str, str | None]],
    after: dict[str, dict[str, str | None]],
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[ModifiedEntry, ...]]:
    added = tuple(sorted(set(after) - set(before)))
    removed = tuple(sorted(set(before) - set(after)))
    modified: list[ModifiedEntry] = []
    for key in sorted(set(before) & set(after)):
        changes = tuple(
            FieldChange(field=name, before=before[key][name], after=after[key][name])
            for name in before[key]
            if before[key][name] != after[key][name]
        )
        if changes:
            modified.append(ModifiedEntry(id=key, fields=changes))
    return added, removed, tuple(modified)


def _finding_keys(case: Case) -> set[str]:
    report = validate(case)
    return {f"{finding.code} {finding.target_id}" for finding in report.findings}


def diff(before: Snapshot, after: Snapshot) -> ChangeSet:
    """Structured change between two snapshots; empty iff texts are identical."""
    try:
        case_a = dsl.parse_strict(before.frozen)
    except dsl.ParseFailure as exc:
        raise SnapshotCorrupt(before.label, "frozen case does not parse") from exc
    try:
        case_b = dsl.parse_strict(after.frozen)
    except dsl.ParseFailure as exc:
        raise SnapshotCorrupt(after.label, "frozen case does not parse") from exc

    elements = _diff_table(
        {e.id: _element_fields(e) for e in case_a.elements.values()},
        {e.id: _element_fields(e) for e in case_b.elements.values()},
    )
    links = _diff_table(
        {l.id: _link_fields(l) for l in case_a.links.values()},
        {l.id: _link_fields(l) for l in case_b.links.values()},
    )
    challenges = _diff_table(
        {c.id: _challenge_fields(c) for c in case_a.challenges.values()},
        {c.id: _challenge_fields(c) for c in case_b.challenges.values()},
    )

    status_a = compute_status(case_a)
    status_b = compute_status(case_b)
    deltas: dict[str, tuple[str, str]] = {}
    for element_id in sorted(set(status_a) & set(status_b)):
        if status_a[element_id] != status_b[element_id]:
            deltas[element_id] = (status_a[element_id].label, status_b[element_id].label)

    findings_a = _finding_keys(case_a)
    findings_b = _finding_keys(case_b)

    return ChangeSet(
        from_label=before.label,
        to_label=after.label,
        added_elements=elements[0],
        removed_elements=elements[1],
        modified_elements=elements[2],
        added_links=links[0],
        removed_links=links[1],
        modified_links=links[2],
        added_challenges=challenges[0],
        removed_challenges=challenges[1],
        modified_challenges=challenges[2],
        phase_change=(
            (case_a.phase.label, case_b.phase.label) if case_a.phase != case_b.phase else None
        ),
        title_change=(case_a.title, case_b.title) if case_a.title != case_b.title else None,
        status_deltas=deltas,
        finding_additions=tuple(sorted(findings_b - findings_a)),
        finding_removals=tuple(sorted(findings_a - findings_b)),
    )
