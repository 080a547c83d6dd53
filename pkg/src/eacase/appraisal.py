"""Evidence appraisal and the sufficiency calculus.

Each evidence artefact can carry one appraisal: three categorical criteria
(relevance, materiality, admissibility) and a numeric probative value in
[0, 1]. A negative verdict on any criterion gates the probative value to
zero; evidence can be on-topic and significant yet still inadmissible.

Sufficiency aggregates probative values up the argument: alternatives
combine by maximum (any one good line of evidence will do), sibling
obligations combine by minimum (the weakest conjunct bounds the whole),
and anything resting on unappraised evidence stays unassessed. A claim
whose status is Defeated contributes zero regardless of appraisals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from datetime import date as date_type

from .model import Case, CaseError, ElementKind, LinkKind
from .validation import Status, compute_status

logger = logging.getLogger(__name__)

SUFFICIENT = "sufficient"
INSUFFICIENT = "insufficient"
UNASSESSED = "unassessed"

DEFAULT_THRESHOLD = 0.5


class ValueOutOfRange(CaseError):
    def __init__(self, value: float):
        super().__init__(f"probative value must be within [0, 1], got {value}")
        self.value = value


class NotEvidence(CaseError):
    def __init__(self, element_id: str):
        super().__init__(f"element {element_id!r} is not an Evidence element")
        self.element_id = element_id


class NoGoal(CaseError):
    def __init__(self, case_id: str):
        super().__init__(f"case {case_id!r} has no goal to assess sufficiency for")
        self.case_id = case_id


@dataclass(frozen=True, slots=True)
class Criterion:
    """One appraisal criterion: a positive/negative verdict plus a note."""

    verdict: bool
    note: str | None = None


@dataclass(frozen=True, slots=True)
class AppraisalRecord:
    """A reviewer's appraisal of one evidence artefact."""

    evidence_id: str
    relevance: Criterion
    materiality: Criterion
    admissibility: Criterion
    probative_value: float
    assessor: str
    date: date_type

    def effective_value(self) -> float:
        """Probative value gated by the triad: any negative verdict zeroes it."""
        if not (self.relevance.verdict and self.materiality.verdict and self.admissibility.verdict):
            return 0.0
        return self.probative_value


def record_appraisal(case: Case, record: AppraisalRecord) -> Case:
    """Store an appraisal on the case; re-recording replaces (latest wins)."""
    element = case.element(record.evidence_id)
    if element.kind != ElementKind.EVIDENCE:
        raise NotEvidence(record.evidence_id)
    if not 0.0 <= record.probative_value <= 1.0:
        raise ValueOutOfRange(record.probative_value)
    if not record.assessor.strip():
        raise CaseError("appraisal assessor must not be empty")
    previous = case.appraisals.get(record.evidence_id)
    if previous is not None:
        logger.info(
            "appraisal of %s by %s (%s) superseded by %s (%s)",
            record.evidence_id,
            previous.assessor,
            previous.date.isoformat(),
            record.assessor,
            record.date.isoformat(),
        )
    return replace(case, appraisals={**case.appraisals, record.evidence_id: record})


@dataclass(frozen=True, slots=True)
class ClaimSufficiency:
    value: float | None
    verdict: str  # sufficient | insufficient | unassessed


@dataclass(frozen=True)
class SufficiencyReport:
    """Three-level sufficiency: per evidence, per claim, whole case."""

    threshold: float
    case_value: float | None
    case_verdict: str
    per_claim: dict[str, ClaimSufficiency] = field(default_factory=dict)
    per_evidence: dict[str, float | None] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "caseValue": self.case_value,
            "caseVerdict": self.case_verdict,
            "perClaim": {
                claim_id: {"value": cs.value, "verdict": cs.verdict}
                for claim_id, cs in sorted(self.per_claim.items())
            },
            "perEvidence": dict(sorted(self.per_evidence.items())),
        }


_ALTERNATIVE_KINDS = frozenset(
    {ElementKind.EVIDENTIAL_CLAIM, ElementKind.EVIDENCE, ElementKind.ASSUMPTION}
)


def _node_value(
    case: Case,
    element_id: str,
    statuses: dict[str, Status],
    memo: dict[str, tuple[float | None, bool]],
) -> tuple[float | None, bool]:
    """(value, fully-assessed) for one element, weakest-link aggregated."""
    if element_id in memo:
        return memo[element_id]
    element = case.elements[element_id]

    if statuses.get(element_id) == Status.DEFEATED:
        result: tuple[float | None, bool] = (0.0, True)
        memo[element_id] = result
        return result

    if element.kind == ElementKind.EVIDENCE:
        record = case.appraisals.get(element_id)
        result = (None, False) if record is None else (record.effective_value(), True)
        memo[element_id] = result
        return result
    if element.kind == ElementKind.ASSUMPTION:
        # Self-evident or already well established: granted in full.
        memo[element_id] = (1.0, True)
        return (1.0, True)
    if element.kind in (ElementKind.WARRANT, ElementKind.CONTEXT):
        memo[element_id] = (None, True)
        return (None, True)

    alternatives: list[tuple[float | None, bool]] = []
    conjuncts: list[tuple[float | None, bool]] = []
    for link in case.links_into(element_id, LinkKind.SUPPORTS, LinkKind.EVIDENCES):
        child = case.elements.get(link.source)
        if child is None:
            continue
        part = _node_value(case, link.source, statuses, memo)
        if child.kind in _ALTERNATIVE_KINDS:
            alternatives.append(part)
        else:
            conjuncts.append(part)

    if not alternatives and not conjuncts:
        memo[element_id] = (None, False)
        return (None, False)

    parts: list[tuple[float | None, bool]] = []
    if alternatives:
        assessed_values = [v for v, _ in alternatives if v is not None]
        alt_value = max(assessed_values) if assessed_values else None
        alt_assessed = all(done for _, done in alternatives)
        parts.append((alt_value, alt_assessed))
    if conjuncts:
        assessed_values = [v for v, _ in conjuncts if v is not None]
        conj_value = min(assessed_values) if assessed_values else None
        conj_assessed = all(done for _, done in conjuncts)
        parts.append((conj_value, conj_assessed))

    known = [v for v, _ in parts if v is not None]
    value = min(known) if known else None
    assessed = all(done for _, done in parts) and value is not None
    memo[element_id] = (value, assessed)
    return (value, assessed)


def _verdict(value: float | None, assessed: bool, threshold: float) -> str:
    if not assessed or value is None:
        return UNASSESSED
    return SUFFICIENT if value >= threshold else INSUFFICIENT


def sufficiency(case: Case, threshold: float = DEFAULT_THRESHOLD) -> SufficiencyReport:
    """Assess evidential sufficiency against a probative-value threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueOutOfRange(threshold)
    roots = case.root_goals()
    if not case.goals():
        raise NoGoal(case.id)

    statuses = compute_status(case)
    memo: dict[str, tuple[float | None, bool]] = {}

    per_evidence: dict[str, float | None] = {}
    for evidence in case.elements_of_kind(ElementKind.EVIDENCE):
        record = case.appraisals.get(evidence.id)
        if statuses.get(evidence.id) == Status.DEFEATED:
            per_evidence[evidence.id] = 0.0
        else:
            per_evidence[evidence.id] = None if record is None else record.effective_value()

    per_claim: dict[str, ClaimSufficiency] = {}
    for element in sorted(case.elements.values(), key=lambda e: e.id):
        if element.kind not in (
            ElementKind.GOAL,
            ElementKind.PROPERTY_CLAIM,
            ElementKind.EVIDENTIAL_CLAIM,
        ):
            continue
        value, assessed = _node_value(case, element.id, statuses, memo)
        per_claim[element.id] = ClaimSufficiency(
            value=value, verdict=_verdict(value, assessed, threshold)
        )

    # Fall back to all goals if every goal also supports something (no root).
    tops = roots if roots else case.goals()
    top_parts = [_node_value(case, goal.id, statuses, memo) for goal in tops]
    known = [v for v, _ in top_parts if v is not None]
    case_value = min(known) if known else None
    case_assessed = bool(top_parts) and all(done for _, done in top_parts) and case_value is not None
    return SufficiencyReport(
        threshold=threshold,
        case_value=case_value,
        case_verdict=_verdict(case_value, case_assessed, threshold),
        per_claim=per_claim,
        per_evidence=per_evidence,
    )
