"""Toolkit for authoring, validating, appraising, and reviewing ethical
assurance cases: structured arguments that a system advances an ethical
goal, built from claims, evidence, warrants, and open challenge."""

from .appraisal import (
    AppraisalRecord,
    Criterion,
    SufficiencyReport,
    record_appraisal,
    sufficiency,
)
from .dsl import Diagnostic, ParseFailure, ParseResult, parse, parse_strict, serialize
from .interchange import (
    ImportResult,
    InterchangeError,
    from_interchange,
    from_interchange_strict,
    to_interchange,
)
from .lifecycle import (
    ChangeSet,
    CoverageReport,
    Snapshot,
    case_digest,
    coverage,
    diff,
    parse_snapshot,
    snapshot,
)
from .model import (
    AudienceTier,
    Case,
    CaseError,
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
    add_element,
    add_link,
    attach_challenge,
    goal_from_template,
    new_case,
    resolve_challenge,
)
from .patterns import (
    Advisory,
    Fragment,
    Pattern,
    check_applicability,
    derive,
    derive_with_bindings,
    instantiate,
    merge,
    parse_pattern,
    parse_pattern_strict,
    serialize_pattern,
)
from .render import TierFilter, restrict, to_dot, to_report, visible_elements
from .service import CaseStore, ReviewService
from .stages import LifecycleStage, MacroStage, parse_stage, stage_ids
from .validation import (
    Status,
    ValidationReport,
    compute_status,
    explain_status,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AppraisalRecord",
    "Criterion",
    "SufficiencyReport",
    "record_appraisal",
    "sufficiency",
    "Diagnostic",
    "ParseFailure",
    "ParseResult",
    "parse",
    "parse_strict",
    "serialize",
    "ImportResult",
    "InterchangeError",
    "from_interchange",
    "from_interchange_strict",
    "to_interchange",
    "ChangeSet",
    "CoverageReport",
    "Snapshot",
    "case_digest",
    "coverage",
    "diff",
    "parse_snapshot",
    "snapshot",
    "AudienceTier",
    "Case",
    "CaseError",
    "Challenge",
    "ChallengeState",
    "Element",
    "ElementKind",
    "GoalSlots",
    "Link",
    "LinkKind",
    "PhaseTag",
    "Qualifier",
    "QualifierLabel",
    "Scope",
    "add_element",
    "add_link",
    "attach_challenge",
    "goal_from_template",
    "new_case",
    "resolve_challenge",
    "Advisory",
    "Fragment",
    "Pattern",
    "check_applicability",
    "derive",
    "derive_with_bindings",
    "instantiate",
    "merge",
    "parse_pattern",
    "parse_pattern_strict",
    "serialize_pattern",
    "TierFilter",
    "restrict",
    "to_dot",
    "to_report",
    "visible_elements",
    "CaseStore",
    "ReviewService",
    "LifecycleStage",
    "MacroStage",
    "parse_stage",
    "stage_ids",
    "Status",
    "ValidationReport",
    "compute_status",
    "explain_status",
    "validate",
]
