"""Argument patterns: reusable case skeletons with typed slots (.eap files).

A pattern is a case fragment whose texts may contain ``{slot}`` placeholders.
Slots are typed so tooling knows what a binding means: ``system``,
``context`` and ``goal`` slots fill goal-template fields, ``stage`` slots
fill a claim's lifecycle stage, and ``free-text`` slots fill arbitrary
prose. Instantiating a pattern with bindings yields a fragment of fresh
elements and links ready to merge into a case; deriving a pattern from two
or more shape-identical cases generalises their differing texts into slots.

The .eap grammar reuses the case line syntax::

    pattern <id>
      intent "<text>"
      applicability "<text>"
      risk "<text>"            # zero or more
      slot <name> : <type>     # name quoted when it contains spaces
      <element lines as in case files; texts may contain {slots}>
      <link lines as in case files>

Advisories from ``check_applicability`` are informative only; patterns
never block instantiation on domain grounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum

from . import dsl, model
from .dsl import Diagnostic, SourceSpan
from .model import (
    Case,
    CaseError,
    Element,
    ElementKind,
    GoalSlots,
    Link,
    LinkKind,
)
from .stages import LifecycleStage, parse_stage

E_PATTERN_HEADER = "E-PATTERN-HEADER"
E_SLOT = "E-SLOT"
E_META = "E-META"

_SLOT_REF_RE = re.compile(r"\{([^{}]+)\}")


class SlotType(str, Enum):
    FREE_TEXT = "free-text"
    SYSTEM = "system"
    CONTEXT = "context"
    GOAL = "goal"
    STAGE = "stage"


class PatternError(CaseError):
    pass


class MissingBinding(PatternError):
    def __init__(self, missing: list[str]):
        super().__init__("missing bindings: " + ", ".join(sorted(missing)))
        self.missing = tuple(sorted(missing))


class UnknownSlot(PatternError):
    def __init__(self, name: str):
        super().__init__(f"pattern declares no slot named {name!r}")
        self.name = name


class BadBinding(PatternError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"binding for slot {name!r} rejected: {reason}")
        self.name = name
        self.reason = reason


class TooFewCases(PatternError):
    def __init__(self, count: int):
        super().__init__(f"pattern derivation needs at least two cases, got {count}")
        self.count = count


class DeriveFailure(PatternError):
    def __init__(self, reason: str):
        super().__init__(f"cases do not share a common shape: {reason}")
        self.reason = reason


@dataclass(frozen=True)
class Pattern:
    """A reusable argument skeleton with typed slots."""

    id: str
    intent: str
    applicability: str
    risks: tuple[str, ...]
    slot_types: dict[str, SlotType]
    elements: dict[str, Element]
    links: dict[str, Link]
    # Claims whose stage comes from a slot rather than the skeleton.
    stage_slots: dict[str, str]

    def slot_names(self) -> tuple[str, ...]:
        return tuple(self.slot_types)


@dataclass(frozen=True)
class Fragment:
    """Instantiated pattern content, ready to merge into a case."""

    elements: dict[str, Element]
    links: dict[str, Link]


@dataclass(frozen=True)
class Advisory:
    kind: str  # applicability | risk | stage-gap
    message: str


@dataclass(frozen=True)
class PatternParseResult:
    pattern: Pattern | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.pattern is not None

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")


def slot_references(
    elements: dict[str, Element], stage_slots: dict[str, str]
) -> dict[str, set[str]]:
    """Map slot name -> ids of elements that reference it."""
    refs: dict[str, set[str]] = {}

    def scan(text: str, element_id: str) -> None:
        for match in _SLOT_REF_RE.finditer(text):
            refs.setdefault(match.group(1), set()).add(element_id)

    for element in elements.values():
        if element.kind == ElementKind.GOAL and element.slots is not None:
            for value in element.slots.as_dict().values():
                scan(value, element.id)
        else:
            scan(element.text, element.id)
        if element.locator is not None:
            scan(element.locator, element.id)
    for element_id, name in stage_slots.items():
        refs.setdefault(name, set()).add(element_id)
    return refs


def parse_pattern(source: str, pattern_id: str | None = None) -> PatternParseResult:
    """Parse pattern text; diagnostics use the same shape as case parsing."""
    diagnostics: list[Diagnostic] = []
    header_id: str | None = None
    intent: str | None = None
    applicability: str | None = None
    risks: list[str] = []
    slot_types: dict[str, SlotType] = {}
    raw_elements: list[tuple[Element, SourceSpan]] = []
    raw_links: list[tuple[Link, SourceSpan]] = []
    stage_slots: dict[str, str] = {}

    def err(code: str, message: str, span: SourceSpan) -> None:
        diagnostics.append(Diagnostic("error", code, message, span))

    saw_header = False
    for line_no, raw in enumerate(source.splitlines(), start=1):
        try:
            tokens = dsl.scan_line(raw, line_no)
        except dsl.LineError as exc:
            diagnostics.append(exc.diagnostic)
            continue
        if not tokens:
            continue
        cursor = dsl.Cursor(tokens, line_no, len(raw))
        head = tokens[0]
        try:
            if not saw_header:
                if head.kind == "word" and head.value == "pattern":
                    cursor.take()
                    header_id = cursor.expect_id().value
                    cursor.expect_end()
                    saw_header = True
                    continue
                err(
                    E_PATTERN_HEADER,
                    "pattern files must start with: pattern <id>",
                    SourceSpan(line_no, head.col),
                )
                saw_header = True  # report once, keep scanning
                continue
            keyword = cursor.expect_word("keyword", dsl.E_KEYWORD).value
            span = SourceSpan(line_no, head.col)
            if keyword == "pattern":
                err(E_PATTERN_HEADER, "duplicate pattern header", span)
                continue
            if keyword in ("intent", "applicability"):
                token = cursor.expect_string(f"{keyword} text")
                cursor.expect_end()
                if keyword == "intent":
                    intent = token.value
                else:
                    applicability = token.value
                continue
            if keyword == "risk":
                token = cursor.expect_string("risk text")
                cursor.expect_end()
                risks.append(token.value)
                continue
            if keyword == "slot":
                name_token = cursor.take()
                if name_token is None or not name_token.value.strip():
                    raise cursor.fail(E_SLOT, "expected a slot name")
                name = name_token.value
                colon = cursor.expect_word("':'")
                if colon.value != ":":
                    raise cursor.fail(
                        E_SLOT, "expected ':' between slot name and type",
                        SourceSpan(colon.line, colon.col),
                    )
                type_token = cursor.expect_word("slot type", E_SLOT)
                try:
                    slot_type = SlotType(type_token.value)
                except ValueError:
                    raise cursor.fail(
                        E_SLOT,
                        f"unknown slot type {type_token.value!r}",
                        SourceSpan(type_token.line, type_token.col),
                    )
                cursor.expect_end()
                if name in slot_types:
                    err(E_SLOT, f"duplicate slot {name!r}", span)
                    continue
                slot_types[name] = slot_type
                continue
            if keyword in dsl.ELEMENT_KEYWORDS:
                stage_out: list[str] = []
                element = dsl.parse_element_line(
                    keyword, cursor, allow_goal_slot_braces=True, stage_slot_out=stage_out
                )
                raw_elements.append((element, span))
                if stage_out:
                    stage_slots[element.id] = stage_out[0]
                continue
            if keyword == "link":
                raw_links.append((dsl.parse_link_line(cursor), span))
                continue
            raise cursor.fail(
                dsl.E_KEYWORD,
                f"unknown keyword {keyword!r} in a pattern file",
                SourceSpan(head.line, head.col),
            )
        except dsl.LineError as exc:
            diagnostics.append(exc.diagnostic)

    if not saw_header or header_id is None:
        if not any(d.code == E_PATTERN_HEADER for d in diagnostics):
            err(E_PATTERN_HEADER, "pattern files must start with: pattern <id>", SourceSpan(1, 1))
    if intent is None:
        err(E_META, "pattern needs an intent line", SourceSpan(1, 1))
    if applicability is None:
        err(E_META, "pattern needs an applicability line", SourceSpan(1, 1))

    elements: dict[str, Element] = {}
    links: dict[str, Link] = {}
    seen: set[str] = set()
    for element, span in raw_elements:
        try:
            if element.id in seen:
                raise model.DuplicateId(element.id)
            model.check_element_invariants(
                element, require_goal_slots=False, allow_slot_braces=True
            )
        except model.CaseError as exc:
            code = dsl.E_DUPLICATE_ID if isinstance(exc, model.DuplicateId) else dsl.E_KIND
            err(code, str(exc), span)
            continue
        seen.add(element.id)
        elements[element.id] = element
    scratch = model.Case(
        id=pattern_id or header_id or "pattern",
        title="pattern skeleton",
        phase=model.PhaseTag.PRELIMINARY,
        elements=elements,
        links={},
        challenges={},
        appraisals={},
    )
    ordered = sorted(raw_links, key=lambda pair: pair[0].kind == LinkKind.WARRANTS)
    for link, span in ordered:
        if link.id in seen:
            err(dsl.E_DUPLICATE_ID, f"duplicate id {link.id!r}", span)
            continue
        try:
            scratch = model.add_link(scratch, link)
        except model.CaseError as exc:
            err(_link_code(exc), str(exc), span)
            continue
        seen.add(link.id)
    links = dict(scratch.links)

    refs = slot_references(elements, stage_slots)
    for name in sorted(refs):
        if name not in slot_types:
            for element_id in sorted(refs[name]):
                err(
                    E_SLOT,
                    f"element {element_id!r} references undeclared slot {{{name}}}",
                    SourceSpan(1, 1),
                )
    for name in slot_types:
        if name not in refs:
            diagnostics.append(
                Diagnostic(
                    "warning",
                    E_SLOT,
                    f"slot {name!r} is declared but never referenced",
                    SourceSpan(1, 1),
                )
            )

    if any(d.severity == "error" for d in diagnostics):
        return PatternParseResult(None, tuple(diagnostics))
    assert header_id is not None and intent is not None and applicability is not None
    pattern = Pattern(
        id=header_id,
        intent=intent,
        applicability=applicability,
        risks=tuple(risks),
        slot_types=slot_types,
        elements=elements,
        links=links,
        stage_slots=stage_slots,
    )
    return PatternParseResult(pattern, tuple(diagnostics))


def _link_code(exc: model.CaseError) -> str:
    if isinstance(exc, model.DanglingEndpoint):
        return dsl.E_DANGLING
    if isinstance(exc, model.CycleIntroduced):
        return dsl.E_CYCLE
    if isinstance(exc, model.DuplicateId):
        return dsl.E_DUPLICATE_ID
    return dsl.E_KIND


class PatternParseFailure(PatternError):
    def __init__(self, diagnostics: tuple[Diagnostic, ...]):
        super().__init__("; ".join(str(d) for d in diagnostics if d.severity == "error"))
        self.diagnostics = diagnostics


def parse_pattern_strict(source: str, pattern_id: str | None = None) -> Pattern:
    result = parse_pattern(source, pattern_id)
    if result.pattern is None:
        raise PatternParseFailure(result.errors)
    return result.pattern


def _slot_name_token(name: str) -> str:
    return name if model.valid_id(name) else dsl.quote_string(name)


def serialize_pattern(pattern: Pattern) -> str:
    """Canonical pattern text: metadata, slots, elements, links."""
    lines = [f"pattern {pattern.id}"]
    lines.append(f"  intent {dsl.quote_string(pattern.intent)}")
    lines.append(f"  applicability {dsl.quote_string(pattern.applicability)}")
    for risk in pattern.risks:
        lines.append(f"  risk {dsl.quote_string(risk)}")
    for name in sorted(pattern.slot_types):
        lines.append(f"  slot {_slot_name_token(name)} : {pattern.slot_types[name].value}")
    for element in sorted(pattern.elements.values(), key=lambda e: e.id):
        line = dsl.element_line(element)
        slot = pattern.stage_slots.get(element.id)
        if slot is not None:
            # Splice the deferred stage into the claim line after the scope.
            line = re.sub(
                r"^(claim \S+ scope \S+)", rf"\1 stage {{{slot}}}", line, count=1
            )
        lines.append("  " + line)
    for link in sorted(pattern.links.values(), key=lambda l: l.id):
        lines.append("  " + dsl.link_line(link))
    return "\n".join(lines) + "\n"


def _substitute(text: str, bindings: dict[str, str]) -> str:
    def repl(match: re.Match[str]) -> str:
        return bindings[match.group(1)]

    return _SLOT_REF_RE.sub(repl, text)


def instantiate(pattern: Pattern, bindings: dict[str, str], prefix: str = "") -> Fragment:
    """Fill every slot and return fresh, invariant-checked content.

    Ids are prefixed so several instantiations can coexist in one case.
    """
    unknown = set(bindings) - set(pattern.slot_types)
    if unknown:
        raise UnknownSlot(sorted(unknown)[0])
    missing = set(pattern.slot_types) - set(bindings)
    if missing:
        raise MissingBinding(sorted(missing))
    if prefix and not model.valid_id(prefix):
        raise model.InvalidId(prefix)
    stages: dict[str, LifecycleStage] = {}
    for name, value in bindings.items():
        if not value.strip():
            raise BadBinding(name, "binding must not be empty")
        if "{" in value or "}" in value:
            raise BadBinding(name, "binding must not contain braces")
        if pattern.slot_types[name] == SlotType.STAGE:
            stage = parse_stage(value)
            if stage is None:
                raise BadBinding(name, f"{value!r} is not a lifecycle stage")
            stages[name] = stage

    scratch = model.new_case(
        pattern.id, f"instantiation of {pattern.id}", model.PhaseTag.PRELIMINARY
    )
    for element in sorted(pattern.elements.values(), key=lambda e: e.id):
        if element.kind == ElementKind.GOAL and element.slots is not None:
            slots = GoalSlots(
                system=_substitute(element.slots.system, bindings),
                context=_substitute(element.slots.context, bindings),
                goal=_substitute(element.slots.goal, bindings),
            )
            new = replace(
                element,
                id=prefix + element.id,
                slots=slots,
                text=model.render_goal_text(slots),
            )
        else:
            new = replace(
                element,
                id=prefix + element.id,
                text=_substitute(element.text, bindings),
                locator=(
                    _substitute(element.locator, bindings)
                    if element.locator is not None
                    else None
                ),
            )
        slot = pattern.stage_slots.get(element.id)
        if slot is not None:
            new = replace(new, stage=stages[slot])
        scratch = model.add_element(scratch, new)
    for link in sorted(
        pattern.links.values(), key=lambda l: (l.kind == LinkKind.WARRANTS, l.id)
    ):
        scratch = model.add_link(
            scratch,
            replace(
                link,
                id=prefix + link.id,
                source=prefix + link.source,
                target=prefix + link.target,
            ),
        )
    return Fragment(elements=dict(scratch.elements), links=dict(scratch.links))


def merge(case: Case, fragment: Fragment) -> Case:
    """Fold fragment content into a case, re-checking every invariant."""
    for element in sorted(fragment.elements.values(), key=lambda e: e.id):
        case = model.add_element(case, element)
    for link in sorted(
        fragment.links.values(), key=lambda l: (l.kind == LinkKind.WARRANTS, l.id)
    ):
        case = model.add_link(case, link)
    return case


def check_applicability(pattern: Pattern, case: Case) -> tuple[Advisory, ...]:
    """Non-blocking advisories for applying this pattern to this case."""
    advisories = [Advisory("applicability", pattern.applicability)]
    advisories.extend(Advisory("risk", risk) for risk in pattern.risks)
    case_stages = {
        element.stage
        for element in case.elements_of_kind(ElementKind.PROPERTY_CLAIM)
        if element.stage is not None
    }
    pattern_stages = {
        element.stage
        for element in pattern.elements.values()
        if element.kind == ElementKind.PROPERTY_CLAIM and element.stage is not None
    }
    for stage in sorted(pattern_stages - case_stages, key=lambda s: s.value):
        advisories.append(
            Advisory(
                "stage-gap",
                f"pattern expects a claim at stage {stage.value}, "
                f"which the case does not yet cover",
            )
        )
    return tuple(advisories)


def derive(cases: list[Case]) -> Pattern:
    pattern, _ = derive_with_bindings(cases)
    return pattern


def derive_with_bindings(cases: list[Case]) -> tuple[Pattern, list[dict[str, str]]]:
    """Anti-unify shape-identical cases into a pattern plus read-back bindings.

    Cases must have the same element and link shape: one root goal each,
    matching kinds, scopes, tiers and qualifiers position by position when
    children are ordered by (link kind, child kind, child id). Differing
    texts become slots; the first case donates the skeleton ids. The
    returned bindings, applied back, reproduce each case's texts.
    """
    cases = list(cases)
    if len(cases) < 2:
        raise TooFewCases(len(cases))
    first = cases[0]
    for other in cases[1:]:
        if len(other.elements) != len(first.elements):
            raise DeriveFailure(
                f"element counts differ: {first.id} has {len(first.elements)}, "
                f"{other.id} has {len(other.elements)}"
            )
        if len(other.links) != len(first.links):
            raise DeriveFailure(
                f"link counts differ: {first.id} has {len(first.links)}, "
                f"{other.id} has {len(other.links)}"
            )
    roots: list[Element] = []
    for case in cases:
        case_roots = case.root_goals()
        if len(case_roots) != 1:
            raise DeriveFailure(
                f"case {case.id} needs exactly one root goal, found {len(case_roots)}"
            )
        roots.append(case_roots[0])

    slot_types: dict[str, SlotType] = {}
    slot_values: dict[str, tuple[str, ...]] = {}
    reuse: dict[tuple[SlotType, tuple[str, ...]], str] = {}
    counter = [0]

    def slot_for(slot_type: SlotType, values: tuple[str, ...]) -> str:
        key = (slot_type, values)
        name = reuse.get(key)
        if name is None:
            counter[0] += 1
            name = f"s{counter[0]}"
            reuse[key] = name
            slot_types[name] = slot_type
            slot_values[name] = values
        return name

    def generalize(values: tuple[str, ...], slot_type: SlotType, where: str) -> str:
        if len(set(values)) == 1:
            literal = values[0]
            if slot_type == SlotType.FREE_TEXT and _SLOT_REF_RE.search(literal):
                raise DeriveFailure(
                    f"{where}: shared text contains braces and cannot be kept literal"
                )
            return literal
        return "{" + slot_for(slot_type, values) + "}"

    skeleton_elements: dict[str, Element] = {}
    skeleton_links: dict[str, Link] = {}
    stage_slots: dict[str, str] = {}
    visited: dict[tuple[str, ...], str] = {}

    def visit(nodes: tuple[Element, ...]) -> str:
        key = tuple(node.id for node in nodes)
        if key in visited:
            return visited[key]
        base = nodes[0]
        where = "elements " + "/".join(key)
        kinds = {node.kind for node in nodes}
        if len(kinds) != 1:
            raise DeriveFailure(f"{where}: kinds differ")
        if len({node.tier for node in nodes}) != 1:
            raise DeriveFailure(f"{where}: audience tiers differ")
        visited[key] = base.id

        if base.kind == ElementKind.GOAL:
            slotted = [node.slots is not None for node in nodes]
            if any(slotted) and not all(slotted):
                raise DeriveFailure(f"{where}: some goals have slots, some do not")
            if all(slotted):
                slots = GoalSlots(
                    system=generalize(
                        tuple(n.slots.system for n in nodes), SlotType.SYSTEM, where
                    ),
                    context=generalize(
                        tuple(n.slots.context for n in nodes), SlotType.CONTEXT, where
                    ),
                    goal=generalize(
                        tuple(n.slots.goal for n in nodes), SlotType.GOAL, where
                    ),
                )
                element = replace(base, slots=slots, text=model.render_goal_text(slots))
            else:
                element = replace(
                    base,
                    text=generalize(
                        tuple(n.text for n in nodes), SlotType.FREE_TEXT, where
                    ),
                )
        elif base.kind == ElementKind.PROPERTY_CLAIM:
            if len({node.scope for node in nodes}) != 1:
                raise DeriveFailure(f"{where}: claim scopes differ")
            stages = tuple(node.stage for node in nodes)
            text = generalize(tuple(n.text for n in nodes), SlotType.FREE_TEXT, where)
            if len(set(stages)) == 1:
                element = replace(base, text=text)
            else:
                if any(stage is None for stage in stages):
                    raise DeriveFailure(f"{where}: stage set on some claims only")
                name = slot_for(
                    SlotType.STAGE, tuple(stage.value for stage in stages if stage)
                )
                stage_slots[base.id] = name
                element = replace(base, text=text, stage=None)
        elif base.kind == ElementKind.EVIDENCE:
            element = replace(
                base,
                text=generalize(tuple(n.text for n in nodes), SlotType.FREE_TEXT, where),
                locator=generalize(
                    tuple(n.locator or "" for n in nodes), SlotType.FREE_TEXT, where
                ),
            )
        else:
            element = replace(
                base,
                text=generalize(tuple(n.text for n in nodes), SlotType.FREE_TEXT, where),
            )
        skeleton_elements[base.id] = element

        def in_links(case: Case, element_id: str) -> list[Link]:
            links = [
                link
                for link in case.links.values()
                if link.target == element_id and link.kind != LinkKind.WARRANTS
            ]
            return sorted(
                links,
                key=lambda l: (l.kind.value, case.elements[l.source].kind.value, l.source),
            )

        groups = [in_links(case, node.id) for case, node in zip(cases, nodes)]
        if len({len(group) for group in groups}) != 1:
            raise DeriveFailure(f"{where}: incoming link counts differ")
        for position in zip(*groups):
            link_where = "links " + "/".join(link.id for link in position)
            if len({link.kind for link in position}) != 1:
                raise DeriveFailure(f"{link_where}: link kinds differ")
            if len({link.qualifier for link in position}) != 1:
                raise DeriveFailure(f"{link_where}: qualifiers differ")
            children = tuple(
                case.elements[link.source] for case, link in zip(cases, position)
            )
            if len({child.kind for child in children}) != 1:
                raise DeriveFailure(f"{link_where}: source kinds differ")
            visit(children)
            base_link = position[0]
            skeleton_links[base_link.id] = base_link
            warrant_groups = [
                sorted(case.warrants_for(link.id), key=lambda l: l.source)
                for case, link in zip(cases, position)
            ]
            if len({len(group) for group in warrant_groups}) != 1:
                raise DeriveFailure(f"{link_where}: warrant counts differ")
            for warrant_position in zip(*warrant_groups):
                warrants = tuple(
                    case.elements[wlink.source]
                    for case, wlink in zip(cases, warrant_position)
                )
                visit(warrants)
                skeleton_links[warrant_position[0].id] = warrant_position[0]
        return base.id

    visit(tuple(roots))
    if len(visited) != len({key[0] for key in visited}):
        raise DeriveFailure("alignment is ambiguous: an element matched two partners")
    for index, case in enumerate(cases):
        reached = {key[index] for key in visited}
        if reached != set(case.elements):
            stray = sorted(set(case.elements) - reached)
            raise DeriveFailure(
                f"case {case.id}: elements not reachable from the root goal: "
                + ", ".join(stray)
            )

    case_ids = [case.id for case in cases]
    pattern = Pattern(
        id="p-" + "-".join(case_ids),
        intent="Generalises the shared argument structure of: " + ", ".join(case_ids) + ".",
        applicability="Derived bottom-up; edit this to state when the generalisation holds.",
        risks=(),
        slot_types=slot_types,
        elements=skeleton_elements,
        links=skeleton_links,
        stage_slots=stage_slots,
    )
    bindings = [
        {name: slot_values[name][index] for name in slot_types}
        for index in range(len(cases))
    ]
    return pattern, bindings
