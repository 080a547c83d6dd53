"""The plain-text case language (.eac files).

One construct per line. The first content line is the case header; element,
link, and challenge lines follow in any order. ``#`` starts a comment
outside quoted strings. Quoted strings escape only ``\\"`` and ``\\\\``.

Grammar, one line per form (square brackets mark optional clauses)::

    case "<title>" phase <preliminary|interim|operational>
    goal <id> system "<s>" context "<c>" value "<v>" [tier <t>]
    goal <id> "<text>" [tier <t>]
    context <id> "<text>" [tier <t>]
    claim <id> scope <system|project> [stage <stage-id>] [tier <t>] "<text>"
    eclaim <id> "<text>" [tier <t>]
    evidence <id> at "<locator>" "<text>" [tier <t>]
    warrant <id> "<text>" [tier <t>]
    assume <id> "<text>" [tier <t>]
    link <id> <supports|contextOf|evidences> <from> -> <to>
        [qualifier <label> ["<note>"]]
    link <id> warrants <warrantId> -> <linkId>
    challenge <id> on <target> by "<author>" "<text>" [state <s> [note "<n>"]]

The slotless ``goal <id> "<text>"`` form parses but is reported by
validation as an underspecified goal. Unknown keywords are errors: the
format is closed.

Serialization is canonical: elements in id order, then links, then
challenges, two-space indentation, LF line endings, default values omitted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from . import model
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

# Stable diagnostic codes emitted by the parser.
E_SYNTAX = "E-SYNTAX"
E_STRING = "E-STRING"
E_ID = "E-ID"
E_KEYWORD = "E-KEYWORD"
E_CASE_HEADER = "E-CASE-HEADER"
E_PHASE = "E-PHASE"
E_TIER = "E-TIER"
E_SCOPE = "E-SCOPE"
E_STAGE = "E-STAGE"
E_STATE = "E-STATE"
E_QUALIFIER = "E-QUALIFIER"
E_NOTE = "E-NOTE"
E_TEXT = "E-TEXT"
E_GOAL_SLOTS = "E-GOAL-SLOTS"
E_DUPLICATE_ID = "E-DUPLICATE-ID"
E_DANGLING = "E-DANGLING"
E_KIND = "E-KIND"
E_CYCLE = "E-CYCLE"


@dataclass(frozen=True, slots=True)
class SourceSpan:
    line: int  # 1-based
    col: int   # 1-based


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """A parse- or import-time finding with a stable code and position."""

    severity: str  # "error" or "warning"
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.severity}:{self.span.line}:{self.span.col}: {self.code} {self.message}"


@dataclass(slots=True)
class ParseResult:
    """Outcome of a parse: a case on success, diagnostics either way."""

    case: Case | None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    spans: dict[str, SourceSpan] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.case is not None

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


class ParseFailure(Exception):
    """Raised by :func:`parse_strict` when a source has error diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        lines = "; ".join(str(d) for d in diagnostics[:5])
        super().__init__(f"case text did not parse: {lines}")
        self.diagnostics = diagnostics


def slug(title: str) -> str:
    """Derive a valid case id from a title."""
    token = re.sub(r"[^A-Za-z0-9]+", "-", title).strip("-").lower()
    if not token or not token[0].isalpha():
        token = "case" if not token else "c-" + token
    return token


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # "word" or "string"
    value: str
    line: int
    col: int


class _LineError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _scan_line(text: str, line_no: int) -> list[_Token]:
    """Tokenize one line; raises _LineError on malformed strings."""
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch == '"':
            out: list[str] = []
            i += 1
            terminated = False
            while i < n:
                ch = text[i]
                if ch == "\\":
                    if i + 1 >= n or text[i + 1] not in '"\\':
                        raise _LineError(
                            Diagnostic(
                                "error",
                                E_STRING,
                                "unknown escape; only \\\" and \\\\ are recognised",
                                SourceSpan(line_no, i + 1),
                            )
                        )
                    out.append(text[i + 1])
                    i += 2
                    continue
                if ch == '"':
                    terminated = True
                    i += 1
                    break
                out.append(ch)
                i += 1
            if not terminated:
                raise _LineError(
                    Diagnostic(
                        "error",
                        E_STRING,
                        "unterminated string",
                        SourceSpan(line_no, col),
                    )
                )
            tokens.append(_Token("string", "".join(out), line_no, col))
            continue
        j = i
        while j < n and text[j] not in ' \t"#':
            j += 1
        tokens.append(_Token("word", text[i:j], line_no, col))
        i = j
    return tokens


class _Cursor:
    """Token cursor over one line, with expectation helpers."""

    def __init__(self, tokens: list[_Token], line_no: int, line_len: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.eol_col = line_len + 1

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token | None:
        token = self.peek()
        if token is not None:
            self.pos += 1
        return token

    def span_here(self) -> SourceSpan:
        token = self.peek()
        col = token.col if token is not None else self.eol_col
        return SourceSpan(self.line_no, col)

    def fail(self, code: str, message: str, span: SourceSpan | None = None) -> "_LineError":
        return _LineError(Diagnostic("error", code, message, span or self.span_here()))

    def expect_word(self, what: str = "identifier", code: str = E_SYNTAX) -> _Token:
        token = self.take()
        if token is None or token.kind != "word":
            raise self.fail(code, f"expected {what}", self.span_here() if token is None else SourceSpan(token.line, token.col))
        return token

    def expect_keyword(self, keyword: str) -> _Token:
        token = self.take()
        if token is None or token.kind != "word" or token.value != keyword:
            span = SourceSpan(token.line, token.col) if token is not None else self.span_here()
            raise self.fail(E_SYNTAX, f"expected {keyword!r}", span)
        return token

    def expect_string(self, what: str = "string") -> _Token:
        token = self.take()
        if token is None or token.kind != "string":
            span = SourceSpan(token.line, token.col) if token is not None else self.span_here()
            raise self.fail(E_SYNTAX, f"expected {what} in quotes", span)
        return token

    def expect_id(self) -> _Token:
        token = self.expect_word("identifier", E_ID)
        if not model.valid_id(token.value):
            raise self.fail(
                E_ID,
                f"{token.value!r} is not a valid identifier",
                SourceSpan(token.line, token.col),
            )
        return token

    def expect_end(self) -> None:
        token = self.peek()
        if token is not None:
            raise self.fail(
                E_SYNTAX,
                f"unexpected trailing {token.kind} {token.value!r}",
                SourceSpan(token.line, token.col),
            )

    def match_word(self, keyword: str) -> bool:
        token = self.peek()
        if token is not None and token.kind == "word" and token.value == keyword:
            self.pos += 1
            return True
        return False


def _nonempty_text(cursor: _Cursor, token: _Token, what: str = "text") -> str:
    if not token.value.strip():
        raise cursor.fail(E_TEXT, f"{what} must not be empty", SourceSpan(token.line, token.col))
    return token.value


def _optional_tier(cursor: _Cursor) -> AudienceTier:
    if not cursor.match_word("tier"):
        return AudienceTier.PUBLIC
    token = cursor.expect_word("tier name", E_TIER)
    try:
        return AudienceTier.from_label(token.value)
    except ValueError:
        raise cursor.fail(E_TIER, f"unknown tier {token.value!r}", SourceSpan(token.line, token.col))


@dataclass(slots=True)
class _Pending:
    """A parsed line before cross-line resolution, with its span."""

    record: object
    span: SourceSpan


def _parse_goal(cursor: _Cursor, allow_slot_braces: bool = False) -> Element:
    id_token = cursor.expect_id()
    nxt = cursor.peek()
    if nxt is not None and nxt.kind == "word" and nxt.value == "system":
        cursor.take()
        system = cursor.expect_string("system binding")
        cursor.expect_keyword("context")
        context = cursor.expect_string("context binding")
        cursor.expect_keyword("value")
        value = cursor.expect_string("value binding")
        if allow_slot_braces:
            # Pattern skeletons keep {placeholders} inside goal slots.
            for name, token in (("system", system), ("context", context), ("goal", value)):
                if not token.value.strip():
                    raise cursor.fail(
                        E_GOAL_SLOTS,
                        f"goal slot {name!r} must not be empty",
                        SourceSpan(token.line, token.col),
                    )
            slots = GoalSlots(system=system.value, context=context.value, goal=value.value)
            text = model.render_goal_text(slots)
        else:
            try:
                text, slots = model.goal_from_template(system.value, context.value, value.value)
            except model.EmptySlot as exc:
                token = {"system": system, "context": context, "goal": value}[exc.slot]
                raise cursor.fail(E_GOAL_SLOTS, str(exc), SourceSpan(token.line, token.col))
            except model.BraceInSlot as exc:
                token = {"system": system, "context": context, "goal": value}[exc.slot]
                raise cursor.fail(E_GOAL_SLOTS, str(exc), SourceSpan(token.line, token.col))
        tier = _optional_tier(cursor)
        cursor.expect_end()
        return Element(
            id=id_token.value, kind=ElementKind.GOAL, text=text, slots=slots, tier=tier
        )
    if nxt is not None and nxt.kind == "string":
        text_token = cursor.take()
        assert text_token is not None
        text = _nonempty_text(cursor, text_token, "goal text")
        tier = _optional_tier(cursor)
        cursor.expect_end()
        return Element(id=id_token.value, kind=ElementKind.GOAL, text=text, tier=tier)
    raise cursor.fail(
        E_GOAL_SLOTS,
        "goal needs system/context/value bindings or a quoted text",
    )


def _parse_claim(cursor: _Cursor, stage_slot_out: list[str] | None = None) -> Element:
    id_token = cursor.expect_id()
    cursor.expect_keyword("scope")
    scope_token = cursor.expect_word("scope", E_SCOPE)
    try:
        scope = Scope(scope_token.value)
    except ValueError:
        raise cursor.fail(
            E_SCOPE,
            f"scope must be system or project, got {scope_token.value!r}",
            SourceSpan(scope_token.line, scope_token.col),
        )
    stage = None
    if cursor.match_word("stage"):
        stage_token = cursor.expect_word("stage id", E_STAGE)
        placeholder = re.fullmatch(r"\{([^{}]+)\}", stage_token.value)
        if placeholder is not None and stage_slot_out is not None:
            # Pattern skeletons may defer the stage to a slot binding.
            stage_slot_out.append(placeholder.group(1))
        else:
            stage = parse_stage(stage_token.value)
            if stage is None:
                raise cursor.fail(
                    E_STAGE,
                    f"unknown lifecycle stage {stage_token.value!r}",
                    SourceSpan(stage_token.line, stage_token.col),
                )
    tier = _optional_tier(cursor)
    text_token = cursor.expect_string("claim text")
    text = _nonempty_text(cursor, text_token, "claim text")
    cursor.expect_end()
    return Element(
        id=id_token.value,
        kind=ElementKind.PROPERTY_CLAIM,
        text=text,
        scope=scope,
        stage=stage,
        tier=tier,
    )


def _parse_simple_element(cursor: _Cursor, kind: ElementKind) -> Element:
    id_token = cursor.expect_id()
    text_token = cursor.expect_string("text")
    text = _nonempty_text(cursor, text_token)
    tier = _optional_tier(cursor)
    cursor.expect_end()
    return Element(id=id_token.value, kind=kind, text=text, tier=tier)


def _parse_evidence(cursor: _Cursor) -> Element:
    id_token = cursor.expect_id()
    cursor.expect_keyword("at")
    locator_token = cursor.expect_string("locator")
    locator = _nonempty_text(cursor, locator_token, "locator")
    text_token = cursor.expect_string("text")
    text = _nonempty_text(cursor, text_token)
    tier = _optional_tier(cursor)
    cursor.expect_end()
    return Element(
        id=id_token.value,
        kind=ElementKind.EVIDENCE,
        text=text,
        locator=locator,
        tier=tier,
    )


def _parse_link(cursor: _Cursor) -> Link:
    id_token = cursor.expect_id()
    kind_token = cursor.expect_word("link kind", E_KEYWORD)
    try:
        kind = LinkKind(kind_token.value)
    except ValueError:
        raise cursor.fail(
            E_KEYWORD,
            f"unknown link kind {kind_token.value!r}",
            SourceSpan(kind_token.line, kind_token.col),
        )
    source_token = cursor.expect_id()
    arrow = cursor.expect_word("'->'")
    if arrow.value != "->":
        raise cursor.fail(E_SYNTAX, "expected '->'", SourceSpan(arrow.line, arrow.col))
    target_token = cursor.expect_id()
    qualifier = None
    if cursor.match_word("qualifier"):
        if kind != LinkKind.SUPPORTS:
            raise cursor.fail(
                E_KIND, "qualifier is admissible only on supports links"
            )
        label_token = cursor.expect_word("qualifier label", E_QUALIFIER)
        try:
            label = QualifierLabel(label_token.value)
        except ValueError:
            raise cursor.fail(
                E_QUALIFIER,
                f"unknown qualifier {label_token.value!r}",
                SourceSpan(label_token.line, label_token.col),
            )
        note = None
        nxt = cursor.peek()
        if nxt is not None and nxt.kind == "string":
            cursor.take()
            note = nxt.value
        qualifier = Qualifier(label=label, note=note)
    cursor.expect_end()
    return Link(
        id=id_token.value,
        kind=kind,
        source=source_token.value,
        target=target_token.value,
        qualifier=qualifier,
    )


def _parse_challenge(cursor: _Cursor) -> Challenge:
    id_token = cursor.expect_id()
    cursor.expect_keyword("on")
    target_token = cursor.expect_id()
    cursor.expect_keyword("by")
    author_token = cursor.expect_string("author")
    author = _nonempty_text(cursor, author_token, "author")
    text_token = cursor.expect_string("challenge text")
    text = _nonempty_text(cursor, text_token, "challenge text")
    state = ChallengeState.OPEN
    note = None
    if cursor.match_word("state"):
        state_token = cursor.expect_word("challenge state", E_STATE)
        try:
            state = ChallengeState(state_token.value)
        except ValueError:
            raise cursor.fail(
                E_STATE,
                f"unknown challenge state {state_token.value!r}",
                SourceSpan(state_token.line, state_token.col),
            )
        if cursor.match_word("note"):
            note_token = cursor.expect_string("resolution note")
            note = _nonempty_text(cursor, note_token, "resolution note")
    if state in (ChallengeState.SUSTAINED, ChallengeState.RESOLVED) and note is None:
        raise cursor.fail(
            E_NOTE, f"state {state.value} requires a resolution note"
        )
    if state == ChallengeState.OPEN and note is not None:
        raise cursor.fail(E_NOTE, "an open challenge may not carry a resolution note")
    cursor.expect_end()
    return Challenge(
        id=id_token.value,
        target=target_token.value,
        author=author,
        text=text,
        state=state,
        resolution_note=note,
    )


_ELEMENT_PARSERS = {
    "goal": _parse_goal,
    "claim": _parse_claim,
    "eclaim": lambda c: _parse_simple_element(c, ElementKind.EVIDENTIAL_CLAIM),
    "context": lambda c: _parse_simple_element(c, ElementKind.CONTEXT),
    "warrant": lambda c: _parse_simple_element(c, ElementKind.WARRANT),
    "assume": lambda c: _parse_simple_element(c, ElementKind.ASSUMPTION),
    "evidence": _parse_evidence,
}

# The pattern grammar (.eap) reuses the element and link line syntax.
scan_line = _scan_line
Cursor = _Cursor
LineError = _LineError

ELEMENT_KEYWORDS = frozenset(_ELEMENT_PARSERS)


def parse_element_line(
    keyword: str,
    cursor: _Cursor,
    *,
    allow_goal_slot_braces: bool = False,
    stage_slot_out: list[str] | None = None,
) -> Element:
    """Parse the body of one element line, the keyword already consumed."""
    if keyword == "goal":
        return _parse_goal(cursor, allow_slot_braces=allow_goal_slot_braces)
    if keyword == "claim":
        return _parse_claim(cursor, stage_slot_out=stage_slot_out)
    return _ELEMENT_PARSERS[keyword](cursor)


def parse_link_line(cursor: _Cursor) -> Link:
    """Parse the body of one link line, the ``link`` keyword already consumed."""
    return _parse_link(cursor)


def parse(source: str, case_id: str | None = None) -> ParseResult:
    """Parse case text. Returns a case plus diagnostics, or diagnostics only.

    The case id is not part of the text format; callers pass one (usually
    the file stem) or get a slug of the title.
    """
    diagnostics: list[Diagnostic] = []
    spans: dict[str, SourceSpan] = {}
    header: tuple[str, PhaseTag] | None = None
    pending_elements: list[tuple[Element, SourceSpan]] = []
    pending_links: list[tuple[Link, SourceSpan]] = []
    pending_challenges: list[tuple[Challenge, SourceSpan]] = []

    for line_no, raw in enumerate(source.splitlines(), start=1):
        try:
            tokens = _scan_line(raw, line_no)
        except _LineError as exc:
            diagnostics.append(exc.diagnostic)
            continue
        if not tokens:
            continue
        cursor = _Cursor(tokens, line_no, len(raw))
        head = tokens[0]
        try:
            if head.kind != "word":
                raise cursor.fail(
                    E_KEYWORD, "line must start with a keyword", SourceSpan(head.line, head.col)
                )
            keyword = head.value
            cursor.take()
            if keyword == "case":
                title_token = cursor.expect_string("title")
                title = _nonempty_text(cursor, title_token, "title")
                cursor.expect_keyword("phase")
                phase_token = cursor.expect_word("phase", E_PHASE)
                try:
                    phase = PhaseTag.from_label(phase_token.value)
                except ValueError:
                    raise cursor.fail(
                        E_PHASE,
                        f"unknown phase {phase_token.value!r}",
                        SourceSpan(phase_token.line, phase_token.col),
                    )
                cursor.expect_end()
                if header is not None:
                    raise cursor.fail(
                        E_CASE_HEADER, "duplicate case header", SourceSpan(head.line, head.col)
                    )
                header = (title, phase)
            elif keyword in _ELEMENT_PARSERS:
                element = _ELEMENT_PARSERS[keyword](cursor)
                pending_elements.append((element, SourceSpan(head.line, head.col)))
            elif keyword == "link":
                link = _parse_link(cursor)
                pending_links.append((link, SourceSpan(head.line, head.col)))
            elif keyword == "challenge":
                challenge = _parse_challenge(cursor)
                pending_challenges.append((challenge, SourceSpan(head.line, head.col)))
            else:
                raise cursor.fail(
                    E_KEYWORD,
                    f"unknown keyword {keyword!r}",
                    SourceSpan(head.line, head.col),
                )
        except _LineError as exc:
            diagnostics.append(exc.diagnostic)

    if header is None:
        diagnostics.append(
            Diagnostic("error", E_CASE_HEADER, "missing case header line", SourceSpan(1, 1))
        )
        return ParseResult(case=None, diagnostics=diagnostics, spans=spans)

    title, phase = header
    case = Case(id=case_id or slug(title), title=title, phase=phase)

    def _code_for(exc: model.CaseError) -> str:
        if isinstance(exc, model.DuplicateId):
            return E_DUPLICATE_ID
        if isinstance(exc, (model.DanglingEndpoint, model.DanglingTarget)):
            return E_DANGLING
        if isinstance(exc, model.CycleIntroduced):
            return E_CYCLE
        if isinstance(exc, (model.EmptySlot, model.BraceInSlot)):
            return E_GOAL_SLOTS
        if isinstance(exc, model.InvalidId):
            return E_ID
        return E_KIND

    for element, span in pending_elements:
        spans.setdefault(element.id, span)
        try:
            model.check_fresh_id(case, element.id)
            model.check_element_invariants(element, require_goal_slots=False)
        except model.CaseError as exc:
            diagnostics.append(Diagnostic("error", _code_for(exc), str(exc), span))
            continue
        case = replace(case, elements={**case.elements, element.id: element})

    # Non-warrants links first, so warrants may target links defined later
    # in the file; among element-to-element links file order decides which
    # link is blamed for a cycle.
    ordered = [p for p in pending_links if p[0].kind != LinkKind.WARRANTS] + [
        p for p in pending_links if p[0].kind == LinkKind.WARRANTS
    ]
    for link, span in ordered:
        spans.setdefault(link.id, span)
        try:
            case = model.add_link(case, link)
        except model.CaseError as exc:
            if isinstance(exc, model.CycleIntroduced):
                message = "link closes a cycle: " + " -> ".join(exc.path)
            else:
                message = str(exc)
            diagnostics.append(Diagnostic("error", _code_for(exc), message, span))

    for challenge, span in pending_challenges:
        spans.setdefault(challenge.id, span)
        try:
            model.check_fresh_id(case, challenge.id)
        except model.CaseError as exc:
            diagnostics.append(Diagnostic("error", _code_for(exc), str(exc), span))
            continue
        if challenge.target not in case.elements and challenge.target not in case.links:
            diagnostics.append(
                Diagnostic(
                    "error",
                    E_DANGLING,
                    f"challenge target {challenge.target!r} does not exist",
                    span,
                )
            )
            continue
        case = replace(case, challenges={**case.challenges, challenge.id: challenge})

    if any(d.severity == "error" for d in diagnostics):
        return ParseResult(case=None, diagnostics=diagnostics, spans=spans)
    return ParseResult(case=case, diagnostics=diagnostics, spans=spans)


def parse_strict(source: str, case_id: str | None = None) -> Case:
    """Parse case text, raising :class:`ParseFailure` on any error."""
    result = parse(source, case_id=case_id)
    if result.case is None:
        raise ParseFailure(result.errors)
    return result.case


def quote_string(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def element_line(element: Element) -> str:
    tier = f" tier {element.tier.label}" if element.tier != AudienceTier.PUBLIC else ""
    if element.kind == ElementKind.GOAL:
        if element.slots is not None:
            slots = element.slots
            return (
                f"goal {element.id} system {quote_string(slots.system)} "
                f"context {quote_string(slots.context)} value {quote_string(slots.goal)}{tier}"
            )
        return f"goal {element.id} {quote_string(element.text)}{tier}"
    if element.kind == ElementKind.PROPERTY_CLAIM:
        stage = f" stage {element.stage.value}" if element.stage is not None else ""
        scope = element.scope.value if element.scope is not None else Scope.SYSTEM.value
        return (
            f"claim {element.id} scope {scope}{stage}{tier} {quote_string(element.text)}"
        )
    if element.kind == ElementKind.EVIDENCE:
        locator = element.locator or ""
        return f"evidence {element.id} at {quote_string(locator)} {quote_string(element.text)}{tier}"
    keyword = {
        ElementKind.CONTEXT: "context",
        ElementKind.EVIDENTIAL_CLAIM: "eclaim",
        ElementKind.WARRANT: "warrant",
        ElementKind.ASSUMPTION: "assume",
    }[element.kind]
    return f"{keyword} {element.id} {quote_string(element.text)}{tier}"


def link_line(link: Link) -> str:
    quals = ""
    if link.qualifier is not None:
        quals = f" qualifier {link.qualifier.label.value}"
        if link.qualifier.note is not None:
            quals += f" {quote_string(link.qualifier.note)}"
    return f"link {link.id} {link.kind.value} {link.source} -> {link.target}{quals}"


def _challenge_line(challenge: Challenge) -> str:
    tail = ""
    if challenge.state != ChallengeState.OPEN or challenge.resolution_note is not None:
        tail = f" state {challenge.state.value}"
        if challenge.resolution_note is not None:
            tail += f" note {quote_string(challenge.resolution_note)}"
    return (
        f"challenge {challenge.id} on {challenge.target} "
        f"by {quote_string(challenge.author)} {quote_string(challenge.text)}{tail}"
    )


def serialize(case: Case) -> str:
    """Canonical text for a case: stable ordering, LF endings.

    Two serializations are byte-identical exactly when the cases share the
    same structure (title, phase, elements, links, challenges).
    """
    lines = [f"case {quote_string(case.title)} phase {case.phase.label}"]
    for element in sorted(case.elements.values(), key=lambda e: e.id):
        lines.append("  " + element_line(element))
    for link in sorted(case.links.values(), key=lambda l: l.id):
        lines.append("  " + link_line(link))
    for challenge in sorted(case.challenges.values(), key=lambda c: c.id):
        lines.append("  " + _challenge_line(challenge))
    return "\n".join(lines) + "\n"
