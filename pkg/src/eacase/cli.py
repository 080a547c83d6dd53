"""Command line interface (installed as ``eac``).

Exit codes: 0 success, 1 case errors (parse or validation), 2 usage
errors, 3 I/O errors. Every reporting subcommand takes ``--json`` for a
machine-readable variant of the same information. Defaults for phase,
tier, and threshold can come from an ``ea.toml`` next to the input file
(flags always win).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import date as date_type
from pathlib import Path

from . import dsl, interchange, lifecycle, model, patterns, render
from .appraisal import (
    DEFAULT_THRESHOLD,
    AppraisalRecord,
    Criterion,
    record_appraisal,
    sufficiency,
)
from .model import AudienceTier, Case, PhaseTag
from .render import TierFilter
from .service import ReviewService, StoreLoadError
from .stages import parse_stage
from .validation import compute_status, explain_status, validate

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3

CONFIG_NAME = "ea.toml"


class CliIOError(Exception):
    pass


class CliUsageError(Exception):
    pass


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        _write_text(Path(out), text)


# ea.toml: flat key = value lines, quoted or bare values, # comments.


def load_config(directory: Path) -> dict[str, str]:
    path = directory / CONFIG_NAME
    if not path.is_file():
        return {}
    config: dict[str, str] = {}
    for raw in _read_text(path).splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            continue
        value = value.split("#", 1)[0].strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        config[key.strip()] = value
    return config


@dataclass
class LoadedCase:
    case: Case | None
    path: Path
    findings: list[dict]
    spans: dict[str, dsl.SourceSpan]

    @property
    def error_count(self) -> int:
        return sum(1 for f in self.findings if f["severity"] == "error")


def _diag_row(path: Path, diagnostic: dsl.Diagnostic) -> dict:
    return {
        "severity": diagnostic.severity,
        "code": diagnostic.code,
        "file": str(path),
        "line": diagnostic.span.line,
        "col": diagnostic.span.col,
        "message": diagnostic.message,
    }


def load_case_file(path_text: str) -> LoadedCase:
    """Read a case from .eac text or .json interchange."""
    path = Path(path_text)
    raw = _read_text(path)
    if path.suffix == ".json":
        result = interchange.from_interchange(raw)
        findings = [
            {
                "severity": "error",
                "code": issue.code,
                "file": str(path),
                "pointer": issue.pointer,
                "message": issue.message,
            }
            for issue in result.issues
        ]
        return LoadedCase(case=result.case, path=path, findings=findings, spans={})
    case_id = path.stem if model.valid_id(path.stem) else None
    result = dsl.parse(raw, case_id)
    findings = [_diag_row(path, d) for d in result.diagnostics]
    return LoadedCase(case=result.case, path=path, findings=findings, spans=dict(result.spans))


def _finding_line(row: dict) -> str:
    where = row["file"]
    if "pointer" in row:
        where = f"{where}:{row['pointer'] or '/'}"
    else:
        where = f"{where}:{row.get('line', 1)}:{row.get('col', 1)}"
    return f"{row['severity'].upper()} {row['code']} {where} {row['message']}"


def _print_findings(rows: list[dict], as_json: bool, phase: PhaseTag | None = None) -> None:
    if as_json:
        errors = sum(1 for r in rows if r["severity"] == "error")
        warnings = sum(1 for r in rows if r["severity"] == "warning")
        payload = {
            "findings": rows,
            "errors": errors,
            "warnings": warnings,
            "ok": errors == 0,
        }
        if phase is not None:
            payload["phase"] = phase.label
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for row in rows:
        print(_finding_line(row))
    errors = sum(1 for r in rows if r["severity"] == "error")
    warnings = sum(1 for r in rows if r["severity"] == "warning")
    print(f"{errors} error(s), {warnings} warning(s)")


def _require_case(loaded: LoadedCase, as_json: bool) -> Case:
    if loaded.case is None:
        _print_findings(loaded.findings, as_json)
        raise _Finished(EXIT_FINDINGS)
    return loaded.case


class _Finished(Exception):
    def __init__(self, code: int):
        super().__init__(str(code))
        self.code = code


def _config_for(path_text: str) -> dict[str, str]:
    return load_config(Path(path_text).resolve().parent)


def _pick_phase(flag: str | None, config: dict[str, str]) -> PhaseTag | None:
    label = flag if flag is not None else config.get("phase")
    if label is None:
        return None
    try:
        return PhaseTag.from_label(label)
    except ValueError as exc:
        raise CliUsageError(str(exc))


def _pick_tier(flag: str | None, config: dict[str, str]) -> AudienceTier:
    label = flag if flag is not None else config.get("tier")
    if label is None:
        return AudienceTier.AUDITOR
    try:
        return AudienceTier.from_label(label)
    except ValueError as exc:
        raise CliUsageError(str(exc))


def _pick_threshold(flag: float | None, config: dict[str, str]) -> float:
    if flag is not None:
        return flag
    raw = config.get("threshold")
    if raw is None:
        return DEFAULT_THRESHOLD
    try:
        return float(raw)
    except ValueError:
        raise CliUsageError(f"config threshold {raw!r} is not a number")


def _tier_filter(args: argparse.Namespace, config: dict[str, str]) -> TierFilter:
    goals = None
    if args.goals:
        goals = frozenset(g for g in args.goals.split(",") if g)
    stages = None
    if args.stages:
        parsed = []
        for token in args.stages.split(","):
            if not token:
                continue
            stage = parse_stage(token)
            if stage is None:
                raise CliUsageError(f"unknown lifecycle stage {token!r}")
            parsed.append(stage)
        stages = frozenset(parsed)
    return TierFilter(tier=_pick_tier(args.tier, config), goals=goals, stages=stages)


# Subcommand handlers


def _cmd_new(args: argparse.Namespace) -> int:
    config = load_config(Path(args.dir))
    phase = _pick_phase(args.phase, config) or PhaseTag.PRELIMINARY
    case_id = args.id or dsl.slug(args.title)
    try:
        case = model.new_case(case_id, args.title, phase)
    except model.CaseError as exc:
        raise CliUsageError(str(exc))
    path = Path(args.dir) / f"{case_id}.eac"
    if path.exists():
        raise CliIOError(f"{path} already exists")
    _write_text(path, dsl.serialize(case))
    if args.json:
        print(json.dumps({"path": str(path), "id": case_id, "phase": phase.label}))
    else:
        print(str(path))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    config = _config_for(args.file)
    phase = _pick_phase(args.phase, config)
    rows = list(loaded.findings)
    effective = phase
    if loaded.case is not None:
        effective = phase if phase is not None else loaded.case.phase
        report = validate(loaded.case, effective)
        for finding in report.findings:
            span = loaded.spans.get(finding.target_id)
            rows.append(
                {
                    "severity": finding.severity,
                    "code": finding.code,
                    "targetId": finding.target_id,
                    "file": str(loaded.path),
                    "line": span.line if span else 1,
                    "col": span.col if span else 1,
                    "message": finding.message,
                }
            )
    _print_findings(rows, args.json, effective)
    errors = sum(1 for r in rows if r["severity"] == "error")
    if errors or (args.strict and rows):
        return EXIT_FINDINGS
    return EXIT_OK


def _explain_lines(node, depth: int, out: list[str]) -> None:
    out.append(f"{'  ' * depth}{node.element_id}: {node.status.label} [{node.rule}]")
    for child in node.children:
        _explain_lines(child, depth + 1, out)


def _explain_json(node) -> dict:
    return {
        "id": node.element_id,
        "status": node.status.label,
        "rule": node.rule,
        "children": [_explain_json(child) for child in node.children],
    }


def _cmd_status(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, args.json)
    statuses = compute_status(case)
    if args.explain:
        if args.explain not in case.elements:
            raise CliUsageError(f"no element named {args.explain!r}")
        tree = explain_status(case, args.explain)
        if args.json:
            print(json.dumps(_explain_json(tree), indent=2))
        else:
            lines: list[str] = []
            _explain_lines(tree, 0, lines)
            print("\n".join(lines))
        return EXIT_OK
    if args.json:
        print(
            json.dumps(
                {eid: status.label for eid, status in sorted(statuses.items())},
                indent=2,
                sort_keys=True,
            )
        )
    else:
        width = max((len(eid) for eid in statuses), default=0)
        for eid, status in sorted(statuses.items()):
            print(f"{eid.ljust(width)}  {status.label}")
    return EXIT_OK


def _cmd_coverage(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, args.json)
    report = lifecycle.coverage(case)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    for stage in report.counts:
        marker = "covered" if report.counts[stage] else "-"
        print(f"{stage.value:36} {report.counts[stage]:3}  {marker}")
    print(f"{report.covered_count} of {report.total_stages} stages covered")
    if report.untagged:
        print("untagged claims: " + ", ".join(report.untagged))
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, args.json if args.format == "json" else False)
    config = _config_for(args.file)
    filt = _tier_filter(args, config)
    if args.format == "dot":
        _emit(render.to_dot(case, filt), args.out)
    elif args.format == "md":
        threshold = _pick_threshold(args.threshold, config)
        _emit(render.to_report(case, filt, threshold), args.out)
    else:
        view = render.restrict(case, filt)
        payload = interchange.document(view.case)
        payload["redactions"] = view.redacted
        _emit(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n", args.out)
    return EXIT_OK


def _cmd_appraise(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, True)
    try:
        day = date_type.fromisoformat(args.date) if args.date else date_type.today()
    except ValueError:
        raise CliUsageError(f"--date {args.date!r} is not an ISO date")
    record = AppraisalRecord(
        evidence_id=args.evidence,
        relevance=Criterion(args.relevance == "relevant", args.relevance_note),
        materiality=Criterion(args.materiality == "material", args.materiality_note),
        admissibility=Criterion(args.admissibility == "admissible", args.admissibility_note),
        probative_value=args.value,
        assessor=args.assessor,
        date=day,
    )
    try:
        updated = record_appraisal(case, record)
    except model.CaseError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    _emit(interchange.to_interchange(updated), args.out)
    return EXIT_OK


def _cmd_sufficiency(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, args.json)
    config = _config_for(args.file)
    threshold = _pick_threshold(args.threshold, config)
    try:
        report = sufficiency(case, threshold)
    except model.CaseError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    for claim_id, entry in sorted(report.per_claim.items()):
        value = "unassessed" if entry.value is None else f"{entry.value:.3f}"
        print(f"{claim_id:12} {value:>10}  {entry.verdict}")
    value = "unassessed" if report.case_value is None else f"{report.case_value:.3f}"
    print(f"case value {value} at threshold {report.threshold:.2f}: {report.case_verdict}")
    return EXIT_OK


def _parse_bindings(pairs: list[str]) -> dict[str, str]:
    bindings: dict[str, str] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise CliUsageError(f"--bind needs name=value, got {pair!r}")
        bindings[name.strip()] = value
    return bindings


def _cmd_pattern_instantiate(args: argparse.Namespace) -> int:
    path = Path(args.pattern)
    result = patterns.parse_pattern(_read_text(path), path.stem)
    if result.pattern is None:
        for diagnostic in result.diagnostics:
            print(f"{diagnostic.severity.upper()} {diagnostic.code} {path}:"
                  f"{diagnostic.span.line}:{diagnostic.span.col} {diagnostic.message}")
        return EXIT_FINDINGS
    try:
        fragment = patterns.instantiate(
            result.pattern, _parse_bindings(args.bind or []), args.prefix or ""
        )
    except patterns.PatternError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except model.CaseError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    if args.json:
        payload = {
            "elements": [
                interchange.element_out(e)
                for e in sorted(fragment.elements.values(), key=lambda e: e.id)
            ],
            "links": [
                interchange.link_out(l)
                for l in sorted(fragment.links.values(), key=lambda l: l.id)
            ],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n", args.out)
        return EXIT_OK
    lines = []
    for element in sorted(fragment.elements.values(), key=lambda e: e.id):
        lines.append(dsl.element_line(element))
    for link in sorted(fragment.links.values(), key=lambda l: l.id):
        lines.append(dsl.link_line(link))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_pattern_derive(args: argparse.Namespace) -> int:
    cases = []
    for file_name in args.files:
        loaded = load_case_file(file_name)
        cases.append(_require_case(loaded, False))
    try:
        pattern, bindings = patterns.derive_with_bindings(cases)
    except patterns.PatternError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    if args.json:
        payload = {
            "pattern": patterns.serialize_pattern(pattern),
            "bindings": bindings,
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n", args.out)
        return EXIT_OK
    _emit(patterns.serialize_pattern(pattern), args.out)
    return EXIT_OK


def _cmd_snapshot(args: argparse.Namespace) -> int:
    loaded = load_case_file(args.file)
    case = _require_case(loaded, args.json)
    try:
        snap = lifecycle.snapshot(case, args.label)
    except lifecycle.InvalidLabel as exc:
        raise CliUsageError(str(exc))
    out = args.out or str(loaded.path.with_name(f"{loaded.path.stem}.{args.label}.eacs"))
    _write_text(Path(out), snap.to_text())
    if args.json:
        print(
            json.dumps(
                {"path": out, "label": snap.label, "digest": snap.digest},
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print(f"{out} sha256:{snap.digest}")
    return EXIT_OK


def _cmd_diff(args: argparse.Namespace) -> int:
    try:
        before = lifecycle.parse_snapshot(_read_text(Path(args.before)))
        after = lifecycle.parse_snapshot(_read_text(Path(args.after)))
        change = lifecycle.diff(before, after)
    except lifecycle.SnapshotCorrupt as exc:
        print(f"ERROR SnapshotCorrupt {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    if args.json:
        print(json.dumps(change.to_json_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    if change.empty:
        print("snapshots are identical")
        return EXIT_OK
    data = change.to_json_dict()
    for section in ("elements", "links", "challenges"):
        for verb in ("added", "removed"):
            for key in data[section][verb]:
                print(f"{verb} {section[:-1]} {key}")
        for entry in data[section]["modified"]:
            fields = ", ".join(
                f"{c['field']}: {c['before']!r} -> {c['after']!r}" for c in entry["fields"]
            )
            print(f"modified {section[:-1]} {entry['id']} ({fields})")
    if change.phase_change:
        print(f"phase: {change.phase_change[0]} -> {change.phase_change[1]}")
    if change.title_change:
        print(f"title: {change.title_change[0]!r} -> {change.title_change[1]!r}")
    for eid, (before_label, after_label) in sorted(change.status_deltas.items()):
        print(f"status {eid}: {before_label} -> {after_label}")
    for key in change.finding_additions:
        print(f"finding appeared: {key}")
    for key in change.finding_removals:
        print(f"finding cleared: {key}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        service = ReviewService(
            Path(args.dir), host=args.host, port=args.port, ui_dir=args.ui
        )
    except StoreLoadError as exc:
        raise CliIOError(str(exc))
    except OSError as exc:
        raise CliIOError(f"cannot bind {args.host}:{args.port}: {exc.strerror or exc}")
    host, port = service.address
    print(f"serving {args.dir} on http://{host}:{port}", flush=True)
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        service.stop()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eac", description="Author, check, and review ethical assurance cases."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_json(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p_new = with_json(sub.add_parser("new", help="start a new case file"))
    p_new.add_argument("title")
    p_new.add_argument("--id", help="case id (defaults to a slug of the title)")
    p_new.add_argument("--phase", choices=["preliminary", "interim", "operational"])
    p_new.add_argument("--dir", default=".", help="directory for the new file")
    p_new.set_defaults(fn=_cmd_new)

    p_val = with_json(sub.add_parser("validate", help="parse and validate a case"))
    p_val.add_argument("file")
    p_val.add_argument("--phase", choices=["preliminary", "interim", "operational"])
    p_val.add_argument(
        "--strict", action="store_true", help="exit nonzero on warnings as well"
    )
    p_val.set_defaults(fn=_cmd_validate)

    p_status = with_json(sub.add_parser("status", help="defeasibility status per element"))
    p_status.add_argument("file")
    p_status.add_argument("--explain", metavar="ID", help="explain one element's status")
    p_status.set_defaults(fn=_cmd_status)

    p_cov = with_json(sub.add_parser("coverage", help="lifecycle stage coverage"))
    p_cov.add_argument("file")
    p_cov.set_defaults(fn=_cmd_coverage)

    p_render = with_json(sub.add_parser("render", help="export dot, markdown, or json"))
    p_render.add_argument("file")
    p_render.add_argument("--format", choices=["dot", "md", "json"], required=True)
    p_render.add_argument("--tier", choices=["public", "stakeholder", "auditor"])
    p_render.add_argument("--goals", help="comma-separated goal ids to focus on")
    p_render.add_argument("--stages", help="comma-separated lifecycle stage ids")
    p_render.add_argument("--threshold", type=float, help="sufficiency threshold")
    p_render.add_argument("-o", "--out", help="output file (default stdout)")
    p_render.set_defaults(fn=_cmd_render)

    p_app = sub.add_parser("appraise", help="record an evidence appraisal")
    p_app.add_argument("file")
    p_app.add_argument("evidence", help="evidence element id")
    p_app.add_argument("--relevance", choices=["relevant", "irrelevant"], required=True)
    p_app.add_argument("--materiality", choices=["material", "immaterial"], required=True)
    p_app.add_argument(
        "--admissibility", choices=["admissible", "inadmissible"], required=True
    )
    p_app.add_argument("--value", type=float, required=True, help="probative value in [0,1]")
    p_app.add_argument("--assessor", required=True)
    p_app.add_argument("--date", help="ISO date (defaults to today)")
    p_app.add_argument("--relevance-note")
    p_app.add_argument("--materiality-note")
    p_app.add_argument("--admissibility-note")
    p_app.add_argument("-o", "--out", help="output file (default stdout)")
    p_app.set_defaults(fn=_cmd_appraise)

    p_suff = with_json(sub.add_parser("sufficiency", help="probative sufficiency report"))
    p_suff.add_argument("file")
    p_suff.add_argument("--threshold", type=float)
    p_suff.set_defaults(fn=_cmd_sufficiency)

    p_pattern = sub.add_parser("pattern", help="argument pattern tooling")
    pattern_sub = p_pattern.add_subparsers(dest="pattern_command", required=True)

    p_inst = with_json(
        pattern_sub.add_parser("instantiate", help="fill a pattern's slots")
    )
    p_inst.add_argument("pattern", help="pattern file (.eap)")
    p_inst.add_argument(
        "--bind", action="append", metavar="NAME=VALUE", help="slot binding, repeatable"
    )
    p_inst.add_argument("--prefix", help="id prefix for the new elements")
    p_inst.add_argument("-o", "--out", help="output file (default stdout)")
    p_inst.set_defaults(fn=_cmd_pattern_instantiate)

    p_derive = with_json(
        pattern_sub.add_parser("derive", help="generalise cases into a pattern")
    )
    p_derive.add_argument("files", nargs="+", help="two or more case files")
    p_derive.add_argument("-o", "--out", help="output file (default stdout)")
    p_derive.set_defaults(fn=_cmd_pattern_derive)

    p_snap = with_json(sub.add_parser("snapshot", help="freeze the case with a digest"))
    p_snap.add_argument("file")
    p_snap.add_argument("--label", required=True)
    p_snap.add_argument("-o", "--out", help="snapshot file (default <case>.<label>.eacs)")
    p_snap.set_defaults(fn=_cmd_snapshot)

    p_diff = with_json(sub.add_parser("diff", help="compare two snapshots"))
    p_diff.add_argument("before")
    p_diff.add_argument("after")
    p_diff.set_defaults(fn=_cmd_diff)

    p_serve = sub.add_parser("serve", help="run the HTTP review service")
    p_serve.add_argument("dir", help="directory of .eac files")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8315)
    p_serve.add_argument("--ui", help="directory of static review UI files")
    p_serve.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except _Finished as finished:
        return finished.code
    except CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CliIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except dsl.ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
