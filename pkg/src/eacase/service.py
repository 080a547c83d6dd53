"""HTTP review service: read-mostly case access plus a challenge workflow.

The store holds every ``*.eac`` file from one directory in memory. Reads
are lock-free on immutable snapshots; the two mutations (raise a challenge,
resolve one) take a single writer lock and append to a ``challenges.jsonl``
journal so review activity survives restarts of the service.

Every response carries CORS headers so a browser-based review client can
talk to the service directly. The viewer's audience tier comes from the
``X-Viewer-Tier`` header and may only be narrowed, never widened, by the
``tier`` query parameter.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from . import dsl, interchange, lifecycle, model, render
from .model import (
    AudienceTier,
    Case,
    Challenge,
    ChallengeState,
    PhaseTag,
)
from .render import TierFilter
from .stages import LifecycleStage, parse_stage
from .validation import compute_status, validate

logger = logging.getLogger(__name__)

API_PREFIX = "/api/v1"
MAX_BODY_BYTES = 1 << 20

_CASE_FILE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*\.eac$")


class StoreLoadError(model.CaseError):
    pass


@dataclass(frozen=True)
class _SnapshotEntry:
    label: str
    path: Path


class CaseStore:
    """In-memory case collection backed by a directory of .eac files."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self._lock = threading.Lock()
        self._cases: dict[str, Case] = {}
        self._journal_path = self.directory / "challenges.jsonl"
        self._load()

    def _load(self) -> None:
        if not self.directory.is_dir():
            raise StoreLoadError(f"store directory {self.directory} does not exist")
        for path in sorted(self.directory.glob("*.eac")):
            if not _CASE_FILE_RE.match(path.name):
                raise StoreLoadError(f"{path.name}: file stem is not a valid case id")
            try:
                case = dsl.parse_strict(path.read_text(encoding="utf-8"), path.stem)
            except dsl.ParseFailure as exc:
                raise StoreLoadError(f"{path.name}: {exc}") from exc
            self._cases[path.stem] = case
        if self._journal_path.exists():
            self._replay_journal()

    def _replay_journal(self) -> None:
        for line_no, line in enumerate(
            self._journal_path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                case = self._cases[entry["caseId"]]
                if entry["op"] == "challenge":
                    challenge = Challenge(
                        id=entry["id"],
                        target=entry["target"],
                        author=entry["author"],
                        text=entry["text"],
                    )
                    case = model.attach_challenge(case, challenge)
                elif entry["op"] == "resolve":
                    case = model.resolve_challenge(
                        case, entry["id"], ChallengeState(entry["outcome"]), entry.get("note")
                    )
                else:
                    raise ValueError(f"unknown op {entry['op']!r}")
                self._cases[entry["caseId"]] = case
            except (KeyError, ValueError, model.CaseError) as exc:
                raise StoreLoadError(
                    f"{self._journal_path.name}:{line_no}: cannot replay journal: {exc}"
                ) from exc

    def _append_journal(self, entry: dict) -> None:
        with self._journal_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")

    def case_ids(self) -> list[str]:
        return sorted(self._cases)

    def get(self, case_id: str) -> Case | None:
        return self._cases.get(case_id)

    def _fresh_challenge_id(self, case: Case) -> str:
        number = len(case.challenges) + 1
        while True:
            candidate = f"ch{number}"
            if (
                candidate not in case.elements
                and candidate not in case.links
                and candidate not in case.challenges
            ):
                return candidate
            number += 1

    def add_challenge(self, case_id: str, target: str, author: str, text: str) -> Challenge:
        with self._lock:
            case = self._cases[case_id]
            challenge = Challenge(
                id=self._fresh_challenge_id(case), target=target, author=author, text=text
            )
            updated = model.attach_challenge(case, challenge)
            self._append_journal(
                {
                    "op": "challenge",
                    "caseId": case_id,
                    "id": challenge.id,
                    "target": target,
                    "author": author,
                    "text": text,
                }
            )
            self._cases[case_id] = updated
            return challenge

    def resolve_challenge(
        self, case_id: str, challenge_id: str, outcome: ChallengeState, note: str | None
    ) -> Challenge:
        with self._lock:
            case = self._cases[case_id]
            updated = model.resolve_challenge(case, challenge_id, outcome, note)
            self._append_journal(
                {
                    "op": "resolve",
                    "caseId": case_id,
                    "id": challenge_id,
                    "outcome": outcome.value,
                    "note": note,
                }
            )
            self._cases[case_id] = updated
            return updated.challenges[challenge_id]

    def snapshots(self, case_id: str) -> list[_SnapshotEntry]:
        entries = []
        for path in sorted(self.directory.glob(f"{case_id}.*.eacs")):
            label = path.name[len(case_id) + 1 : -len(".eacs")]
            entries.append(_SnapshotEntry(label=label, path=path))
        return entries

    def load_snapshot(self, case_id: str, label: str) -> lifecycle.Snapshot | None:
        for entry in self.snapshots(case_id):
            if entry.label == label:
                return lifecycle.parse_snapshot(entry.path.read_text(encoding="utf-8"))
        return None


def _effective_tier(header_value: str | None, query_value: str | None) -> AudienceTier:
    """Session tier from the header, narrowed (never widened) by the query."""
    tier = AudienceTier.PUBLIC
    if header_value is not None:
        tier = AudienceTier.from_label(header_value)
    if query_value is not None:
        tier = min(tier, AudienceTier.from_label(query_value))
    return tier


class _RequestProblem(Exception):
    def __init__(self, status: int, code: str, message: str, pointer: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.pointer = pointer


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json; charset=utf-8",
}


def make_handler(store: CaseStore, ui_dir: Path | None = None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "eacase"

        def log_message(self, format: str, *args) -> None:
            logger.debug("%s %s", self.address_string(), format % args)

        def _cors(self) -> None:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header(
                "Access-Control-Allow-Headers", "Content-Type, X-Viewer-Tier"
            )
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")

        def _send(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self._cors()
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, payload: object) -> None:
            body = (json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n").encode()
            self._send(status, body, "application/json; charset=utf-8")

        def _send_problem(self, problem: _RequestProblem) -> None:
            payload: dict = {"code": problem.code, "message": problem.message}
            if problem.pointer is not None:
                payload["pointer"] = problem.pointer
            self._send_json(problem.status, payload)

        def do_OPTIONS(self) -> None:  # noqa: N802 (http.server naming)
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self) -> None:  # noqa: N802
            try:
                self._route("GET")
            except _RequestProblem as problem:
                self._send_problem(problem)
            except Exception:
                logger.exception("unhandled error for %s", self.path)
                self._send_problem(
                    _RequestProblem(500, "internal-error", "unhandled server error")
                )

        def do_POST(self) -> None:  # noqa: N802
            try:
                # read the body up front so an early error response never
                # leaves unread bytes on a keep-alive connection
                self._raw_body = self._read_raw_body()
                self._route("POST")
            except _RequestProblem as problem:
                self._send_problem(problem)
            except Exception:
                logger.exception("unhandled error for %s", self.path)
                self._send_problem(
                    _RequestProblem(500, "internal-error", "unhandled server error")
                )

        def _read_raw_body(self) -> bytes:
            length_header = self.headers.get("Content-Length")
            try:
                length = int(length_header or "0")
            except ValueError:
                self.close_connection = True
                raise _RequestProblem(400, "bad-request", "malformed Content-Length")
            if length > MAX_BODY_BYTES:
                self.close_connection = True
                raise _RequestProblem(413, "too-large", "request body too large")
            if length <= 0:
                return b""
            return self.rfile.read(length)

        # Routing

        def _route(self, method: str) -> None:
            url = urlsplit(self.path)
            query = {k: v[-1] for k, v in parse_qs(url.query).items()}
            path = url.path
            if path.startswith(API_PREFIX):
                self._route_api(method, path[len(API_PREFIX) :], query)
                return
            if method == "GET" and ui_dir is not None:
                self._serve_static(path)
                return
            raise _RequestProblem(404, "not-found", f"no route for {path}")

        def _route_api(self, method: str, path: str, query: dict[str, str]) -> None:
            parts = [p for p in path.split("/") if p]
            if method == "GET" and parts == ["cases"]:
                self._get_cases()
                return
            if len(parts) >= 2 and parts[0] == "cases":
                case_id = parts[1]
                case = store.get(case_id)
                if case is None:
                    raise _RequestProblem(404, "unknown-case", f"no case named {case_id!r}")
                rest = parts[2:]
                if method == "GET":
                    self._route_case_get(case, rest, query)
                    return
                if method == "POST":
                    self._route_case_post(case_id, case, rest, query)
                    return
            raise _RequestProblem(404, "not-found", f"no route for {path}")

        def _route_case_get(self, case: Case, rest: list[str], query: dict[str, str]) -> None:
            if not rest:
                self._get_case(case, query)
            elif rest == ["status"]:
                self._get_status(case, query)
            elif rest == ["validate"]:
                self._get_validate(case, query)
            elif rest == ["report"]:
                self._get_report(case, query)
            elif rest == ["graph.dot"]:
                self._get_graph(case, query)
            elif rest == ["snapshots"]:
                self._get_snapshots(case)
            elif rest == ["diff"]:
                self._get_diff(case, query)
            else:
                raise _RequestProblem(404, "not-found", "no such case resource")

        def _route_case_post(
            self, case_id: str, case: Case, rest: list[str], query: dict[str, str]
        ) -> None:
            if rest == ["challenges"]:
                self._post_challenge(case_id, case, query)
            elif len(rest) == 3 and rest[0] == "challenges" and rest[2] == "resolve":
                self._post_resolve(case_id, case, rest[1])
            else:
                raise _RequestProblem(404, "not-found", "no such case resource")

        # Request helpers

        def _filter(self, query: dict[str, str]) -> TierFilter:
            try:
                tier = _effective_tier(self.headers.get("X-Viewer-Tier"), query.get("tier"))
            except ValueError as exc:
                raise _RequestProblem(400, "bad-tier", str(exc))
            goals: frozenset[str] | None = None
            if "goals" in query:
                goals = frozenset(g for g in query["goals"].split(",") if g)
            stages: frozenset[LifecycleStage] | None = None
            if "stages" in query:
                parsed = []
                for token in query["stages"].split(","):
                    if not token:
                        continue
                    stage = parse_stage(token)
                    if stage is None:
                        raise _RequestProblem(
                            400, "bad-stage", f"unknown lifecycle stage {token!r}"
                        )
                    parsed.append(stage)
                stages = frozenset(parsed)
            return TierFilter(tier=tier, goals=goals, stages=stages)

        def _body(self) -> dict:
            raw = self._raw_body
            if not raw:
                raise _RequestProblem(400, "bad-request", "request body required")
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise _RequestProblem(400, "bad-json", f"body is not valid JSON: {exc.msg}")
            if not isinstance(data, dict):
                raise _RequestProblem(400, "bad-json", "body must be a JSON object")
            return data

        def _body_field(self, data: dict, name: str, pointer: str) -> str:
            value = data.get(name)
            if not isinstance(value, str) or not value.strip():
                raise _RequestProblem(
                    400, "bad-request", f"field {name!r} must be a non-empty string", pointer
                )
            return value

        # GET handlers

        def _get_cases(self) -> None:
            rows = []
            for case_id in store.case_ids():
                case = store.get(case_id)
                assert case is not None
                rows.append(
                    {
                        "id": case.id,
                        "title": case.title,
                        "phase": case.phase.label,
                        "digest": lifecycle.case_digest(case),
                        "elements": len(case.elements),
                        "openChallenges": sum(
                            1
                            for c in case.challenges.values()
                            if c.state == ChallengeState.OPEN
                        ),
                    }
                )
            self._send_json(200, {"cases": rows})

        def _get_case(self, case: Case, query: dict[str, str]) -> None:
            view = render.restrict(case, self._filter(query))
            payload = interchange.document(view.case)
            payload["redactions"] = view.redacted
            self._send_json(200, payload)

        def _get_status(self, case: Case, query: dict[str, str]) -> None:
            filt = self._filter(query)
            statuses = compute_status(case)
            shown = render.visible_elements(case, filt)
            self._send_json(
                200,
                {
                    "digest": lifecycle.case_digest(case),
                    "phase": case.phase.label,
                    "statuses": {
                        eid: status.label
                        for eid, status in statuses.items()
                        if eid in shown
                    },
                },
            )

        def _get_validate(self, case: Case, query: dict[str, str]) -> None:
            phase = case.phase
            if "phase" in query:
                try:
                    phase = PhaseTag.from_label(query["phase"])
                except ValueError as exc:
                    raise _RequestProblem(400, "bad-phase", str(exc))
            report = validate(case, phase)
            self._send_json(
                200,
                {
                    "phase": phase.label,
                    "ok": report.ok,
                    "findings": [
                        {
                            "severity": f.severity,
                            "code": f.code,
                            "targetId": f.target_id,
                            "message": f.message,
                        }
                        for f in report.findings
                    ],
                },
            )

        def _get_report(self, case: Case, query: dict[str, str]) -> None:
            body = render.to_report(case, self._filter(query)).encode()
            self._send(200, body, "text/markdown; charset=utf-8")

        def _get_graph(self, case: Case, query: dict[str, str]) -> None:
            body = render.to_dot(case, self._filter(query)).encode()
            self._send(200, body, "text/vnd.graphviz; charset=utf-8")

        def _get_snapshots(self, case: Case) -> None:
            rows = []
            for entry in store.snapshots(case.id):
                try:
                    snap = lifecycle.parse_snapshot(entry.path.read_text(encoding="utf-8"))
                except lifecycle.SnapshotCorrupt as exc:
                    raise _RequestProblem(500, "corrupt-snapshot", str(exc))
                rows.append(
                    {
                        "label": snap.label,
                        "takenAt": snap.taken_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
                        "digest": snap.digest,
                    }
                )
            self._send_json(200, {"snapshots": rows})

        def _get_diff(self, case: Case, query: dict[str, str]) -> None:
            from_label = query.get("from")
            to_label = query.get("to")
            if not from_label or not to_label:
                raise _RequestProblem(
                    400, "bad-request", "diff needs 'from' and 'to' snapshot labels"
                )
            try:
                before = store.load_snapshot(case.id, from_label)
                after = store.load_snapshot(case.id, to_label)
            except lifecycle.SnapshotCorrupt as exc:
                raise _RequestProblem(500, "corrupt-snapshot", str(exc))
            if before is None:
                raise _RequestProblem(404, "unknown-snapshot", f"no snapshot {from_label!r}")
            if after is None:
                raise _RequestProblem(404, "unknown-snapshot", f"no snapshot {to_label!r}")
            try:
                change = lifecycle.diff(before, after)
            except lifecycle.SnapshotCorrupt as exc:
                raise _RequestProblem(500, "corrupt-snapshot", str(exc))
            self._send_json(200, change.to_json_dict())

        # POST handlers

        def _post_challenge(self, case_id: str, case: Case, query: dict[str, str]) -> None:
            data = self._body()
            target = self._body_field(data, "target", "/target")
            author = self._body_field(data, "author", "/author")
            text = self._body_field(data, "text", "/text")
            filt = self._filter(query)
            shown = render.visible_elements(case, filt)
            view = render.restrict(case, filt)
            if target not in shown and target not in view.case.links:
                # Invisible and absent targets are indistinguishable on purpose.
                raise _RequestProblem(
                    404, "unknown-target", f"no target {target!r} in this view", "/target"
                )
            try:
                challenge = store.add_challenge(case_id, target, author, text)
            except model.CaseError as exc:
                raise _RequestProblem(400, "bad-request", str(exc))
            self._send_json(
                201,
                {
                    "id": challenge.id,
                    "target": challenge.target,
                    "author": challenge.author,
                    "text": challenge.text,
                    "state": challenge.state.value,
                },
            )

        def _post_resolve(self, case_id: str, case: Case, challenge_id: str) -> None:
            data = self._body()
            outcome_name = self._body_field(data, "outcome", "/outcome")
            note = data.get("note")
            if note is not None and (not isinstance(note, str) or not note.strip()):
                raise _RequestProblem(
                    400, "bad-request", "field 'note' must be a non-empty string", "/note"
                )
            try:
                outcome = ChallengeState(outcome_name)
            except ValueError:
                raise _RequestProblem(
                    400,
                    "bad-outcome",
                    "outcome must be one of: withdrawn, sustained, resolved",
                    "/outcome",
                )
            if outcome == ChallengeState.OPEN:
                raise _RequestProblem(
                    400, "bad-outcome", "a challenge cannot be resolved to open", "/outcome"
                )
            if challenge_id not in case.challenges:
                raise _RequestProblem(
                    404, "unknown-challenge", f"no challenge {challenge_id!r}"
                )
            try:
                challenge = store.resolve_challenge(case_id, challenge_id, outcome, note)
            except model.AlreadyClosed as exc:
                raise _RequestProblem(409, "already-closed", str(exc))
            except model.MissingNote as exc:
                raise _RequestProblem(400, "missing-note", str(exc), "/note")
            except model.CaseError as exc:
                raise _RequestProblem(400, "bad-request", str(exc))
            self._send_json(
                200,
                {
                    "id": challenge.id,
                    "target": challenge.target,
                    "author": challenge.author,
                    "text": challenge.text,
                    "state": challenge.state.value,
                    "resolutionNote": challenge.resolution_note,
                },
            )

        # Static UI files (optional)

        def _serve_static(self, path: str) -> None:
            assert ui_dir is not None
            name = path.lstrip("/") or "index.html"
            root = ui_dir.resolve()
            target = (root / name).resolve()
            if not str(target).startswith(str(root)) or not target.is_file():
                if (root / "index.html").is_file():
                    # Client-side routes fall back to the app shell.
                    target = root / "index.html"
                else:
                    raise _RequestProblem(404, "not-found", f"no file for {path}")
            content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self._send(200, target.read_bytes(), content_type)

    return Handler


class ReviewService:
    """Owns the HTTP server lifecycle around one CaseStore."""

    def __init__(
        self,
        directory: Path | str,
        host: str = "127.0.0.1",
        port: int = 0,
        ui_dir: Path | str | None = None,
    ):
        self.store = CaseStore(directory)
        self._server = ThreadingHTTPServer(
            (host, port), make_handler(self.store, Path(ui_dir) if ui_dir else None)
        )
        self._server.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._server.server_address[:2]
        return str(host), int(port)

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
