"""Tests for the eac command line interface."""
from __future__ import annotations

import contextlib
import io
import json
from pathlib import Path

import pytest

from eacase import cli, dsl, lifecycle, model, patterns

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
HC = str(CORPUS / "healthcare.eac")
PATTERN = str(CORPUS / "interpretability.eap")

FULL_BINDS = [
    "--bind", "ML Model=the triage classifier",
    "--bind", "interpretable=interpretable",
    "--bind", "context=emergency care",
    "--bind", "assessment=user walkthrough study",
    "--bind", "reporting-stage=model_reporting",
]

# a preliminary-phase case whose only finding is one unevidenced warning
WARNING_ONLY = """\
case "Warned" phase preliminary

  goal G1 system "tool" context "clinic" value "equity"
  context CTX1 "Scope statement."
  claim C1 scope system "The tool is fair."
  eclaim EC1 "Audit shows fairness."
  warrant W1 "Audits establish fairness."

  link cx contextOf CTX1 -> G1
  link s1 supports C1 -> G1
  link t1 supports EC1 -> C1
  link w1 warrants W1 -> t1
"""


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestNew:
    def test_creates_slug_file(self, workdir):
        """new slugs the title into a file name and prints the path."""
        code, out, err = run_cli("new", "Fair Triage")
        assert code == cli.EXIT_OK
        assert out == "fair-triage.eac\n"
        assert err == ""
        text = (workdir / "fair-triage.eac").read_text()
        assert text == 'case "Fair Triage" phase preliminary\n'

    def test_refuses_overwrite(self, workdir):
        """new never clobbers an existing file."""
        run_cli("new", "Fair Triage")
        code, out, err = run_cli("new", "Fair Triage")
        assert code == cli.EXIT_IO
        assert out == ""
        assert err == "error: fair-triage.eac already exists\n"

    def test_id_and_phase_flags(self, workdir):
        """new honours an explicit id and phase."""
        code, out, _ = run_cli("new", "Other", "--id", "demo", "--phase", "interim")
        assert code == cli.EXIT_OK
        assert out == "demo.eac\n"
        case = dsl.parse_strict((workdir / "demo.eac").read_text(), case_id="demo")
        assert case.phase is model.PhaseTag.INTERIM

    def test_json_output(self, workdir):
        """new --json reports path, id, and phase."""
        code, out, _ = run_cli("new", "Other", "--id", "demo", "--phase", "interim", "--json")
        assert code == cli.EXIT_OK
        assert json.loads(out) == {"path": "demo.eac", "id": "demo", "phase": "interim"}

    def test_dir_flag(self, workdir):
        """new --dir places the file elsewhere."""
        (workdir / "sub").mkdir()
        code, out, _ = run_cli("new", "Fair Triage", "--dir", "sub")
        assert code == cli.EXIT_OK
        assert out == str(Path("sub") / "fair-triage.eac") + "\n"
        assert (workdir / "sub" / "fair-triage.eac").exists()


class TestValidate:
    def test_clean_case(self):
        """a sound case validates silently with exit 0."""
        code, out, err = run_cli("validate", HC)
        assert code == cli.EXIT_OK
        assert out == "0 error(s), 0 warning(s)\n"
        assert err == ""

    def test_finding_line_format(self):
        """findings print as SEVERITY CODE file:line:col message."""
        path = str(CORPUS / "defects" / "missing-warrant.eac")
        code, out, _ = run_cli("validate", path)
        assert code == cli.EXIT_FINDINGS
        lines = out.splitlines()
        assert lines[0] == (
            f"ERROR E-MISSING-WARRANT {path}:11:3 "
            "supports link t1 from evidential claim EC1 has no warrant"
        )
        assert lines[-1] == "1 error(s), 0 warning(s)"

    def test_json_payload(self):
        """validate --json carries the findings with positions."""
        path = str(CORPUS / "defects" / "missing-warrant.eac")
        code, out, _ = run_cli("validate", path, "--json")
        assert code == cli.EXIT_FINDINGS
        payload = json.loads(out)
        assert payload["ok"] is False
        assert payload["errors"] == 1
        assert payload["warnings"] == 0
        assert payload["phase"] == "operational"
        finding = payload["findings"][0]
        assert finding["code"] == "E-MISSING-WARRANT"
        assert finding["severity"] == "error"
        assert finding["targetId"] == "t1"
        assert (finding["file"], finding["line"], finding["col"]) == (path, 11, 3)

    def test_phase_flag_regates(self):
        """--phase preliminary downgrades a missing warrant to a warning."""
        path = str(CORPUS / "defects" / "missing-warrant.eac")
        code, out, _ = run_cli("validate", path, "--phase", "preliminary")
        assert code == cli.EXIT_OK
        assert out.splitlines()[0].startswith(f"WARNING W-MISSING-WARRANT {path}:11:3 ")
        assert out.splitlines()[-1] == "0 error(s), 1 warning(s)"

    def test_strict_promotes_warnings(self, workdir):
        """--strict exits nonzero on warnings alone."""
        (workdir / "warned.eac").write_text(WARNING_ONLY)
        code, out, _ = run_cli("validate", "warned.eac")
        assert code == cli.EXIT_OK
        assert out.splitlines()[-1] == "0 error(s), 1 warning(s)"
        strict_code, strict_out, _ = run_cli("validate", "warned.eac", "--strict")
        assert strict_code == cli.EXIT_FINDINGS
        assert strict_out == out

    def test_parse_diagnostics_use_same_format(self, workdir):
        """syntax problems surface as ERROR lines with positions."""
        (workdir / "broken.eac").write_text(
            'case "B" phase interim\n\n  goal g1 "x\n  claim 9C "y"\n'
        )
        code, out, _ = run_cli("validate", "broken.eac")
        assert code == cli.EXIT_FINDINGS
        lines = out.splitlines()
        assert lines[0] == "ERROR E-STRING broken.eac:3:11 unterminated string"
        assert lines[1] == "ERROR E-ID broken.eac:4:9 '9C' is not a valid identifier"
        assert lines[-1] == "2 error(s), 0 warning(s)"

    def test_missing_file(self):
        """an unreadable path is an I/O failure."""
        code, out, err = run_cli("validate", "missing-file.eac")
        assert code == cli.EXIT_IO
        assert out == ""
        assert err == "error: cannot read missing-file.eac: No such file or directory\n"

    def test_bad_phase_choice(self):
        """an unknown phase value is a usage error."""
        code, _, err = run_cli("validate", HC, "--phase", "nope")
        assert code == cli.EXIT_USAGE
        assert "invalid choice: 'nope'" in err


class TestStatus:
    def test_table_lines(self):
        """status prints one aligned id/status row per element."""
        code, out, _ = run_cli("status", HC)
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert "A1    Assumed" in lines
        assert "CTX1  Supported" in lines
        assert lines == sorted(lines)
        assert len(lines) == 15

    def test_json_mapping(self):
        """status --json maps every element id to a status label."""
        code, out, _ = run_cli("status", HC, "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert len(payload) == 15
        assert payload["G1"] == "Assumed"
        assert payload["EV1"] == "Supported"
        assert payload["C3"] == "Assumed"

    def test_explain_tree(self):
        """--explain walks the weakest chain down to its leaf."""
        code, out, _ = run_cli("status", HC, "--explain", "G1")
        assert code == cli.EXIT_OK
        assert out == (
            "G1: Assumed [weakest-child G2]\n"
            "  G2: Assumed [weakest-child C3]\n"
            "    C3: Assumed [weakest-child EC3]\n"
            "      EC3: Assumed [weakest-child A1]\n"
            "        A1: Assumed [assumption]\n"
        )

    def test_explain_unknown_id(self):
        """--explain with an unknown id is a usage error."""
        code, _, err = run_cli("status", HC, "--explain", "NOPE")
        assert code == cli.EXIT_USAGE
        assert err == "usage error: no element named 'NOPE'\n"


class TestCoverage:
    def test_healthcare_footer(self):
        """the healthcare case covers three of the thirteen stages."""
        code, out, _ = run_cli("coverage", HC)
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert lines[-1] == "3 of 13 stages covered"
        assert len(lines) == 14
        covered = [line.split()[0] for line in lines[:-1] if line.endswith("covered")]
        assert covered == ["data_analysis", "model_reporting", "system_use_monitoring"]

    def test_all_stages_footer(self):
        """the all-stages case covers everything."""
        code, out, _ = run_cli("coverage", str(CORPUS / "all-stages.eac"))
        assert code == cli.EXIT_OK
        assert out.splitlines()[-1] == "13 of 13 stages covered"

    def test_json_payload(self):
        """coverage --json carries counts and the covered partition."""
        code, out, _ = run_cli("coverage", HC, "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["counts"]["data_analysis"] == 1
        assert payload["counts"]["model_training"] == 0
        assert payload["covered"] == [
            "data_analysis", "model_reporting", "system_use_monitoring",
        ]
        assert payload["uncovered"][0] == "project_planning"
        assert payload["untagged"] == []


class TestRender:
    def test_dot_output(self):
        """render --format dot emits a graphviz digraph."""
        code, out, _ = run_cli("render", HC, "--format", "dot")
        assert code == cli.EXIT_OK
        assert out.startswith("digraph case {\n")
        assert "rankdir=BT;" in out
        assert '"G1" [shape=box' in out

    def test_md_defaults_to_auditor(self):
        """the markdown report defaults to the auditor tier."""
        code, out, _ = run_cli("render", HC, "--format", "md")
        assert code == cli.EXIT_OK
        assert "audience tier auditor." in out
        assert "Nothing was withheld from this view." in out
        assert "elements withheld" not in out

    def test_md_public_tier_redacts(self):
        """the public tier withholds restricted material."""
        code, out, _ = run_cli("render", HC, "--format", "md", "--tier", "public")
        assert code == cli.EXIT_OK
        assert "audience tier public." in out
        assert "Case sufficiency at threshold 0.50: withheld." in out
        assert "elements withheld from the public tier view." in out

    def test_goal_filter_narrows(self):
        """--goals keeps only the chosen goal's cone."""
        code, out, _ = run_cli("render", HC, "--format", "md", "--goals", "G2")
        assert code == cli.EXIT_OK
        assert "**G2**" in out
        assert "**G1**" not in out
        assert "9 elements withheld from the auditor tier view." in out

    def test_threshold_flag(self):
        """--threshold is reflected in the sufficiency line."""
        code, out, _ = run_cli("render", HC, "--format", "md", "--threshold", "0.75")
        assert code == cli.EXIT_OK
        assert "Case sufficiency at threshold 0.75:" in out

    def test_bad_stage(self):
        """an unknown stage id is a usage error."""
        code, _, err = run_cli("render", HC, "--format", "md", "--stages", "bogus_stage")
        assert code == cli.EXIT_USAGE
        assert err == "usage error: unknown lifecycle stage 'bogus_stage'\n"

    def test_out_file(self, workdir):
        """-o writes the document to a file and keeps stdout quiet."""
        code, out, _ = run_cli("render", HC, "--format", "json", "-o", "out.json")
        assert code == cli.EXIT_OK
        assert out == ""
        payload = json.loads((workdir / "out.json").read_text())
        assert payload["version"] == "1"
        assert payload["case"]["id"] == "healthcare"


class TestAppraise:
    def appraise(self, *extra: str) -> tuple[int, str, str]:
        return run_cli(
            "appraise", HC, "EV1",
            "--relevance", "relevant", "--materiality", "material",
            "--admissibility", "admissible", "--value", "0.8",
            "--assessor", "rvw-1", "--date", "2026-08-18", *extra,
        )

    def test_writes_interchange_document(self, workdir):
        """appraise records the appraisal in an interchange file."""
        code, out, _ = self.appraise("-o", "appraised.json")
        assert code == cli.EXIT_OK
        assert out == ""
        payload = json.loads((workdir / "appraised.json").read_text())
        assert payload["version"] == "1"
        entry = payload["appraisals"][0]
        assert entry["evidenceId"] == "EV1"
        assert entry["probativeValue"] == 0.8
        assert entry["relevance"] == {"verdict": "relevant"}
        assert entry["assessor"] == "rvw-1"
        assert entry["date"] == "2026-08-18"

    def test_stdout_by_default(self):
        """without -o the document goes to stdout."""
        code, out, _ = self.appraise()
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["appraisals"][0]["evidenceId"] == "EV1"

    def test_appraised_file_feeds_other_commands(self, workdir):
        """interchange output is accepted wherever a case file is."""
        self.appraise("-o", "appraised.json")
        code, out, _ = run_cli("sufficiency", "appraised.json")
        assert code == cli.EXIT_OK
        assert out.splitlines()[-1] == "case value 0.800 at threshold 0.50: sufficient"

    def test_non_evidence_target(self):
        """appraising a claim is rejected."""
        code, out, err = run_cli(
            "appraise", HC, "EC1",
            "--relevance", "relevant", "--materiality", "material",
            "--admissibility", "admissible", "--value", "0.8", "--assessor", "x",
        )
        assert code == cli.EXIT_FINDINGS
        assert out == ""
        assert err == "ERROR NotEvidence element 'EC1' is not an Evidence element\n"

    def test_value_out_of_range(self):
        """a probative value above one is rejected."""
        code, _, err = run_cli(
            "appraise", HC, "EV1",
            "--relevance", "relevant", "--materiality", "material",
            "--admissibility", "admissible", "--value", "2.0", "--assessor", "x",
        )
        assert code == cli.EXIT_FINDINGS
        assert err == "ERROR ValueOutOfRange probative value must be within [0, 1], got 2.0\n"


class TestSufficiency:
    def test_table_and_footer(self):
        """sufficiency prints per-claim rows and a case verdict."""
        code, out, _ = run_cli("sufficiency", HC)
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert "C3                1.000  sufficient" in lines
        assert "C1           unassessed  unassessed" in lines
        assert lines[-1] == "case value 1.000 at threshold 0.50: unassessed"

    def test_json_payload(self):
        """sufficiency --json mirrors the report."""
        code, out, _ = run_cli("sufficiency", HC, "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["caseValue"] == 1.0
        assert payload["caseVerdict"] == "unassessed"
        assert payload["perClaim"]["C1"] == {"value": None, "verdict": "unassessed"}
        assert payload["perClaim"]["G2"]["verdict"] == "sufficient"

    def test_threshold_flag(self):
        """--threshold changes the footer."""
        code, out, _ = run_cli("sufficiency", HC, "--threshold", "0.75")
        assert code == cli.EXIT_OK
        assert out.splitlines()[-1] == "case value 1.000 at threshold 0.75: unassessed"

    def test_threshold_out_of_range(self):
        """a threshold outside [0, 1] is rejected."""
        code, _, err = run_cli("sufficiency", HC, "--threshold", "1.5")
        assert code == cli.EXIT_FINDINGS
        assert err == "ERROR ValueOutOfRange probative value must be within [0, 1], got 1.5\n"


class TestPatternCli:
    def test_instantiate_fragment(self):
        """instantiate substitutes bindings and prefixes ids."""
        code, out, _ = run_cli("pattern", "instantiate", PATTERN, *FULL_BINDS, "--prefix", "hc")
        assert code == cli.EXIT_OK
        assert out == (
            'claim hcC1 scope system stage model_reporting "The the triage classifier '
            'is sufficiently interpretable in the intended emergency care."\n'
            'eclaim hcEC1 "The user walkthrough study demonstrates that outputs of the '
            'the triage classifier can be understood by its users."\n'
            'warrant hcW1 "The user walkthrough study is an accepted way to establish '
            'interpretability for models of this kind."\n'
            "link hcs1 supports hcEC1 -> hcC1\n"
            "link hcw1 warrants hcW1 -> hcs1\n"
        )

    def test_instantiate_json(self):
        """instantiate --json lists the new elements and links."""
        code, out, _ = run_cli("pattern", "instantiate", PATTERN, *FULL_BINDS, "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        ids = [e["id"] for e in payload["elements"]]
        assert ids == ["C1", "EC1", "W1"]
        assert payload["elements"][0]["stage"] == "model_reporting"

    def test_unknown_slot(self):
        """binding an undeclared slot fails."""
        code, _, err = run_cli(
            "pattern", "instantiate", PATTERN, "--bind", "stakeholders=clinicians",
        )
        assert code == cli.EXIT_FINDINGS
        assert err == "ERROR UnknownSlot pattern declares no slot named 'stakeholders'\n"

    def test_missing_bindings(self):
        """leaving slots unbound fails and names them."""
        code, _, err = run_cli(
            "pattern", "instantiate", PATTERN, "--bind", "ML Model=the tool",
        )
        assert code == cli.EXIT_FINDINGS
        assert err.startswith("ERROR MissingBinding missing bindings: ")

    def test_malformed_bind(self):
        """--bind without an equals sign is a usage error."""
        code, _, err = run_cli("pattern", "instantiate", PATTERN, "--bind", "oops")
        assert code == cli.EXIT_USAGE
        assert err == "usage error: --bind needs name=value, got 'oops'\n"

    def test_derive_two_files(self, workdir):
        """derive generalises two case files into a parseable pattern."""
        src = Path(HC).read_text()
        (workdir / "a.eac").write_text(src)
        (workdir / "b.eac").write_text(src)
        code, out, _ = run_cli("pattern", "derive", "a.eac", "b.eac")
        assert code == cli.EXIT_OK
        pattern = patterns.parse_pattern_strict(out)
        assert pattern.id == "p-a-b"
        assert "a, b" in pattern.intent

    def test_derive_needs_two(self):
        """derive refuses a single case."""
        code, _, err = run_cli("pattern", "derive", HC)
        assert code == cli.EXIT_FINDINGS
        assert err == "ERROR TooFewCases pattern derivation needs at least two cases, got 1\n"


class TestSnapshotCli:
    def test_default_output_path(self, workdir):
        """snapshot writes <stem>.<label>.eacs beside the case."""
        (workdir / "nest").mkdir()
        (workdir / "nest" / "inner.eac").write_text('case "N" phase preliminary\n')
        code, out, _ = run_cli("snapshot", str(Path("nest") / "inner.eac"), "--label", "v1")
        assert code == cli.EXIT_OK
        path_part, digest_part = out.split()
        assert path_part == str(Path("nest") / "inner.v1.eacs")
        assert (workdir / "nest" / "inner.v1.eacs").exists()
        case = dsl.parse_strict((workdir / "nest" / "inner.eac").read_text(), case_id="inner")
        assert digest_part == "sha256:" + lifecycle.case_digest(case)

    def test_snapshot_round_trips(self, workdir):
        """the written snapshot parses back to the same case."""
        (workdir / "hc.eac").write_text(Path(HC).read_text())
        code, out, _ = run_cli("snapshot", "hc.eac", "--label", "baseline", "-o", "snap.eacs")
        assert code == cli.EXIT_OK
        assert out.startswith("snap.eacs sha256:")
        snap = lifecycle.parse_snapshot((workdir / "snap.eacs").read_text())
        assert snap.label == "baseline"
        assert snap.digest == lifecycle.case_digest(snap.case())

    def test_json_output(self, workdir):
        """snapshot --json reports path, label, and digest."""
        (workdir / "hc.eac").write_text(Path(HC).read_text())
        code, out, _ = run_cli("snapshot", "hc.eac", "--label", "v1", "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["path"] == "hc.v1.eacs"
        assert payload["label"] == "v1"
        assert len(payload["digest"]) == 64

    def test_bad_label(self, workdir):
        """a label with a space is a usage error."""
        (workdir / "hc.eac").write_text(Path(HC).read_text())
        code, _, err = run_cli("snapshot", "hc.eac", "--label", "bad label")
        assert code == cli.EXIT_USAGE
        assert err == (
            "usage error: snapshot label 'bad label' must contain only "
            "letters, digits, dot, dash, underscore\n"
        )


class TestDiffCli:
    @pytest.fixture()
    def snaps(self, workdir):
        src = Path(HC).read_text()
        (workdir / "hc.eac").write_text(src)
        thinned = "\n".join(
            line for line in src.splitlines()
            if " W1 " not in line and not line.strip().startswith("link w1 ")
        ) + "\n"
        (workdir / "hc2.eac").write_text(thinned)
        run_cli("snapshot", "hc.eac", "--label", "before", "-o", "before.eacs")
        run_cli("snapshot", "hc2.eac", "--label", "after", "-o", "after.eacs")
        return workdir

    def test_identical(self, snaps):
        """diffing a snapshot against itself reports no changes."""
        code, out, _ = run_cli("diff", "before.eacs", "before.eacs")
        assert code == cli.EXIT_OK
        assert out == "snapshots are identical\n"

    def test_change_lines(self, snaps):
        """structural, status, and finding changes each get a line."""
        code, out, _ = run_cli("diff", "before.eacs", "after.eacs")
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert "removed element W1" in lines
        assert "removed link w1" in lines
        assert "status C1: Supported -> Undeveloped" in lines
        assert "finding appeared: E-MISSING-WARRANT t1" in lines

    def test_reverse_direction(self, snaps):
        """the reverse diff reports additions and cleared findings."""
        code, out, _ = run_cli("diff", "after.eacs", "before.eacs")
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert "added element W1" in lines
        assert "status C1: Undeveloped -> Supported" in lines
        assert "finding cleared: E-MISSING-WARRANT t1" in lines

    def test_phase_line(self, snaps):
        """a phase change prints a from -> to line."""
        src = Path(HC).read_text().replace("phase operational", "phase preliminary", 1)
        (snaps / "hc3.eac").write_text(src)
        run_cli("snapshot", "hc3.eac", "--label", "early", "-o", "early.eacs")
        code, out, _ = run_cli("diff", "before.eacs", "early.eacs")
        assert code == cli.EXIT_OK
        assert "phase: operational -> preliminary" in out.splitlines()

    def test_json_payload(self, snaps):
        """diff --json carries the full changeset."""
        code, out, _ = run_cli("diff", "before.eacs", "after.eacs", "--json")
        assert code == cli.EXIT_OK
        payload = json.loads(out)
        assert payload["from"] == "before"
        assert payload["to"] == "after"
        assert payload["empty"] is False
        assert payload["elements"]["removed"] == ["W1"]
        assert payload["statusDeltas"]["C1"] == {
            "before": "Supported", "after": "Undeveloped",
        }
        assert "E-MISSING-WARRANT t1" in payload["findings"]["added"]

    def test_missing_snapshot(self, snaps):
        """a missing snapshot file is an I/O failure."""
        code, _, err = run_cli("diff", "before.eacs", "nope.eacs")
        assert code == cli.EXIT_IO
        assert err == "error: cannot read nope.eacs: No such file or directory\n"


class TestConfig:
    @pytest.fixture()
    def configured(self, workdir):
        (workdir / "case.eac").write_text(
            'case "Cfg" phase preliminary\n\n  goal G1 "Vague hope"\n'
        )
        (workdir / cli.CONFIG_NAME).write_text(
            'phase = "operational"\nthreshold = 0.9\ntier = "public"\n'
        )
        return workdir

    def test_config_phase_applies(self, configured):
        """ea.toml in the case directory sets the validation phase."""
        code, out, _ = run_cli("validate", "case.eac")
        assert code == cli.EXIT_FINDINGS
        codes = [line.split()[1] for line in out.splitlines()[:-1]]
        assert "E-MISSING-CONTEXT" in codes

    def test_flag_beats_config(self, configured):
        """an explicit --phase overrides the config."""
        code, out, _ = run_cli("validate", "case.eac", "--phase", "preliminary")
        assert code == cli.EXIT_FINDINGS
        codes = [line.split()[1] for line in out.splitlines()[:-1]]
        assert codes == ["E-UNDERSPECIFIED-GOAL"]

    def test_config_threshold_and_tier(self, configured):
        """threshold and tier come from the config when flags are absent."""
        _, out, _ = run_cli("sufficiency", "case.eac")
        assert out.splitlines()[-1] == "case value unassessed at threshold 0.90: unassessed"
        _, rendered, _ = run_cli("render", "case.eac", "--format", "md")
        assert "audience tier public." in rendered
        _, overridden, _ = run_cli("render", "case.eac", "--format", "md", "--tier", "auditor")
        assert "audience tier auditor." in overridden

    def test_bad_config_phase(self, configured):
        """an unknown phase in the config is a usage error."""
        (configured / cli.CONFIG_NAME).write_text('phase = "bogus"\n')
        code, _, err = run_cli("validate", "case.eac")
        assert code == cli.EXIT_USAGE
        assert err == "usage error: unknown phase: 'bogus'\n"

    def test_config_only_read_from_case_directory(self, configured):
        """a config in the working directory does not leak elsewhere."""
        (configured / "sub").mkdir()
        (configured / "sub" / "case.eac").write_text(
            'case "Cfg" phase preliminary\n\n  goal G1 "Vague hope"\n'
        )
        code, out, _ = run_cli("validate", str(Path("sub") / "case.eac"))
        assert code == cli.EXIT_FINDINGS
        codes = [line.split()[1] for line in out.splitlines()[:-1]]
        assert codes == ["E-UNDERSPECIFIED-GOAL"]


class TestUsage:
    def test_unknown_command(self):
        """an unknown subcommand is a usage error."""
        code, _, err = run_cli("bogus")
        assert code == cli.EXIT_USAGE
        assert "invalid choice: 'bogus'" in err

    def test_no_command(self):
        """invoking eac without a subcommand is a usage error."""
        code, _, err = run_cli()
        assert code == cli.EXIT_USAGE
        assert "required: command" in err

    def test_serve_missing_directory(self):
        """serve on a missing store directory is an I/O failure."""
        code, _, err = run_cli("serve", "missing-dir")
        assert code == cli.EXIT_IO
        assert err == "error: store directory missing-dir does not exist\n"
