"""Lifecycle coverage, sealed snapshots, case diffing."""

from dataclasses import replace
from datetime import datetime, timezone

import pytest

from eacase import dsl, lifecycle, model
from eacase.lifecycle import (
    InvalidLabel,
    SnapshotCorrupt,
    case_digest,
    coverage,
    diff,
    parse_snapshot,
    snapshot,
)
from eacase.model import Challenge, ChallengeState, PhaseTag
from eacase.stages import LifecycleStage

NOON = datetime(2026, 8, 18, 12, 0, tzinfo=timezone.utc)

CHAIN = (
    'case "T" phase preliminary\n'
    '  goal G1 system "a" context "b" value "c"\n'
    '  context CTX1 "ctx"\n'
    '  link x1 contextOf CTX1 -> G1\n'
    '  eclaim EC1 "e"\n'
    '  evidence EV1 at "files/e.pdf" "artefact"\n'
    '  warrant W1 "w"\n'
    '  link e1 evidences EV1 -> EC1\n'
    '  link t1 supports EC1 -> G1\n'
    '  link w1 warrants W1 -> t1\n'
)


def build(src=CHAIN, case_id=None):
    return dsl.parse_strict(src, case_id=case_id)


class TestCoverage:
    def test_counts_tagged_claims_per_stage(self):
        src = (
            'case "T" phase preliminary\n'
            '  claim C1 scope project stage data_analysis "a"\n'
            '  claim C2 scope project stage data_analysis "b"\n'
            '  claim C3 scope system stage model_reporting "c"\n'
            '  claim C4 scope system "untagged"\n'
        )
        report = coverage(build(src))
        assert report.counts[LifecycleStage.DATA_ANALYSIS] == 2
        assert report.counts[LifecycleStage.MODEL_REPORTING] == 1
        assert report.untagged == ("C4",)

    def test_covered_and_uncovered_partition_all_stages(self):
        report = coverage(build())
        assert set(report.covered) | set(report.uncovered) == set(LifecycleStage)
        assert report.covered == ()
        assert report.total_stages == 13

    def test_only_property_claims_count(self):
        # the evidential claim and goal carry no stage and never could
        report = coverage(build())
        assert report.untagged == ()

    def test_json_dict_lists_every_stage(self):
        payload = coverage(build()).to_json_dict()
        assert len(payload["counts"]) == 13
        assert payload["covered"] == []


class TestSnapshot:
    def test_header_format(self):
        snap = snapshot(build(), "baseline", NOON)
        head = snap.header()
        assert head == f"eac-snapshot baseline 2026-08-18T12:00:00Z sha256:{snap.digest}"

    def test_digest_matches_canonical_text(self):
        case = build()
        snap = snapshot(case, "baseline", NOON)
        assert snap.digest == case_digest(case)
        assert snap.frozen == dsl.serialize(case)

    def test_round_trip_through_text(self):
        snap = snapshot(build(), "baseline", NOON)
        back = parse_snapshot(snap.to_text())
        assert back == snap
        assert back.case().same_structure(build())

    def test_label_validation(self):
        for bad in ("", "has space", "Ümlaut", "x/y"):
            with pytest.raises(InvalidLabel):
                snapshot(build(), bad, NOON)

    def test_tampered_body_detected(self):
        snap = snapshot(build(), "baseline", NOON)
        tampered = snap.to_text().replace("artefact", "artifact")
        with pytest.raises(SnapshotCorrupt):
            parse_snapshot(tampered)

    def test_garbled_header_detected(self):
        snap = snapshot(build(), "baseline", NOON)
        with pytest.raises(SnapshotCorrupt):
            parse_snapshot("eac-snapshot only-a-header\n")
        with pytest.raises(SnapshotCorrupt):
            parse_snapshot("not a snapshot at all\n" + snap.frozen)

    def test_default_timestamp_is_utc_now(self):
        snap = snapshot(build(), "baseline")
        assert snap.taken_at.tzinfo is not None

    def test_digest_ignores_authoring_order(self):
        reordered = (
            'case "T" phase preliminary\n'
            '  warrant W1 "w"\n'
            '  evidence EV1 at "files/e.pdf" "artefact"\n'
            '  eclaim EC1 "e"\n'
            '  context CTX1 "ctx"\n'
            '  goal G1 system "a" context "b" value "c"\n'
            '  link t1 supports EC1 -> G1\n'
            '  link e1 evidences EV1 -> EC1\n'
            '  link x1 contextOf CTX1 -> G1\n'
            '  link w1 warrants W1 -> t1\n'
        )
        assert case_digest(build(reordered)) == case_digest(build())


class TestDiff:
    def test_empty_changeset(self):
        a = snapshot(build(case_id="t"), "a", NOON)
        b = snapshot(build(case_id="t"), "b", NOON)
        changes = diff(a, b)
        assert changes.empty
        assert (changes.from_label, changes.to_label) == ("a", "b")

    def test_added_and_removed_elements(self):
        before = build(case_id="t")
        after = build(CHAIN + '  claim C9 scope system "new claim"\n', case_id="t")
        changes = diff(snapshot(before, "a", NOON), snapshot(after, "b", NOON))
        assert changes.added_elements == ("C9",)
        assert not changes.empty
        reverse = diff(snapshot(after, "a", NOON), snapshot(before, "b", NOON))
        assert reverse.removed_elements == ("C9",)

    def test_modified_element_lists_field_changes(self):
        after_src = CHAIN.replace('warrant W1 "w"', 'warrant W1 "w, revised"')
        changes = diff(
            snapshot(build(case_id="t"), "a", NOON),
            snapshot(build(after_src, case_id="t"), "b", NOON),
        )
        (entry,) = changes.modified_elements
        assert entry.id == "W1"
        fields = {change.field: (change.before, change.after) for change in entry.fields}
        assert fields == {"text": ("w", "w, revised")}

    def test_link_and_challenge_sections(self):
        before = build(case_id="t")
        after_case = model.attach_challenge(
            before, Challenge("ch1", "t1", "rev", "Odd step.")
        )
        after_case = replace(
            after_case, links={k: v for k, v in after_case.links.items() if k != "x1"}
        )
        changes = diff(snapshot(before, "a", NOON), snapshot(after_case, "b", NOON))
        assert changes.removed_links == ("x1",)
        assert changes.added_challenges == ("ch1",)

    def test_status_deltas_use_labels(self):
        before = build(case_id="t")
        contested = model.attach_challenge(
            before, Challenge("ch1", "EC1", "rev", "Doubt.")
        )
        changes = diff(snapshot(before, "a", NOON), snapshot(contested, "b", NOON))
        assert changes.status_deltas["EC1"] == ("Supported", "Contested")
        assert changes.status_deltas["G1"] == ("Supported", "Contested")
        assert "EV1" not in changes.status_deltas

    def test_finding_deltas_track_phase_regating(self):
        case = build(case_id="t")
        promoted = replace(case, phase=PhaseTag.OPERATIONAL)
        unwarranted = replace(
            promoted, links={k: v for k, v in promoted.links.items() if k != "w1"}
        )
        changes = diff(snapshot(case, "a", NOON), snapshot(unwarranted, "b", NOON))
        assert changes.phase_change == ("preliminary", "operational")
        assert "E-MISSING-WARRANT t1" in changes.finding_additions

    def test_finding_removals(self):
        broken = replace(
            build(case_id="t"),
            links={k: v for k, v in build(case_id="t").links.items() if k != "w1"},
        )
        fixed = build(case_id="t")
        changes = diff(snapshot(broken, "a", NOON), snapshot(fixed, "b", NOON))
        assert "W-MISSING-WARRANT t1" in changes.finding_removals

    def test_title_change(self):
        before = build(case_id="t")
        after = replace(before, title="Renamed case")
        changes = diff(snapshot(before, "a", NOON), snapshot(after, "b", NOON))
        assert changes.title_change == ("T", "Renamed case")
