"""Tests for report.py: text and structured rendering."""

import json

from cohomology import GModule, h1, h1_loc
from matgroup import closure
from paper_checks import ClaimResult
from report import CocycleVerdict, Report, render_structured, render_text
from zmod_linalg import ResidueMatrix


def _units_report():
    group = closure([ResidueMatrix.from_rows([[3]], 8), ResidueMatrix.from_rows([[5]], 8)])
    module = GModule.natural(group)
    return Report.from_cohomology("units.json", module, h1(module), h1_loc(module))


class TestReport:
    def test_from_cohomology(self):
        report = _units_report()
        assert report.group_order == 4
        assert report.z1_order == 8
        assert report.b1_order == 4
        assert report.h1 == (2,)
        assert report.h1_loc == (2,)
        assert len(report.representatives) == 1
        assert len(report.representatives[0]) == 4

    def test_passed_follows_claims(self):
        report = Report(name="x", claims=[ClaimResult("a", "pass"), ClaimResult("b", "fail", "broken")])
        assert not report.passed
        assert Report(name="empty").passed

    def test_to_dict_skips_missing_fields(self):
        data = Report(name="bare", duration=0.5).to_dict()
        assert data == {"name": "bare", "duration_seconds": 0.5}

    def test_timing_can_be_omitted(self):
        assert "duration_seconds" not in Report(name="bare", duration=0.5).to_dict(timing=False)


class TestRenderText:
    def test_key_value_lines(self):
        text = render_text(_units_report(), timing=False)
        lines = text.splitlines()
        assert "group_order: 4" in lines
        assert "h1_loc: Z/2" in lines
        assert "h1_loc_invariant_factors: [2]" in lines
        assert any(line.startswith("h1_loc_representative[0]: ") for line in lines)
        assert not any(line.startswith("duration_seconds") for line in lines)

    def test_trivial_group_label(self):
        report = Report(name="t", h1=(), h1_loc=())
        assert "h1: 0" in render_text(report).splitlines()

    def test_claim_lines(self):
        report = Report(name="x", claims=[ClaimResult("a", "pass"), ClaimResult("b", "fail", "broken")])
        lines = render_text(report).splitlines()
        assert "PASS: a" in lines
        assert "FAIL: b (broken)" in lines

    def test_cocycle_verdict_lines(self):
        report = Report(name="x", verdict=CocycleVerdict(True, True, False))
        lines = render_text(report).splitlines()
        assert "cocycle_is_cocycle: true" in lines
        assert "cocycle_locally_trivial: true" in lines
        assert "cocycle_is_coboundary: false" in lines

    def test_unknown_verdict_prints_dash(self):
        report = Report(name="x", verdict=CocycleVerdict(False, detail="bad"))
        assert "cocycle_locally_trivial: -" in render_text(report).splitlines()


class TestRenderStructured:
    def test_json_document(self):
        data = json.loads(render_structured(_units_report(), timing=False))
        assert data["h1_loc_invariant_factors"] == [2]
        assert data["z1_order"] == 8
        assert "duration_seconds" not in data

    def test_output_is_stable(self):
        report = _units_report()
        assert render_structured(report, timing=False) == render_structured(report, timing=False)

    def test_extra_fields_are_merged(self):
        report = Report(name="quat-d", extra={"d": 29, "split_type_at_p": "split"})
        data = json.loads(render_structured(report))
        assert data["d"] == 29
        assert data["split_type_at_p"] == "split"
