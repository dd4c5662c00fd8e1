"""Tests for paper_checks.py: scenario runners and claim bookkeeping."""

from unittest import mock

import pytest

from config import Config
from paper_checks import ClaimResult, PaperVerifier, all_passed, summarize
from scenarios import ScenarioError


@pytest.fixture
def verifier():
    return PaperVerifier(printer=mock.MagicMock())


@pytest.fixture
def small_samples(monkeypatch):
    monkeypatch.setattr(Config, "STABILIZER_SAMPLE_SIZE", 6)
    monkeypatch.setattr(Config, "CYCLIC_SWEEP_SIZE", 10)
    monkeypatch.setattr(Config, "DIRECT_SUM_SAMPLE_SIZE", 4)


class TestClaimResult:
    def test_passed(self):
        assert ClaimResult("a", "pass").passed
        assert not ClaimResult("a", "fail").passed

    def test_summary_helpers(self):
        results = [ClaimResult("a", "pass"), ClaimResult("b", "fail")]
        assert not all_passed(results)
        assert summarize(results) == "1/2 claims passed"
        assert all_passed([])


class TestDispatch:
    def test_unknown_scenario(self, verifier):
        with pytest.raises(ScenarioError, match="unknown scenario"):
            verifier.run("bogus")

    def test_results_are_printed(self, verifier):
        results = verifier.run("dz-p2")
        verifier.printer.step.assert_called_once_with("scenario dz-p2")
        assert verifier.printer.success.call_count == sum(r.passed for r in results)

    def test_raising_claim_becomes_failure(self, verifier):
        def broken():
            raise RuntimeError("boom")

        result = verifier._claim("broken claim", broken)
        assert not result.passed
        assert result.detail == "RuntimeError: boom"


class TestScenarios:
    def test_counterexample_claims_pass(self, verifier):
        results = verifier.run("dz-p2")
        assert len(results) == 8
        assert all_passed(results), [r for r in results if not r.passed]

    def test_counterexample_is_fixed_at_2_and_3(self, verifier):
        with pytest.raises(ScenarioError):
            verifier.run("dz-p2", p=3)

    def test_unipotent_claims_pass_for_3(self, verifier):
        results = verifier.run("lemma51", p=3)
        assert [r.name for r in results][0] == "lemma51 p=3: Z is a cocycle"
        assert all_passed(results), [r for r in results if not r.passed]

    def test_h2_claims_pass_for_3(self, verifier):
        results = verifier.run("prop54-h2", p=3)
        assert len(results) == 7
        assert all_passed(results), [r for r in results if not r.passed]

    def test_h2_needs_n_2(self, verifier):
        with pytest.raises(ScenarioError):
            verifier.run("prop54-h2", n=3)

    def test_stabilizer_family_small(self, verifier, small_samples):
        results = verifier.run("prop21-family", p=3, n=1)
        assert len(results) == 3
        assert all_passed(results), [r for r in results if not r.passed]
        (sampled,) = [r for r in results if r.name == "prop21-family: random stabilizer subgroups"]
        assert "injective Sylow restriction" in sampled.detail

    def test_stabilizer_family_rejects_2(self, verifier):
        with pytest.raises(ScenarioError, match="odd prime"):
            verifier.run("prop21-family", p=2)

    def test_cyclic_sweep_small(self, verifier, small_samples):
        results = verifier.run("cyclic-sweep")
        assert [r.name for r in results] == ["cyclic-sweep: GL2(Z/8)", "cyclic-sweep: GL2(Z/9)"]
        assert all_passed(results)

    def test_direct_sum_small(self, verifier, small_samples):
        results = verifier.run("direct-sum")
        assert len(results) == 1
        assert all_passed(results), results[0].detail
