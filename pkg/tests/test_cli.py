import json

import pytest
from click.testing import CliRunner

from ranshield.cli import main
from ranshield.evalkit import FIXTURES_DIR

CORPUS = str(FIXTURES_DIR / "corpus.json")
NULL_CIPHER_TRACE = str(FIXTURES_DIR / "traces" / "Null-Cipher-Integrity.jsonl")


@pytest.fixture()
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(main, ["--state-dir", ".state", *args])


class TestKbCommands:
    def test_ingest_reports_counts(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "kb", "ingest", CORPUS)
            assert result.exit_code == 0
            assert "ingested 32 techniques" in result.output

    def test_missing_corpus_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "kb", "ingest", "nope.json")
            assert result.exit_code == 1
            assert "FileUnreadable" in result.output

    def test_malformed_corpus_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            with open("bad.json", "w") as fh:
                json.dump({"version": "x", "techniques": [{"technique_id": "nope"}]}, fh)
            result = _invoke(runner, "kb", "ingest", "bad.json")
            assert result.exit_code == 1


class TestTraceCommands:
    def test_ingest_summary(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "trace", "ingest", "t1", NULL_CIPHER_TRACE)
            assert result.exit_code == 0
            assert "trace t1:" in result.output

    def test_missing_file_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "trace", "ingest", "t1", "missing.jsonl")
            assert result.exit_code == 1


class TestScenarioAndApprovals:
    def test_run_parks_at_approval_then_decide_mitigates(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "scenario", "run", "Null-Cipher-Integrity")
            assert result.exit_code == 0
            assert "phase=awaiting_approval" in result.output
            assert "pending approval: APR-0001" in result.output

            listed = _invoke(runner, "approvals", "list")
            assert listed.exit_code == 0
            assert "APR-0001" in listed.output
            assert "security.ciphering_algorithms" in listed.output

            decided = _invoke(runner, "approvals", "decide", "APR-0001", "approve")
            assert decided.exit_code == 0
            assert "approved" in decided.output
            assert "-> mitigated" in decided.output

    def test_rejection_marks_incident_failed(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            _invoke(runner, "scenario", "run", "Null-Cipher-Integrity")
            decided = _invoke(runner, "approvals", "decide", "APR-0001", "reject")
            assert decided.exit_code == 0
            assert "-> failed" in decided.output

    def test_double_decision_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            _invoke(runner, "scenario", "run", "Null-Cipher-Integrity")
            assert _invoke(runner, "approvals", "decide", "APR-0001",
                           "approve").exit_code == 0
            second = _invoke(runner, "approvals", "decide", "APR-0001", "reject")
            assert second.exit_code == 1
            assert "AlreadyDecided" in second.output

    def test_escalated_scenario_terminates_without_approval(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "scenario", "run", "Downlink-IMSI")
            assert result.exit_code == 0
            assert "phase=escalated" in result.output
            listed = _invoke(runner, "approvals", "list")
            assert "no pending approvals" in listed.output

    def test_unknown_scenario_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "scenario", "run", "No-Such-Scenario")
            assert result.exit_code == 1

    def test_multiple_runs_are_deterministic(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "scenario", "run", "Downlink-IMSI", "--runs", "3")
            assert result.exit_code == 0
            lines = [l for l in result.output.splitlines() if "phase=" in l]
            assert len(lines) == 3
            assert all(l.endswith("phase=escalated") for l in lines)


class TestEvalCommand:
    def test_eval_writes_reports(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "eval", "--runs", "1", "--results-dir", "out")
            assert result.exit_code == 0
            assert "Mean" in result.output
            metrics = json.loads(open("out/metrics.json").read())
            assert metrics["mean"]["top3"] == 1.0
            assert len(json.loads(open("out/records.json").read())) == 10
            assert "Top-3" in open("out/metrics.txt").read()


class TestUsageAndExitCodes:
    def test_unknown_command_exits_2(self, runner):
        assert runner.invoke(main, ["frobnicate"]).exit_code == 2

    def test_missing_argument_exits_2(self, runner):
        assert runner.invoke(main, ["kb", "ingest"]).exit_code == 2

    def test_serve_with_bad_config_exits_1(self, runner, tmp_path):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = _invoke(runner, "serve", "--config", "missing.json")
            assert result.exit_code == 1

    def test_help_runs_clean(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "scenario" in result.output
