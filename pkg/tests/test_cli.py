"""Tests for the relucert command line.

Certification is mocked where a real run would need a converged point.
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from relucert.cli.main import app
from relucert.harness import LedgerRow, save_certificate, write_runs_csv
from relucert.models import Classification
from relucert.utils import NotPositiveDefiniteError

from tests.test_harness import DATA_DIR, _consistent_certificate

runner = CliRunner()


def _write_candidate(path: Path) -> Path:
    path.write_text(
        json.dumps(
            {
                "schema": "candidate/1",
                "k": 2,
                "n": 2,
                "seed": 0,
                "W": [["1.0", "1.0"], ["1.0", "-1.0"]],
            }
        )
    )
    return path


def _write_ledger(path: Path) -> Path:
    rows = [
        LedgerRow(2, 2, seed, label, objective, 10, 1e-10, 0)
        for seed, label, objective in (
            (0, Classification.CANDIDATE, 0.02),
            (1, Classification.GLOBAL_LIKE, 1e-6),
            (2, Classification.UNCONVERGED, 0.3),
        )
    ]
    return write_runs_csv(rows, path)


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    """Keep the error log and default outputs inside tmp_path."""
    monkeypatch.chdir(tmp_path)


class TestMain:
    """Tests for the top-level app."""

    def test_help_lists_commands(self):
        """--help shows every subcommand."""
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        for name in ("search", "certify", "verify", "lift", "table", "cdf", "experiment"):
            assert name in result.output

    def test_version(self):
        """--version prints the package version."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert "relucert" in result.output

    def test_certify_missing_file(self):
        """Missing inputs are rejected by the argument parser."""
        result = runner.invoke(app, ["certify", "nonexistent.json"])
        assert result.exit_code != 0


class TestSearchCommand:
    """Tests for relucert search."""

    def test_requires_k_or_init(self):
        """Without --init the width must be given."""
        result = runner.invoke(app, ["search"])
        assert result.exit_code != 0

    def test_restart_from_stored_point(self, tmp_path):
        """--init runs once from the file and always stores the result."""
        result = runner.invoke(
            app,
            ["search", "--init", str(DATA_DIR / "example_k6_n6.json"), "--max-iters", "5", "--out", "run"],
        )
        assert result.exit_code == 0
        assert (tmp_path / "run" / "candidates" / "k6_n6_seed0.json").exists()
        assert len((tmp_path / "run" / "runs.csv").read_text().splitlines()) == 2

    def test_random_starts(self, tmp_path):
        """Several runs write one ledger line each."""
        result = runner.invoke(
            app, ["search", "--k", "2", "--runs", "3", "--max-iters", "20", "--out", "run"]
        )
        assert result.exit_code == 0
        assert len((tmp_path / "run" / "runs.csv").read_text().splitlines()) == 4


class TestCertifyCommand:
    """Tests for relucert certify and verify."""

    @patch("relucert.cli.certify.certify_point")
    def test_writes_certificate(self, mock_certify, tmp_path):
        """A certified point is written under --out and verifies."""
        mock_certify.return_value = _consistent_certificate()
        candidate = _write_candidate(tmp_path / "p.json")

        result = runner.invoke(app, ["certify", str(candidate), "--out", "certs"])
        assert result.exit_code == 0
        cert_path = tmp_path / "certs" / "p.json"
        assert cert_path.exists()
        assert mock_certify.call_args.kwargs["point_ref"] == "p"

        result = runner.invoke(app, ["verify", str(cert_path)])
        assert result.exit_code == 0

    @patch("relucert.cli.certify.certify_point")
    def test_refusal_with_strict(self, mock_certify, tmp_path):
        """--strict turns a refusal into exit code 2 and the refusal is logged."""
        mock_certify.side_effect = NotPositiveDefiniteError("eigenvalue bound not positive")
        candidate = _write_candidate(tmp_path / "p.json")

        result = runner.invoke(app, ["certify", str(candidate), "--strict"])
        assert result.exit_code == 2
        log = (tmp_path / "relucert-errors.log").read_text()
        assert "NotPositiveDefiniteError" in log

        result = runner.invoke(app, ["certify", str(candidate)])
        assert result.exit_code == 0

    def test_precision_from_environment(self, tmp_path):
        """RELU_CERT_PRECISION sets the starting precision."""
        candidate = _write_candidate(tmp_path / "p.json")
        with patch("relucert.cli.certify.certify_point") as mock_certify:
            mock_certify.return_value = _consistent_certificate()
            result = runner.invoke(
                app, ["certify", str(candidate)], env={"RELU_CERT_PRECISION": "512"}
            )
        assert result.exit_code == 0
        assert mock_certify.call_args.args[2] == 512

    def test_environment_overrides_flag(self, tmp_path):
        """RELU_CERT_PRECISION wins over an explicit --precision."""
        candidate = _write_candidate(tmp_path / "p.json")
        with patch("relucert.cli.certify.certify_point") as mock_certify:
            mock_certify.return_value = _consistent_certificate()
            result = runner.invoke(
                app,
                ["certify", str(candidate), "--precision", "1024"],
                env={"RELU_CERT_PRECISION": "512"},
            )
        assert result.exit_code == 0
        assert mock_certify.call_args.args[2] == 512

    def test_flag_used_without_environment(self, tmp_path):
        """Without the variable --precision is used as given."""
        candidate = _write_candidate(tmp_path / "p.json")
        with patch("relucert.cli.certify.certify_point") as mock_certify:
            mock_certify.return_value = _consistent_certificate()
            result = runner.invoke(
                app,
                ["certify", str(candidate), "--precision", "1024"],
                env={"RELU_CERT_PRECISION": ""},
            )
        assert result.exit_code == 0
        assert mock_certify.call_args.args[2] == 1024

    @pytest.mark.parametrize("value", ["lots", "32"])
    def test_invalid_environment_precision(self, tmp_path, value):
        """A malformed or too small RELU_CERT_PRECISION is a usage error."""
        candidate = _write_candidate(tmp_path / "p.json")
        with patch("relucert.cli.certify.certify_point") as mock_certify:
            result = runner.invoke(
                app, ["certify", str(candidate)], env={"RELU_CERT_PRECISION": value}
            )
        assert result.exit_code == 2
        mock_certify.assert_not_called()

    def test_verify_rejects_tampered_file(self, tmp_path):
        """A certificate whose radius was edited fails verification."""
        path = save_certificate(_consistent_certificate(), tmp_path / "cert.json")
        data = json.loads(path.read_text())
        data["r"] = repr(float(data["r"]) * 2)
        path.write_text(json.dumps(data))

        result = runner.invoke(app, ["verify", str(path)])
        assert result.exit_code == 65

    def test_bad_candidate_file(self, tmp_path):
        """A file with the wrong schema is a data error."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema": "certificate/1"}))
        result = runner.invoke(app, ["certify", str(path)])
        assert result.exit_code == 65


class TestTableCommands:
    """Tests for relucert table, cdf and experiment input handling."""

    def test_table(self, tmp_path):
        """The summary CSV has one row per (k, n)."""
        ledger = _write_ledger(tmp_path / "runs.csv")
        result = runner.invoke(app, ["table", str(ledger), "--out", "summary.csv"])
        assert result.exit_code == 0
        lines = (tmp_path / "summary.csv").read_text().splitlines()
        assert lines[0] == "k,n,runs,singular,pct_certified,pct_unverified,avg_lambda_min,avg_objective"
        assert lines[1].startswith("2,2,3,0,0.0,")

    def test_cdf(self, tmp_path):
        """The CDF lists every run in objective order."""
        ledger = _write_ledger(tmp_path / "runs.csv")
        result = runner.invoke(app, ["cdf", str(ledger), "--out", "cdf.csv"])
        assert result.exit_code == 0
        lines = (tmp_path / "cdf.csv").read_text().splitlines()
        assert len(lines) == 4
        assert lines[-1] == "2,2,0.3,1.0"

    def test_experiment_rejects_invalid_spec(self, tmp_path):
        """An inconsistent spec file is a data error."""
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"k_range": [1], "n_rule": "pairs"}))
        result = runner.invoke(app, ["experiment", str(spec)])
        assert result.exit_code == 65
