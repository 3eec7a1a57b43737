"""Tests for stored artifacts, summary tables and experiment orchestration."""

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from relucert.certify import (
    Certificate,
    TransferLink,
    compute_radius,
    nonglobal_check,
    transfer_bounds,
)
from relucert.certify.disjoint import singular_pairs_in_ball
from relucert.harness import (
    ExperimentSpec,
    LedgerRow,
    emit_cdf,
    load_candidate,
    load_certificate,
    load_point,
    read_runs_csv,
    run_experiment,
    save_candidate,
    save_certificate,
    summarize,
    write_runs_csv,
)
from relucert.models import Classification, GDConfig, TargetBasis, WeightPoint
from relucert.rigor import BallSpec, Enclosure, third_order_bound_LA
from relucert.search import gd_run
from relucert.utils import InvariantViolationOnLoadError, SchemaMismatchError

DATA_DIR = Path(__file__).parent.parent / "data"

TILTED = np.array([[1.0, 1.0], [1.0, -1.0]])


def _consistent_certificate(point_ref: str = "k2_n2_seed0") -> Certificate:
    """A certificate whose derived fields are recomputed exactly as on load."""
    W = WeightPoint(TILTED)
    V = TargetBasis.standard(2)
    p, epsilon, lambda_min, alpha = 256, 1e-8, 0.1, 0.01
    B = third_order_bound_LA(BallSpec.around(W, V, alpha, p), 2, 2).upper_float()
    r = compute_radius(epsilon, lambda_min, B, alpha, p)
    result = nonglobal_check(r, epsilon, W, V, p)
    origin_ok, bad = singular_pairs_in_ball(W, V, r, p)
    strict = (Enclosure.exact(lambda_min, p) - Enclosure.exact(B, p) * r).is_positive()
    cert = Certificate(
        point=W,
        point_ref=point_ref,
        targets=V,
        epsilon=epsilon,
        lambda_min=lambda_min,
        B=B,
        alpha=alpha,
        r=r,
        objective_at_point=result.objective,
        margin=result.margin,
        nonglobal=result.nonglobal,
        differentiable_ball=origin_ok and not bad,
        strict=strict,
        precision_bits=p,
    )
    r_member, lambda_lower, objective_lower = transfer_bounds(cert, 1e-6, V)
    cert.transfer_chain.append(
        TransferLink(
            member_ref="k2_n2_seed1",
            distance=1e-6,
            r_member=r_member,
            lambda_lower=lambda_lower,
            objective_lower=objective_lower,
        )
    )
    return cert


def _row(seed: int, label: Classification, objective: float, k: int = 2, n: int = 2) -> LedgerRow:
    return LedgerRow(
        k=k,
        n=n,
        seed=seed,
        classification=label,
        objective=objective,
        iterations=100,
        grad_norm=1e-10,
        descent_violations=0,
    )


# =============================================================================
# EXPERIMENT SPEC TESTS
# =============================================================================


class TestExperimentSpec:
    """Tests for ExperimentSpec validation."""

    def test_n_rules(self):
        """n=k and n=k+1 derive n from each k."""
        assert ExperimentSpec(k_range=[3, 4]).configurations() == [(3, 3), (4, 4)]
        assert ExperimentSpec(k_range=[3], n_rule="n=k+1").configurations() == [(3, 4)]

    def test_explicit_pairs(self):
        """The pairs rule uses the listed (k, n)."""
        spec = ExperimentSpec(k_range=[1], n_rule="pairs", pairs=[(8, 9)])
        assert spec.configurations() == [(8, 9)]

    def test_rejects_fewer_neurons_than_targets(self):
        """n >= k >= 1 for every configuration."""
        with pytest.raises(ValidationError):
            ExperimentSpec(k_range=[1], n_rule="pairs", pairs=[(3, 2)])

    def test_pairs_rule_needs_pairs(self):
        """An empty pairs list is rejected."""
        with pytest.raises(ValidationError):
            ExperimentSpec(k_range=[1], n_rule="pairs")

    def test_precision_floor(self):
        """Precision below 64 bits is rejected."""
        with pytest.raises(ValidationError):
            ExperimentSpec(k_range=[2], precision_bits=32)


# =============================================================================
# CANDIDATE FILE TESTS
# =============================================================================


class TestCandidateFiles:
    """Tests for save_candidate, load_candidate and load_point."""

    def test_round_trip_is_bit_identical(self, tmp_path):
        """Every double of the terminal point survives the file."""
        record = gd_run(GDConfig(k=2, n=3, seed=4, max_iters=50), TargetBasis.standard(2))
        path = save_candidate(record, tmp_path / "candidates" / f"{record.point_ref}.json")
        loaded = load_candidate(path)
        np.testing.assert_array_equal(loaded.terminal.W, record.terminal.W)
        assert loaded.objective == record.objective
        assert loaded.grad_norm == record.grad_norm
        assert loaded.classification is record.classification
        assert loaded.config == record.config
        assert not (path.parent / (path.name + ".tmp")).exists()

    def test_numbers_stored_as_strings(self, tmp_path):
        """Floats are written as decimal strings."""
        record = gd_run(GDConfig(k=1, n=1, seed=0, max_iters=3), TargetBasis.standard(1))
        data = json.loads(save_candidate(record, tmp_path / "c.json").read_text())
        assert data["schema"] == "candidate/1"
        assert isinstance(data["objective"], str)
        assert float(data["W"][0][0]) == record.terminal.W[0, 0]

    def test_unknown_fields_warn(self, tmp_path):
        """Extra fields are ignored with a warning."""
        path = tmp_path / "c.json"
        path.write_text(
            json.dumps({"schema": "candidate/1", "k": 1, "n": 1, "seed": 0, "W": [["0.5"]], "note": "x"})
        )
        with pytest.warns(UserWarning, match="note"):
            point = load_point(path)
        assert point.W[0, 0] == 0.5

    def test_wrong_schema(self, tmp_path):
        """A certificate file is not a candidate."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"schema": "certificate/1"}))
        with pytest.raises(SchemaMismatchError):
            load_candidate(path)

    def test_shape_mismatch(self, tmp_path):
        """W must have n rows of length k."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"schema": "candidate/1", "k": 2, "n": 1, "seed": 0, "W": [["1"]]}))
        with pytest.raises(SchemaMismatchError):
            load_point(path)

    def test_starting_point_files(self):
        """The bundled examples are starting points without run data."""
        assert load_point(DATA_DIR / "example_k6_n6.json").W.shape == (6, 6)
        assert load_point(DATA_DIR / "example_k8_n9.json").W.shape == (9, 8)
        with pytest.raises(SchemaMismatchError):
            load_candidate(DATA_DIR / "example_k6_n6.json")


# =============================================================================
# CERTIFICATE FILE TESTS
# =============================================================================


class TestCertificateFiles:
    """Tests for save_certificate and re-validating loads."""

    def test_round_trip(self, tmp_path):
        """A consistent certificate loads back with identical fields."""
        cert = _consistent_certificate()
        loaded = load_certificate(save_certificate(cert, tmp_path / "cert.json"))
        for name in ("epsilon", "lambda_min", "B", "alpha", "r", "margin"):
            assert getattr(loaded, name) == getattr(cert, name)
        assert loaded.nonglobal and loaded.differentiable_ball and loaded.strict
        assert loaded.transfer_chain == cert.transfer_chain
        np.testing.assert_array_equal(loaded.point.W, TILTED)

    def test_tampered_radius(self, tmp_path):
        """A radius that does not follow from the inputs is rejected."""
        path = save_certificate(_consistent_certificate(), tmp_path / "cert.json")
        data = json.loads(path.read_text())
        data["r"] = repr(float(data["r"]) / 2)
        path.write_text(json.dumps(data))
        with pytest.raises(InvariantViolationOnLoadError, match="r is"):
            load_certificate(path)

    def test_inflated_margin(self, tmp_path):
        """A margin above the recomputed one is rejected."""
        path = save_certificate(_consistent_certificate(), tmp_path / "cert.json")
        data = json.loads(path.read_text())
        data["margin"] = repr(float(data["margin"]) + 0.01)
        path.write_text(json.dumps(data))
        with pytest.raises(InvariantViolationOnLoadError, match="margin"):
            load_certificate(path)

    @pytest.mark.parametrize(
        "field, value", [("lambda_lower", "5.0"), ("objective_lower", "9.0"), ("r_member", "1e-9")]
    )
    def test_tampered_transfer_link(self, tmp_path, field, value):
        """Transfer bounds are recomputed from the stored distance."""
        path = save_certificate(_consistent_certificate(), tmp_path / "cert.json")
        data = json.loads(path.read_text())
        data["transfer_chain"][0][field] = value
        path.write_text(json.dumps(data))
        with pytest.raises(InvariantViolationOnLoadError, match=field):
            load_certificate(path)

    def test_full_revalidation_checks_epsilon(self, tmp_path):
        """With full=True a too-small epsilon is caught."""
        path = save_certificate(_consistent_certificate(), tmp_path / "cert.json")
        load_certificate(path)
        with pytest.raises(InvariantViolationOnLoadError):
            load_certificate(path, full=True)

    def test_wrong_schema(self, tmp_path):
        """Certificates need the certificate schema tag."""
        path = tmp_path / "cert.json"
        path.write_text(json.dumps({"schema": "candidate/1"}))
        with pytest.raises(SchemaMismatchError):
            load_certificate(path)


# =============================================================================
# TABLE TESTS
# =============================================================================


class TestSummarize:
    """Tests for summarize."""

    def test_transfers_count_as_certified(self):
        """A member covered by a transfer link is certified with its transferred bound."""
        rows = [
            _row(0, Classification.CANDIDATE, 0.02),
            _row(1, Classification.CANDIDATE, 0.04),
            _row(2, Classification.GLOBAL_LIKE, 1e-5),
            _row(3, Classification.ANOMALY, 0.005),
        ]
        (summary,) = summarize(rows, [_consistent_certificate()])
        assert (summary.k, summary.n, summary.runs) == (2, 2, 4)
        assert summary.pct_certified == 50.0
        assert summary.pct_unverified == 0.0
        link = _consistent_certificate().transfer_chain[0]
        assert summary.avg_lambda_min == pytest.approx((0.1 + link.lambda_lower) / 2)
        assert summary.avg_objective == pytest.approx(0.03)

    def test_uncovered_candidates_are_unverified(self):
        """Without certificates candidates are unverified and averages empty."""
        rows = [_row(0, Classification.CANDIDATE, 0.02), _row(1, Classification.UNCONVERGED, 0.3)]
        (summary,) = summarize(rows)
        assert summary.pct_certified == 0.0
        assert summary.pct_unverified == 50.0
        assert summary.avg_lambda_min is None and summary.avg_objective is None

    def test_singular_runs_join_the_denominator(self):
        """Runs lost to a zero neuron count toward runs and every percentage."""
        rows = [_row(0, Classification.CANDIDATE, 0.02), _row(1, Classification.GLOBAL_LIKE, 1e-5)]
        (summary, lost_only) = summarize(rows, singular={(2, 2): 2, (3, 3): 1})
        assert (summary.runs, summary.singular) == (4, 2)
        assert summary.pct_unverified == 25.0
        assert (lost_only.k, lost_only.n, lost_only.runs, lost_only.singular) == (3, 3, 1, 1)
        assert lost_only.pct_certified == 0.0

    def test_groups_in_order_of_appearance(self):
        """One row per (k, n), first appearance first."""
        rows = [_row(0, Classification.GLOBAL_LIKE, 0.0, 3, 4), _row(0, Classification.GLOBAL_LIKE, 0.0)]
        assert [(s.k, s.n) for s in summarize(rows)] == [(3, 4), (2, 2)]


class TestCdf:
    """Tests for emit_cdf and the runs ledger."""

    def test_single_record(self):
        """One record gives one row with fraction 1."""
        assert emit_cdf([_row(0, Classification.CANDIDATE, 0.02)]) == [
            {"k": 2, "n": 2, "objective": 0.02, "cumulative_fraction": 1.0}
        ]

    def test_sorted_within_groups(self):
        """Objectives ascend within each (k, n) and fractions step evenly."""
        rows = [
            _row(0, Classification.CANDIDATE, 0.3),
            _row(1, Classification.GLOBAL_LIKE, 0.0),
            _row(0, Classification.GLOBAL_LIKE, 0.1, 1, 1),
        ]
        out = emit_cdf(rows)
        assert [(r["k"], r["objective"], r["cumulative_fraction"]) for r in out] == [
            (1, 0.1, 1.0),
            (2, 0.0, 0.5),
            (2, 0.3, 1.0),
        ]

    def test_empty_input(self):
        """An empty ledger has no CDF."""
        with pytest.raises(ValueError):
            emit_cdf([])

    def test_runs_csv_round_trip(self, tmp_path):
        """The ledger reads back to the same rows."""
        rows = [_row(0, Classification.CANDIDATE, 0.1 + 0.2), _row(5, Classification.ANOMALY, 1 / 3)]
        path = write_runs_csv(rows, tmp_path / "runs.csv")
        assert read_runs_csv(path) == rows
        assert path.read_text().splitlines()[0] == (
            "k,n,seed,classification,objective,iterations,grad_norm,descent_violations"
        )


# =============================================================================
# EXPERIMENT TESTS
# =============================================================================


class TestRunExperiment:
    """Tests for run_experiment on a tiny configuration."""

    def test_one_dimensional_experiment(self, tmp_path):
        """Descent, refusal handling and artifacts for k = n = 1."""
        spec = ExperimentSpec(
            k_range=[1],
            runs_per_config=6,
            base_seed=3,
            max_iters=2000,
            output_dir=tmp_path / "out",
        )
        with ThreadPoolExecutor(max_workers=2) as pool:
            result = run_experiment(spec, executor=pool)

        assert len(result.records) + len(result.singular_runs) == 6
        assert result.certificates == []
        (summary,) = result.summary
        assert summary.runs == 6
        assert summary.singular == len(result.singular_runs)
        assert summary.pct_certified == 0.0

        candidates = {
            r.point_ref for r in result.records if r.classification is Classification.CANDIDATE
        }
        assert {ref for ref, _ in result.refusals} <= candidates
        assert len(result.refusals) == min(3, len(candidates))

        out = tmp_path / "out"
        assert read_runs_csv(out / "runs.csv") == [LedgerRow.from_record(r) for r in result.records]
        assert (out / "summary.csv").exists()
        assert (out / "cdf.csv").exists() or not result.records

    def test_reproducible(self, tmp_path):
        """The same spec writes byte-identical artifacts."""
        for name in ("a", "b"):
            spec = ExperimentSpec(
                k_range=[1, 2],
                runs_per_config=4,
                base_seed=3,
                max_iters=2000,
                output_dir=tmp_path / name,
            )
            with ThreadPoolExecutor(max_workers=3) as pool:
                run_experiment(spec, executor=pool)

        def artifacts(root: Path):
            files = sorted(p for p in root.rglob("*") if p.suffix in {".csv", ".json"})
            return {p.relative_to(root): p.read_bytes() for p in files}

        first, second = artifacts(tmp_path / "a"), artifacts(tmp_path / "b")
        assert Path("runs.csv") in first and Path("summary.csv") in first
        assert first == second


@pytest.mark.slow
class TestExperimentStatistics:
    """Certification rates over full descent experiments."""

    def _summary(self, tmp_path, k: int, n: int, runs: int):
        spec = ExperimentSpec(
            k_range=[k],
            n_rule="pairs",
            pairs=[(k, n)],
            runs_per_config=runs,
            output_dir=tmp_path / f"k{k}_n{n}",
        )
        (summary,) = run_experiment(spec).summary
        assert summary.runs == runs
        return summary

    def test_ten_targets_ten_neurons(self, tmp_path):
        """About a third of the runs end at certified spurious minima."""
        summary = self._summary(tmp_path, 10, 10, 200)
        assert 25.0 <= summary.pct_certified <= 45.0
        assert 0.015 <= summary.avg_objective <= 0.030

    def test_over_parameterized_ten_targets(self, tmp_path):
        """One extra neuron removes every certified minimum."""
        summary = self._summary(tmp_path, 10, 12, 100)
        assert summary.pct_certified == 0.0

    def test_eight_targets_nine_neurons(self, tmp_path):
        """With one extra neuron certified minima are rare."""
        summary = self._summary(tmp_path, 8, 9, 200)
        assert summary.pct_certified <= 2.0
