"""
Unit tests for the Amari metric and the replication harness.
"""

import math
from unittest.mock import MagicMock, patch

import numpy as np
import pandas as pd
import pytest

from src.core.domain.solver import SolverConfig
from src.core.domain.study import Scenario, StudyPlan, StudyReport, TrialResult
from src.core.ports.exceptions import DimensionMismatchError, SingularMatrixError
from src.core.services.benchmark import (
    TRIAL_COLUMNS,
    amari_metric,
    is_identifiable,
    mean_table,
    run_study,
    run_trial,
    summarize,
    trial_seed_sequence,
    trials_frame,
)
from src.core.services.sources import Sources


def make_plan(methods=("mica2", "fastica-g1"), labels=("uniform", "uniform"), n_samples=500,
              reps=2, seed=11, record_timing=False):
    """Small plan with one scenario built from preset labels."""
    scenario = Scenario("-".join(labels), tuple(Sources.preset(label) for label in labels))
    return StudyPlan(
        methods=tuple(methods), scenarios=(scenario,), n_samples=n_samples, reps=reps, seed=seed,
        solver=SolverConfig(max_outer_iters=20, tol=1e-5), record_timing=record_timing,
    )


class TestAmariMetric:
    """Test cases for amari_metric."""

    def test_permutation_and_scaling_give_zero(self, rng):
        """Test that W = P D W0 scores 0 within 1e-12."""
        for m in (2, 3, 5):
            w0 = rng.standard_normal((m, m))
            permutation = np.eye(m)[rng.permutation(m)]
            scaling = np.diag(rng.choice([-1.0, 1.0], m) * rng.uniform(0.5, 3.0, m))
            assert amari_metric(permutation @ scaling @ w0, w0) == pytest.approx(0.0, abs=1e-12)

    def test_worst_case_for_two_channels(self):
        """Test that R = ones(2, 2) scores exactly 1 when normalized."""
        assert amari_metric(np.ones((2, 2)), np.eye(2)) == pytest.approx(1.0)
        assert amari_metric(np.ones((2, 2)), np.eye(2), normalize=False) == pytest.approx(1.0)

    def test_unnormalized_scales_with_dimension(self):
        """Test that the raw value for R = ones(m, m) is m - 1."""
        assert amari_metric(np.ones((4, 4)), np.eye(4), normalize=False) == pytest.approx(3.0)
        assert amari_metric(np.ones((4, 4)), np.eye(4)) == pytest.approx(1.0)

    def test_value_in_unit_interval(self, rng):
        """Test 0 <= d <= 1 for random matrices."""
        for _ in range(50):
            value = amari_metric(rng.standard_normal((3, 3)), rng.standard_normal((3, 3)))
            assert 0.0 <= value <= 1.0 + 1e-12

    def test_singular_truth(self):
        """Test that a singular w0_true raises SingularMatrixError."""
        with pytest.raises(SingularMatrixError):
            amari_metric(np.eye(2), np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_shape_mismatch(self):
        """Test that different shapes raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            amari_metric(np.eye(2), np.eye(3))


class TestRunTrial:
    """Test cases for one seeded replication."""

    def test_methods_share_the_mixture(self):
        """Test that adding a method does not change another method's score."""
        alone = run_trial(make_plan(methods=("mica2",)), 0, 0)
        together = run_trial(make_plan(methods=("fastica-g0", "mica2")), 0, 0)
        assert alone[0].amari == together[1].amari
        assert together[0].seed == together[1].seed

    def test_seed_substreams_differ_per_trial(self):
        """Test that distinct (scenario, rep) pairs get distinct substreams."""
        states = {
            tuple(trial_seed_sequence(1, s, r).generate_state(2))
            for s in range(3) for r in range(3)
        }
        assert len(states) == 9

    def test_too_few_samples_is_recorded(self, mock_logger):
        """Test that a failing trial becomes a result with an error, not an exception."""
        results = run_trial(make_plan(n_samples=2), 0, 0, logger=mock_logger)
        assert len(results) == 2
        assert all(r.failed and math.isnan(r.amari) for r in results)
        assert "InvalidDataError" in results[0].error
        assert mock_logger.warn.call_count == 2

    def test_gaussian_pair_is_not_identifiable(self):
        """Test that two Gaussian sources are flagged but still scored."""
        plan = make_plan(methods=("mica2",), labels=("gaussian", "gaussian"))
        assert not is_identifiable(plan.scenarios[0])
        result = run_trial(plan, 0, 0)[0]
        assert result.identifiable is False
        assert not result.failed

    def test_numerical_value_error_is_recorded(self, mock_logger):
        """Test that a ValueError raised inside a solver is recorded, not propagated."""
        separator = MagicMock()
        separator.separate.side_effect = ValueError("array must not contain infs or NaNs")
        with patch("src.core.services.benchmark.build_separator", return_value=separator):
            results = run_trial(make_plan(), 0, 0, logger=mock_logger)
        assert len(results) == 2
        assert all(r.failed for r in results)
        assert results[0].error.startswith("ValueError:")
        assert mock_logger.warn.call_count == 2

    def test_floating_point_error_is_recorded(self):
        """Test that a FloatingPointError from a solver becomes a failed trial."""
        separator = MagicMock()
        separator.separate.side_effect = FloatingPointError("overflow encountered")
        with patch("src.core.services.benchmark.build_separator", return_value=separator):
            results = run_trial(make_plan(methods=("mica2",)), 0, 0)
        assert results[0].failed
        assert math.isnan(results[0].amari)

    def test_timing_disabled_records_zero(self):
        """Test that record_timing = False writes elapsed_ms = 0."""
        assert all(r.elapsed_ms == 0.0 for r in run_trial(make_plan(), 0, 1))


class TestRunStudy:
    """Test cases for run_study and the summaries."""

    def test_reproducible(self):
        """Test identical trial tables for two runs with the same seed."""
        first = trials_frame(run_study(make_plan()))
        second = trials_frame(run_study(make_plan()))
        pd.testing.assert_frame_equal(first, second)

    def test_parallel_matches_sequential(self):
        """Test that two worker processes give the same results in the same order."""
        sequential = trials_frame(run_study(make_plan(), jobs=1))
        parallel = trials_frame(run_study(make_plan(), jobs=2))
        pd.testing.assert_frame_equal(sequential, parallel)

    def test_result_order(self, mock_logger):
        """Test (scenario, rep, method) ordering and the start/finish log lines."""
        report = run_study(make_plan(reps=3), logger=mock_logger)
        keys = [(t.rep, t.method) for t in report.trials]
        assert keys == [(r, m) for r in range(3) for m in ("mica2", "fastica-g1")]
        messages = [c.args[0] for c in mock_logger.info.call_args_list]
        assert messages[0] == "Starting study"
        assert messages[-1] == "Study finished"

    def test_rejects_zero_jobs(self):
        """Test that jobs < 1 is refused."""
        with pytest.raises(ValueError):
            run_study(make_plan(), jobs=0)

    def test_trials_frame_columns(self):
        """Test the CSV column order and the x100 column."""
        frame = trials_frame(run_study(make_plan()))
        assert list(frame.columns) == TRIAL_COLUMNS
        assert len(frame) == 4
        np.testing.assert_allclose(frame["amari_x100"], 100.0 * frame["amari"])


class TestSummaries:
    """Test cases for summarize and mean_table on hand-built reports."""

    @staticmethod
    def report(amaris, methods=("mica2", "fastica-g1")):
        plan = make_plan(methods=methods)
        trials = [
            TrialResult(
                method=method, spec_id="uniform-uniform", rep=rep, amari=amari, elapsed_ms=1.0,
                seed=0, converged=True, error=None if not math.isnan(amari) else "SingularDesignError: x",
            )
            for rep, row in enumerate(amaris)
            for method, amari in zip(methods, row)
        ]
        return StudyReport(plan=plan, trials=trials)

    def test_summary_statistics(self):
        """Test means, standard deviations and failure counts per method."""
        summary = summarize(self.report([(0.1, 0.2), (0.3, float("nan"))]))
        mica = summary[summary["method"] == "mica2"].iloc[0]
        fast = summary[summary["method"] == "fastica-g1"].iloc[0]
        assert mica["trials"] == 2
        assert mica["amari_mean"] == pytest.approx(0.2)
        assert mica["amari_x100_mean"] == pytest.approx(20.0)
        assert mica["amari_std"] == pytest.approx(np.std([0.1, 0.3], ddof=1))
        assert mica["failures"] == 0
        assert fast["failures"] == 1
        assert fast["amari_mean"] == pytest.approx(0.2)
        assert fast["amari_std"] == 0.0

    def test_mean_table_layout(self):
        """Test scenarios as rows and methods as columns in plan order."""
        table = mean_table(summarize(self.report([(0.1, 0.2)])))
        assert list(table.columns) == ["mica2", "fastica-g1"]
        assert list(table.index) == ["uniform-uniform"]
        assert table.loc["uniform-uniform", "fastica-g1"] == pytest.approx(20.0)

    def test_all_failed_cell_has_no_statistics(self):
        """Test that a cell with only failed trials keeps NaN mean and spread."""
        summary = summarize(run_study(make_plan(n_samples=2, reps=3)))
        for _, row in summary.iterrows():
            assert row["failures"] == 3
            assert math.isnan(row["amari_mean"])
            assert math.isnan(row["amari_std"])
            assert math.isnan(row["amari_x100_std"])

    def test_single_success_has_zero_spread(self):
        """Test that exactly one successful replication reports a spread of 0."""
        summary = summarize(self.report([(0.1, float("nan")), (float("nan"), float("nan"))]))
        mica = summary[summary["method"] == "mica2"].iloc[0]
        fast = summary[summary["method"] == "fastica-g1"].iloc[0]
        assert mica["amari_std"] == 0.0
        assert mica["amari_x100_std"] == 0.0
        assert math.isnan(fast["amari_std"])
