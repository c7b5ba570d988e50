"""
Replication harness for the separation benchmark.

Every (scenario, rep) trial draws its sources and mixing matrix from its own
seed substream, so all methods see the same mixture and adding a method never
changes the inputs of another one. Trials may run on a process pool; results
are always returned in (scenario, rep, method) order.
"""

import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import linalg

from ..domain.signals import DataMatrix
from ..domain.study import Scenario, StudyPlan, StudyReport, TrialResult
from ..ports.exceptions import DimensionMismatchError, MdiIcaError, SingularMatrixError
from ..ports.logger import Logger, NullLogger
from .preprocessing import Preprocessing
from .solvers import build_separator
from .sources import Sources


TRIAL_COLUMNS = ["method", "spec_id", "rep", "amari", "amari_x100", "elapsed_ms", "converged"]


def amari_metric(w: np.ndarray, w0_true: np.ndarray, normalize: bool = True) -> float:
    """
    Amari distance between an estimated and a true unmixing matrix.

    Formula: with R = W W0^{-1},
        d = 1/(2m) sum_i (sum_j |r_ij| / max_j |r_ij| - 1)
          + 1/(2m) sum_j (sum_i |r_ij| / max_i |r_ij| - 1)
    and, when normalize is set, d / (m - 1) so the value lies in [0, 1].

    Args:
        w: Estimated unmixing matrix (m x m)
        w0_true: True unmixing matrix (m x m)
        normalize: Divide by (m - 1)

    Returns:
        0 iff W equals W0 up to row permutation and scaling

    Raises:
        DimensionMismatchError: If the shapes differ or are not square
        SingularMatrixError: If w0_true cannot be inverted
    """
    w = np.asarray(w, dtype=float)
    w0_true = np.asarray(w0_true, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape != w0_true.shape:
        raise DimensionMismatchError("Amari metric operands", w0_true.shape, w.shape)
    try:
        inverse = linalg.inv(w0_true)
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularMatrixError(f"True unmixing matrix is singular: {e}")
    if not np.all(np.isfinite(inverse)):
        raise SingularMatrixError("True unmixing matrix is singular")

    r = np.abs(w @ inverse)
    m = r.shape[0]
    rows = np.sum(r.sum(axis=1) / r.max(axis=1) - 1.0)
    cols = np.sum(r.sum(axis=0) / r.max(axis=0) - 1.0)
    distance = (rows + cols) / (2.0 * m)
    if normalize:
        distance /= m - 1
    return float(distance)


def trial_seed_sequence(seed: int, scenario_index: int, rep: int) -> np.random.SeedSequence:
    """Substream owned by one (scenario, rep) trial."""
    return np.random.SeedSequence(seed, spawn_key=(scenario_index, rep))


def is_identifiable(scenario: Scenario) -> bool:
    """At most one Gaussian component may be present."""
    return sum(Sources.is_gaussian(spec) for spec in scenario.sources) < 2


# Recorded on the trial result instead of propagating
TRIAL_ERRORS = (MdiIcaError, linalg.LinAlgError, ValueError, FloatingPointError)


def run_trial(plan: StudyPlan, scenario_index: int, rep: int, logger: Optional[Logger] = None) -> List[TrialResult]:
    """
    Run every method of the plan on one seeded mixture.

    Solver and preprocessing errors are recorded on the trial results; they
    never propagate.
    """
    logger = logger or NullLogger()
    scenario = plan.scenarios[scenario_index]
    identifiable = is_identifiable(scenario)
    sequence = trial_seed_sequence(plan.seed, scenario_index, rep)
    data_sequence, init_sequence = sequence.spawn(2)
    init_seed = int(init_sequence.generate_state(1, dtype=np.uint64)[0])
    rng = np.random.default_rng(data_sequence)

    def failed(method: str, error: Exception) -> TrialResult:
        logger.warn(
            "Trial failed", method=method, spec_id=scenario.id, rep=rep,
            error=type(error).__name__, detail=str(error),
        )
        return TrialResult(
            method=method, spec_id=scenario.id, rep=rep, amari=float("nan"),
            elapsed_ms=0.0, seed=init_seed, converged=False,
            identifiable=identifiable, error=f"{type(error).__name__}: {error}",
        )

    try:
        sources = Sources.generate_sources(scenario.sources, plan.n_samples, rng)
        mixing = Sources.random_mixing(scenario.dimension, rng)
        mixed = DataMatrix(sources.values @ mixing.T)
        transform = Preprocessing.fit_whitening(mixed)
        whitened = Preprocessing.apply_whitening(transform, mixed)
        w0 = linalg.inv(transform.whitener @ mixing)
        w0 = w0 / np.linalg.norm(w0, axis=1, keepdims=True)
    except TRIAL_ERRORS as e:
        return [failed(method, e) for method in plan.methods]

    cfg = dataclasses.replace(plan.solver, seed=init_seed)
    results: List[TrialResult] = []
    for method in plan.methods:
        try:
            separator = build_separator(method, cfg, logger)
            started = time.perf_counter()
            outcome = separator.separate(whitened)
            elapsed = (time.perf_counter() - started) * 1000.0 if plan.record_timing else 0.0
            results.append(TrialResult(
                method=method,
                spec_id=scenario.id,
                rep=rep,
                amari=amari_metric(outcome.w.w, w0),
                elapsed_ms=elapsed,
                seed=init_seed,
                converged=outcome.converged,
                identifiable=identifiable,
                iterations=outcome.iterations,
            ))
        except TRIAL_ERRORS as e:
            results.append(failed(method, e))
    return results


def _run_trial_task(task: Tuple[StudyPlan, int, int]) -> List[TrialResult]:
    plan, scenario_index, rep = task
    return run_trial(plan, scenario_index, rep)


class StudyRunner:
    """
    Runs a StudyPlan sequentially or on a bounded process pool.
    """

    def __init__(self, jobs: int = 1, logger: Optional[Logger] = None):
        if jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {jobs}")
        self.jobs = jobs
        self.logger = logger or NullLogger()

    def run(self, plan: StudyPlan) -> StudyReport:
        tasks = [
            (plan, scenario_index, rep)
            for scenario_index in range(len(plan.scenarios))
            for rep in range(plan.reps)
        ]
        self.logger.info(
            "Starting study", scenarios=len(plan.scenarios), reps=plan.reps,
            methods=",".join(plan.methods), n_samples=plan.n_samples, jobs=self.jobs,
        )
        if self.jobs == 1:
            batches = []
            for _, scenario_index, rep in tasks:
                if rep == 0:
                    self.logger.info("Running scenario", spec_id=plan.scenarios[scenario_index].id)
                batches.append(run_trial(plan, scenario_index, rep, logger=self.logger))
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                batches = list(pool.map(_run_trial_task, tasks, chunksize=max(1, len(tasks) // (4 * self.jobs))))
            for trial in (t for batch in batches for t in batch if t.failed):
                self.logger.warn(
                    "Trial failed", method=trial.method, spec_id=trial.spec_id,
                    rep=trial.rep, error=trial.error,
                )

        order = {method: k for k, method in enumerate(plan.methods)}
        index = {scenario.id: k for k, scenario in enumerate(plan.scenarios)}
        trials = sorted(
            (t for batch in batches for t in batch),
            key=lambda t: (index[t.spec_id], t.rep, order[t.method]),
        )
        report = StudyReport(plan=plan, trials=trials)
        self.logger.info("Study finished", trials=len(trials), failures=len(report.failures))
        return report


def run_study(plan: StudyPlan, jobs: int = 1, logger: Optional[Logger] = None) -> StudyReport:
    """Run all trials of the plan. Bit-reproducible for a fixed seed."""
    return StudyRunner(jobs, logger).run(plan)


def trials_frame(report: StudyReport) -> pd.DataFrame:
    """One row per trial with the CSV columns, in report order."""
    frame = pd.DataFrame(
        [
            {
                "method": t.method,
                "spec_id": t.spec_id,
                "rep": t.rep,
                "amari": t.amari,
                "amari_x100": t.amari_x100,
                "elapsed_ms": t.elapsed_ms,
                "converged": t.converged,
            }
            for t in report.trials
        ],
        columns=TRIAL_COLUMNS,
    )
    return frame


def summarize(report: StudyReport) -> pd.DataFrame:
    """
    Per-(method, spec_id) statistics.

    Columns: method, spec_id, trials, failures, amari_mean, amari_std,
    amari_x100_mean, amari_x100_std, elapsed_ms_mean, converged_rate,
    identifiable. Failed trials are excluded from the means.
    """
    frame = trials_frame(report)
    frame["failed"] = [t.failed for t in report.trials]
    frame["identifiable"] = [t.identifiable for t in report.trials]
    grouped = frame.groupby(["method", "spec_id"], sort=False)
    summary = grouped.agg(
        trials=("rep", "size"),
        failures=("failed", "sum"),
        amari_mean=("amari", "mean"),
        amari_std=("amari", "std"),
        amari_x100_mean=("amari_x100", "mean"),
        amari_x100_std=("amari_x100", "std"),
        elapsed_ms_mean=("elapsed_ms", "mean"),
        converged_rate=("converged", "mean"),
        identifiable=("identifiable", "all"),
    ).reset_index()
    # A single successful replication has no spread; all-failed cells stay NaN
    single = (summary["trials"] - summary["failures"]) == 1
    std_columns = ["amari_std", "amari_x100_std"]
    summary.loc[single, std_columns] = summary.loc[single, std_columns].fillna(0.0)
    summary["failures"] = summary["failures"].astype(int)
    return summary


def mean_table(summary: pd.DataFrame) -> pd.DataFrame:
    """Mean Amari x100 with methods as columns and scenarios as rows."""
    return summary.pivot(index="spec_id", columns="method", values="amari_x100_mean").reindex(
        index=list(dict.fromkeys(summary["spec_id"])),
        columns=list(dict.fromkeys(summary["method"])),
    )
