"""
Command-line handlers for the separation toolkit.
`separate` unmixes a user-supplied CSV matrix; `bench` runs a replication study.
"""

import argparse
import sys
import time
from typing import List, Optional, TextIO

from ...core.config.config import Config
from ...core.domain.manifest import Command, RunManifest
from ...core.domain.solver import SolverConfig
from ...core.ports.artifact_repository import ArtifactRepository
from ...core.ports.exceptions import ConfigurationError
from ...core.ports.logger import Logger
from ...core.services.benchmark import mean_table, run_study, summarize, trials_frame
from ...core.services.preprocessing import Preprocessing
from ...core.services.solvers import build_separator, recover_sources, supported_methods
from ...core.util.errorhandling import ExitCode, handle_error
from ..models import SeparationSidecarModel, StudySummaryModel, parse_study_config


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors become configuration errors (exit 1) instead of exit 2."""

    def error(self, message: str):
        raise ConfigurationError(message, "/argv")


class CliHandlers:
    """
    Handlers for the `separate` and `bench` commands.
    """

    def __init__(self, repository: ArtifactRepository, logger: Logger, app_config: Config,
                 stdout: Optional[TextIO] = None):
        """
        Initialize handlers with their dependencies.

        Args:
            repository: Implementation of the ArtifactRepository port
            logger: Logger for progress and errors (standard error)
            app_config: Environment-derived defaults
            stdout: Stream for the bench result table; defaults to sys.stdout
        """
        self.repository = repository
        self.logger = logger
        self.config = app_config
        self.stdout = stdout
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        cfg = self.config
        parser = _ArgumentParser(prog=cfg.APP_TITLE, description=cfg.APP_DESCRIPTION)
        parser.add_argument("--version", action="version", version=f"%(prog)s {cfg.APP_VERSION}")
        commands = parser.add_subparsers(dest="command", required=True)

        separate = commands.add_parser(Command.SEPARATE.value, help="Separate a CSV data matrix")
        separate.add_argument("--input", required=True, help="CSV matrix, rows = samples, columns = channels")
        separate.add_argument("--method", choices=supported_methods(), default=cfg.DEFAULT_METHOD)
        separate.add_argument("--seed", type=int, default=None, help="Seed for the initial W (MDIICA_SEED wins)")
        separate.add_argument("--out", required=True, help="Output directory")
        separate.add_argument("--grid-l", type=int, default=cfg.GRID_L, help="Histogram bins")
        separate.add_argument("--grid-range", type=float, default=cfg.GRID_RANGE, help="Grid covers (-r, r]")
        separate.add_argument("--tol", type=float, default=cfg.TOL, help="Convergence tolerance")
        separate.add_argument("--max-iters", type=int, default=cfg.MAX_OUTER_ITERS, help="Outer iterations")

        bench = commands.add_parser(Command.BENCH.value, help="Run a replication study")
        bench.add_argument("--config", required=True, help="Study configuration (JSON)")
        bench.add_argument("--out", required=True, help="Output directory")
        bench.add_argument("--jobs", type=int, default=cfg.JOBS, help="Worker processes")
        bench.add_argument("--no-timing", action="store_true", help="Write elapsed_ms as 0")
        return parser

    def manifest_from_args(self, argv: Optional[List[str]]) -> RunManifest:
        """Parse argv into a validated RunManifest."""
        args = self.parser.parse_args(argv)
        if args.command == Command.SEPARATE.value:
            return RunManifest(
                command=Command.SEPARATE,
                input_path=args.input,
                output_path=args.out,
                seed=self.config.resolve_seed(args.seed),
                method=args.method,
                grid_size=args.grid_l,
                grid_range=args.grid_range,
                tol=args.tol,
                max_iters=args.max_iters,
            )
        return RunManifest(
            command=Command.BENCH,
            config_path=args.config,
            output_path=args.out,
            seed=self.config.resolve_seed(None),
            jobs=args.jobs,
            record_timing=self.config.RECORD_TIMING and not args.no_timing,
        )

    def cmd_separate(self, manifest: RunManifest) -> int:
        """
        Separate the input matrix and write sources plus the JSON sidecar.

        Returns:
            0 on success, 2 when the solver did not converge (outputs are still written)

        Raises:
            MdiIcaError: On malformed or rank-deficient input; mapped to exit 1
        """
        started = time.perf_counter()
        raw = self.repository.read_matrix(manifest.input_path)
        raw.require_estimable()
        self.logger.info(
            "Separating", input=manifest.input_path, samples=raw.n_samples,
            channels=raw.m_channels, method=manifest.method, basis=manifest.basis, seed=manifest.seed,
        )
        transform = Preprocessing.fit_whitening(raw)
        whitened = Preprocessing.apply_whitening(transform, raw)
        solver_config = SolverConfig(
            max_outer_iters=manifest.max_iters,
            max_inner_iters=self.config.MAX_INNER_ITERS,
            tol=manifest.tol,
            grid_size=manifest.grid_size,
            grid_range=(-manifest.grid_range, manifest.grid_range),
            seed=manifest.seed,
            ridge=self.config.RIDGE,
        )
        result = build_separator(manifest.method, solver_config, self.logger).separate(whitened)
        sources = recover_sources(result.w, transform, raw)
        wall_time_ms = (time.perf_counter() - started) * 1000.0

        sources_path = self.repository.write_sources(manifest.output_path, sources)
        sidecar = SeparationSidecarModel.from_domain(result, transform, manifest.seed, wall_time_ms)
        sidecar_path = self.repository.write_json(
            manifest.output_path, self.config.SIDECAR_FILENAME, sidecar.model_dump(mode="json")
        )
        self.logger.info("Wrote separation", sources=sources_path, sidecar=sidecar_path)
        if not result.converged:
            self.logger.warn(
                "Solver did not converge", iterations=result.iterations, change=result.change,
            )
            return int(ExitCode.NOT_CONVERGED)
        return int(ExitCode.SUCCESS)

    def cmd_bench(self, manifest: RunManifest) -> int:
        """
        Run the study, write the trials CSV and JSON summary, print the mean table.

        Raises:
            ConfigurationError: With a JSON pointer to the offending field
        """
        document = self.repository.read_json(manifest.config_path)
        study = parse_study_config(document)
        plan = study.to_domain(
            seed=self.config.seed_override(),
            record_timing=None if manifest.record_timing else False,
        )
        report = run_study(plan, jobs=manifest.jobs, logger=self.logger)
        summary = summarize(report)

        trials_path = self.repository.write_table(
            manifest.output_path, self.config.TRIALS_FILENAME, trials_frame(report)
        )
        summary_path = self.repository.write_json(
            manifest.output_path,
            self.config.SUMMARY_FILENAME,
            StudySummaryModel.from_domain(report, summary).model_dump(mode="json"),
        )
        self.logger.info("Wrote study", trials=trials_path, summary=summary_path)

        stream = self.stdout or sys.stdout
        stream.write("Mean Amari x100\n")
        stream.write(mean_table(summary).to_string(float_format=lambda v: f"{v:.2f}") + "\n")
        return int(ExitCode.SUCCESS)

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse, dispatch and map any error to its exit code."""
        try:
            manifest = self.manifest_from_args(argv)
            if manifest.command is Command.SEPARATE:
                return self.cmd_separate(manifest)
            return self.cmd_bench(manifest)
        except Exception as e:
            return handle_error(e, self.logger)
