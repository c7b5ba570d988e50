"""
Pydantic models for study configuration files and JSON result artifacts.
These models handle the conversion between JSON documents and domain objects.
"""

import math
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd
from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ...core.domain.density import TiltModel
from ...core.domain.signals import UnmixingMatrix, WhiteningTransform
from ...core.domain.solver import SolverConfig, SolverResult
from ...core.domain.study import Scenario, SourceSpec, StudyPlan, StudyReport
from ...core.ports.exceptions import ConfigurationError, MdiIcaError
from ...core.services.solvers import supported_methods
from ...core.services.sources import PRESETS, Sources


ParamValue = Union[float, List[float]]


def _finite_or_none(value: Any) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def json_pointer(loc: Tuple[Union[str, int], ...]) -> str:
    """('distributions', 0, 'params', 'dof') -> '/distributions/0/params/dof'"""
    return "/" + "/".join(str(part) for part in loc) if loc else ""


class DistributionModel(BaseModel):
    """A source distribution: a preset label, or a family with parameters."""
    model_config = ConfigDict(extra="forbid")

    id: str = Field(..., min_length=1, description="Label used in reports; a preset name when family is omitted")
    family: Optional[str] = Field(None, description="Registered family; defaults to the preset's family")
    params: Dict[str, ParamValue] = Field(default_factory=dict, description="Per-family parameters")

    @model_validator(mode="after")
    def check_resolvable(self) -> "DistributionModel":
        if self.family is None and self.id not in PRESETS:
            raise ValueError(
                f"unknown distribution '{self.id}'; presets: {', '.join(sorted(PRESETS))}"
            )
        if self.family is not None and self.family not in Sources.supported_families():
            raise ValueError(
                f"unknown family '{self.family}'; supported: {', '.join(Sources.supported_families())}"
            )
        try:
            Sources.moments(self.to_domain())
        except ConfigurationError as e:
            raise ValueError(e.reason) from e
        except MdiIcaError as e:
            raise ValueError(e.message) from e
        except (TypeError, ValueError) as e:
            raise ValueError(f"invalid parameters for '{self.id}': {e}") from e
        return self

    def to_domain(self) -> SourceSpec:
        """Convert to domain object; explicit params override the preset's."""
        if self.family is None:
            preset = PRESETS[self.id]
            params = {**preset.param_dict, **self.params}
            return SourceSpec(preset.family, params, self.id)
        return SourceSpec(self.family, self.params, self.id)


def _coerce_distribution(value: Any) -> Any:
    return {"id": value} if isinstance(value, str) else value


class ScenarioModel(BaseModel):
    """An explicit scenario with one distribution per source component."""
    model_config = ConfigDict(extra="forbid")

    id: str = Field(..., min_length=1)
    sources: List[DistributionModel] = Field(..., min_length=2)

    @field_validator("sources", mode="before")
    @classmethod
    def coerce_sources(cls, v):
        return [_coerce_distribution(item) for item in v] if isinstance(v, list) else v

    def to_domain(self) -> Scenario:
        return Scenario(self.id, tuple(source.to_domain() for source in self.sources))


class GridModel(BaseModel):
    """Histogram grid: L bins on (-range, range]."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    size: int = Field(500, ge=2, alias="L")
    half_width: float = Field(5.0, gt=0, alias="range")


class SolverSettingsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tol: float = Field(1e-6, gt=0)
    max_outer_iters: int = Field(50, ge=1)
    max_inner_iters: int = Field(1, ge=1)
    ridge: float = Field(1e-8, ge=0)


class StudyConfigModel(BaseModel):
    """Study configuration file for the bench command."""
    model_config = ConfigDict(extra="forbid")

    methods: List[str] = Field(..., min_length=1, description="Method ids to compare")
    distributions: List[DistributionModel] = Field(
        default_factory=list, description="Each one replicated over `dimension` components"
    )
    scenarios: List[ScenarioModel] = Field(default_factory=list, description="Explicit mixed scenarios")
    dimension: int = Field(2, ge=2, description="Components per distribution scenario")
    n_samples: int = Field(
        1000, ge=1, validation_alias=AliasChoices("n_samples", "N"), description="Samples per trial"
    )
    reps: int = Field(100, ge=1, description="Replications per scenario")
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    grid: GridModel = Field(default_factory=GridModel)
    solver: SolverSettingsModel = Field(default_factory=SolverSettingsModel)
    record_timing: bool = True

    @field_validator("methods")
    @classmethod
    def validate_methods(cls, v):
        unknown = [m for m in v if m not in supported_methods()]
        if unknown:
            raise ValueError(
                f"unknown method '{unknown[0]}'; supported: {', '.join(supported_methods())}"
            )
        if len(set(v)) != len(v):
            raise ValueError("methods must be unique")
        return v

    @field_validator("distributions", mode="before")
    @classmethod
    def coerce_distributions(cls, v):
        return [_coerce_distribution(item) for item in v] if isinstance(v, list) else v

    @model_validator(mode="after")
    def check_scenarios(self) -> "StudyConfigModel":
        if not self.distributions and not self.scenarios:
            raise ValueError("at least one of 'distributions' or 'scenarios' is required")
        ids = [d.id for d in self.distributions] + [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ValueError("distribution and scenario ids must be unique")
        return self

    def to_domain(self, seed: Optional[int] = None, record_timing: Optional[bool] = None) -> StudyPlan:
        """
        Convert to a StudyPlan.

        Args:
            seed: Overrides the file's seed (e.g. from MDIICA_SEED)
            record_timing: Overrides the file's record_timing
        """
        scenarios = [
            Scenario(d.id, (d.to_domain(),) * self.dimension) for d in self.distributions
        ] + [s.to_domain() for s in self.scenarios]
        solver = SolverConfig(
            max_outer_iters=self.solver.max_outer_iters,
            max_inner_iters=self.solver.max_inner_iters,
            tol=self.solver.tol,
            grid_size=self.grid.size,
            grid_range=(-self.grid.half_width, self.grid.half_width),
            ridge=self.solver.ridge,
        )
        return StudyPlan(
            methods=tuple(self.methods),
            scenarios=tuple(scenarios),
            n_samples=self.n_samples,
            reps=self.reps,
            seed=self.seed if seed is None else seed,
            solver=solver,
            record_timing=self.record_timing if record_timing is None else record_timing,
        )


def parse_study_config(raw: Dict[str, Any]) -> StudyConfigModel:
    """
    Validate a study configuration document.

    Raises:
        ConfigurationError: For the first invalid field, with its JSON pointer
    """
    try:
        return StudyConfigModel.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        message = first["msg"].removeprefix("Value error, ")
        pointer = json_pointer(tuple(first["loc"]))
        # Parameter errors raised by the source families name the offending field
        cause = getattr(first.get("ctx", {}).get("error"), "__cause__", None)
        if isinstance(cause, ConfigurationError):
            pointer += cause.pointer
        raise ConfigurationError(message, pointer)


class WhiteningModel(BaseModel):
    mean: List[float]
    whitener: List[List[float]]
    dewhitener: List[List[float]]

    def to_domain(self) -> WhiteningTransform:
        return WhiteningTransform(mean=self.mean, whitener=self.whitener, dewhitener=self.dewhitener)


class TiltModelModel(BaseModel):
    """Fitted tilt of one recovered component."""
    basis: List[str]
    beta: List[float]

    @classmethod
    def from_domain(cls, tilt: TiltModel) -> "TiltModelModel":
        return cls(basis=list(tilt.basis.ids), beta=[float(b) for b in tilt.beta])


class SeparationSidecarModel(BaseModel):
    """JSON sidecar written next to the recovered sources."""
    method: str = Field(..., description="Method id")
    seed: int = Field(..., description="Seed used for the initial W")
    converged: bool
    iterations: int
    final_change: Optional[float] = Field(None, description="1 - min |cos| at the last iteration")
    wall_time_ms: float = Field(..., ge=0)
    unmixing: List[List[float]] = Field(..., description="Orthonormal W in whitened coordinates")
    whitening: WhiteningModel
    tilts: List[TiltModelModel] = Field(default_factory=list, description="Per-component beta (MDIICA only)")
    kl_trace: List[float] = Field(..., description="Objective per outer iteration")
    nonlinearity: Optional[str] = None

    @classmethod
    def from_domain(
        cls, result: SolverResult, transform: WhiteningTransform, seed: int, wall_time_ms: float
    ) -> "SeparationSidecarModel":
        """Convert from domain objects to the sidecar model."""
        return cls(
            method=result.method,
            seed=seed,
            converged=result.converged,
            iterations=result.iterations,
            final_change=_finite_or_none(result.change),
            wall_time_ms=wall_time_ms,
            unmixing=result.w.w.tolist(),
            whitening=WhiteningModel(
                mean=transform.mean.tolist(),
                whitener=transform.whitener.tolist(),
                dewhitener=transform.dewhitener.tolist(),
            ),
            tilts=[TiltModelModel.from_domain(t) for t in result.tilts],
            kl_trace=list(result.kl_trace),
            nonlinearity=result.nonlinearity,
        )

    def unmixing_matrix(self) -> UnmixingMatrix:
        return UnmixingMatrix(self.unmixing)


class SummaryRowModel(BaseModel):
    """Statistics of one (method, scenario) cell."""
    method: str
    spec_id: str
    trials: int
    failures: int
    amari_mean: Optional[float]
    amari_std: Optional[float]
    amari_x100_mean: Optional[float]
    amari_x100_std: Optional[float]
    elapsed_ms_mean: Optional[float]
    converged_rate: float
    identifiable: bool


class StudySummaryModel(BaseModel):
    """JSON summary written by the bench command."""
    seed: int
    n_samples: int
    reps: int
    methods: List[str]
    amari_normalization: str = Field("1/(m-1)", description="Applied before the x100 scaling")
    total_trials: int
    failed_trials: int
    results: List[SummaryRowModel]

    @classmethod
    def from_domain(cls, report: StudyReport, summary: pd.DataFrame) -> "StudySummaryModel":
        """Convert a report and its summarize() frame into the summary model."""
        rows = [
            SummaryRowModel(
                method=row["method"],
                spec_id=row["spec_id"],
                trials=int(row["trials"]),
                failures=int(row["failures"]),
                amari_mean=_finite_or_none(row["amari_mean"]),
                amari_std=_finite_or_none(row["amari_std"]),
                amari_x100_mean=_finite_or_none(row["amari_x100_mean"]),
                amari_x100_std=_finite_or_none(row["amari_x100_std"]),
                elapsed_ms_mean=_finite_or_none(row["elapsed_ms_mean"]),
                converged_rate=float(row["converged_rate"]),
                identifiable=bool(row["identifiable"]),
            )
            for row in summary.to_dict(orient="records")
        ]
        return cls(
            seed=report.plan.seed,
            n_samples=report.plan.n_samples,
            reps=report.plan.reps,
            methods=list(report.plan.methods),
            total_trials=len(report.trials),
            failed_trials=len(report.failures),
            results=rows,
        )
