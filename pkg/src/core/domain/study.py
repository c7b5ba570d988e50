from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .solver import SolverConfig
from ..ports.exceptions import ConfigurationError


@dataclass(frozen=True)
class SourceSpec:
    """
    A source distribution: a registered family plus its parameters.
    The label is what reports and CSV rows show; it defaults to the family.
    """
    family: str
    params: Tuple[Tuple[str, Any], ...] = ()
    label: str = ""

    def __post_init__(self):
        if not self.family:
            raise ConfigurationError("source family must be non-empty")
        items = self.params.items() if isinstance(self.params, dict) else self.params
        # Hashable params so calibrated moments can be cached per spec
        object.__setattr__(self, "params", tuple(sorted(
            (k, tuple(v) if isinstance(v, (list, tuple)) else v) for k, v in items
        )))
        if not self.label:
            object.__setattr__(self, "label", self.family)

    @property
    def param_dict(self) -> Dict[str, Any]:
        return dict(self.params)


@dataclass(frozen=True)
class Scenario:
    """One study setting: the distribution of each source component."""
    id: str
    sources: Tuple[SourceSpec, ...]

    def __post_init__(self):
        if len(self.sources) < 2:
            raise ConfigurationError(
                f"scenario '{self.id}' needs at least 2 source components"
            )
        object.__setattr__(self, "sources", tuple(self.sources))

    @property
    def dimension(self) -> int:
        return len(self.sources)


@dataclass(frozen=True)
class StudyPlan:
    """Everything run_study needs, already validated."""
    methods: Tuple[str, ...]
    scenarios: Tuple[Scenario, ...]
    n_samples: int
    reps: int
    seed: int
    solver: SolverConfig = field(default_factory=SolverConfig)
    record_timing: bool = True

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigurationError("reps must be >= 1", "/reps")
        if not self.methods:
            raise ConfigurationError("at least one method is required", "/methods")
        if not self.scenarios:
            raise ConfigurationError("at least one distribution is required", "/distributions")
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("scenario ids must be unique", "/distributions")
        if self.n_samples < 1:
            raise ConfigurationError("n_samples must be >= 1", "/n_samples")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", "/seed")


@dataclass(frozen=True)
class TrialResult:
    """Score of one method on one replication of one scenario."""
    method: str
    spec_id: str
    rep: int
    amari: float
    elapsed_ms: float
    seed: int
    converged: bool
    identifiable: bool = True
    iterations: int = 0
    error: Optional[str] = None

    @property
    def amari_x100(self) -> float:
        return 100.0 * self.amari

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class StudyReport:
    """Ordered trial results plus the plan that produced them."""
    plan: StudyPlan
    trials: List[TrialResult]

    @property
    def failures(self) -> List[TrialResult]:
        return [t for t in self.trials if t.failed]
