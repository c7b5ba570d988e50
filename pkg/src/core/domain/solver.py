from dataclasses import dataclass
from typing import Optional, Tuple

from .density import TiltModel
from .signals import UnmixingMatrix
from ..ports.exceptions import ConfigurationError


@dataclass(frozen=True)
class SolverConfig:
    """Settings shared by the MDIICA driver and the FastICA baseline."""
    max_outer_iters: int = 50
    max_inner_iters: int = 1
    tol: float = 1e-6
    grid_size: int = 500
    grid_range: Tuple[float, float] = (-5.0, 5.0)
    basis: str = "mica2"
    seed: int = 0
    ridge: float = 1e-8

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigurationError("tol must be positive", "/tol")
        if self.max_outer_iters < 1:
            raise ConfigurationError("max_outer_iters must be >= 1", "/max_outer_iters")
        if self.max_inner_iters < 1:
            raise ConfigurationError("max_inner_iters must be >= 1", "/max_inner_iters")
        if self.grid_size < 2:
            raise ConfigurationError("grid size L must be >= 2", "/grid/L")
        lo, hi = self.grid_range
        if not lo < hi:
            raise ConfigurationError("grid range must satisfy lo < hi", "/grid/range")
        if self.ridge < 0:
            raise ConfigurationError("ridge must be non-negative", "/ridge")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", "/seed")
        object.__setattr__(self, "grid_range", (float(lo), float(hi)))


@dataclass(frozen=True)
class SolverResult:
    """
    Outcome of one separation run.

    For MDIICA, kl_trace holds the total KL^min per outer iteration; for
    FastICA it holds the squared-contrast trace instead.
    """
    w: UnmixingMatrix
    tilts: Tuple[TiltModel, ...]
    kl_trace: Tuple[float, ...]
    iterations: int
    converged: bool
    method: str = ""
    change: Optional[float] = None
    nonlinearity: Optional[str] = None
