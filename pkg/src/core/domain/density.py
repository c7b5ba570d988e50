from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from ..ports.exceptions import DimensionMismatchError, InvalidDataError


@dataclass(frozen=True)
class GridHistogram:
    """
    Equally spaced grid centers with bin frequencies of projected samples.
    Bins are the half-open intervals (center - step/2, center + step/2].
    """
    centers: np.ndarray
    step: float
    freqs: np.ndarray
    n_samples: int
    clipped: int = 0

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        freqs = np.array(self.freqs, dtype=float)
        if centers.shape != freqs.shape or centers.ndim != 1:
            raise DimensionMismatchError("histogram", centers.shape, freqs.shape)
        if self.step <= 0:
            raise InvalidDataError("Histogram step must be positive")
        if np.any(freqs < 0):
            raise InvalidDataError("Histogram frequencies must be non-negative")
        centers.setflags(write=False)
        freqs.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "freqs", freqs)

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def lo(self) -> float:
        return float(self.centers[0] - self.step / 2)

    @property
    def hi(self) -> float:
        return float(self.centers[-1] + self.step / 2)


@dataclass(frozen=True)
class TiltModel:
    """Coefficients beta of the tilt f(y) = beta^T G(y) over a basis set."""
    beta: np.ndarray
    basis: BasisSet

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float).reshape(-1)
        if beta.shape[0] != self.basis.p:
            raise DimensionMismatchError("tilt coefficients", self.basis.p, beta.shape[0])
        if not np.all(np.isfinite(beta)):
            raise InvalidDataError("Tilt coefficients must be finite")
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def zero(cls, basis: BasisSet) -> "TiltModel":
        return cls(beta=np.zeros(basis.p), basis=basis)


@dataclass(frozen=True)
class TiltDiagnostics:
    """Objective value, partition sum and clamp flag for a fitted tilt."""
    kl_min: float
    partition: float
    clamped: bool
