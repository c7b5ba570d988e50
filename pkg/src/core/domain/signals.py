from dataclasses import dataclass

import numpy as np

from ..ports.exceptions import DimensionMismatchError, InvalidDataError


ORTHONORMAL_TOL = 1e-8


def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DataMatrix:
    """
    Sample matrix of observations or sources; one row per sample.
    The type only guarantees a finite 2-D matrix. Estimation steps check
    the sample-count requirements themselves (see require_estimable).
    """
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 2:
            raise InvalidDataError(f"Data matrix must be 2-D, got {values.ndim}-D")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidDataError("Data matrix must have at least one row and one column")
        if not np.all(np.isfinite(values)):
            raise InvalidDataError("Data matrix contains NaN or infinite entries")
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def m_channels(self) -> int:
        return self.values.shape[1]

    def require_estimable(self) -> None:
        """
        Check the preconditions for covariance estimation.

        Raises:
            InvalidDataError: If m < 2, n < 2 or n <= m
        """
        if self.m_channels < 2:
            raise InvalidDataError(
                f"At least 2 channels are required, got {self.m_channels}"
            )
        if self.n_samples < 2 or self.n_samples <= self.m_channels:
            raise InvalidDataError(
                f"Need more samples than channels for covariance estimation "
                f"(n={self.n_samples}, m={self.m_channels})"
            )

    def covariance(self) -> np.ndarray:
        """Sample covariance with divisor n - 1."""
        return np.cov(self.values, rowvar=False, ddof=1)


@dataclass(frozen=True)
class WhiteningTransform:
    """Centering vector plus whitening matrix mapping raw mixtures to unit covariance."""
    mean: np.ndarray
    whitener: np.ndarray
    dewhitener: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(self.mean)
        whitener = _frozen_array(self.whitener)
        dewhitener = _frozen_array(self.dewhitener)
        m = mean.shape[0] if mean.ndim == 1 else -1
        if m < 1 or whitener.shape != (m, m) or dewhitener.shape != (m, m):
            raise DimensionMismatchError(
                "whitening transform", f"({m},), ({m}, {m}), ({m}, {m})",
                f"{mean.shape}, {whitener.shape}, {dewhitener.shape}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "whitener", whitener)
        object.__setattr__(self, "dewhitener", dewhitener)

    @property
    def m_channels(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class UnmixingMatrix:
    """Orthonormal m x m matrix W acting on whitened data; rows are w_i."""
    w: np.ndarray

    def __post_init__(self):
        w = _frozen_array(self.w)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatchError("unmixing matrix", "square matrix", w.shape)
        deviation = np.max(np.abs(w @ w.T - np.eye(w.shape[0])))
        if deviation > ORTHONORMAL_TOL:
            raise InvalidDataError(
                f"Unmixing matrix is not orthonormal: max |W W^T - I| = {deviation:.3e}"
            )
        object.__setattr__(self, "w", w)

    @property
    def m(self) -> int:
        return self.w.shape[0]
