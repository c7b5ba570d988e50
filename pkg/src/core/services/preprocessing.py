"""
Preprocessing shared by all solvers: centering, whitening, symmetric
decorrelation and random orthonormal initialization.
"""

import numpy as np
from scipy import linalg

from ..domain.signals import DataMatrix, UnmixingMatrix, WhiteningTransform
from ..ports.exceptions import DimensionMismatchError, RankDeficientError


EPS_RANK = 1e-10


class Preprocessing:
    """
    Static class with the whitening and orthonormalization steps.
    All functions are pure; random draws use a caller-owned numpy Generator.
    """

    @staticmethod
    def _checked_eigh(matrix: np.ndarray, context: str):
        """
        Symmetric eigendecomposition with the relative singularity test.

        Returns:
            (eigenvalues clamped at the rank threshold, eigenvectors)

        Raises:
            RankDeficientError: If the smallest eigenvalue <= EPS_RANK * largest
        """
        eigvals, eigvecs = linalg.eigh(matrix)
        largest = float(eigvals[-1])
        threshold = EPS_RANK * largest
        if largest <= 0 or eigvals[0] <= threshold:
            raise RankDeficientError(float(eigvals[0]), largest, context)
        return np.maximum(eigvals, threshold), eigvecs

    @staticmethod
    def inverse_sqrtm(matrix: np.ndarray, context: str = "matrix") -> np.ndarray:
        """
        Inverse square root of a symmetric positive definite matrix.

        Formula: M^{-1/2} = U diag(1/sqrt(lambda)) U^T

        Raises:
            RankDeficientError: If the matrix is numerically singular
        """
        eigvals, eigvecs = Preprocessing._checked_eigh(matrix, context)
        return (eigvecs * (1.0 / np.sqrt(eigvals))) @ eigvecs.T

    @staticmethod
    def fit_whitening(data: DataMatrix) -> WhiteningTransform:
        """
        Fit centering and whitening on a data matrix.

        Formula: whitener = Lambda^{-1/2} U^T where U Lambda U^T is the
        sample covariance (divisor n - 1).

        Args:
            data: Raw mixtures, one row per sample

        Returns:
            WhiteningTransform whose output has zero mean and identity covariance

        Raises:
            InvalidDataError: If there are too few samples or channels
            RankDeficientError: If the covariance is numerically singular
        """
        data.require_estimable()
        mean = data.values.mean(axis=0)
        eigvals, eigvecs = Preprocessing._checked_eigh(data.covariance(), "covariance")
        whitener = (eigvecs / np.sqrt(eigvals)).T
        dewhitener = eigvecs * np.sqrt(eigvals)
        return WhiteningTransform(mean=mean, whitener=whitener, dewhitener=dewhitener)

    @staticmethod
    def apply_whitening(transform: WhiteningTransform, data: DataMatrix) -> DataMatrix:
        """
        Center and whiten: output row j = whitener (row j - mean).

        Raises:
            DimensionMismatchError: If the column count differs from the transform
        """
        if data.m_channels != transform.m_channels:
            raise DimensionMismatchError("data columns", transform.m_channels, data.m_channels)
        return DataMatrix((data.values - transform.mean) @ transform.whitener.T)

    @staticmethod
    def symmetric_decorrelation(w: np.ndarray) -> UnmixingMatrix:
        """
        Symmetric decorrelation.

        Formula: W <- (W W^T)^{-1/2} W

        Raises:
            RankDeficientError: If w is numerically singular
        """
        w = np.asarray(w, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimensionMismatchError("decorrelation input", "square matrix", w.shape)
        root = Preprocessing.inverse_sqrtm(w @ w.T, context="W W^T")
        return UnmixingMatrix(root @ w)

    @staticmethod
    def random_orthonormal(m: int, rng: np.random.Generator) -> UnmixingMatrix:
        """
        Random orthonormal matrix: symmetric decorrelation of a standard-normal matrix.

        Args:
            m: Dimension (>= 2)
            rng: Seeded generator, owned by the caller

        Returns:
            UnmixingMatrix drawn from the given generator
        """
        if m < 2:
            raise DimensionMismatchError("dimension", ">= 2", m)
        while True:
            try:
                return Preprocessing.symmetric_decorrelation(rng.standard_normal((m, m)))
            except RankDeficientError:
                # Probability zero for Gaussian draws; redraw anyway
                continue
