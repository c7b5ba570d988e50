"""
Second-order minimum discrimination information density fit.

The projected samples are binned on a fixed grid, the tilt coefficients are
obtained from one weighted least squares solve, and the discretized KL^min is
evaluated for the fitted tilt.
"""

from typing import Tuple

import numpy as np
from scipy import integrate, linalg
from scipy.stats import norm

from ..domain.basis import BasisSet
from ..domain.density import GridHistogram, TiltDiagnostics, TiltModel
from ..ports.exceptions import (
    EmptyInputError,
    InvalidRangeError,
    SingularDesignError,
)
from .nonlinearities import Nonlinearities


EXP_CLAMP = 30.0
MAX_CONDITION = 1e12


class MdiDensity:
    """
    Static class holding the histogram, WLS fit and KL^min evaluations.
    """

    @staticmethod
    def build_histogram(samples: np.ndarray, size: int, grid_range: Tuple[float, float]) -> GridHistogram:
        """
        Bin samples on L equally spaced centers.

        Formula: step = (hi - lo) / L, center_l = lo + (l + 0.5) step,
        q_l = #{y in (center_l - step/2, center_l + step/2]} / N

        Edges are lo + l step. Samples outside (lo, hi] are dropped and counted
        in `clipped`.

        Raises:
            EmptyInputError: If no samples are given
            InvalidRangeError: If L < 2 or lo >= hi
        """
        samples = np.asarray(samples, dtype=float).reshape(-1)
        if samples.size == 0:
            raise EmptyInputError("samples for the histogram")
        lo, hi = float(grid_range[0]), float(grid_range[1])
        if size < 2:
            raise InvalidRangeError(f"Grid size must be >= 2, got {size}")
        if not lo < hi:
            raise InvalidRangeError(f"Grid range must satisfy lo < hi, got ({lo}, {hi})")

        step = (hi - lo) / size
        centers = lo + (np.arange(size) + 0.5) * step
        edges = lo + np.arange(size + 1) * step
        edges[-1] = hi
        # Bin l is (edges[l], edges[l + 1]]; a sample on an edge goes left
        index = np.searchsorted(edges, samples, side="left") - 1
        inside = (index >= 0) & (index < size)
        counts = np.bincount(index[inside], minlength=size)
        n = samples.size
        return GridHistogram(
            centers=centers,
            step=step,
            freqs=counts / n,
            n_samples=n,
            clipped=int(n - np.count_nonzero(inside)),
        )

    @staticmethod
    def gaussian_weights(h: GridHistogram) -> np.ndarray:
        """Prior bin masses step * phi(center)."""
        return h.step * norm.pdf(h.centers)

    @staticmethod
    def fit_tilt_wls(h: GridHistogram, basis: BasisSet, ridge: float = 1e-8) -> TiltModel:
        """
        Fit the tilt coefficients by one weighted least squares solve.

        Formula: minimize sum_l w_l (beta^T G(y_l) - r_l)^2 with
        w_l = step phi(y_l) and r_l = (q_l - w_l) / w_l, solved through the
        normal equations (D^T W D + ridge I) beta = D^T W r.

        Args:
            h: Grid histogram of the projected samples
            basis: Nonlinearity basis
            ridge: Tikhonov term added to the normal matrix

        Returns:
            TiltModel with the fitted beta

        Raises:
            SingularDesignError: If the normal matrix condition exceeds 1e12
        """
        weights = MdiDensity.gaussian_weights(h)
        design, _, _ = Nonlinearities.design(basis, h.centers)
        if np.count_nonzero(weights > 0) < basis.p:
            raise SingularDesignError(np.inf)
        targets = (h.freqs - weights) / weights
        weighted = design * weights[:, None]
        normal = design.T @ weighted + ridge * np.eye(basis.p)
        rhs = weighted.T @ targets
        condition = np.linalg.cond(normal)
        if not np.isfinite(condition) or condition > MAX_CONDITION:
            raise SingularDesignError(float(condition))
        beta = linalg.solve(normal, rhs, assume_a="sym")
        return TiltModel(beta=beta, basis=basis)

    @staticmethod
    def _clamped_tilt(model: TiltModel, h: GridHistogram) -> Tuple[np.ndarray, bool]:
        design, _, _ = Nonlinearities.design(model.basis, h.centers)
        f = design @ model.beta
        clamped = bool(np.any(np.abs(f) > EXP_CLAMP))
        return np.clip(f, -EXP_CLAMP, EXP_CLAMP), clamped

    @staticmethod
    def kl_min(model: TiltModel, h: GridHistogram) -> float:
        """
        Discretized minimum discrimination information.

        Formula: sum_l { q_l f(y_l) - step phi(y_l) e^{f(y_l)} } + 1,
        with f clipped to [-30, 30] before exponentiation.
        """
        f, _ = MdiDensity._clamped_tilt(model, h)
        weights = MdiDensity.gaussian_weights(h)
        return float(np.sum(h.freqs * f - weights * np.exp(f)) + 1.0)

    @staticmethod
    def partition_integral(model: TiltModel, h: GridHistogram) -> float:
        """Partition sum: sum_l step phi(y_l) e^{f(y_l)}; close to 1 at the optimum."""
        f, _ = MdiDensity._clamped_tilt(model, h)
        return float(np.sum(MdiDensity.gaussian_weights(h) * np.exp(f)))

    @staticmethod
    def diagnose(model: TiltModel, h: GridHistogram) -> TiltDiagnostics:
        """KL^min, partition sum and whether the exponent clamp was active."""
        f, clamped = MdiDensity._clamped_tilt(model, h)
        weights = MdiDensity.gaussian_weights(h)
        tilted = weights * np.exp(f)
        return TiltDiagnostics(
            kl_min=float(np.sum(h.freqs * f - tilted) + 1.0),
            partition=float(np.sum(tilted)),
            clamped=clamped,
        )

    @staticmethod
    def kl_min_continuous(model: TiltModel, limit: float = 12.0) -> float:
        """
        Continuous KL^min of a tilt by adaptive quadrature.

        Formula: int phi e^f f dy - int phi e^f dy + 1 over [-limit, limit].
        """
        def tilt(y: float) -> float:
            f, _, _ = Nonlinearities.eval_tilt(model.beta, model.basis, y)
            return min(max(f, -EXP_CLAMP), EXP_CLAMP)

        def first(y: float) -> float:
            f = tilt(y)
            return norm.pdf(y) * np.exp(f) * f

        def second(y: float) -> float:
            return norm.pdf(y) * np.exp(tilt(y))

        a, _ = integrate.quad(first, -limit, limit, limit=200)
        b, _ = integrate.quad(second, -limit, limit, limit=200)
        return float(a - b + 1.0)
