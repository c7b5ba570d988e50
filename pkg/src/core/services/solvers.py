"""
Symmetric fixed-point separators.

MdiIcaSeparator alternates a weighted least squares density fit per component
with one fixed-point sweep over all rows followed by symmetric decorrelation.
FastIcaSeparator runs the same sweep with a single fixed nonlinearity.
"""

import dataclasses
from abc import abstractmethod
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.stats import norm

from ..domain.basis import BasisFunction, BasisSet
from ..domain.density import GridHistogram, TiltModel
from ..domain.signals import DataMatrix, UnmixingMatrix, WhiteningTransform
from ..domain.solver import SolverConfig, SolverResult
from ..ports.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    NotWhitenedError,
    UnknownMethodError,
)
from ..ports.logger import Logger, NullLogger
from ..ports.separator import IterationObserver, Separator
from .mdi_density import MdiDensity
from .nonlinearities import Nonlinearities
from .preprocessing import Preprocessing


WHITENED_TOL = 0.2

# Per-row derivative provider: (row index, projections) -> (f', f'')
DerivativeFn = Callable[[int, np.ndarray], Tuple[np.ndarray, np.ndarray]]


@lru_cache(maxsize=None)
def gaussian_expectation(function: BasisFunction) -> float:
    """
    E{G(nu)} for nu standard normal.

    G0 is exact (E{nu^4}/4 = 0.75); other functions are integrated numerically.
    """
    if function is BasisFunction.G0:
        return 0.75

    def integrand(y: float) -> float:
        value, _, _ = Nonlinearities.evaluate(function, y)
        return float(value) * norm.pdf(y)

    result, _ = integrate.quad(integrand, -np.inf, np.inf)
    return float(result)


def canonical_rows(values: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically (first column is the primary key)."""
    order = np.lexsort(values.T[::-1])
    return values[order]


def fixed_point_update(x: np.ndarray, w: np.ndarray, derivatives: DerivativeFn) -> np.ndarray:
    """
    One sweep of the fixed-point rule before decorrelation.

    Formula: w_i <- E{x f_i'(w_i^T x)} - E{f_i''(w_i^T x)} w_i, for all rows i.
    """
    n = x.shape[0]
    projections = x @ w.T
    update = np.empty_like(w)
    for i in range(w.shape[0]):
        d1, d2 = derivatives(i, projections[:, i])
        update[i] = (x.T @ d1) / n - np.mean(d2) * w[i]
    return update


def row_change(w_new: np.ndarray, w_old: np.ndarray) -> float:
    """Sign-invariant change: 1 - min_i |<w_i_new, w_i_old>|."""
    return float(1.0 - np.min(np.abs(np.sum(w_new * w_old, axis=1))))


def parallel_gap(update: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Per row, 1 - |cos| between an update direction and the current row."""
    norms = np.linalg.norm(update, axis=1)
    cosines = np.abs(np.sum(update * w, axis=1)) / np.where(norms > 0, norms, 1.0)
    return 1.0 - cosines


class _FixedPointSeparator(Separator):
    """Shared driver: validation, initialization, iteration loop."""

    def __init__(self, config: SolverConfig, logger: Optional[Logger] = None):
        super().__init__(config)
        self.logger = logger or NullLogger()

    def _prepare(self, data: DataMatrix, w_init: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        data.require_estimable()
        deviation = float(np.max(np.abs(data.covariance() - np.eye(data.m_channels))))
        if deviation > WHITENED_TOL:
            raise NotWhitenedError(deviation, WHITENED_TOL)
        if w_init is None:
            rng = np.random.default_rng(self.config.seed)
            w = Preprocessing.random_orthonormal(data.m_channels, rng).w
        else:
            w_init = np.asarray(w_init, dtype=float)
            if w_init.shape != (data.m_channels, data.m_channels):
                raise DimensionMismatchError(
                    "initial unmixing matrix", (data.m_channels, data.m_channels), w_init.shape
                )
            w = Preprocessing.symmetric_decorrelation(w_init).w
        return canonical_rows(data.values), np.array(w)

    def _iterate(
        self,
        x: np.ndarray,
        w: np.ndarray,
        on_iteration: Optional[IterationObserver],
    ) -> Tuple[np.ndarray, List[float], int, bool, Optional[float]]:
        trace: List[float] = []
        change: Optional[float] = None
        converged = False
        iteration = 0
        for iteration in range(1, self.config.max_outer_iters + 1):
            objective, derivatives = self._stage(x, w)
            w_old = w
            for _ in range(self.config.max_inner_iters):
                w = Preprocessing.symmetric_decorrelation(
                    fixed_point_update(x, w, derivatives)
                ).w
            change = row_change(w, w_old)
            trace.append(objective)
            self.logger.debug(
                "Fixed-point iteration",
                method=self.name, iteration=iteration, objective=f"{objective:.6g}",
                change=f"{change:.3e}",
            )
            if on_iteration is not None:
                on_iteration(iteration, w.copy(), objective)
            if change < self.config.tol:
                converged = True
                break
        return w, trace, iteration, converged, change

    @abstractmethod
    def _stage(self, x: np.ndarray, w: np.ndarray) -> Tuple[float, DerivativeFn]:
        """Objective at w and the per-row derivative provider for the sweep."""
        pass

    def stationarity_gap(self, data_whitened: DataMatrix, result: SolverResult) -> np.ndarray:
        """
        Per row, 1 - |cos| between the pre-decorrelation update and w_i at the result.
        """
        x = canonical_rows(data_whitened.values)
        w = np.array(result.w.w)
        _, derivatives = self._stage_for_result(x, w, result)
        return parallel_gap(fixed_point_update(x, w, derivatives), w)

    def _stage_for_result(self, x, w, result):
        return self._stage(x, w)


class MdiIcaSeparator(_FixedPointSeparator):
    """
    Joint maximization of the total KL^min over W and the component tilts.
    Stage 1 fits each tilt by weighted least squares on a grid histogram of
    y_i = w_i^T x; stage 2 runs fixed-point sweeps with those tilts.
    """

    def __init__(self, config: SolverConfig, basis: Optional[BasisSet] = None, logger: Optional[Logger] = None):
        super().__init__(config, logger)
        self.basis = basis or Nonlinearities.resolve_basis(config.basis)
        self._method = config.basis if basis is None else "mdiica"

    @property
    def name(self) -> str:
        return self._method

    def fit_tilts(self, x: np.ndarray, w: np.ndarray) -> Tuple[Tuple[TiltModel, ...], Tuple[GridHistogram, ...]]:
        """Histogram and WLS tilt for every component of x W^T."""
        projections = x @ w.T
        histograms = tuple(
            MdiDensity.build_histogram(projections[:, i], self.config.grid_size, self.config.grid_range)
            for i in range(w.shape[0])
        )
        tilts = tuple(MdiDensity.fit_tilt_wls(h, self.basis, self.config.ridge) for h in histograms)
        return tilts, histograms

    def _derivatives(self, tilts: Tuple[TiltModel, ...]) -> DerivativeFn:
        def derivatives(i: int, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            _, f1, f2 = Nonlinearities.tilt_terms(tilts[i].beta, self.basis, y)
            return f1, f2
        return derivatives

    def _stage(self, x: np.ndarray, w: np.ndarray) -> Tuple[float, DerivativeFn]:
        tilts, histograms = self.fit_tilts(x, w)
        objective = float(sum(MdiDensity.kl_min(t, h) for t, h in zip(tilts, histograms)))
        return objective, self._derivatives(tilts)

    def _stage_for_result(self, x, w, result):
        return 0.0, self._derivatives(result.tilts)

    def separate(
        self,
        data_whitened: DataMatrix,
        w_init: Optional[np.ndarray] = None,
        on_iteration: Optional[IterationObserver] = None,
    ) -> SolverResult:
        x, w = self._prepare(data_whitened, w_init)
        w, trace, iterations, converged, change = self._iterate(x, w, on_iteration)
        tilts, _ = self.fit_tilts(x, w)
        self.logger.info(
            "MDIICA finished", method=self.name, iterations=iterations,
            converged=converged, objective=f"{trace[-1]:.6g}",
        )
        return SolverResult(
            w=UnmixingMatrix(w),
            tilts=tilts,
            kl_trace=tuple(trace),
            iterations=iterations,
            converged=converged,
            method=self.name,
            change=change,
        )


class FastIcaSeparator(_FixedPointSeparator):
    """
    Symmetric FastICA with one nonlinearity, G0 = y^4/4 or G1 = log cosh y.
    The trace records sum_i (E{G(y_i)} - E{G(nu)})^2.
    """

    ALLOWED = (BasisFunction.G0, BasisFunction.G1)

    def __init__(self, config: SolverConfig, nonlinearity: BasisFunction, logger: Optional[Logger] = None):
        super().__init__(config, logger)
        nonlinearity = BasisFunction(nonlinearity)
        if nonlinearity not in self.ALLOWED:
            raise ConfigurationError(
                f"FastICA nonlinearity must be G0 or G1, got {nonlinearity.value}", "/nonlinearity"
            )
        self.nonlinearity = nonlinearity
        self._baseline = gaussian_expectation(nonlinearity)

    @property
    def name(self) -> str:
        return f"fastica-{self.nonlinearity.value.lower()}"

    def contrast(self, projections: np.ndarray) -> float:
        values, _, _ = Nonlinearities.evaluate(self.nonlinearity, projections)
        return float(np.sum((values.mean(axis=0) - self._baseline) ** 2))

    def _stage(self, x: np.ndarray, w: np.ndarray) -> Tuple[float, DerivativeFn]:
        def derivatives(i: int, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            _, d1, d2 = Nonlinearities.evaluate(self.nonlinearity, y)
            return d1, d2
        return self.contrast(x @ w.T), derivatives

    def separate(
        self,
        data_whitened: DataMatrix,
        w_init: Optional[np.ndarray] = None,
        on_iteration: Optional[IterationObserver] = None,
    ) -> SolverResult:
        x, w = self._prepare(data_whitened, w_init)
        w, trace, iterations, converged, change = self._iterate(x, w, on_iteration)
        self.logger.info(
            "FastICA finished", method=self.name, iterations=iterations, converged=converged,
        )
        return SolverResult(
            w=UnmixingMatrix(w),
            tilts=(),
            kl_trace=tuple(trace),
            iterations=iterations,
            converged=converged,
            method=self.name,
            change=change,
            nonlinearity=self.nonlinearity.value,
        )


def mdiica(data_whitened: DataMatrix, cfg: SolverConfig, **kwargs) -> SolverResult:
    """Run MDIICA with the basis named in cfg.basis."""
    return MdiIcaSeparator(cfg).separate(data_whitened, **kwargs)


def fastica_single(data_whitened: DataMatrix, nonlinearity: BasisFunction, cfg: SolverConfig, **kwargs) -> SolverResult:
    """Run symmetric single-nonlinearity FastICA."""
    return FastIcaSeparator(cfg, nonlinearity).separate(data_whitened, **kwargs)


def recover_sources(w: UnmixingMatrix, t: WhiteningTransform, raw: DataMatrix) -> DataMatrix:
    """
    Source estimates y = W whitener (x - mean) for every row of raw.

    Raises:
        DimensionMismatchError: If W, the transform and the data disagree on m
    """
    if w.m != t.m_channels:
        raise DimensionMismatchError("unmixing matrix", t.m_channels, w.m)
    whitened = Preprocessing.apply_whitening(t, raw)
    return DataMatrix(whitened.values @ w.w.T)


METHODS: Dict[str, Callable[[SolverConfig, Optional[Logger]], Separator]] = {
    "mica2": lambda cfg, logger: MdiIcaSeparator(dataclasses.replace(cfg, basis="mica2"), logger=logger),
    "mica4": lambda cfg, logger: MdiIcaSeparator(dataclasses.replace(cfg, basis="mica4"), logger=logger),
    "fastica-g0": lambda cfg, logger: FastIcaSeparator(cfg, BasisFunction.G0, logger=logger),
    "fastica-g1": lambda cfg, logger: FastIcaSeparator(cfg, BasisFunction.G1, logger=logger),
}


def supported_methods() -> List[str]:
    return list(METHODS.keys())


def build_separator(method_id: str, cfg: SolverConfig, logger: Optional[Logger] = None) -> Separator:
    """
    Build a separator by method id.

    Raises:
        UnknownMethodError: If the id is not registered
    """
    try:
        factory = METHODS[method_id]
    except KeyError:
        raise UnknownMethodError(method_id, supported_methods())
    return factory(cfg, logger)
