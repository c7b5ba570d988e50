"""
Synthetic source distributions and random mixing matrices for the benchmark.
Every generated column is standardized to zero mean and unit variance using the
family's closed-form moments, or calibrated moments when no closed form exists.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..domain.signals import DataMatrix
from ..domain.study import SourceSpec
from ..ports.exceptions import ConfigurationError, EmptyInputError, UnknownDistributionError


MAX_MIXING_CONDITION = 1e3
CALIBRATION_SAMPLES = 1_000_000

Sampler = Callable[[np.random.Generator, int, dict], np.ndarray]
Moments = Callable[[dict], Tuple[float, float]]


@dataclass(frozen=True)
class SourceFamily:
    """A registered distribution family: sampler plus optional closed-form (mean, std)."""
    name: str
    sampler: Sampler
    moments: Optional[Moments] = None
    gaussian: bool = False


def _student_t(rng: np.random.Generator, n: int, params: dict) -> np.ndarray:
    return rng.standard_t(_dof(params), size=n)


def _dof(params: dict) -> float:
    dof = float(params.get("dof", 3.0))
    if dof <= 2:
        raise ConfigurationError("student-t needs dof > 2 for finite variance", "/params/dof")
    return dof


def _mixture_parts(params: dict) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    weights = np.asarray(params.get("weights", (0.5, 0.5)), dtype=float)
    means = np.asarray(params.get("means", (-2.0, 2.0)), dtype=float)
    scales = np.asarray(params.get("scales", (1.0, 1.0)), dtype=float)
    if not (weights.shape == means.shape == scales.shape) or weights.ndim != 1:
        raise ConfigurationError("mixture weights, means and scales must have equal length", "/params")
    if np.any(weights < 0) or weights.sum() <= 0 or np.any(scales <= 0):
        raise ConfigurationError("mixture weights must be non-negative and scales positive", "/params")
    return weights / weights.sum(), means, scales


def _mixture(rng: np.random.Generator, n: int, params: dict) -> np.ndarray:
    weights, means, scales = _mixture_parts(params)
    component = rng.choice(weights.size, size=n, p=weights)
    return means[component] + scales[component] * rng.standard_normal(n)


def _mixture_moments(params: dict) -> Tuple[float, float]:
    weights, means, scales = _mixture_parts(params)
    mean = float(weights @ means)
    variance = float(weights @ (scales ** 2 + means ** 2)) - mean ** 2
    return mean, float(np.sqrt(variance))


FAMILIES: Dict[str, SourceFamily] = {
    "gaussian": SourceFamily(
        "gaussian", lambda rng, n, p: rng.standard_normal(n), lambda p: (0.0, 1.0), gaussian=True
    ),
    "uniform": SourceFamily(
        "uniform", lambda rng, n, p: rng.uniform(-1.0, 1.0, n), lambda p: (0.0, 1.0 / np.sqrt(3.0))
    ),
    "laplace": SourceFamily(
        "laplace", lambda rng, n, p: rng.laplace(0.0, 1.0, n), lambda p: (0.0, np.sqrt(2.0))
    ),
    "exponential": SourceFamily(
        "exponential", lambda rng, n, p: rng.exponential(1.0, n), lambda p: (1.0, 1.0)
    ),
    "student-t": SourceFamily(
        "student-t", _student_t, lambda p: (0.0, float(np.sqrt(_dof(p) / (_dof(p) - 2.0))))
    ),
    "gaussian-mixture": SourceFamily("gaussian-mixture", _mixture, _mixture_moments),
}

PRESETS: Dict[str, SourceSpec] = {
    "t3": SourceSpec("student-t", {"dof": 3.0}, "t3"),
    "t5": SourceSpec("student-t", {"dof": 5.0}, "t5"),
    "laplace": SourceSpec("laplace", {}, "laplace"),
    "uniform": SourceSpec("uniform", {}, "uniform"),
    "exponential": SourceSpec("exponential", {}, "exponential"),
    "gaussian": SourceSpec("gaussian", {}, "gaussian"),
    "gmm-bimodal": SourceSpec(
        "gaussian-mixture", {"weights": (0.5, 0.5), "means": (-2.0, 2.0), "scales": (1.0, 1.0)},
        "gmm-bimodal",
    ),
    # Weight 0.2113 makes the excess kurtosis vanish while the skewness stays large
    "gmm-asym": SourceSpec(
        "gaussian-mixture", {"weights": (0.7887, 0.2113), "means": (0.0, 4.0), "scales": (1.0, 1.0)},
        "gmm-asym",
    ),
    "gmm-sym4": SourceSpec(
        "gaussian-mixture",
        {"weights": (0.25, 0.25, 0.25, 0.25), "means": (-3.0, -1.0, 1.0, 3.0), "scales": (0.5, 0.5, 0.5, 0.5)},
        "gmm-sym4",
    ),
    "gmm-asym4": SourceSpec(
        "gaussian-mixture",
        {"weights": (0.4, 0.3, 0.2, 0.1), "means": (-2.0, 0.0, 1.5, 4.0), "scales": (0.5, 0.7, 0.5, 1.0)},
        "gmm-asym4",
    ),
}


class Sources:
    """Static class for source generation and random mixing."""

    @staticmethod
    def supported_families() -> List[str]:
        return list(FAMILIES.keys())

    @staticmethod
    def family(name: str) -> SourceFamily:
        try:
            return FAMILIES[name]
        except KeyError:
            raise UnknownDistributionError(name, Sources.supported_families())

    @staticmethod
    def preset(label: str) -> SourceSpec:
        """
        Look up a named preset such as 't3' or 'gmm-asym'.

        Raises:
            UnknownDistributionError: If the label is unknown
        """
        try:
            return PRESETS[label]
        except KeyError:
            raise UnknownDistributionError(label, sorted(PRESETS.keys()))

    @staticmethod
    def is_gaussian(spec: SourceSpec) -> bool:
        return Sources.family(spec.family).gaussian

    @staticmethod
    def moments(spec: SourceSpec) -> Tuple[float, float]:
        """Closed-form (mean, std) when available, else calibrated."""
        family = Sources.family(spec.family)
        if family.moments is not None:
            return family.moments(spec.param_dict)
        return Sources.calibrated_moments(spec)

    @staticmethod
    @lru_cache(maxsize=None)
    def calibrated_moments(spec: SourceSpec) -> Tuple[float, float]:
        """(mean, std) estimated once from 10^6 draws with a fixed seed; cached per spec."""
        family = Sources.family(spec.family)
        draws = family.sampler(np.random.default_rng(0), CALIBRATION_SAMPLES, spec.param_dict)
        return float(draws.mean()), float(draws.std(ddof=1))

    @staticmethod
    def draw(spec: SourceSpec, n: int, rng: np.random.Generator) -> np.ndarray:
        """n standardized i.i.d. draws from one spec."""
        family = Sources.family(spec.family)
        mean, std = Sources.moments(spec)
        return (family.sampler(rng, n, spec.param_dict) - mean) / std

    @staticmethod
    def generate_sources(specs: Sequence[SourceSpec], n: int, rng: np.random.Generator) -> DataMatrix:
        """
        Draw one standardized column per spec.

        Args:
            specs: Distribution of each source component
            n: Number of samples (>= 1)
            rng: Generator owned by the caller

        Returns:
            n x len(specs) DataMatrix

        Raises:
            EmptyInputError: If n < 1 or no specs are given
            UnknownDistributionError: If a family is not registered
        """
        if n < 1 or not specs:
            raise EmptyInputError("source samples")
        return DataMatrix(np.column_stack([Sources.draw(spec, n, rng) for spec in specs]))

    @staticmethod
    def random_mixing(m: int, rng: np.random.Generator) -> np.ndarray:
        """
        Standard-normal m x m matrix, redrawn until its condition number is <= 1e3.
        """
        if m < 2:
            raise ConfigurationError(f"mixing dimension must be >= 2, got {m}", "/dimension")
        while True:
            mixing = rng.standard_normal((m, m))
            if np.linalg.cond(mixing) <= MAX_MIXING_CONDITION:
                return mixing
