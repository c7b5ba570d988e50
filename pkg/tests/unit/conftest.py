"""
Test configuration and fixtures for unit tests.
"""

import sys
from pathlib import Path

# Add project root directory to Python path so src module can be found
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest
from unittest.mock import MagicMock

from src.core.domain.signals import DataMatrix
from src.core.domain.solver import SolverConfig
from src.core.ports.logger import Logger
from src.core.services.preprocessing import Preprocessing
from src.core.services.sources import Sources


MIXING_2 = np.array([[1.0, 0.6], [0.4, 1.2]])


@pytest.fixture
def rng():
    """Fixture providing a seeded generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def mock_logger():
    """Fixture providing a mock logger."""
    return MagicMock(spec=Logger)


@pytest.fixture
def solver_config():
    """Fixture providing default solver settings with a fixed seed."""
    return SolverConfig(seed=3)


def make_mixture(label: str, n: int, seed: int, mixing: np.ndarray = MIXING_2):
    """Standardized sources of one preset, mixed by `mixing`."""
    rng = np.random.default_rng(seed)
    spec = Sources.preset(label)
    sources = Sources.generate_sources([spec] * mixing.shape[0], n, rng)
    mixed = DataMatrix(sources.values @ mixing.T)
    return sources, mixed


@pytest.fixture
def uniform_problem():
    """
    Fixture providing a whitened 2-source uniform mixture.

    Returns:
        (sources, mixed, transform, whitened, true unmixing in whitened coordinates)
    """
    sources, mixed = make_mixture("uniform", 2000, seed=7)
    transform = Preprocessing.fit_whitening(mixed)
    whitened = Preprocessing.apply_whitening(transform, mixed)
    w0 = np.linalg.inv(transform.whitener @ MIXING_2)
    return sources, mixed, transform, whitened, w0


@pytest.fixture
def gaussian_samples():
    """Fixture providing 10^5 standard normal samples."""
    return np.random.default_rng(2024).standard_normal(100_000)


@pytest.fixture
def mixture():
    """Fixture providing the make_mixture helper."""
    return make_mixture
