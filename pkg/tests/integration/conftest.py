"""
Configuration and fixtures for command-line integration tests.
"""

import io
import sys
from pathlib import Path

# Add project root directory to Python path so src module can be found
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pandas as pd
import pytest
from unittest.mock import MagicMock

from src.adapters.handlers.cli_handlers import CliHandlers
from src.adapters.repositories.csv_repository import CsvArtifactRepository
from src.core.config.config import Config
from src.core.ports.logger import Logger
from src.core.services.sources import Sources


class CliRunner:
    """Runs the CLI in-process and keeps its stdout and logger."""

    def __init__(self):
        self.logger = MagicMock(spec=Logger)
        self.stdout = io.StringIO()

    def __call__(self, *argv: str) -> int:
        handlers = CliHandlers(CsvArtifactRepository(), self.logger, Config(), stdout=self.stdout)
        return handlers.run(list(argv))

    def error_messages(self):
        return [call.args[0] for call in self.logger.error.call_args_list]


@pytest.fixture
def cli(monkeypatch):
    """Fixture providing an in-process CLI with MDIICA_SEED cleared."""
    monkeypatch.delenv("MDIICA_SEED", raising=False)
    monkeypatch.setattr(Config, "SEED_OVERRIDE", None)
    return CliRunner()


@pytest.fixture
def three_source_problem(tmp_path):
    """
    Fixture providing an image-scale 3-channel mixture written to CSV.

    Returns:
        (path to mixtures.csv, true sources as an array)
    """
    rng = np.random.default_rng(2016)
    specs = [Sources.preset("t3"), Sources.preset("gmm-bimodal"), Sources.preset("exponential")]
    sources = Sources.generate_sources(specs, 16900, rng).values
    mixing = Sources.random_mixing(3, rng)
    path = tmp_path / "mixtures.csv"
    pd.DataFrame(sources @ mixing.T, columns=["x1", "x2", "x3"]).to_csv(path, index=False, float_format="%.17g")
    return str(path), sources


@pytest.fixture
def uniform_csv(tmp_path):
    """Fixture providing a small 2-channel uniform mixture as CSV."""
    rng = np.random.default_rng(99)
    sources = Sources.generate_sources([Sources.preset("uniform")] * 2, 1000, rng).values
    path = tmp_path / "uniform.csv"
    pd.DataFrame(sources @ np.array([[1.0, 0.6], [0.4, 1.2]]).T).to_csv(
        path, index=False, header=False, float_format="%.17g"
    )
    return str(path)
