"""
Configuration settings for the separation toolkit.
Loads configuration from environment variables (and a .env file) with defaults
that mirror the solver defaults.
"""

import os
from typing import Optional

from dotenv import load_dotenv

from ...adapters.logger.standard_logger import StandardLogger
from ..ports.logger import Logger


load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes")


class Config:
    """Application configuration loaded from environment variables."""

    # Logging
    LOG_LEVEL: str = os.getenv("MDIICA_LOG_LEVEL", "info")

    # Seed override; when set it wins over flags and study files
    SEED_OVERRIDE: Optional[str] = os.getenv("MDIICA_SEED")
    DEFAULT_SEED: int = 0

    # Solver defaults
    GRID_L: int = int(os.getenv("MDIICA_GRID_L", "500"))
    GRID_RANGE: float = float(os.getenv("MDIICA_GRID_RANGE", "5.0"))
    TOL: float = float(os.getenv("MDIICA_TOL", "1e-6"))
    MAX_OUTER_ITERS: int = int(os.getenv("MDIICA_MAX_ITERS", "50"))
    MAX_INNER_ITERS: int = 1
    RIDGE: float = float(os.getenv("MDIICA_RIDGE", "1e-8"))
    DEFAULT_METHOD: str = "mica2"

    # Study runner
    JOBS: int = int(os.getenv("MDIICA_JOBS", str(os.cpu_count() or 1)))
    RECORD_TIMING: bool = _env_bool("MDIICA_RECORD_TIMING", "true")

    # Output formats
    TABLE_FLOAT_FORMAT: str = "%.9g"
    SOURCES_FLOAT_FORMAT: str = "%.17g"
    SOURCES_FILENAME: str = "sources.csv"
    SIDECAR_FILENAME: str = "separation.json"
    TRIALS_FILENAME: str = "trials.csv"
    SUMMARY_FILENAME: str = "summary.json"

    APP_TITLE: str = "mdiica"
    APP_DESCRIPTION: str = (
        "Blind source separation by second-order minimum discrimination information"
    )
    APP_VERSION: str = "1.0.0"

    @classmethod
    def seed_override(cls) -> Optional[int]:
        """
        Seed from MDIICA_SEED, read at call time; None when unset.

        Raises:
            ValueError: If MDIICA_SEED is not an unsigned integer
        """
        override = os.getenv("MDIICA_SEED", cls.SEED_OVERRIDE)
        if override is None or not override.strip():
            return None
        seed = int(override)
        if seed < 0:
            raise ValueError("MDIICA_SEED must be non-negative")
        return seed

    @classmethod
    def resolve_seed(cls, requested: Optional[int]) -> int:
        """Seed precedence: MDIICA_SEED, then the requested seed, then the default."""
        override = cls.seed_override()
        if override is not None:
            return override
        if requested is not None:
            return requested
        return cls.DEFAULT_SEED


# Global configuration instance
config = Config()

# Configure logging using our custom logger
logger: Logger = StandardLogger("mdiica", level=config.LOG_LEVEL)
