from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..ports.exceptions import ConfigurationError


class Command(str, Enum):
    SEPARATE = "separate"
    BENCH = "bench"


@dataclass(frozen=True)
class RunManifest:
    """Resolved command-line request."""
    command: Command
    output_path: str
    seed: int = 0
    input_path: Optional[str] = None
    config_path: Optional[str] = None
    method: str = "mica2"
    grid_size: int = 500
    grid_range: float = 5.0
    tol: float = 1e-6
    max_iters: int = 50
    jobs: int = 1
    record_timing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "command", Command(self.command))
        if not self.output_path:
            raise ConfigurationError("output path must be non-empty", "/out")
        if self.command is Command.SEPARATE and not self.input_path:
            raise ConfigurationError("separate requires an input path", "/input")
        if self.command is Command.BENCH and not self.config_path:
            raise ConfigurationError("bench requires a config path", "/config")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer", "/seed")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1", "/jobs")

    @property
    def basis(self) -> Optional[str]:
        """Basis id of an MDIICA method; None for the FastICA baselines."""
        return self.method if self.method in ("mica2", "mica4") else None
