"""
Main entry point for the separation toolkit.
Wires configuration, logger and file repository into the CLI handlers.

Run:
    python -m src.main separate --input mixtures.csv --method mica2 --seed 7 --out results/
    python -m src.main bench --config config/study_default.json --out study/ --jobs 4
"""

import sys
from typing import List, Optional

from .adapters.handlers.cli_handlers import CliHandlers
from .adapters.repositories.csv_repository import CsvArtifactRepository

# Import configuration
from .core.config.config import config, logger


def get_repository() -> CsvArtifactRepository:
    """Get the file repository configured with the output formats."""
    return CsvArtifactRepository(
        table_float_format=config.TABLE_FLOAT_FORMAT,
        sources_float_format=config.SOURCES_FLOAT_FORMAT,
        sources_filename=config.SOURCES_FILENAME,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit status (0 ok, 1 input error, 2 not converged)."""
    handlers = CliHandlers(get_repository(), logger, config)
    return handlers.run(argv)


if __name__ == "__main__":
    sys.exit(main())
