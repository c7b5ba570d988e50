from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from ..domain.signals import DataMatrix


class ArtifactRepository(ABC):
    """
    Port (interface) for reading input matrices and study configs and for
    writing result artifacts.
    Every write must leave either the complete file or no file at all.
    """

    @abstractmethod
    def read_matrix(self, path: str) -> DataMatrix:
        """
        Read a numeric matrix, rows = samples, columns = channels.

        Args:
            path: File path; a non-numeric first row is treated as a header

        Returns:
            DataMatrix with the parsed values

        Raises:
            InputFormatError: If the file is malformed; carries the line number
        """
        pass

    @abstractmethod
    def read_json(self, path: str) -> Dict[str, Any]:
        """
        Read a JSON object such as a study configuration.

        Raises:
            InputFormatError: If the file is missing or not a JSON object
        """
        pass

    @abstractmethod
    def write_sources(self, directory: str, sources: DataMatrix, columns: Optional[Sequence[str]] = None) -> str:
        """Write recovered sources; returns the written path."""
        pass

    @abstractmethod
    def write_table(self, directory: str, filename: str, frame: pd.DataFrame) -> str:
        """Write a result table; returns the written path."""
        pass

    @abstractmethod
    def write_json(self, directory: str, filename: str, payload: Dict[str, Any]) -> str:
        """Write a JSON document; returns the written path."""
        pass
