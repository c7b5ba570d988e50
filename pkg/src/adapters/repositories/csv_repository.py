"""
File-system adapter for input matrices and result artifacts.
This implements the ArtifactRepository port with pandas CSV I/O and JSON.
Writes go to a temporary file in the target directory and are renamed into
place, so a reader never sees a partial file.
"""

import io
import json
import logging
import os
import re
import tempfile
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ...core.domain.signals import DataMatrix
from ...core.ports.artifact_repository import ArtifactRepository
from ...core.ports.exceptions import ArtifactError, InputFormatError, InvalidDataError


_PARSER_LINE = re.compile(r"line (\d+)")


def _is_number(field: str) -> bool:
    try:
        float(field)
        return True
    except ValueError:
        return False


class CsvArtifactRepository(ArtifactRepository):
    """
    CSV/JSON adapter that implements the ArtifactRepository port.
    """

    def __init__(self, table_float_format: str = "%.9g", sources_float_format: str = "%.17g",
                 sources_filename: str = "sources.csv"):
        """
        Initialize the repository.

        Args:
            table_float_format: printf format for study tables
            sources_float_format: printf format for recovered sources; needs
                enough digits for the sidecar to reproduce them
            sources_filename: File name of the recovered sources
        """
        self.table_float_format = table_float_format
        self.sources_float_format = sources_float_format
        self.sources_filename = sources_filename
        self.logger = logging.getLogger(__name__)

    def has_header(self, path: str) -> bool:
        """A first row with any non-numeric field is a header."""
        try:
            with open(path, "r", encoding="utf-8") as handle:
                first = handle.readline().strip()
        except OSError as e:
            raise InputFormatError(path, f"cannot open file: {e.strerror or e}")
        if not first:
            raise InputFormatError(path, "file is empty", 1)
        return not all(_is_number(field.strip()) for field in first.split(","))

    def read_matrix(self, path: str) -> DataMatrix:
        header = self.has_header(path)
        try:
            frame = pd.read_csv(
                path,
                header=0 if header else None,
                dtype=str,
                skip_blank_lines=False,
                keep_default_na=False,
            )
        except pd.errors.EmptyDataError:
            raise InputFormatError(path, "no data rows", 2 if header else 1)
        except pd.errors.ParserError as e:
            match = _PARSER_LINE.search(str(e))
            line = int(match.group(1)) if match else None
            raise InputFormatError(path, "inconsistent number of fields", line)

        if frame.empty:
            raise InputFormatError(path, "no data rows", 2 if header else 1)
        first_data_line = 2 if header else 1
        numeric = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
        bad = numeric.isna().to_numpy()
        if bad.any():
            row, col = (int(k[0]) for k in np.nonzero(bad))
            raw = frame.iat[row, col]
            reason = "missing value" if pd.isna(raw) or not str(raw).strip() else f"non-numeric value {raw!r}"
            raise InputFormatError(path, f"{reason} in column {col + 1}", first_data_line + row)

        values = numeric.to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            row = int(np.nonzero(~np.isfinite(values))[0][0])
            raise InputFormatError(path, "non-finite value", first_data_line + row)
        try:
            matrix = DataMatrix(values)
        except InvalidDataError as e:
            raise InputFormatError(path, e.message)
        self.logger.debug("Read %d x %d matrix from %s (header=%s)", matrix.n_samples, matrix.m_channels, path, header)
        return matrix

    def read_json(self, path: str) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                document = json.load(handle)
        except OSError as e:
            raise InputFormatError(path, f"cannot open file: {e.strerror or e}")
        except json.JSONDecodeError as e:
            raise InputFormatError(path, f"invalid JSON: {e.msg}", e.lineno)
        if not isinstance(document, dict):
            raise InputFormatError(path, "top-level JSON value must be an object", 1)
        return document

    def write_sources(self, directory: str, sources: DataMatrix, columns: Optional[Sequence[str]] = None) -> str:
        columns = list(columns) if columns else [f"y{i + 1}" for i in range(sources.m_channels)]
        frame = pd.DataFrame(sources.values, columns=columns)
        return self._atomic_write(
            directory,
            self.sources_filename,
            lambda handle: frame.to_csv(
                handle, index=False, float_format=self.sources_float_format, lineterminator="\n"
            ),
        )

    def write_table(self, directory: str, filename: str, frame: pd.DataFrame) -> str:
        return self._atomic_write(
            directory,
            filename,
            lambda handle: frame.to_csv(
                handle, index=False, float_format=self.table_float_format, lineterminator="\n", na_rep="nan"
            ),
        )

    def write_json(self, directory: str, filename: str, payload: Dict[str, Any]) -> str:
        return self._atomic_write(
            directory,
            filename,
            lambda handle: handle.write(json.dumps(payload, indent=2, allow_nan=False) + "\n"),
        )

    def _atomic_write(self, directory: str, filename: str, writer: Callable[[io.TextIOBase], Any]) -> str:
        """
        Write through a temporary file in `directory`, then rename it into place.

        Raises:
            ArtifactError: If the directory cannot be created or the file written
        """
        target = os.path.join(directory, filename)
        temp_path = None
        try:
            os.makedirs(directory, exist_ok=True)
            fd, temp_path = tempfile.mkstemp(prefix=f".{filename}.", suffix=".tmp", dir=directory)
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                writer(handle)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(temp_path, target)
        except (OSError, ValueError) as e:
            if temp_path is not None and os.path.exists(temp_path):
                os.remove(temp_path)
            self.logger.error("Failed to write %s: %s", target, e)
            raise ArtifactError(f"Failed to write {target}", e)
        self.logger.debug("Wrote %s", target)
        return target
