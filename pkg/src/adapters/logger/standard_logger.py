"""
Standard logger implementation using Python's built-in logging module.
This implements the Logger port for the command-line front end.
"""

import logging
import sys
from typing import Any, Union

from ...core.ports.logger import Logger


_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def parse_level(level: Union[int, str]) -> int:
    """
    Resolve a level given as a logging constant or a name such as 'info'.

    Args:
        level: Logging level constant or case-insensitive name

    Returns:
        The logging module level constant (INFO for unknown names)
    """
    if isinstance(level, int):
        return level
    return _LEVELS.get(level.strip().lower(), logging.INFO)


class StandardLogger(Logger):
    """
    Standard logger implementation that uses Python's built-in logging module.
    Context kwargs are rendered as key=value pairs after the message. Output
    goes to stderr because stdout carries the CLI result tables.
    """

    def __init__(self, name: str = "mdiica", level: Union[int, str] = logging.INFO):
        """
        Initialize the standard logger.

        Args:
            name: Logger name for identification
            level: Logging level (constant or name such as 'debug')
        """
        self._logger = logging.getLogger(name)
        self._logger.setLevel(parse_level(level))

        # Avoid duplicate handlers
        if not self._logger.handlers:
            self._setup_handlers()

    def _setup_handlers(self) -> None:
        """Setup the stderr handler."""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self._logger.level)
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        console_handler.setFormatter(formatter)
        self._logger.addHandler(console_handler)

    @staticmethod
    def _render(message: str, kwargs: dict) -> str:
        if not kwargs:
            return message
        extra_info = " ".join(f"{k}={v}" for k, v in kwargs.items())
        return f"{message} {extra_info}"

    def info(self, message: str, **kwargs: Any) -> None:
        self._logger.info(self._render(message, kwargs))

    def error(self, message: str, **kwargs: Any) -> None:
        self._logger.error(self._render(message, kwargs))

    def warn(self, message: str, **kwargs: Any) -> None:
        self._logger.warning(self._render(message, kwargs))

    def debug(self, message: str, **kwargs: Any) -> None:
        self._logger.debug(self._render(message, kwargs))

    def set_level(self, level: Union[int, str]) -> None:
        """
        Set the logging level on the logger and its handlers.

        Args:
            level: New logging level (constant or name)
        """
        resolved = parse_level(level)
        self._logger.setLevel(resolved)
        for handler in self._logger.handlers:
            handler.setLevel(resolved)

    def get_logger(self) -> logging.Logger:
        """Get the underlying logging.Logger instance."""
        return self._logger
