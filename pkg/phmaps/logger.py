"""Logging for phmaps.

`get_logger` hands out loggers that write a compact line to stderr and a
timestamped line to a rotating file under `settings.LOG_DIR`. Every record
is tagged with the CLI command that is running (see `command_context`), so
one log file can hold many runs and still be read per command.
"""
import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from logging.handlers import RotatingFileHandler
from typing import Iterator

from phmaps.config import settings

CONSOLE_FORMAT = "%(levelname)-7s [%(command)s] %(short_name)s: %(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)s [%(command)s] %(name)s: %(message)s"
LOG_FILE = os.path.join(settings.LOG_DIR, settings.LOG_FILE)

_command: ContextVar[str] = ContextVar("phmaps_command", default="-")


@contextmanager
def command_context(command: str) -> Iterator[None]:
    """Tag every record logged inside the block with ``command``."""
    token = _command.set(command)
    try:
        yield
    finally:
        _command.reset(token)


class CommandFilter(logging.Filter):
    """Adds ``command`` and ``short_name`` (the logger name without ``phmaps.``)."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = _command.get()
        record.short_name = record.name.removeprefix("phmaps.")
        return True


def get_logger(name: str = __name__) -> logging.Logger:
    """Create and return a configured logger.

    Args:
        name: Logger name (usually __name__ from the calling module).

    Returns:
        Configured `logging.Logger` instance.
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    level = logging.DEBUG if settings.DEBUG else logging.INFO
    logger.setLevel(level)
    tags = CommandFilter()

    # stderr; stdout carries command output
    console = logging.StreamHandler()
    console.setLevel(level)
    console.addFilter(tags)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))

    rotating = RotatingFileHandler(LOG_FILE, maxBytes=5 * 1024 * 1024, backupCount=3, encoding="utf-8")
    rotating.setLevel(logging.DEBUG)
    rotating.addFilter(tags)
    rotating.setFormatter(logging.Formatter(FILE_FORMAT))

    logger.addHandler(console)
    logger.addHandler(rotating)
    logger.propagate = False
    return logger
