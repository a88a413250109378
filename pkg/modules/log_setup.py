"""
Logging setup for the trigfit logger tree.

Every module grabs `get_logger("<tag>")`; the CLI calls `configure_logging`
once per run to attach the stderr handler and, optionally, the log file.
"""

import logging
import os
import sys

from config import LOG_LEVEL

ROOT_LOGGER = "trigfit"
LOG_FORMAT = "%(asctime)s | [%(name)s] %(levelname)s %(message)s"

_stream_handler = None
_file_handlers = {}


class StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr is when a record is emitted."""

    def __init__(self):
        logging.Handler.__init__(self)

    @property
    def stream(self):
        return sys.stderr


def get_logger(tag: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{tag}")


def configure_logging(level: str = LOG_LEVEL, log_file: str = None) -> logging.Logger:
    """Attach handlers to the trigfit root logger.

    Safe to call repeatedly: one stderr handler is attached and a given log
    file is only opened once.
    """
    global _stream_handler
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    formatter = logging.Formatter(LOG_FORMAT)

    if _stream_handler is None:
        _stream_handler = StderrHandler()
        _stream_handler.setFormatter(formatter)
        root.addHandler(_stream_handler)

    if log_file:
        path = os.path.abspath(log_file)
        if path not in _file_handlers:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            file_handler = logging.FileHandler(path, encoding="utf-8")
            file_handler.setFormatter(formatter)
            root.addHandler(file_handler)
            _file_handlers[path] = file_handler

    return root
