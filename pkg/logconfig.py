"""
Logging setup. Library modules only call logging.getLogger(__name__);
the CLI calls configure_logging() once.
"""

import logging
import sys

from pythonjsonlogger.json import JsonFormatter

PLAIN_FORMAT = "%(levelname)s %(name)s: %(message)s"
JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level="WARNING", json_format=False, stream=None):
    """
    Install a single stderr handler on the root logger.

    Args:
        level: logging level name or number
        json_format: emit one JSON object per record (python-json-logger)
        stream: override the output stream (tests)

    Returns:
        logging.Handler: the installed handler
    """
    handler = logging.StreamHandler(stream or sys.stderr)
    if json_format:
        handler.setFormatter(JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))

    root = logging.getLogger()
    for old in list(root.handlers):
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(level.upper() if isinstance(level, str) else level)
    return handler
