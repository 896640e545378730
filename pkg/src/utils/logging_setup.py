"""
Logging configuration for the command line entry point
"""

import logging
import os
import sys
from typing import Optional

ENV_VAR = "QPW_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def resolve_level(value: Optional[str] = None) -> int:
    """Map a level name to its number; unknown or missing names give WARNING"""
    name = (value or "").strip().upper()
    if name not in LEVELS:
        return logging.WARNING
    return getattr(logging, name)


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """Send log records to stderr at the level named by ``level`` or ``QPW_LOG_LEVEL``

    Calling it again replaces the handler instead of stacking a second one.
    """
    root = logging.getLogger("src")
    root.setLevel(resolve_level(level if level is not None else os.environ.get(ENV_VAR)))
    for handler in list(root.handlers):
        if getattr(handler, "_qpw_handler", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._qpw_handler = True
    root.addHandler(handler)
    root.propagate = False
    return root
