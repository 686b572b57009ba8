"""Logging helpers.

Library modules obtain their logger with :func:`get_logger` and never attach
handlers themselves. The command-line front end calls :func:`configure` once.
"""

import logging
import sys

ROOT_LOGGER_NAME = 'fracwave'


def get_logger(name: str) -> logging.Logger:
    """Return the ``fracwave.<name>`` logger; module ``__name__`` values pass through."""
    if name == ROOT_LOGGER_NAME or name.startswith(f'{ROOT_LOGGER_NAME}.'):
        return logging.getLogger(name)
    return logging.getLogger(f'{ROOT_LOGGER_NAME}.{name}')


def configure(verbosity: int = 0) -> None:
    """Attach a single stream handler to the package root logger.

    Parameters
    ----------
    verbosity : int
        0 logs warnings, 1 adds progress (INFO), 2 or more adds solver detail.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(level)
    for handler in root.handlers:
        if getattr(handler, '_fracwave', False):
            handler.setStream(sys.stderr)  # type: ignore[attr-defined]
            return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    handler._fracwave = True  # type: ignore[attr-defined]
    root.addHandler(handler)
