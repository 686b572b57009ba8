"""Shared test fixtures."""

import logging

import pytest

from fracwave.log import ROOT_LOGGER_NAME


@pytest.fixture(autouse=True)
def _reset_fracwave_logging():
    """Detach the CLI log handler after each test so it never holds a closed captured stream."""
    yield
    root = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in list(root.handlers):
        if getattr(handler, '_fracwave', False):
            root.removeHandler(handler)
