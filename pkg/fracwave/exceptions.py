"""Exceptions raised by fracwave."""

from typing import Any, Mapping


class PreconditionError(ValueError):
    """An input violates the precondition of an operation."""


class ConfigError(ValueError):
    """A configuration file or flag cannot be used."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed.

    Parameters
    ----------
    message : str
        Human readable description.
    diagnostics : Mapping[str, Any], optional
        Solver state at failure (last residual, iteration count, ...).
    """

    def __init__(self, message: str, diagnostics: Mapping[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics: dict[str, Any] = dict(diagnostics or {})
