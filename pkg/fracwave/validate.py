"""Validators.

The ``*_string`` variants convert a command line string and are used as
argparse ``type`` callables; the others check values built in code.
"""

import math

import numpy as np

from fracwave.constants import ALPHA_RANGE, BETA_RANGE, CFL_RANGE, QUAD_TOL_RANGE
from fracwave.custom_types import FluxFn, FracParams, GridSpec, OperatorKind
from fracwave.exceptions import PreconditionError


def valid_alpha_string(value: str) -> float:
    """Validate an order string to a float.

    Parameters
    ----------
    value : str
        String representation of a number strictly between 0 and 1.

    Returns
    -------
    float
        The order ``alpha``.

    Raises
    ------
    ValueError
        If value is not a number or lies outside the open unit interval.
    """
    return valid_alpha(float(value))


def valid_alpha(value: float) -> float:
    """Validate and return an order ``alpha`` in the open interval (0, 1).

    Raises
    ------
    PreconditionError
        If value is outside the open range given by constants.ALPHA_RANGE.
    """
    low, high = ALPHA_RANGE['min'], ALPHA_RANGE['max']
    if not low < value < high:
        raise PreconditionError(f'alpha must lie strictly between {low} and {high}, got {value}.')
    return value


def valid_frac_params(params: FracParams) -> FracParams:
    """Validate operator parameters.

    Parameters
    ----------
    params : FracParams
        One-sided parameters need ``0 < alpha < 1``. Riesz-Feller parameters
        need ``1 < beta <= 2`` and ``|gamma| <= 2 - beta``.

    Returns
    -------
    FracParams
        The same parameters.

    Raises
    ------
    PreconditionError
        If the parameters leave the admissible set.
    """
    if params.kind is OperatorKind.ONE_SIDED:
        valid_alpha(params.alpha)
        return params
    low, high = BETA_RANGE['min'], BETA_RANGE['max']
    if not low < params.beta <= high:
        raise PreconditionError(f'beta must lie in ({low}, {high}], got {params.beta}.')
    if abs(params.gamma) > 2.0 - params.beta + 1e-14:
        raise PreconditionError(
            f'|gamma| must not exceed 2 - beta = {2.0 - params.beta}, got {params.gamma}.')
    return params


def valid_grid(grid: GridSpec, min_nodes: int = 2) -> GridSpec:
    """Validate a grid.

    Raises
    ------
    PreconditionError
        If the spacing is not positive and finite or the grid is too small.
    """
    if not (math.isfinite(grid.dx) and grid.dx > 0):
        raise PreconditionError(f'Grid spacing must be positive, got {grid.dx}.')
    if grid.n < min_nodes:
        raise PreconditionError(f'Grid needs at least {min_nodes} nodes, got {grid.n}.')
    return grid


def valid_cfl(value: float) -> float:
    """Validate and return a CFL number in (0, 1).

    Raises
    ------
    PreconditionError
        If value is outside constants.CFL_RANGE.
    """
    if not CFL_RANGE['min'] < value < CFL_RANGE['max']:
        raise PreconditionError(f'cfl must lie in (0, 1), got {value}.')
    return value


def valid_quad_tol_string(value: str) -> float:
    """Validate a quadrature tolerance string to a float."""
    return valid_quad_tol(float(value))


def valid_quad_tol(value: float) -> float:
    """Validate and return a quadrature tolerance.

    Raises
    ------
    PreconditionError
        If value is outside constants.QUAD_TOL_RANGE.
    """
    if not QUAD_TOL_RANGE['min'] < value < QUAD_TOL_RANGE['max']:
        raise PreconditionError(
            f"quad_tol must lie in ({QUAD_TOL_RANGE['min']}, {QUAD_TOL_RANGE['max']}), "
            f'got {value}.')
    return value


def valid_positive(value: float, name: str) -> float:
    """Validate and return a positive finite number.

    Raises
    ------
    PreconditionError
        If value is not positive and finite.
    """
    if not (math.isfinite(value) and value > 0):
        raise PreconditionError(f'{name} must be positive, got {value}.')
    return value


def valid_flux_derivative(flux: FluxFn, low: float, high: float) -> FluxFn:
    """Check ``f'`` against central differences of ``f`` on ``[low, high]``.

    Raises
    ------
    PreconditionError
        If ``f`` or ``f'`` is not finite on the interval, or the two disagree
        by more than 1e-6 relative.
    """
    u = np.linspace(low, high, 33)
    step = 1e-5 * np.maximum(1.0, np.abs(u))
    f_plus = np.asarray(flux.f(u + step), dtype=float)
    f_minus = np.asarray(flux.f(u - step), dtype=float)
    exact = np.broadcast_to(np.asarray(flux.f_prime(u), dtype=float), u.shape)
    if not (np.all(np.isfinite(f_plus)) and np.all(np.isfinite(f_minus))
            and np.all(np.isfinite(exact))):
        raise PreconditionError(f'Flux {flux.label!r} is not finite on [{low}, {high}].')
    central = (f_plus - f_minus) / (2.0 * step)
    scale = max(1.0, float(np.max(np.abs(exact))))
    if np.max(np.abs(central - exact)) > 1e-6 * scale:
        raise PreconditionError(f"Flux {flux.label!r}: f' does not match f on [{low}, {high}].")
    return flux


def valid_convex_flux(flux: FluxFn) -> FluxFn:
    """Reject fluxes not flagged convex.

    Raises
    ------
    PreconditionError
        If the flux is not convex.
    """
    if not flux.convex:
        raise PreconditionError(f'Flux {flux.label!r} must be convex.')
    return flux
