"""Entropy solutions of ``u_t + f(u)_x = 0`` for convex ``f``.

The Godunov scheme is the reference for vanishing-viscosity studies. Its
flux is the exact Riemann flux at each face: for a convex flux this is the
minimum of ``f`` over ``[ul, ur]`` when ``ul <= ur`` and the maximum of
``f(ul), f(ur)`` otherwise. Forward Euler under ``dt max|f'| <= cfl dx`` makes
the scheme monotone, hence entropy satisfying and L1 contractive.

Exact Riemann solutions use the left-closed convention on the shock line.
"""

import math

import numpy as np

from fracwave.custom_types import (ContractionReport, Field, FloatArray, FluxFn, GridSpec,
                                   RiemannData, Trajectory)
from fracwave.exceptions import PreconditionError
from fracwave.log import get_logger
from fracwave.validate import valid_cfl, valid_convex_flux, valid_grid
from fracwave.viscous_evolution import bv_seminorm

logger = get_logger(__name__)


def godunov_flux(ul: FloatArray, ur: FloatArray, flux: FluxFn) -> FloatArray:
    """Godunov numerical flux for a convex flux.

    Without a sonic point the flux is taken monotone on the data range.
    """
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    f_left, f_right = flux.f(ul), flux.f(ur)
    if flux.sonic_point is None:
        rising = np.minimum(f_left, f_right)
    else:
        rising = flux.f(np.clip(flux.sonic_point, np.minimum(ul, ur), np.maximum(ul, ur)))
    return np.where(ul <= ur, rising, np.maximum(f_left, f_right))


def _faces(values: FloatArray, grid: GridSpec, flux: FluxFn) -> FloatArray:
    if grid.periodic:
        faces = godunov_flux(values, np.roll(values, -1), flux)
        return faces - np.roll(faces, 1)
    ext = np.concatenate(([grid.left_pad], values, [grid.right_pad]))
    return np.diff(godunov_flux(ext[:-1], ext[1:], flux))


def godunov_time_step(flux: FluxFn, cfl: float, *fields: Field) -> float:
    """``cfl dx / max|f'|`` over the joint range of ``fields``, pads included."""
    low = min(float(np.min(f.values)) for f in fields)
    high = max(float(np.max(f.values)) for f in fields)
    grid = fields[0].grid
    if not grid.periodic:
        low, high = min(low, grid.left_pad, grid.right_pad), max(high, grid.left_pad,
                                                                 grid.right_pad)
    samples = np.linspace(low, high, 257)
    speed = float(np.max(np.abs(np.broadcast_to(flux.f_prime(samples), samples.shape))))
    return cfl * grid.dx / speed if speed > 0 else math.inf


def godunov_evolve(u0: Field, flux: FluxFn, t_end: float, cfl: float,
                   output_times: tuple[float, ...] = (), dt: float | None = None) -> Trajectory:
    """First-order Godunov scheme up to ``t_end``.

    Parameters
    ----------
    u0 : Field
        Initial data.
    flux : FluxFn
        Convex flux.
    t_end : float
        Final time, larger than ``u0.t``.
    cfl : float
        Courant number in (0, 1).
    output_times : tuple[float, ...]
        Times to record; every step is recorded when empty.
    dt : float, optional
        Time step; defaults to :func:`godunov_time_step` of ``u0``.

    Returns
    -------
    Trajectory
        ``u0`` followed by the recorded fields, ending at ``t_end``.

    Raises
    ------
    PreconditionError
        If the flux is not convex or the times or cfl are out of range.
    """
    valid_convex_flux(flux)
    valid_cfl(cfl)
    grid = valid_grid(u0.grid, 2)
    if not t_end > u0.t:
        raise PreconditionError(f't_end {t_end} must exceed the initial time {u0.t}.')
    if dt is None:
        dt = min(godunov_time_step(flux, cfl, u0), t_end - u0.t)
    logger.info('Godunov: n=%d dx=%.3e dt=%.3e t_end=%g', grid.n, grid.dx, dt, t_end)

    every_step = not output_times
    targets = sorted({float(t) for t in output_times if u0.t < t < t_end}) + [t_end]
    fields = [u0]
    values, t = u0.values.copy(), u0.t
    for target in targets:
        while t < target:
            remaining = target - t
            h = remaining if remaining <= dt * (1.0 + 1e-9) else dt
            values = values - h / grid.dx * _faces(values, grid, flux)
            t = target if h == remaining else t + h
            if every_step or t == target:
                fields.append(Field(t, values.copy(), grid))
    return tuple(fields)


def shock_speed(data: RiemannData, flux: FluxFn) -> float:
    """Rankine-Hugoniot speed ``(f(ur) - f(ul)) / (ur - ul)``."""
    if data.u_left == data.u_right:
        raise PreconditionError('Riemann data need u_left != u_right.')
    return float((flux.f(data.u_right) - flux.f(data.u_left)) / (data.u_right - data.u_left))


def exact_riemann(data: RiemannData, flux: FluxFn, t: float, x):
    """Entropy solution of a Riemann problem at ``(t, x)``.

    Parameters
    ----------
    data : RiemannData
        States and jump location.
    flux : FluxFn
        Convex flux; rarefactions need ``f_prime_inv``.
    t : float
        Time, nonnegative.
    x : float or array_like
        Positions.

    Returns
    -------
    float or ndarray
        ``u_left`` on the shock line and left of it for shocks, the fan
        ``(f')^-1((x - x_jump) / t)`` for rarefactions.

    Raises
    ------
    PreconditionError
        If t < 0, the flux is not convex, or a rarefaction lacks ``f_prime_inv``.
    """
    valid_convex_flux(flux)
    if t < 0:
        raise PreconditionError(f't must be nonnegative, got {t}.')
    ul, ur, x_jump = data
    x_arr = np.asarray(x, dtype=float)
    if ul > ur or t == 0:
        front = x_jump + (shock_speed(data, flux) * t if t > 0 else 0.0)
        out = np.where(x_arr <= front, ul, ur)
    else:
        if flux.f_prime_inv is None:
            raise PreconditionError(f'Flux {flux.label!r} has no inverse derivative for fans.')
        shock_speed(data, flux)
        s = (x_arr - x_jump) / t
        low, high = float(flux.f_prime(ul)), float(flux.f_prime(ur))
        fan = np.asarray(flux.f_prime_inv(np.clip(s, low, high)), dtype=float)
        out = np.where(s <= low, ul, np.where(s >= high, ur, fan))
    out = out.astype(float)
    return out[()] if out.ndim == 0 else out


def exact_riemann_cells(data: RiemannData, flux: FluxFn, grid: GridSpec, t: float,
                        samples: int = 16) -> FloatArray:
    """Cell averages of the exact solution over ``[x_i - dx/2, x_i + dx/2]``."""
    offsets = (np.arange(samples) + 0.5) / samples - 0.5
    points = grid.x[:, None] + grid.dx * offsets[None, :]
    return np.asarray(exact_riemann(data, flux, t, points)).mean(axis=1)


def riemann_field(data: RiemannData, flux: FluxFn, grid: GridSpec, t: float = 0.0) -> Field:
    """Cell averages of the exact solution at ``t``, pads set to the two states."""
    grid = grid._replace(left_pad=data.u_left, right_pad=data.u_right)
    return Field(t, exact_riemann_cells(data, flux, grid, t), grid)


def refine_grid(grid: GridSpec, factor: int) -> GridSpec:
    """Grid whose cells split each cell of ``grid`` into ``factor`` equal parts."""
    if factor < 1:
        raise PreconditionError(f'Refinement factor must be at least 1, got {factor}.')
    dx = grid.dx / factor
    return grid._replace(x0=grid.x0 - 0.5 * grid.dx + 0.5 * dx, dx=dx, n=grid.n * factor)


def prolong(coarse: Field, factor: int) -> Field:
    """Piecewise constant prolongation onto :func:`refine_grid`."""
    return Field(coarse.t, np.repeat(coarse.values, factor), refine_grid(coarse.grid, factor))


def restrict(fine: Field, coarse_grid: GridSpec) -> Field:
    """Conservative restriction: average the fine cells inside each coarse cell.

    Raises
    ------
    PreconditionError
        If the fine grid is not a refinement of ``coarse_grid``.
    """
    factor = fine.grid.n // coarse_grid.n
    expected = refine_grid(coarse_grid, max(factor, 1))
    aligned = (fine.grid.n == expected.n
               and math.isclose(fine.grid.dx, expected.dx, rel_tol=1e-12)
               and math.isclose(fine.grid.x0, expected.x0, abs_tol=1e-9 * coarse_grid.dx))
    if not aligned:
        raise PreconditionError('Fine grid is not a refinement of the coarse grid.')
    return Field(fine.t, fine.values.reshape(coarse_grid.n, factor).mean(axis=1), coarse_grid)


def l1_order(dxs, errors) -> float:
    """Least squares slope of ``log(error)`` against ``log(dx)``."""
    dxs, errors = np.asarray(dxs, dtype=float), np.asarray(errors, dtype=float)
    if dxs.size < 2 or np.any(errors <= 0):
        raise PreconditionError('An order fit needs at least two positive errors.')
    return float(np.polyfit(np.log(dxs), np.log(errors), 1)[0])


def godunov_convergence(data: RiemannData, flux: FluxFn, grid: GridSpec, t: float,
                        cfl: float = 0.9, levels: int = 3) -> tuple[FloatArray, FloatArray, float]:
    """L1 errors of Godunov against the exact Riemann solution under refinement.

    Returns
    -------
    tuple[FloatArray, FloatArray, float]
        Grid spacings, errors and the fitted order.
    """
    dxs, errors = [], []
    for level in range(levels):
        fine = refine_grid(grid, 2 ** level)
        final = godunov_evolve(riemann_field(data, flux, fine), flux, t, cfl, (t,))[-1]
        exact = exact_riemann_cells(data, flux, final.grid, t)
        dxs.append(fine.dx)
        errors.append(fine.dx * float(np.sum(np.abs(final.values - exact))))
    order = l1_order(dxs, errors)
    logger.info('Godunov L1 order %.3f from errors %s', order, errors)
    return np.array(dxs), np.array(errors), order


def godunov_contraction(u0: Field, v0: Field, flux: FluxFn, t_end: float,
                        cfl: float) -> ContractionReport:
    """L1 distance of two Godunov trajectories sharing one time step.

    Raises
    ------
    PreconditionError
        If the two data do not share grid and pads.
    """
    if u0.grid != v0.grid:
        raise PreconditionError('Fields live on different grids or carry different pads.')
    dt = godunov_time_step(flux, cfl, u0, v0)
    u_traj = godunov_evolve(u0, flux, t_end, cfl, dt=dt)
    v_traj = godunov_evolve(v0, flux, t_end, cfl, dt=dt)
    times = np.array([f.t for f in u_traj])
    distances = np.array([u0.grid.dx * np.sum(np.abs(u.values - v.values))
                          for u, v in zip(u_traj, v_traj)])
    contractive = bool(np.all(np.diff(distances) <= 1e-12 * (1.0 + distances[:-1])))
    bv = np.array([bv_seminorm(f) for f in u_traj])
    logger.info('Godunov L1 contraction: %.6g -> %.6g, contractive=%s',
                distances[0], distances[-1], contractive)
    return ContractionReport(times, distances, contractive, bv)
