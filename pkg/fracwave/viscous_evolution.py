"""Viscous evolution ``u_t + f(u)_x = eps * A[u]`` and its invariant checks.

``A`` is the regularising operator of ``EvolutionConfig.params``: the
one-sided ``dx D^alpha`` or a Riesz-Feller operator. Two integrators are
provided.

Method of lines
    Conservative differencing of a local Lax-Friedrichs flux plus the discrete
    fractional operator, advanced by Heun's method (SSP Runge-Kutta 2). Under
    ``dt <= cfl / (max|f'| / dx + eps * S)``, where ``S`` bounds the discrete
    symbol, every Euler stage is a monotone convex combination, so the
    maximum principle and L1 contraction hold exactly on the grid.

Mild fixed point
    Picard iteration of the Duhamel formula
    ``u(t) = K(eps t) * u0 - int_0^t dK(eps (t - s)) * f(u(s)) ds``
    in Fourier space, with the semigroup applied exactly and ``f(u)`` taken
    linear in time on each step. Sub-intervals are short enough for the
    Picard map to contract by one half. On a truncated line the solution is
    split into a fixed smooth step joining the pads and a remainder that
    decays at both ends; the remainder lives on a doubled periodic window and
    the step enters as a forcing term.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import fft as sfft
from scipy.integrate import trapezoid
from scipy.special import ndtr

from fracwave import serialize
from fracwave.constants import (ALIAS_FACTOR, BACKGROUND_WIDTHS, ENTROPY_TOL_CONSTANT,
                                MIN_FFT_SIZE, PICARD_MAX_ITER, PICARD_TOL,
                                REPORT_SCHEMA_VERSION, STEP_SLACK)
from fracwave.custom_types import (ContractionReport, EntropyPair, EvolutionConfig, Field,
                                   FloatArray, FluxFn, MaxPrincipleReport, Scheme, Side,
                                   SpaceTimeBump, Trajectory)
from fracwave.exceptions import ConvergenceError, PreconditionError
from fracwave.fractional_ops import exact_symbol, fractional_operator, symbol_bound
from fracwave.log import get_logger
from fracwave.semigroup_kernel import derivative_l1_constant
from fracwave.validate import (valid_cfl, valid_flux_derivative, valid_frac_params, valid_grid,
                               valid_positive)

logger = get_logger(__name__)


def llf_flux(ul: FloatArray, ur: FloatArray, flux: FluxFn) -> FloatArray:
    """Local Lax-Friedrichs flux ``(f(l) + f(r)) / 2 - a (r - l) / 2``."""
    speed = np.maximum(np.abs(flux.f_prime(ul)), np.abs(flux.f_prime(ur)))
    return 0.5 * (flux.f(ul) + flux.f(ur)) - 0.5 * speed * (ur - ul)


def _value_range(*fields: Field) -> tuple[float, float]:
    low = min(float(np.min(f.values)) for f in fields)
    high = max(float(np.max(f.values)) for f in fields)
    for field in fields:
        if not field.grid.periodic:
            low = min(low, field.grid.left_pad, field.grid.right_pad)
            high = max(high, field.grid.left_pad, field.grid.right_pad)
    return low, high


def _speed_bound(flux: FluxFn, low: float, high: float) -> float:
    """``max |f'|`` on ``[low, high]``, the invariant interval of the data."""
    u = np.linspace(low, high, 257)
    return float(np.max(np.abs(np.broadcast_to(flux.f_prime(u), u.shape))))


def cfl_time_step(config: EvolutionConfig, *fields: Field) -> float:
    """Largest stable method-of-lines step for data ``fields``.

    ``cfl / (max|f'| / dx + eps * S)`` with ``S`` the bound of the discrete
    symbol; the speed is taken over the range of all ``fields``.
    """
    dx = config.grid.dx
    speed = _speed_bound(config.flux, *_value_range(*fields))
    rate = speed / dx
    if config.epsilon > 0:
        rate += config.epsilon * symbol_bound(config.params, dx)
    return config.cfl / rate if rate > 0 else math.inf


def _check_config(u0: Field, config: EvolutionConfig) -> None:
    valid_cfl(config.cfl)
    valid_frac_params(config.params)
    valid_grid(config.grid, 4)
    if not (math.isfinite(config.epsilon) and config.epsilon >= 0):
        raise PreconditionError(f'epsilon must be nonnegative, got {config.epsilon}.')
    if not config.t_end > u0.t:
        raise PreconditionError(f't_end {config.t_end} must exceed the initial time {u0.t}.')
    if u0.grid != config.grid:
        raise PreconditionError('Initial field does not live on the configured grid.')
    if u0.values.shape != (config.grid.n,) or not np.all(np.isfinite(u0.values)):
        raise PreconditionError('Initial values must be finite and match the grid size.')
    valid_flux_derivative(config.flux, *_value_range(u0))


def _output_targets(t0: float, config: EvolutionConfig) -> list[float]:
    inner = sorted({float(t) for t in config.output_times if t0 < t < config.t_end})
    return inner + [config.t_end]


def evolve(u0: Field, config: EvolutionConfig) -> Trajectory:
    """Solve the viscous problem from ``u0`` up to ``config.t_end``.

    Parameters
    ----------
    u0 : Field
        Initial data on ``config.grid``.
    config : EvolutionConfig
        Evolution settings.

    Returns
    -------
    Trajectory
        ``u0`` followed by the solution at each output time (every step when
        ``output_times`` is empty), ending at ``t_end``.

    Raises
    ------
    PreconditionError
        If the config is invalid or ``config.dt`` exceeds the stable step.
    ConvergenceError
        If the Picard iteration stops contracting or the solution blows up.
    """
    _check_config(u0, config)
    if config.scheme is Scheme.MILD_FIXED_POINT:
        return _evolve_mild(u0, config)
    return _evolve_lines(u0, config)


def _stable_step(u0: Field, config: EvolutionConfig) -> float:
    stable = cfl_time_step(config, u0)
    if config.dt is None:
        return min(stable, config.t_end - u0.t)
    valid_positive(config.dt, 'dt')
    if config.dt > stable * (1.0 + 1e-12):
        raise PreconditionError(
            f'dt={config.dt:.6g} violates the CFL condition; the stable step is {stable:.6g}.')
    return config.dt


def _evolve_lines(u0: Field, config: EvolutionConfig) -> Trajectory:
    grid, flux, eps = config.grid, config.flux, config.epsilon
    dt = _stable_step(u0, config)
    operator = fractional_operator(config.params, grid) if eps > 0 else None
    ghosts = np.array([grid.left_pad]), np.array([grid.right_pad])

    def rhs(values: FloatArray) -> FloatArray:
        if grid.periodic:
            faces = llf_flux(values, np.roll(values, -1), flux)
            out = -(faces - np.roll(faces, 1)) / grid.dx
        else:
            ext = np.concatenate((ghosts[0], values, ghosts[1]))
            faces = llf_flux(ext[:-1], ext[1:], flux)
            out = -np.diff(faces) / grid.dx
        if operator is not None:
            out += eps * operator.apply(values)
        return out

    logger.info('Method of lines: n=%d dt=%.3e eps=%g t_end=%g', grid.n, dt, eps, config.t_end)
    every_step = not config.output_times
    targets = _output_targets(u0.t, config)
    fields = [u0]
    values, t, steps = u0.values.copy(), u0.t, 0
    for target in targets:
        while t < target:
            remaining = target - t
            h = remaining if remaining <= dt * (1.0 + 1e-9) else dt
            stage = values + h * rhs(values)
            values = 0.5 * (values + stage + h * rhs(stage))
            t = target if h == remaining else t + h
            steps += 1
            if not np.all(np.isfinite(values)):
                raise ConvergenceError('Method of lines produced non-finite values.',
                                       {'t': t, 'steps': steps, 'dt': dt})
            if every_step or t == target:
                fields.append(Field(t, values.copy(), grid))
    logger.info('Method of lines finished after %d steps', steps)
    return tuple(fields)


def _picard_interval(u_start: FloatArray, steps: int, h: float, lam, xi: FloatArray,
                     nonlinear: Callable[[FloatArray], FloatArray], source_hat,
                     t_start: float) -> list[FloatArray]:
    """Fixed point of the discrete Duhamel map on ``steps`` steps of size ``h``.

    ``nonlinear`` is the flux term under the derivative and ``source_hat`` the
    transform of a forcing constant in time.
    """
    size = u_start.size
    decay = np.exp(lam * h)
    small = np.abs(lam * h) < 1e-8
    weight = np.where(small, h * (1.0 + 0.5 * lam * h),
                      np.expm1(lam * h) / np.where(small, 1.0, lam))
    drive = -1j * xi * weight * 0.5
    forcing = weight * source_hat
    start_hat = sfft.rfft(u_start)
    states = [u_start] * steps
    previous = math.inf
    for iteration in range(1, PICARD_MAX_ITER + 1):
        flux_hats = [sfft.rfft(nonlinear(u_start))] + [sfft.rfft(nonlinear(s)) for s in states]
        current = start_hat
        new_states = []
        for j in range(steps):
            current = decay * current + drive * (flux_hats[j] + flux_hats[j + 1]) + forcing
            new_states.append(sfft.irfft(current, size))
        increment = max(float(np.max(np.abs(a - b))) for a, b in zip(new_states, states))
        states = new_states
        logger.debug('Picard t=%.4g iteration %d increment %.3e', t_start, iteration, increment)
        if increment < PICARD_TOL:
            return states
        if increment > previous:
            raise ConvergenceError('Picard iteration is not contracting.',
                                   {'t': t_start, 'iteration': iteration,
                                    'increment': increment, 'previous_increment': previous})
        previous = increment
    raise ConvergenceError('Picard iteration did not reach the tolerance.',
                           {'t': t_start, 'iteration': PICARD_MAX_ITER, 'increment': previous})


def contraction_interval(config: EvolutionConfig, lipschitz: float) -> float:
    """Sub-interval on which the Picard map contracts by one half.

    With ``||dK(s)||_1 = C s^(-1/beta)`` the Duhamel term has Lipschitz
    constant ``L C eps^(-1/beta) tau^(1 - 1/beta) / (1 - 1/beta)``.
    """
    if lipschitz <= 0:
        return math.inf
    beta = config.params.beta
    constant = derivative_l1_constant(config.params)
    ratio = 0.5 * (1.0 - 1.0 / beta) * config.epsilon ** (1.0 / beta) / (lipschitz * constant)
    return ratio ** (beta / (beta - 1.0))


def _gaussian(x: FloatArray, center: float, width: float) -> FloatArray:
    return np.exp(-0.5 * ((x - center) / width) ** 2) / (width * math.sqrt(2.0 * math.pi))


def background_step(u0: Field, config: EvolutionConfig,
                    size: int) -> tuple[FloatArray, FloatArray]:
    """Smooth step joining the pads of a truncated line, and the forcing it induces.

    The doubled window of ``size`` nodes holds the grid nodes, then nodes to
    the right of ``x_end``, then nodes to the left of ``x0``. The step
    ``B = pad_right + (pad_left - pad_right) * Phi((c - x) / w)`` is centred
    where it carries the same mass as ``u0`` and is ``BACKGROUND_WIDTHS``
    widths away from both edges. The forcing ``eps A[B] - f(B)_x`` uses the
    whole-line image of the operator, evaluated on a periodic window
    ``ALIAS_FACTOR`` times longer.

    Returns
    -------
    tuple[FloatArray, FloatArray]
        ``B`` and the forcing on the doubled window.

    Raises
    ------
    PreconditionError
        If the data do not settle to their pads far enough from the edges.
    """
    grid, flux = config.grid, config.flux
    n, dx = grid.n, grid.dx
    jump = grid.left_pad - grid.right_pad
    if jump == 0.0:
        return np.full(size, grid.right_pad), np.zeros(size)
    half = (size - n) // 2
    offsets = np.concatenate((np.arange(n + half), np.arange(n + half - size, 0)))
    x = grid.x0 + dx * offsets
    center = grid.x0 + dx * float(np.sum(u0.values - grid.right_pad)) / jump
    width = min(center - grid.x0, grid.x_end - center) / BACKGROUND_WIDTHS
    if not width >= 2.0 * dx:
        raise PreconditionError(
            'The mild scheme needs data that settle to their pads inside the window; '
            f'the background step sits at x={center:.4g} in [{grid.x0:.4g}, {grid.x_end:.4g}].')
    background = grid.right_pad + jump * ndtr((center - x) / width)
    slope = -jump * _gaussian(x, center, width)

    long = sfft.next_fast_len(max(ALIAS_FACTOR * size, MIN_FFT_SIZE), real=True)
    start = (long - n) // 2
    xi = 2.0 * math.pi * sfft.rfftfreq(long, d=dx)
    multiplier = np.zeros(xi.size, dtype=complex)
    multiplier[1:] = exact_symbol(xi[1:], config.params) / (1j * xi[1:])
    long_slope = -jump * _gaussian(grid.x0 + dx * (np.arange(long) - start), center, width)
    image = sfft.irfft(multiplier * sfft.rfft(long_slope), long)[start + offsets]
    forcing = config.epsilon * image - np.broadcast_to(flux.f_prime(background), x.shape) * slope
    logger.debug('Background step at x=%.4g, width %.3g', center, width)
    return background, forcing


def _evolve_mild(u0: Field, config: EvolutionConfig, speed: float | None = None) -> Trajectory:
    grid, flux, eps = config.grid, config.flux, config.epsilon
    if eps <= 0:
        raise PreconditionError('The mild scheme needs epsilon > 0.')
    n = grid.n
    if grid.periodic:
        size = n
        background, source = np.zeros(size), np.zeros(size)
    else:
        size = sfft.next_fast_len(2 * n, real=True)
        background, source = background_step(u0, config, size)
    flux_background = np.broadcast_to(flux.f(background), (size,))

    def nonlinear(w: FloatArray) -> FloatArray:
        return flux.f(background + w) - flux_background

    values = np.zeros(size)
    values[:n] = u0.values - background[:n]
    source_hat = sfft.rfft(source)
    xi = 2.0 * math.pi * sfft.rfftfreq(size, d=grid.dx)
    lam = eps * exact_symbol(xi, config.params)
    if speed is None:
        speed = _speed_bound(flux, *_value_range(u0))
    h = config.dt or (config.cfl * grid.dx / speed if speed > 0 else config.t_end - u0.t)
    tau = contraction_interval(config, speed)
    h = min(h, tau)
    logger.info('Mild scheme: n=%d h=%.3e sub-interval %.3e eps=%g', n, h, tau, eps)

    def field(t: float, state: FloatArray) -> Field:
        return Field(t, background[:n] + state[:n], grid)

    every_step = not config.output_times
    fields = [u0]
    t = u0.t
    for target in _output_targets(u0.t, config):
        while t < target:
            span = min(tau, target - t)
            steps = max(1, math.ceil(span / h - 1e-9))
            states = _picard_interval(values, steps, span / steps, lam, xi, nonlinear,
                                      source_hat, t)
            if every_step:
                fields.extend(field(t + (j + 1) * span / steps, s)
                              for j, s in enumerate(states[:-1]))
            t = target if span >= target - t else t + span
            values = states[-1]
            if every_step or t == target:
                fields.append(field(t, values))
    return tuple(fields)


def max_principle_report(trajectory: Trajectory) -> MaxPrincipleReport:
    """Sup norms along a trajectory, pads included.

    ``monotone`` holds when no step raises the sup norm by more than 1e-8.

    Raises
    ------
    PreconditionError
        If the trajectory is empty.
    """
    if not trajectory:
        raise PreconditionError('Trajectory is empty.')
    times = np.array([f.t for f in trajectory])
    sups = np.array([sup_norm(f) for f in trajectory])
    monotone = bool(np.all(np.diff(sups) <= STEP_SLACK))
    logger.info('Max principle: sup %.6g -> %.6g, monotone=%s', sups[0], sups[-1], monotone)
    return MaxPrincipleReport(times, sups, monotone)


def sup_norm(field: Field) -> float:
    """``||u||_inf`` of the extended field."""
    sup = float(np.max(np.abs(field.values)))
    if not field.grid.periodic:
        sup = max(sup, abs(field.grid.left_pad), abs(field.grid.right_pad))
    return sup


def bv_seminorm(field: Field) -> float:
    """Total variation of the extended field (wrap-around on periodic grids)."""
    values = field.values
    if field.grid.periodic:
        values = np.append(values, values[0])
    else:
        values = np.concatenate(([field.grid.left_pad], values, [field.grid.right_pad]))
    return float(np.sum(np.abs(np.diff(values))))


def _same_grid(u: Field, v: Field) -> None:
    if u.grid != v.grid:
        raise PreconditionError('Fields live on different grids or carry different pads; '
                                'their distance is not summable.')


def l1_distance(u: Field, v: Field) -> float:
    """``dx * sum |u - v|``."""
    _same_grid(u, v)
    return float(u.grid.dx * np.sum(np.abs(u.values - v.values)))


def windowed_l1_distance(u: Field, v: Field, window: tuple[float, float]) -> float:
    """L1 distance restricted to nodes in ``[window[0], window[1]]``."""
    _same_grid(u, v)
    x = u.grid.x
    mask = (x >= window[0]) & (x <= window[1])
    return float(u.grid.dx * np.sum(np.abs(u.values[mask] - v.values[mask])))


def l1_contraction_report(u0: Field, v0: Field, config: EvolutionConfig) -> ContractionReport:
    """Evolve ``u0`` and ``v0`` with one config and track their L1 distance.

    Both runs take their steps from the joint data range, so they store the
    same times, and run concurrently. ``contractive`` holds when no step
    increases the distance by more than ``1e-8 + 10 dx dt``.

    Raises
    ------
    PreconditionError
        If the two initial data do not share grid and pads.
    ConvergenceError
        If either run fails, or the runs store different times.
    """
    _same_grid(u0, v0)
    if u0.t != v0.t:
        raise PreconditionError('Initial data must share the initial time.')
    _check_config(u0, config)
    _check_config(v0, config)
    run: Callable[[Field], Trajectory]
    if config.scheme is Scheme.MILD_FIXED_POINT:
        speed = _speed_bound(config.flux, *_value_range(u0, v0))
        run = partial(_evolve_mild, config=config, speed=speed)
    else:
        if config.dt is None:
            config = config._replace(dt=min(cfl_time_step(config, u0, v0), config.t_end - u0.t))
        run = partial(_evolve_lines, config=config)
    with ThreadPoolExecutor(max_workers=2) as pool:
        u_run, v_run = pool.submit(run, u0), pool.submit(run, v0)
        u_traj, v_traj = u_run.result(), v_run.result()
    if [f.t for f in u_traj] != [f.t for f in v_traj]:
        raise ConvergenceError('The two runs stored different times.',
                               {'u_fields': len(u_traj), 'v_fields': len(v_traj)})
    times = np.array([f.t for f in u_traj])
    distances = np.array([l1_distance(u, v) for u, v in zip(u_traj, v_traj)])
    slack = STEP_SLACK + 10.0 * config.grid.dx * np.diff(times)
    contractive = bool(np.all(np.diff(distances) <= slack))
    bv = np.array([bv_seminorm(f) for f in u_traj])
    logger.info('L1 contraction: %.6g -> %.6g, contractive=%s',
                distances[0], distances[-1], contractive)
    return ContractionReport(times, distances, contractive, bv)


def _bump_1d(s: FloatArray) -> tuple[FloatArray, FloatArray]:
    """``b(s) = exp(-1 / (1 - s^2))`` and ``b'(s)`` on ``|s| < 1``, zero outside."""
    inside = np.abs(s) < 1.0
    b = np.zeros_like(s)
    db = np.zeros_like(s)
    r = 1.0 - s[inside] ** 2
    b[inside] = np.exp(-1.0 / r)
    db[inside] = b[inside] * (-2.0 * s[inside] / r ** 2)
    return b, db


def bump_values(test_fn: SpaceTimeBump, t: float,
                x: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
    """``phi``, ``phi_t`` and ``phi_x`` of the bump at time ``t``."""
    bt, dbt = _bump_1d(np.array([(t - test_fn.t_center) / test_fn.t_half]))
    bx, dbx = _bump_1d((x - test_fn.x_center) / test_fn.x_half)
    return bt[0] * bx, dbt[0] / test_fn.t_half * bx, bt[0] * dbx / test_fn.x_half


def _check_support(trajectory: Trajectory, test_fn: SpaceTimeBump) -> None:
    if not trajectory:
        raise PreconditionError('Trajectory is empty.')
    valid_positive(test_fn.t_half, 't_half')
    valid_positive(test_fn.x_half, 'x_half')
    grid = trajectory[0].grid
    t_first, t_last = trajectory[0].t, trajectory[-1].t
    if test_fn.t_center - test_fn.t_half < t_first or test_fn.t_center + test_fn.t_half > t_last:
        raise PreconditionError(
            f'Test function time support must lie inside [{t_first}, {t_last}].')
    if (test_fn.x_center - test_fn.x_half < grid.x0 + grid.dx
            or test_fn.x_center + test_fn.x_half > grid.x_end - grid.dx):
        raise PreconditionError(
            f'Test function space support touches the window [{grid.x0}, {grid.x_end}].')


def _entropy_integrals(trajectory: Trajectory, pair: EntropyPair, test_fn: SpaceTimeBump,
                       config: EvolutionConfig) -> tuple[float, float]:
    """Space-time integral of the entropy form and of its absolute integrand."""
    _check_support(trajectory, test_fn)
    grid = trajectory[0].grid
    phi_grid = grid._replace(left_pad=0.0, right_pad=0.0)
    operator = fractional_operator(config.params, phi_grid) if config.epsilon > 0 else None
    x, dx = grid.x, grid.dx
    signed, absolute = [], []
    for field in trajectory:
        phi, phi_t, phi_x = bump_values(test_fn, field.t, x)
        eta, q = pair.eta(field.values), pair.q(field.values)
        local = eta * phi_t + q * phi_x
        total, magnitude = dx * np.sum(local), dx * np.sum(np.abs(local))
        if operator is not None and np.any(phi):
            # the transpose of c_l L + c_r R is c_l R + c_r L
            right, left = operator.apply(phi, side=Side.RIGHT), operator.apply(phi, side=Side.LEFT)
            adjoint = operator.c_left * right + operator.c_right * left
            nonlocal_ = dx * np.sum(eta * adjoint)
            if not grid.periodic:
                nonlocal_ -= dx * (pair.eta(grid.left_pad) * operator.c_left * np.sum(right)
                                   + pair.eta(grid.right_pad) * operator.c_right * np.sum(left))
            total += config.epsilon * nonlocal_
            magnitude += config.epsilon * dx * np.sum(np.abs(eta * adjoint))
        signed.append(total)
        absolute.append(magnitude)
    times = np.array([f.t for f in trajectory])
    return float(trapezoid(signed, times)), float(trapezoid(absolute, times))


def entropy_residual(trajectory: Trajectory, pair: EntropyPair, test_fn: SpaceTimeBump,
                     config: EvolutionConfig) -> float:
    """Discrete entropy form ``int int eta phi_t + q phi_x + eps eta A*[phi]``.

    Nonnegative for entropy solutions up to consistency error. On a
    truncated line the mass of ``A*[phi]`` outside the window is closed with
    the entropy of the pads.

    Parameters
    ----------
    trajectory : Trajectory
        Fields sampled densely in time (the trapezoid rule is used).
    pair : EntropyPair
        Kruzhkov entropy pair.
    test_fn : SpaceTimeBump
        Nonnegative test function supported strictly inside the window.
    config : EvolutionConfig
        Supplies epsilon and the operator.

    Raises
    ------
    PreconditionError
        If the support of the test function touches the window boundary.
    """
    residual, _ = _entropy_integrals(trajectory, pair, test_fn, config)
    logger.info('Entropy residual k=%g: %.6e', pair.k, residual)
    return residual


def entropy_tolerance(trajectory: Trajectory, pair: EntropyPair, test_fn: SpaceTimeBump,
                      config: EvolutionConfig) -> float:
    """``C (dx + dt) * scale`` with ``scale`` the integral of the absolute integrand."""
    _, scale = _entropy_integrals(trajectory, pair, test_fn, config)
    times = np.array([f.t for f in trajectory])
    dt = float(np.max(np.diff(times))) if times.size > 1 else 0.0
    return ENTROPY_TOL_CONSTANT * (trajectory[0].grid.dx + dt) * scale


def export_trajectory(trajectory: Trajectory, config: EvolutionConfig, out_dir: Path,
                      name: str = 'trajectory') -> tuple[Path, Path]:
    """Write ``<name>.csv`` (t, x, u) and a ``<name>.json`` manifest.

    The manifest records the config, sup norms, BV seminorms and the
    maximum principle flag.
    """
    csv_path = serialize.write_trajectory_csv(serialize.safe_path(out_dir, f'{name}.csv'),
                                              trajectory)
    report = max_principle_report(trajectory)
    payload = {'schema_version': REPORT_SCHEMA_VERSION,
               'config': serialize.evolution_payload(config),
               'csv': csv_path.name,
               'times': report.times,
               'sup_norms': report.sup_norms,
               'bv_seminorms': [bv_seminorm(f) for f in trajectory],
               'max_principle': report.monotone}
    json_path = serialize.write_json(serialize.safe_path(out_dir, f'{name}.json'), payload)
    return csv_path, json_path
