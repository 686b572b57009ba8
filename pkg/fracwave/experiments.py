"""Vanishing-viscosity study and the reproduction manifest.

A viscosity sweep evolves the same initial data for a decreasing list of
``eps`` and measures the L1 distance to the entropy solution at ``t_eval``.
The theoretical bound is ``C (eps t)^(1/(alpha+1)) |u0|_BV``; the fitted slope
of ``log error`` against ``log eps`` is compared with ``1/(alpha+1)``.

The entropy reference is the exact Riemann solution for a pure step, and
otherwise Godunov on a grid ``refine`` times finer, restricted conservatively
to the grid of each point. Each ``eps`` runs on the sweep grid thinned by the
largest power of two that still resolves its own layer, so only the smallest
viscosity pays for the finest grid. Sweep points run concurrently; results
are gathered in the order of ``epsilons``.

:func:`run_manifest` runs named checks from a config file and writes a
JSON report next to the CSV series each check produces.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, NamedTuple

import numpy as np

from fracwave import config as cfg
from fracwave import serialize
from fracwave.constants import (DEFAULTS, RATE_TOLERANCE, REPORT_SCHEMA_VERSION,
                                SWEEP_CELLS_PER_LAYER, SWEEP_MIN_CELLS, THREADS_ENV)
from fracwave.custom_types import (CheckResult, EntropyPair, EvolutionConfig, ExperimentReport,
                                   Field, FloatArray, FracParams, GridSpec, RateReport,
                                   ReferenceKind, RiemannData, SweepConfig,
                                   TimeScalingReport, U0Kind, U0Spec, WindowedConvergence)
from fracwave.entropy_reference import (exact_riemann_cells, godunov_evolve, refine_grid,
                                        restrict)
from fracwave.exceptions import ConfigError, ConvergenceError, PreconditionError
from fracwave.fractional_ops import discrete_symbol, exact_symbol
from fracwave.log import get_logger
from fracwave.semigroup_kernel import (build_kernel_profile, export_profile_csv,
                                       fitted_tail_exponent, profile_mass, semigroup_defect)
from fracwave.traveling_wave import (export_profile_csv as export_tw_csv, left_rate,
                                     mittag_leffler_quadrature, mittag_leffler_v,
                                     mittag_leffler_v_prime,
                                     sandwich_bound_report, solve_profile, tail_exponents,
                                     write_fit_report)
from fracwave.validate import valid_positive
from fracwave.viscous_evolution import (bv_seminorm, entropy_residual, entropy_tolerance, evolve,
                                        export_trajectory, l1_contraction_report, l1_distance,
                                        max_principle_report, windowed_l1_distance)

logger = get_logger(__name__)

# Errors below this multiple of the reference self-convergence error are flagged.
FLOOR_FACTOR = 5.0
# Allowed excess of the measured error ratio over the time-scaling bound.
TIME_RATIO_SLACK = 0.3


def worker_count() -> int:
    """Worker threads: ``FRACWAVE_THREADS`` if set, else the number of cores.

    Raises
    ------
    ConfigError
        If the variable is set to anything but a positive integer.
    """
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or DEFAULTS.threads
    try:
        count = int(value)
    except ValueError as exc:
        raise ConfigError(f'{THREADS_ENV} must be a positive integer, got {value!r}.') from exc
    if count < 1:
        raise ConfigError(f'{THREADS_ENV} must be a positive integer, got {value!r}.')
    return count


def initial_field(spec: U0Spec, grid: GridSpec) -> Field:
    """Sample ``spec`` on ``grid``; truncated lines get the far-field pads.

    A smoothed step of zero width is a pure step, sampled as exact cell
    averages. Bumps are ``amp * exp(1 - 1 / (1 - s^2))`` with
    ``s = (x - center) / width``.

    Raises
    ------
    PreconditionError
        If a bump has no width or custom values do not fit the grid.
    """
    x = grid.x
    if spec.kind is U0Kind.SMOOTHED_STEP:
        pads = (spec.u_left, spec.u_right)
        if spec.width > 0:
            values = spec.u_right + 0.5 * (spec.u_left - spec.u_right) * (
                1.0 - np.tanh((x - spec.center) / spec.width))
        else:
            left_share = np.clip((spec.center - (x - 0.5 * grid.dx)) / grid.dx, 0.0, 1.0)
            values = spec.u_right + (spec.u_left - spec.u_right) * left_share
    elif spec.kind is U0Kind.BUMP:
        valid_positive(spec.width, 'bump width')
        pads = (0.0, 0.0)
        s = (x - spec.center) / spec.width
        inside = np.abs(s) < 1.0
        values = np.zeros_like(x)
        values[inside] = spec.amp * np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    else:
        if len(spec.values) != grid.n:
            raise PreconditionError(f'Custom data hold {len(spec.values)} values for '
                                    f'{grid.n} nodes.')
        pads = (spec.u_left, spec.u_right)
        values = np.array(spec.values, dtype=float)
    if not grid.periodic:
        grid = grid._replace(left_pad=pads[0], right_pad=pads[1])
    return Field(0.0, values, grid)


def _sweep_alpha(params: FracParams) -> float:
    return params.beta - 1.0


def layer_dx(config: SweepConfig, epsilon: float) -> float:
    """Largest spacing resolving the layer of ``epsilon``, ``eps^(1/alpha) / 8``."""
    return epsilon ** (1.0 / _sweep_alpha(config.base.params)) / SWEEP_CELLS_PER_LAYER


def required_dx(config: SweepConfig) -> float:
    """Largest sweep spacing: the layer spacing of the smallest ``eps``."""
    return layer_dx(config, min(config.epsilons))


def point_grid(config: SweepConfig, epsilon: float) -> GridSpec:
    """Sweep grid thinned to every ``2^k``-th node while ``epsilon`` stays resolved.

    The window ends are kept, so ``2^k`` divides ``n - 1``, and at least
    ``SWEEP_MIN_CELLS`` cells remain. The smallest ``eps`` runs on the sweep
    grid itself when that grid is exactly at its layer spacing.
    """
    grid = config.base.grid
    limit = layer_dx(config, epsilon) * (1.0 + 1e-12)
    cells, stride = grid.n - 1, 1
    while (cells % (2 * stride) == 0 and cells // (2 * stride) >= SWEEP_MIN_CELLS
           and 2 * stride * grid.dx <= limit):
        stride *= 2
    return grid._replace(dx=grid.dx * stride, n=cells // stride + 1)


def _validate_sweep(config: SweepConfig) -> None:
    eps = config.epsilons
    if len(eps) < 3:
        raise PreconditionError(f'A sweep needs at least 3 viscosities, got {len(eps)}.')
    if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise PreconditionError('Sweep viscosities must be positive and strictly decreasing.')
    valid_positive(config.t_eval, 't_eval')
    if config.u0_spec.kind is U0Kind.CUSTOM:
        raise PreconditionError('Sweep data must be a smoothed step or a bump.')
    if config.reference is ReferenceKind.GODUNOV and config.refine < 4:
        raise PreconditionError(f'The reference grid must be at least 4 times finer, '
                                f'got refine={config.refine}.')
    if config.reference is ReferenceKind.EXACT_RIEMANN and not (
            config.u0_spec.kind is U0Kind.SMOOTHED_STEP and config.u0_spec.width == 0):
        raise PreconditionError('The exact Riemann reference needs a pure step.')
    needed = required_dx(config)
    if config.base.grid.dx > needed * (1.0 + 1e-12):
        raise PreconditionError(f'dx={config.base.grid.dx:.4g} does not resolve the layer of '
                                f'eps={min(eps):.4g}; dx <= {needed:.4g} is required.')


def _godunov_reference(config: SweepConfig, grid: GridSpec, times: tuple[float, ...],
                       refine: int) -> list[Field]:
    fine = initial_field(config.u0_spec, refine_grid(grid, refine))
    trajectory = godunov_evolve(fine, config.base.flux, max(times), config.base.cfl, times)
    by_time = {f.t: f for f in trajectory}
    return [restrict(by_time[t], grid) for t in times]


def reference_fields(config: SweepConfig, grid: GridSpec,
                     times: tuple[float, ...]) -> tuple[list[Field], float]:
    """Entropy solution at ``times`` on ``grid`` and its error floor estimate.

    The floor is the L1 distance between the Godunov references at
    ``refine`` and ``refine / 2`` at the last time; the exact reference has
    no floor.
    """
    if config.reference is ReferenceKind.EXACT_RIEMANN:
        spec = config.u0_spec
        data = RiemannData(spec.u_left, spec.u_right, spec.center)
        fields = [Field(t, exact_riemann_cells(data, config.base.flux, grid, t), grid)
                  for t in times]
        return fields, 0.0
    fields = _godunov_reference(config, grid, times, config.refine)
    coarse = _godunov_reference(config, grid, times[-1:], config.refine // 2)[0]
    floor = l1_distance(fields[-1], coarse)
    logger.info('Godunov reference x%d, floor estimate %.3e', config.refine, floor)
    return fields, floor


class _SweepPoint(NamedTuple):
    u0: Field
    fields: list[Field]
    references: list[Field]
    floor: float


def _run_point(config: SweepConfig, epsilon: float, times: tuple[float, ...]) -> _SweepPoint:
    u0 = initial_field(config.u0_spec, point_grid(config, epsilon))
    run = config.base._replace(epsilon=epsilon, t_end=max(times), output_times=times,
                               grid=u0.grid)
    start = time.perf_counter()
    trajectory = evolve(u0, run)
    logger.info('eps=%g on dx=%.4g (%d nodes) done in %.1f s', epsilon, u0.grid.dx,
                u0.grid.n, time.perf_counter() - start)
    by_time = {f.t: f for f in trajectory}
    references, floor = reference_fields(config, u0.grid, times)
    return _SweepPoint(u0, [by_time[t] for t in times], references, floor)


def _run_sweep(config: SweepConfig, times: tuple[float, ...]) -> list[_SweepPoint]:
    workers = min(worker_count(), len(config.epsilons))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda eps: _run_point(config, eps, times), config.epsilons))


def monotone_prefix(errors: FloatArray) -> int:
    """Length of the leading run of strictly decreasing errors."""
    count = 1
    while count < len(errors) and errors[count] < errors[count - 1]:
        count += 1
    return count


def log_log_fit(epsilons: FloatArray, errors: FloatArray) -> tuple[float, float]:
    """Slope and coefficient of determination of ``log error`` against ``log eps``."""
    x, y = np.log(epsilons), np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    return float(slope), 1.0 - residual / total if total > 0 else 1.0


def viscosity_sweep(config: SweepConfig) -> RateReport:
    """Measure the L1 rate of the vanishing-viscosity limit.

    Parameters
    ----------
    config : SweepConfig
        At least three strictly decreasing viscosities, a smoothed step or
        bump, and a grid with ``dx <= eps_min^(1/alpha) / 8``.

    Returns
    -------
    RateReport
        Errors, BV seminorms, the fitted and theoretical rates, and the
        flags ``bound_satisfied`` (fitted rate at least the theoretical one
        minus 0.1) and ``rate_matched`` (within 0.1).

    Raises
    ------
    PreconditionError
        If the sweep is under-resolved or malformed.
    ConvergenceError
        If the errors do not decrease even between the first two viscosities.
    """
    _validate_sweep(config)
    points = _run_sweep(config, (config.t_eval,))
    epsilons = np.array(config.epsilons)
    errors = np.array([l1_distance(p.fields[-1], p.references[-1]) for p in points])
    bv0 = np.array([bv_seminorm(p.u0) for p in points])
    bv = np.array([bv_seminorm(p.fields[-1]) for p in points])
    if np.any(bv > bv0 + 1e-6):
        logger.warning('BV seminorm grew above |u0|_BV=%s: %s', bv0, bv)
    if np.any(errors <= 0):
        raise ConvergenceError('A sweep error vanished; the reference coincides with a run.',
                               {'errors': errors.tolist()})
    prefix = monotone_prefix(errors)
    if prefix < 2:
        raise ConvergenceError('Sweep errors do not decrease with eps.',
                               {'errors': errors.tolist()})
    if prefix < errors.size:
        logger.warning('Errors stop decreasing after eps=%g (reference floor reached); '
                       'refitting on the first %d points', epsilons[prefix - 1], prefix)
    fitted, r_squared = log_log_fit(epsilons[:prefix], errors[:prefix])
    theoretical = 1.0 / (_sweep_alpha(config.base.params) + 1.0)
    floors = np.array([p.floor for p in points])
    floor_flags = tuple(bool(e <= FLOOR_FACTOR * f) for e, f in zip(errors, floors))
    if any(floor_flags):
        logger.warning('Errors within %gx of the reference floors %s: %s',
                       FLOOR_FACTOR, floors, floor_flags)
    report = RateReport(epsilons, errors, fitted, theoretical, r_squared, bv,
                        bound_satisfied=fitted >= theoretical - RATE_TOLERANCE,
                        rate_matched=abs(fitted - theoretical) <= RATE_TOLERANCE,
                        monotone_prefix=prefix, floor_flags=floor_flags)
    logger.info('Sweep rate %.4f (theory %.4f, r^2 %.4f), errors %s',
                fitted, theoretical, r_squared, errors)
    return report


def time_scaling_report(config: SweepConfig, factor: float = 2.0) -> TimeScalingReport:
    """Compare sweep errors at ``t_eval`` and ``factor * t_eval``.

    The bound scales by ``factor^(1/(alpha+1))``; the ratios must stay below
    it with 30% slack.
    """
    valid_positive(factor, 'factor')
    first = viscosity_sweep(config)
    second = viscosity_sweep(config._replace(t_eval=factor * config.t_eval))
    ratios = second.l1_errors / first.l1_errors
    bound = factor ** first.theoretical_rate
    within = bool(np.all(ratios <= bound * (1.0 + TIME_RATIO_SLACK)))
    logger.info('Time scaling x%g: ratios %s, bound %.4f', factor, ratios, bound)
    return TimeScalingReport(first.epsilons, ratios, bound, within)


def windowed_convergence(config: SweepConfig, window: tuple[float, float],
                         samples: int = 4) -> WindowedConvergence:
    """Sup over ``samples`` output times of the windowed L1 error, per ``eps``.

    ``monotone`` holds when the sup does not increase along the sweep.
    """
    _validate_sweep(config)
    if not window[0] < window[1]:
        raise PreconditionError(f'Window {window} is empty.')
    times = tuple(config.t_eval * (i + 1) / samples for i in range(samples))
    sup_errors = np.array([max(windowed_l1_distance(f, r, window)
                               for f, r in zip(p.fields, p.references))
                           for p in _run_sweep(config, times)])
    monotone = bool(np.all(np.diff(sup_errors) <= 0))
    logger.info('Windowed errors on %s: %s', window, sup_errors)
    return WindowedConvergence(np.array(config.epsilons), window, sup_errors, monotone)


def symbol_orders(params: FracParams, xis: tuple[float, ...] = (1.0, 2.0, 4.0),
                  dxs: tuple[float, ...] = (0.1, 0.05, 0.025)) -> FloatArray:
    """Empirical orders ``log2(e(dx) / e(dx/2))`` of the discrete symbol, one row per ``xi``."""
    errors = np.array([[abs(discrete_symbol(xi, params, dx) - exact_symbol(xi, params))
                        for dx in dxs] for xi in xis])
    return np.log2(errors[:, :-1] / errors[:, 1:])


def plot_rate_fit(report: RateReport, path: Path) -> Path | None:
    """Write the log-log rate fit as SVG; returns ``None`` without matplotlib."""
    try:
        from matplotlib.figure import Figure  # pylint: disable=import-outside-toplevel
    except ImportError:
        logger.warning('matplotlib is not installed; skipping %s', path)
        return None
    figure = Figure(figsize=(5, 4))
    ax = figure.add_subplot()
    ax.loglog(report.epsilons, report.l1_errors, 'o-', label='L1 error')
    anchor = report.l1_errors[0] / report.epsilons[0] ** report.theoretical_rate
    ax.loglog(report.epsilons, anchor * report.epsilons ** report.theoretical_rate, '--',
              label=f'eps^{report.theoretical_rate:.3f}')
    ax.set_xlabel('eps')
    ax.set_ylabel('L1 error')
    ax.set_title(f'fitted rate {report.fitted_rate:.3f}')
    ax.legend()
    figure.savefig(path, format='svg', metadata={'Date': None})
    return path


Measured = tuple[bool, dict[str, Any], dict[str, Any]]


def _check_kernel(config: cfg.Table, out_dir: Path) -> Measured:
    table = config.get('kernel', {})
    quad_tol = table.get('quad_tol', DEFAULTS.quad_tol)
    y_min, y_max = table.get('y_min', DEFAULTS.y_min), table.get('y_max', DEFAULTS.y_max)
    dy = table.get('dy', DEFAULTS.dy)
    y_grid = GridSpec(y_min, dy, int(round((y_max - y_min) / dy)) + 1)
    measured: dict[str, Any] = {}
    passed = True
    for alpha in table.get('alphas', (0.25, 0.5, 0.75)):
        profile = build_kernel_profile(alpha, y_grid, quad_tol)
        mass_error = abs(profile_mass(profile) - 1.0)
        minimum = float(np.min(profile.values))
        exponent = fitted_tail_exponent(profile)
        export_profile_csv(profile, serialize.safe_path(out_dir, f'kernel_alpha{alpha:g}.csv'))
        measured[f'alpha={alpha:g}'] = {'mass_error': mass_error, 'min': minimum,
                                        'tail_exponent': exponent}
        passed &= (mass_error <= 1e-6 and minimum >= -1e-6 and exponent <= -1.8
                   and abs(exponent + 2.0 + alpha) <= 0.2)
    return passed, measured, {'mass_error': 1e-6, 'min': -1e-6, 'tail_exponent': '<= -1.8'}


def _check_semigroup(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    alpha = config.get('operator', {}).get('alpha', DEFAULTS.alpha)
    kernel_defect, derivative_defect = semigroup_defect(alpha, 0.5, 0.5)
    return (kernel_defect <= 1e-5 and derivative_defect <= 1e-5,
            {'kernel_defect': kernel_defect, 'derivative_defect': derivative_defect},
            {'defect': 1e-5})


def _check_symbol(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    cases = [FracParams.one_sided(config.get('operator', {}).get('alpha', DEFAULTS.alpha))]
    cases += [FracParams.riesz_feller(b, g) for b, g in ((1.5, 0.5), (1.5, 0.0), (1.2, -0.3))]
    measured = {f'{p.kind.value}(beta={p.beta:g}, gamma={p.gamma:g})':
                float(np.min(symbol_orders(p))) for p in cases}
    return all(order >= 0.9 for order in measured.values()), measured, {'min_order': 0.9}


def evolution_inputs(config: cfg.Table) -> tuple[Field, EvolutionConfig]:
    """Initial field and evolution settings described by a config."""
    evolution = cfg.build_evolution(config)
    u0 = initial_field(cfg.build_u0_spec(config.get('initial', {})), evolution.grid)
    return u0, evolution._replace(grid=u0.grid)


def _check_max_principle(config: cfg.Table, out_dir: Path) -> Measured:
    u0, evolution = evolution_inputs(config)
    trajectory = evolve(u0, evolution._replace(output_times=()))
    report = max_principle_report(trajectory)
    export_trajectory(trajectory[::max(1, len(trajectory) // 20)], evolution, out_dir,
                      'max_principle')
    growth = float(np.max(np.diff(report.sup_norms), initial=0.0))
    return report.monotone, {'sup_initial': float(report.sup_norms[0]),
                             'sup_final': float(report.sup_norms[-1]),
                             'largest_step_growth': growth}, {'step_growth': 1e-8}


def _check_contraction(config: cfg.Table, out_dir: Path) -> Measured:
    u0, evolution = evolution_inputs(config)
    v0 = initial_field(cfg.build_second_u0_spec(config), evolution.grid)
    report = l1_contraction_report(u0, v0, evolution._replace(output_times=()))
    stride = max(1, report.times.size // 200)
    serialize.write_columns(serialize.safe_path(out_dir, 'contraction.csv'),
                            {'t': report.times[::stride], 'l1': report.l1_distances[::stride],
                             'bv': report.bv_seminorms[::stride]})
    bv_growth = float(np.max(report.bv_seminorms) - bv_seminorm(u0))
    return (report.contractive and bv_growth <= 1e-6,
            {'l1_initial': float(report.l1_distances[0]),
             'l1_final': float(report.l1_distances[-1]), 'bv_growth': bv_growth},
            {'bv_growth': 1e-6})


def _entropy_run(config: cfg.Table, dx: float | None) -> tuple[Any, EvolutionConfig]:
    evolution = cfg.build_evolution(config, dx)
    u0 = initial_field(cfg.build_u0_spec(config.get('initial', {})), evolution.grid)
    evolution = evolution._replace(grid=u0.grid, output_times=())
    return evolve(u0, evolution), evolution


def _check_entropy(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    bump = cfg.build_bump(config)
    coarse, coarse_config = _entropy_run(config, None)
    fine, fine_config = _entropy_run(config, 0.5 * coarse_config.grid.dx)
    measured: dict[str, Any] = {}
    passed = True
    for k in cfg.section(config, 'entropy').get('k', (0.25, 0.5, 0.75)):
        pair = EntropyPair(k, coarse_config.flux)
        residual = entropy_residual(coarse, pair, bump, coarse_config)
        tolerance = entropy_tolerance(coarse, pair, bump, coarse_config)
        refined = entropy_residual(fine, pair, bump, fine_config)
        improving = min(refined, 0.0) >= min(residual, 0.0) - 1e-12
        measured[f'k={k:g}'] = {'residual': residual, 'tolerance': tolerance,
                                'refined_residual': refined}
        passed &= residual >= -tolerance and improving
    return passed, measured, {'residual': '>= -C (dx + dt) scale'}


def _write_sweep(report: RateReport, out_dir: Path, suffix: str = '') -> None:
    serialize.write_columns(serialize.safe_path(out_dir, f'sweep{suffix}.csv'),
                            {'epsilon': report.epsilons, 'l1_error': report.l1_errors,
                             'bv': report.bv_seminorms})
    plot_rate_fit(report, serialize.safe_path(out_dir, f'sweep_rate{suffix}.svg'))


def _sweep_measured(report: RateReport) -> dict[str, Any]:
    return {'fitted_rate': report.fitted_rate, 'theoretical_rate': report.theoretical_rate,
            'r_squared': report.r_squared, 'rate_matched': report.rate_matched,
            'l1_errors': report.l1_errors, 'monotone_prefix': report.monotone_prefix,
            'floor_flags': report.floor_flags}


def _check_sweep(config: cfg.Table, out_dir: Path) -> Measured:
    report = viscosity_sweep(cfg.build_sweep(config))
    _write_sweep(report, out_dir)
    passed, measured = report.bound_satisfied, _sweep_measured(report)
    repeats = {}
    for alpha in cfg.section(config, 'sweep').get('repeat_alphas', ()):
        repeat = viscosity_sweep(cfg.build_sweep(config, alpha))
        _write_sweep(repeat, out_dir, f'_alpha{alpha:g}')
        repeats[f'alpha={alpha:g}'] = _sweep_measured(repeat)
        passed &= repeat.bound_satisfied
    if repeats:
        measured['repeats'] = repeats
    return passed, measured, {'rate': RATE_TOLERANCE}


def _check_time_scaling(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    factor = cfg.section(config, 'sweep').get('time_factor', 2.0)
    report = time_scaling_report(cfg.build_sweep(config), factor)
    return report.within_bound, {'ratios': report.error_ratios,
                                 'bound_ratio': report.bound_ratio}, {'slack': TIME_RATIO_SLACK}


def _check_windowed(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    window = cfg.section(config, 'sweep').get('window', (-0.5, 1.5))
    if len(window) != 2:
        raise ConfigError('[sweep] window needs two numbers.')
    report = windowed_convergence(cfg.build_sweep(config), (window[0], window[1]))
    return report.monotone, {'sup_errors': report.sup_errors}, {'monotone': True}


def _check_tw_tails(config: cfg.Table, out_dir: Path) -> Measured:
    base = cfg.build_tw_spec(config)
    profile = solve_profile(base)
    fit = tail_exponents(profile)
    sandwich = sandwich_bound_report(profile)
    export_tw_csv(profile, serialize.safe_path(out_dir, 'tw_profile.csv'))
    write_fit_report(profile, fit, serialize.safe_path(out_dir, 'tw_fit.json'), sandwich)
    amplitudes = {base.epsilon: fit.right_amplitude}
    for epsilon in cfg.section(config, 'tw').get('epsilons', (1.0,))[1:]:
        amplitudes[epsilon] = tail_exponents(
            solve_profile(base._replace(epsilon=epsilon))).right_amplitude
    ratios = [amplitudes[e] / amplitudes[base.epsilon] / (e / base.epsilon) for e in amplitudes]
    expected_lambda = left_rate(base)
    passed = (profile.residual_norm < 1e-10
              and abs(fit.lambda_fit / expected_lambda - 1.0) <= 0.1
              and abs(fit.alpha_fit / base.alpha - 1.0) <= 0.1
              and all(abs(r - 1.0) <= 0.2 for r in ratios) and sandwich.holds)
    return passed, {'residual': profile.residual_norm, 'lambda_fit': fit.lambda_fit,
                    'lambda_expected': expected_lambda, 'alpha_fit': fit.alpha_fit,
                    'amplitude_ratios': ratios, 'sandwich_holds': sandwich.holds}, {
        'residual': 1e-10, 'lambda': 0.1, 'alpha': 0.1, 'amplitude': 0.2}


def _check_mittag_leffler(config: cfg.Table, out_dir: Path) -> Measured:
    del out_dir
    table = config.get('mittag_leffler', {})
    mu = table.get('mu', -0.5)
    measured: dict[str, Any] = {}
    passed = True
    for alpha in table.get('alphas', (0.5,)):
        start = (1e3 / -mu) ** (1.0 / alpha)
        z = np.geomspace(start, 10.0 * start, 11)
        scaled = z ** alpha * mittag_leffler_v(z, alpha, mu)
        spread = float(np.max(scaled) / np.min(scaled) - 1.0)
        small = 1e-8
        slope_ratio = float(mittag_leffler_v_prime(small, alpha, mu)
                            / small ** (alpha - 1.0) / (mu / math.gamma(alpha)))
        samples = np.array([0.5, 2.0, 20.0])
        oracle = float(np.max(np.abs(mittag_leffler_v(samples, alpha, mu)
                                     - mittag_leffler_quadrature(samples, alpha, mu))))
        origin = float(mittag_leffler_v(0.0, alpha, mu))
        measured[f'alpha={alpha:g}'] = {'v0': origin, 'tail_spread': spread,
                                        'slope_ratio': slope_ratio, 'oracle_error': oracle}
        passed &= (origin == 1.0 and spread <= 0.01 and abs(slope_ratio - 1.0) <= 0.02
                   and oracle <= 1e-7)
    return passed, measured, {'tail_spread': 0.01, 'slope_ratio': 0.02, 'oracle_error': 1e-7}


CHECKS: dict[str, Callable[[cfg.Table, Path], Measured]] = {
    'kernel': _check_kernel,
    'semigroup': _check_semigroup,
    'symbol': _check_symbol,
    'max_principle': _check_max_principle,
    'contraction': _check_contraction,
    'entropy': _check_entropy,
    'sweep': _check_sweep,
    'time_scaling': _check_time_scaling,
    'windowed': _check_windowed,
    'tw_tails': _check_tw_tails,
    'mittag_leffler': _check_mittag_leffler,
}


def run_check(name: str, config: cfg.Table, out_dir: Path) -> CheckResult:
    """Run one check; failures of the check itself become a structured error."""
    start = time.perf_counter()
    try:
        passed, measured, tolerances = CHECKS[name](config, out_dir)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        logger.warning('Check %s raised %s: %s', name, type(exc).__name__, exc)
        return CheckResult(name, False, {}, {},
                           {'error': type(exc).__name__, 'message': str(exc)})
    logger.info('Check %s: %s in %.1f s', name, 'pass' if passed else 'FAIL',
                time.perf_counter() - start)
    return CheckResult(name, bool(passed), measured, tolerances)


def run_manifest(path: Path) -> ExperimentReport:
    """Run the checks listed in a config file and write ``report.json``.

    Raises
    ------
    FileNotFoundError
        If the config file does not exist.
    ConfigError
        If the config is invalid or names an unknown check.
    """
    config = cfg.load_config(path)
    names = cfg.check_names(config)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ConfigError(f'Unknown checks: {", ".join(unknown)}; '
                          f'choose from {", ".join(CHECKS)}.')
    out_dir = cfg.output_dir(config, path)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = tuple(run_check(name, config, out_dir) for name in names)
    report = ExperimentReport(REPORT_SCHEMA_VERSION, results)
    serialize.write_report_json(serialize.safe_path(out_dir, 'report.json'), report)
    logger.info('Manifest %s: %d checks, passed=%s', path, len(results), report.passed)
    return report
