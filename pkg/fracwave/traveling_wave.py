"""Traveling waves of the one-sided regularisation.

A profile ``phi`` connecting ``phi_minus > phi_plus`` with speed ``c`` solves

    h(phi) = eps * D^alpha[phi],  h(phi) = -c (phi - phi_minus) + f(phi) - f(phi_minus),

where ``D^alpha`` is the one-sided derivative of order ``alpha`` with memory
to the left. The profile approaches ``phi_minus`` exponentially with rate
``(h'(phi_minus) / eps)^(1/alpha)`` and ``phi_plus`` algebraically like
``eps / xi^alpha``.

Discretisation
    ``D^alpha`` is the Grunwald-Letnikov sum of order ``alpha``. The memory
    left of the window is closed with the discrete exponential tail
    ``phi_minus - (phi_minus - phi_0) r^m``, ``r = 1 - dx lam``, which solves
    the discrete linearised equation exactly. The operator is causal, so the
    residual at a node only involves nodes to its left, and the Jacobian is
    lower triangular apart from the column of the first node. The first
    residual row is replaced by the phase condition
    ``phi(0) = (phi_minus + phi_plus) / 2``.

Mittag-Leffler
    The right tail is compared with ``v(z) = E_alpha(mu z^alpha)``, evaluated
    by its power series in extended precision for small arguments and by the
    algebraic asymptotic series for large ones.
"""

import math
from pathlib import Path
from typing import Any

import mpmath as mp
import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from scipy.special import gammaln, rgamma

from fracwave import serialize
from fracwave.constants import (ML_ASYMPTOTIC_MIN, ML_SERIES_MAX, NEWTON_MAX_ITER, NEWTON_TOL,
                                REPORT_SCHEMA_VERSION, TAIL_STATIONARITY)
from fracwave.custom_types import (Boundary, FloatArray, FluxFn, GridSpec, SandwichReport,
                                   TailFit, TWProfile, TWSpec)
from fracwave.exceptions import ConvergenceError, PreconditionError
from fracwave.fractional_ops import binomial_weights
from fracwave.log import get_logger
from fracwave.validate import valid_alpha, valid_convex_flux, valid_grid, valid_positive

logger = get_logger(__name__)

# Distance of the pads from the far-field states accepted by solve_profile.
PAD_TOLERANCE = 1e-6
# Geometric tail weights below this are dropped.
TAIL_CUTOFF = 1e-17
# Largest |x|^(1/alpha) summed by the power series; the series terms peak
# near exp of this value.
SERIES_MAGNITUDE_MAX = 700.0


def make_tw_spec(flux: FluxFn, phi_minus: float, phi_plus: float, epsilon: float,
                 alpha: float, x0: float, x_end: float, dx: float) -> TWSpec:
    """Build a spec on ``[x0, x_end]`` with the pads set to the far-field states."""
    n = int(round((x_end - x0) / dx)) + 1
    grid = GridSpec(x0, dx, n, Boundary.TRUNCATED_LINE, phi_minus, phi_plus)
    return TWSpec(flux, phi_minus, phi_plus, epsilon, grid, alpha)


def wave_speed(spec: TWSpec) -> float:
    """Rankine-Hugoniot speed ``(f(phi_plus) - f(phi_minus)) / (phi_plus - phi_minus)``.

    Raises
    ------
    PreconditionError
        If the far-field states coincide.
    """
    if spec.phi_minus == spec.phi_plus:
        raise PreconditionError('phi_minus and phi_plus must differ.')
    f = spec.flux.f
    return float((f(spec.phi_plus) - f(spec.phi_minus)) / (spec.phi_plus - spec.phi_minus))


def _h(spec: TWSpec, c: float, phi):
    return -c * (phi - spec.phi_minus) + spec.flux.f(phi) - spec.flux.f(spec.phi_minus)


def _h_prime(spec: TWSpec, c: float, phi):
    return np.asarray(spec.flux.f_prime(phi), dtype=float) - c


def left_rate(spec: TWSpec) -> float:
    """``lam = (h'(phi_minus) / eps)^(1/alpha)``, the exponential rate at the left."""
    c = wave_speed(spec)
    return float((_h_prime(spec, c, spec.phi_minus) / spec.epsilon) ** (1.0 / spec.alpha))


def discrete_left_rate(spec: TWSpec) -> float:
    """Decay rate of the discrete left tail, ``-log(1 - dx lam) / dx``."""
    dx = spec.grid.dx
    return -math.log1p(-dx * left_rate(spec)) / dx


def _check_spec(spec: TWSpec) -> int:
    """Validate ``spec`` and return the index of the phase node."""
    valid_convex_flux(spec.flux)
    valid_alpha(spec.alpha)
    valid_positive(spec.epsilon, 'epsilon')
    grid = valid_grid(spec.grid, 8)
    if not spec.phi_minus > spec.phi_plus:
        raise PreconditionError('A traveling wave needs phi_minus > phi_plus.')
    if grid.periodic or (grid.left_pad, grid.right_pad) != (spec.phi_minus, spec.phi_plus):
        raise PreconditionError('The grid must be a truncated line padded with phi_minus and '
                                'phi_plus.')
    c = wave_speed(spec)
    slope_minus = float(_h_prime(spec, c, spec.phi_minus))
    slope_plus = float(_h_prime(spec, c, spec.phi_plus))
    if not (slope_minus > 0 > slope_plus):
        raise PreconditionError(
            f"Need h'(phi_minus) > 0 > h'(phi_plus), got {slope_minus:.6g} and {slope_plus:.6g}.")
    lam = left_rate(spec)
    if grid.dx * lam >= 1.0:
        raise PreconditionError(f'dx={grid.dx:.4g} does not resolve the left tail; '
                                f'dx < {1.0 / lam:.4g} is required.')
    jump = spec.phi_minus - spec.phi_plus
    if 0.5 * jump * math.exp(lam * grid.x0) > PAD_TOLERANCE:
        required = math.log(2.0 * PAD_TOLERANCE / jump) / lam
        raise PreconditionError(f'Window starts too far right at x0={grid.x0:.4g}; '
                                f'x0 <= {required:.4g} is required.')
    anchor = int(round(-grid.x0 / grid.dx))
    if not 1 <= anchor < grid.n - 1:
        raise PreconditionError('The window must contain xi = 0 in its interior.')
    return anchor


class _Discretisation:
    """Residual and Newton step of the discrete profile equation."""

    def __init__(self, spec: TWSpec, anchor: int) -> None:
        self.spec = spec
        self.anchor = anchor
        self.c = wave_speed(spec)
        grid = spec.grid
        n = grid.n
        self.kappa = spec.epsilon * grid.dx ** -spec.alpha
        ratio = 1.0 - grid.dx * left_rate(spec)
        depth = max(1, math.ceil(math.log(TAIL_CUTOFF) / math.log(ratio)))
        weights = binomial_weights(spec.alpha, n + depth)
        self.g = weights[:n]
        self.partial = np.cumsum(self.g)
        self.tail = fftconvolve(weights[1:n + depth], ratio ** np.arange(depth, 0, -1),
                                mode='valid')[:n]
        self.midpoint = 0.5 * (spec.phi_minus + spec.phi_plus)

    def caputo(self, phi: FloatArray) -> FloatArray:
        """``dx^alpha D^alpha[phi]`` at the nodes, left tail closed."""
        phi_minus = self.spec.phi_minus
        conv = fftconvolve(self.g, phi)[:phi.size]
        return conv - phi_minus * self.partial - (phi_minus - phi[0]) * self.tail

    def residual(self, phi: FloatArray) -> FloatArray:
        """Profile residual with the phase condition in row 0."""
        out = _h(self.spec, self.c, phi) - self.kappa * self.caputo(phi)
        out[0] = phi[self.anchor] - self.midpoint
        return out

    def newton_step(self, phi: FloatArray, residual: FloatArray) -> FloatArray:
        """Solve ``J delta = -residual`` by bordered forward substitution."""
        n, g, kappa = phi.size, self.g, self.kappa
        diagonal = _h_prime(self.spec, self.c, phi) - kappa * g[0]
        rhs = np.empty((n, 2))
        rhs[:, 0] = -residual
        rhs[:, 1] = kappa * (g + self.tail)
        sol = np.zeros((n, 2))
        for i in range(1, n):
            memory = np.dot(g[i - 1:0:-1], sol[1:i]) if i > 1 else 0.0
            sol[i] = (rhs[i] + kappa * memory) / diagonal[i]
        a = self.anchor
        shift = (-residual[0] - sol[a, 0]) / sol[a, 1]
        delta = sol[:, 0] + shift * sol[:, 1]
        delta[0] = shift
        return delta


def initial_guess(spec: TWSpec) -> FloatArray:
    """Exponential approach on the left, ``(1 + lam xi / alpha)^-alpha`` on the right."""
    x = spec.grid.x
    half = 0.5 * (spec.phi_minus - spec.phi_plus)
    lam = discrete_left_rate(spec)
    left = spec.phi_minus - half * np.exp(lam * np.minimum(x, 0.0))
    right = spec.phi_plus + half * (1.0 + lam * np.maximum(x, 0.0) / spec.alpha) ** -spec.alpha
    return np.where(x <= 0.0, left, right)


def solve_profile(spec: TWSpec, guess: FloatArray | None = None) -> TWProfile:
    """Solve the discrete profile equation by damped Newton iteration.

    Parameters
    ----------
    spec : TWSpec
        Problem and window. The window must contain ``xi = 0`` and start far
        enough left for the exponential tail to be within 1e-6 of
        ``phi_minus``; the right end is free because the operator has no
        memory of the right.
    guess : FloatArray, optional
        Starting profile; defaults to :func:`initial_guess`.

    Returns
    -------
    TWProfile
        Converged, monotone profile with ``||R||_inf < 1e-10``.

    Raises
    ------
    PreconditionError
        If the problem is invalid or the window or spacing do not resolve the tails.
    ConvergenceError
        If Newton stagnates or the converged profile is not monotone.
    """
    anchor = _check_spec(spec)
    disc = _Discretisation(spec, anchor)
    phi = initial_guess(spec) if guess is None else np.array(guess, dtype=float)
    residual = disc.residual(phi)
    norm = float(np.max(np.abs(residual)))
    logger.info('Profile solve: n=%d dx=%g eps=%g alpha=%g, c=%.6g, initial residual %.3e',
                spec.grid.n, spec.grid.dx, spec.epsilon, spec.alpha, disc.c, norm)
    iteration = 0
    while norm >= NEWTON_TOL:
        iteration += 1
        if iteration > NEWTON_MAX_ITER:
            raise ConvergenceError('Newton iteration stagnated.',
                                   {'residual': norm, 'iterations': iteration - 1})
        delta = disc.newton_step(phi, residual)
        damping = 1.0
        while True:
            trial = phi + damping * delta
            trial_residual = disc.residual(trial)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm < (1.0 - 1e-4 * damping) * norm or (damping < 1.0 and
                                                               trial_norm < norm):
                break
            damping *= 0.5
            if damping < 1e-6:
                raise ConvergenceError('Newton line search failed.',
                                       {'residual': norm, 'iterations': iteration})
        phi, residual, norm = trial, trial_residual, trial_norm
        logger.debug('Newton iteration %d: damping %g residual %.3e', iteration, damping, norm)

    slack = 1e-10 * (spec.phi_minus - spec.phi_plus)
    if np.any(np.diff(phi) > slack) or np.any(phi > spec.phi_minus + slack) \
            or np.any(phi < spec.phi_plus - slack):
        raise ConvergenceError('Converged profile is not monotone; widen the window.',
                               {'residual': norm, 'iterations': iteration})
    logger.info('Profile converged in %d iterations, residual %.3e', iteration, norm)
    return TWProfile(spec, phi, norm, float(spec.grid.x[anchor]), iteration)


def profile_residual(profile: TWProfile, grid: GridSpec) -> float:
    """Sup norm of the discrete residual of ``profile`` re-sampled on ``grid``.

    The phase row is excluded; ``grid`` must lie inside the profile window.
    """
    spec = profile.spec._replace(grid=grid)
    anchor = _check_spec(spec)
    source = profile.spec.grid
    if grid.x0 < source.x0 or grid.x_end > source.x_end:
        raise PreconditionError('Evaluation grid leaves the profile window.')
    phi = CubicSpline(source.x, profile.values)(grid.x)
    return float(np.max(np.abs(_Discretisation(spec, anchor).residual(phi)[1:])))


def rescale_profile(profile: TWProfile, epsilon: float) -> TWProfile:
    """Map a profile to viscosity ``epsilon`` by ``xi -> xi (epsilon / eps)^(1/alpha)``.

    The discrete equation is invariant under this map, so the values carry
    over unchanged onto the scaled grid.
    """
    valid_positive(epsilon, 'epsilon')
    spec = profile.spec
    scale = (epsilon / spec.epsilon) ** (1.0 / spec.alpha)
    grid = spec.grid._replace(x0=spec.grid.x0 * scale, dx=spec.grid.dx * scale)
    return profile._replace(spec=spec._replace(epsilon=epsilon, grid=grid),
                            phase_anchor=profile.phase_anchor * scale)


def _stationary_run(slopes: FloatArray, outer: slice) -> tuple[int, int]:
    """Longest run of slopes within the stationarity band of the outer median."""
    reference = float(np.median(slopes[outer]))
    inside = np.abs(slopes - reference) <= TAIL_STATIONARITY * abs(reference)
    best, start = (0, 0), None
    for i, flag in enumerate(np.append(inside, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def tail_exponents(profile: TWProfile) -> TailFit:
    """Fit the exponential left tail and the algebraic right tail.

    Fit windows are the longest runs where the local slope stays within 5%
    of its median over the outer half of each tail.

    Returns
    -------
    TailFit
        ``lambda_fit``, the slope of ``log(phi_minus - phi)`` against ``xi``;
        ``alpha_fit``, minus the slope of ``log(phi - phi_plus)`` against
        ``log xi``; the windows and the amplitude of ``W xi^alpha``.

    Raises
    ------
    PreconditionError
        If either tail spans less than one decade; the message names the
        window that would suffice.
    """
    spec = profile.spec
    x, phi = spec.grid.x, profile.values
    jump = spec.phi_minus - spec.phi_plus
    floor = 1e-13 * jump

    gap = spec.phi_minus - phi
    left = np.flatnonzero((x < profile.phase_anchor) & (gap > floor))
    if left.size < 8:
        raise PreconditionError('Left tail has too few resolved nodes.')
    xl, yl = x[left], np.log(gap[left])
    slopes = np.gradient(yl, xl)
    lo, hi = _stationary_run(slopes, slice(0, left.size // 2))
    lambda_fit = float(np.polyfit(xl[lo:hi], yl[lo:hi], 1)[0]) if hi - lo >= 2 else 0.0
    if hi - lo < 2 or yl[hi - 1] - yl[lo] < math.log(10.0):
        rate = max(lambda_fit, discrete_left_rate(spec))
        required = x[left][max(hi - 1, 0)] - 1.5 * math.log(10.0) / rate
        raise PreconditionError(f'Left tail spans less than one decade; x0 <= {required:.4g} '
                                'is required.')
    left_window = (float(xl[lo]), float(xl[hi - 1]))

    excess = phi - spec.phi_plus
    right = np.flatnonzero((x > max(profile.phase_anchor, 0.0)) & (excess > floor))
    if right.size < 8:
        raise PreconditionError('Right tail has too few resolved nodes.')
    xr, yr = np.log(x[right]), np.log(excess[right])
    slopes = np.gradient(yr, xr)
    lo, hi = _stationary_run(slopes, slice(right.size // 2, right.size))
    if hi - lo < 2 or xr[hi - 1] - xr[lo] < math.log(10.0):
        required = 10.0 * math.exp(xr[lo]) if hi > lo else 10.0 * spec.grid.x_end
        raise PreconditionError(f'Right tail spans less than one decade; x_end >= '
                                f'{required:.4g} is required.')
    alpha_fit = -float(np.polyfit(xr[lo:hi], yr[lo:hi], 1)[0])
    right_window = (float(math.exp(xr[lo])), float(math.exp(xr[hi - 1])))
    amplitude = float(np.median(excess[right][lo:hi] * np.exp(spec.alpha * xr[lo:hi])))
    logger.info('Tail fit: lambda=%.5g on %s, alpha=%.5g on %s, amplitude %.5g',
                lambda_fit, left_window, alpha_fit, right_window, amplitude)
    return TailFit(lambda_fit, alpha_fit, left_window, right_window, amplitude)


def _ml_series(x: float, alpha: float, derivative: bool = False) -> float:
    """``sum x^k / Gamma(alpha k + 1)`` (or ``sum_{k>=1} x^k / Gamma(alpha k)``) in mpmath."""
    magnitude = abs(x) ** (1.0 / alpha) if x else 0.0
    digits = 20 + int(magnitude / math.log(10.0))
    with mp.workdps(digits):
        xm = mp.mpf(x)
        total = mp.mpf(0)
        k = 1 if derivative else 0
        largest = mp.mpf(0)
        while True:
            term = xm ** k * mp.rgamma(alpha * k + (0 if derivative else 1))
            total += term
            largest = max(largest, abs(term))
            if k > 2 * magnitude + 10 and abs(term) <= largest * mp.mpf(10) ** (-digits):
                break
            k += 1
        return float(total)


def _ml_asymptotic(x: float, alpha: float, derivative: bool = False) -> tuple[float, float]:
    """Optimally truncated ``-sum_{k>=1} x^-k / Gamma(1 - alpha k)`` and its error bound.

    With ``derivative`` the expansion of ``alpha x E'(x)``,
    ``alpha sum k x^-k / Gamma(1 - alpha k)``, is returned.
    """
    k = np.arange(1, 400)
    log_bound = -k * math.log(abs(x)) + gammaln(alpha * k) - math.log(math.pi)
    if derivative:
        log_bound = log_bound + np.log(alpha * k)
    cut = int(np.argmin(log_bound))
    terms = (1.0 / x) ** k[:cut] * rgamma(1.0 - alpha * k[:cut])
    error = float(math.exp(log_bound[cut]))
    if derivative:
        return float(alpha * np.sum(k[:cut] * terms)), error
    return float(-np.sum(terms)), error


def _ml_value(x: float, alpha: float, derivative: bool) -> float:
    """``E_alpha(x)`` for ``x <= 0``; with ``derivative``, ``alpha x E_alpha'(x)``.

    ``alpha x E_alpha'(x)`` equals ``sum_{k>=1} x^k / Gamma(alpha k)``.
    """
    size = abs(x)
    if size <= ML_SERIES_MAX and size ** (1.0 / alpha) <= SERIES_MAGNITUDE_MAX:
        return _ml_series(x, alpha, derivative)
    asymptotic, error = _ml_asymptotic(x, alpha, derivative)
    scale = max(abs(asymptotic), 1e-300)
    if error > 1e-12 * scale:
        return _ml_series(x, alpha, derivative)
    if size >= ML_ASYMPTOTIC_MIN or error <= 1e-15 * scale:
        return asymptotic
    s = (size - ML_SERIES_MAX) / (ML_ASYMPTOTIC_MIN - ML_SERIES_MAX)
    weight = s * s / (s * s + (1.0 - s) ** 2)
    return (1.0 - weight) * _ml_series(x, alpha, derivative) + weight * asymptotic


def _check_ml(z, alpha: float, mu: float) -> FloatArray:
    valid_alpha(alpha)
    if not mu < 0:
        raise PreconditionError(f'mu must be negative, got {mu}.')
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr < 0) or not np.all(np.isfinite(z_arr)):
        raise PreconditionError('z must be finite and nonnegative.')
    return z_arr


def mittag_leffler_v(z, alpha: float, mu: float):
    """``v(z) = E_alpha(mu z^alpha)`` for ``z >= 0`` and ``mu < 0``.

    Power series in extended precision while ``|mu| z^alpha <= 5``, the
    asymptotic series ``-sum (mu z^alpha)^-k / Gamma(1 - alpha k)`` from 10 on
    and a rational blend between; the series is used wherever the optimally
    truncated asymptotic error exceeds 1e-12. ``v(z) z^alpha`` tends to
    ``-1 / (mu Gamma(1 - alpha))``.

    Raises
    ------
    PreconditionError
        If ``mu >= 0`` or any ``z < 0``.
    """
    z_arr = _check_ml(z, alpha, mu)
    out = np.array([_ml_value(mu * zi ** alpha, alpha, False) for zi in z_arr])
    return out[0] if np.ndim(z) == 0 else out


def mittag_leffler_v_prime(z, alpha: float, mu: float):
    """``v'(z)``; near zero ``v'(z) ~ mu z^(alpha - 1) / Gamma(alpha)``.

    Raises
    ------
    PreconditionError
        If ``mu >= 0`` or any ``z <= 0``.
    """
    z_arr = _check_ml(z, alpha, mu)
    if np.any(z_arr == 0):
        raise PreconditionError("v' is singular at z = 0.")
    out = np.array([_ml_value(mu * zi ** alpha, alpha, True) / zi for zi in z_arr])
    return out[0] if np.ndim(z) == 0 else out


def mittag_leffler_quadrature(z, alpha: float, mu: float):
    """Reference ``E_alpha(mu z^alpha)`` from the Laplace representation.

    ``E_alpha(-t^alpha) = int_0^inf exp(-r t) K(r) dr`` with
    ``K(r) = sin(alpha pi) r^(alpha - 1) / (pi (r^(2 alpha) + 2 r^alpha cos(alpha pi) + 1))``.
    """
    z_arr = _check_ml(z, alpha, mu)
    sin_a, cos_a = math.sin(alpha * math.pi), math.cos(alpha * math.pi)

    def smooth(r: float, t: float) -> float:
        return math.exp(-r * t) * sin_a / (math.pi * (r ** (2 * alpha) + 2 * r ** alpha * cos_a
                                                      + 1.0))

    out = []
    for zi in z_arr:
        t = (-mu) ** (1.0 / alpha) * zi
        head, _ = integrate.quad(smooth, 0.0, 1.0, args=(t,), weight='alg',
                                 wvar=(alpha - 1.0, 0.0), epsabs=1e-14, epsrel=1e-12)
        body, _ = integrate.quad(lambda r, tt=t: smooth(r, tt) * r ** (alpha - 1.0), 1.0,
                                 np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
        out.append(head + body)
    values = np.array(out)
    return values[0] if np.ndim(z) == 0 else values


def right_tail_mu(spec: TWSpec) -> float:
    """``mu = h'(phi_plus) / eps`` of the linearised right tail."""
    c = wave_speed(spec)
    return float(_h_prime(spec, c, spec.phi_plus)) / spec.epsilon


def sandwich_bound_report(profile: TWProfile, xi_inf: float | None = None,
                          max_nodes: int = 400) -> SandwichReport:
    """Compare ``W(z) = phi(z + xi_inf) - phi_plus`` with ``W(0) v(z)``.

    ``holds`` is the lower bound ``W(0) v(z) <= W(z)`` at every node right of
    ``xi_inf``. ``two_sided_constant`` is the smallest ``C`` with
    ``1 / (C z^alpha) <= W(z) <= C / z^alpha`` for ``z >= 1``. At most
    ``max_nodes`` nodes, evenly strided, are compared.
    """
    spec = profile.spec
    x = spec.grid.x
    if xi_inf is None:
        xi_inf = max(1.0, 0.05 * spec.grid.x_end)
    start = int(np.searchsorted(x, xi_inf))
    if start >= spec.grid.n - 8 or x[-1] - x[start] < 2.0:
        raise PreconditionError(f'xi_inf={xi_inf:.4g} leaves too few nodes in the window.')
    stride = max(1, (spec.grid.n - start) // max_nodes)
    z = x[start::stride] - x[start]
    tail = profile.values[start::stride] - spec.phi_plus
    bound = tail[0] * mittag_leffler_v(z, spec.alpha, right_tail_mu(spec))
    margins = tail - bound
    far = z >= 1.0
    products = tail[far] * z[far] ** spec.alpha
    constant = float(max(np.max(products), 1.0 / np.min(products)))
    holds = bool(np.min(margins) >= -1e-9 * tail[0])
    logger.info('Sandwich bound from xi=%.4g: holds=%s, min margin %.3e, C=%.4g',
                x[start], holds, np.min(margins), constant)
    return SandwichReport(z, tail, bound, holds, float(np.min(margins)), constant)


def export_profile_csv(profile: TWProfile, path: Path) -> Path:
    """Write ``xi, phi, left_tail_log, right_tail_log``; logs of nonpositive gaps are nan."""
    spec = profile.spec
    with np.errstate(divide='ignore', invalid='ignore'):
        gap = spec.phi_minus - profile.values
        excess = profile.values - spec.phi_plus
        left = np.where(gap > 0, np.log(np.where(gap > 0, gap, 1.0)), np.nan)
        right = np.where(excess > 0, np.log(np.where(excess > 0, excess, 1.0)), np.nan)
    return serialize.write_columns(path, {'xi': spec.grid.x, 'phi': profile.values,
                                          'left_tail_log': left, 'right_tail_log': right})


def fit_payload(profile: TWProfile, fit: TailFit,
                sandwich: SandwichReport | None = None) -> dict[str, Any]:
    """JSON form of a tail fit with the expected exponents."""
    spec = profile.spec
    payload: dict[str, Any] = {
        'schema_version': REPORT_SCHEMA_VERSION,
        'flux': spec.flux.label, 'alpha': spec.alpha, 'epsilon': spec.epsilon,
        'phi_minus': spec.phi_minus, 'phi_plus': spec.phi_plus,
        'grid': serialize.grid_payload(spec.grid),
        'speed': wave_speed(spec), 'residual_norm': profile.residual_norm,
        'iterations': profile.iterations, 'phase_anchor': profile.phase_anchor,
        'lambda_expected': left_rate(spec), 'lambda_discrete': discrete_left_rate(spec),
        'lambda_fit': fit.lambda_fit, 'alpha_fit': fit.alpha_fit,
        'left_window': fit.left_window, 'right_window': fit.right_window,
        'right_amplitude': fit.right_amplitude}
    if sandwich is not None:
        payload['sandwich'] = {'holds': sandwich.holds, 'min_margin': sandwich.min_margin,
                               'two_sided_constant': sandwich.two_sided_constant}
    return payload


def write_fit_report(profile: TWProfile, fit: TailFit, path: Path,
                     sandwich: SandwichReport | None = None) -> Path:
    """Write :func:`fit_payload` as JSON."""
    return serialize.write_json(path, fit_payload(profile, fit, sandwich))
