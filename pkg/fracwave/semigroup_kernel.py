"""Semigroup kernel of the regularising operator.

``K(t, .)`` is the inverse Fourier transform of ``exp(t m(xi))`` where ``m`` is
the operator symbol. For the one-sided family it is a strictly stable
density with index ``1 + alpha``, totally skewed to the right: the left tail
decays faster than any exponential and the right tail behaves like
``d * y^-(2 + alpha)``. It is self-similar,
``K(t, x) = t^(-1/(1+alpha)) K(1, x t^(-1/(1+alpha)))``.

Samples are obtained from the Poisson summation formula: an inverse DFT of
the symbol on the frequency lattice of a long period ``P`` gives the
``P``-periodised kernel at lattice points, exactly up to the frequency
cutoff. The right-tail images of the periodisation are removed with the
asymptotic tail series.
"""

import math
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from scipy.special import gamma, gammaln

from fracwave import serialize
from fracwave.constants import ALIAS_FACTOR, DEFAULTS, MIN_FFT_SIZE
from fracwave.custom_types import (Field, FloatArray, FracParams, GridSpec, KernelProfile,
                                   OperatorKind)
from fracwave.exceptions import PreconditionError
from fracwave.fractional_ops import exact_symbol
from fracwave.log import get_logger
from fracwave.validate import valid_alpha, valid_frac_params, valid_grid, valid_quad_tol

logger = get_logger(__name__)

TAIL_TERMS = 6


def peak_bound(alpha: float) -> float:
    """Upper bound ``C_{alpha,0}`` of ``sup |K(1, .)|``."""
    a = 1.0 + alpha
    return (math.sqrt(2.0) * gamma(1.0 / a)
            / (math.sqrt(math.pi) * a * math.sin(alpha * math.pi / 2.0) ** (1.0 / a)))


def frequency_cutoff(params: FracParams, t: float, quad_tol: float) -> float:
    """Frequency beyond which ``|exp(t m(xi))| < quad_tol``."""
    decay = math.cos(params.gamma * math.pi / 2.0)
    return (math.log(1.0 / quad_tol) / (decay * t)) ** (1.0 / params.beta)


def kernel_tail_series(y, alpha: float, terms: int = TAIL_TERMS, derivative: int = 0):
    """Large-``y`` expansion of ``K(1, y)`` or of its first derivative.

    ``K(1, y) ~ -(1/pi) sum_k Gamma(a k + 1) / k! sin(pi a k) y^-(a k + 1)``
    with ``a = 1 + alpha``. The leading term is positive and of order
    ``y^-(2 + alpha)``.
    """
    a = 1.0 + alpha
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for k in range(1, terms + 1):
        coef = -math.exp(gammaln(a * k + 1.0) - gammaln(k + 1.0)) * math.sin(math.pi * a * k)
        power = -a * k - 1.0
        if derivative:
            coef *= power
            power -= 1.0
        total = total + coef * y ** power / math.pi
    return total[()] if total.ndim == 0 else total


def tail_mass(edge: float, alpha: float, terms: int = TAIL_TERMS) -> float:
    """``int_edge^inf K(1, y) dy`` from the tail series, for ``edge`` large."""
    a = 1.0 + alpha
    total = 0.0
    for k in range(1, terms + 1):
        coef = -math.exp(gammaln(a * k + 1.0) - gammaln(k + 1.0)) * math.sin(math.pi * a * k)
        total += coef * edge ** (-a * k) / (a * k * math.pi)
    return total


def sample_kernel(params: FracParams, t: float, x0: float, dx: float, n: int,
                  quad_tol: float = DEFAULTS.quad_tol, xi_cap: float = DEFAULTS.xi_cap,
                  derivative: int = 0,
                  period: float | None = None) -> tuple[FloatArray, float, float]:
    """Sample the ``m``-th spatial derivative of ``K(t, x)`` at ``x = x0 + j dx``.

    The values are the pointwise derivative ``(d/dx)^m K(t, x0 + j dx)`` for
    ``j = 0 .. n - 1``, with ``m = derivative``; they carry no factor of
    ``dx`` (multiply by ``dx`` for convolution weights).

    Parameters
    ----------
    params : FracParams
        Operator whose semigroup is sampled.
    t : float
        Time, positive.
    x0, dx, n : float, float, int
        Sampling lattice.
    quad_tol : float
        Frequency cutoff tolerance.
    xi_cap : float
        Largest admissible cutoff.
    derivative : int
        Order ``m`` of the spatial derivative.
    period : float, optional
        Return the kernel periodised with this period (must equal ``n dx``)
        instead of the free-space kernel.

    Returns
    -------
    tuple[FloatArray, float, float]
        Samples of ``(d/dx)^m K``, largest imaginary residue and the
        frequency cutoff.

    Raises
    ------
    PreconditionError
        If t is not positive or the cutoff exceeds ``xi_cap``.
    """
    if not t > 0:
        raise PreconditionError(f't must be positive, got {t}.')
    xi_max = frequency_cutoff(params, t, quad_tol)
    if xi_max > xi_cap:
        raise PreconditionError(
            f'Frequency cutoff {xi_max:.3g} exceeds the cap {xi_cap:.3g}; '
            'alpha or t is too small for the requested tolerance.')
    refine = max(1, math.ceil(xi_max * dx / math.pi))
    h = dx / refine
    if period is not None:
        size = n * refine
    else:
        span = n * refine + math.ceil(abs(x0) / h)
        size = max(MIN_FFT_SIZE, 1 << math.ceil(math.log2(ALIAS_FACTOR * span)))
    xi = 2.0 * math.pi * sfft.fftfreq(size, d=h)
    coef = np.exp(t * exact_symbol(xi, params) + 1j * xi * x0)
    if derivative:
        coef = coef * (1j * xi) ** derivative
    samples = sfft.ifft(coef) / h
    values = samples.real[::refine][:n].copy()
    imag_residue = float(np.max(np.abs(samples.imag[::refine][:n])))
    if period is None and params.kind is OperatorKind.ONE_SIDED:
        values -= _image_correction(params.alpha, t, x0 + dx * np.arange(n), size * h, derivative)
    return values, imag_residue, xi_max


def _image_correction(alpha: float, t: float, x: FloatArray, period: float,
                      derivative: int) -> FloatArray:
    """Sum of the right-tail periodic images ``K(t, x + l P)``, ``l >= 1``."""
    a = 1.0 + alpha
    scale = t ** (-1.0 / a)
    total = np.zeros_like(x)
    for shift in range(1, 65):
        y = (x + shift * period) * scale
        total += kernel_tail_series(y, alpha, derivative=derivative) * scale ** (1 + derivative)
    return total


def _default_y_grid() -> GridSpec:
    n = int(round((DEFAULTS.y_max - DEFAULTS.y_min) / DEFAULTS.dy)) + 1
    return GridSpec(DEFAULTS.y_min, DEFAULTS.dy, n)


def build_kernel_profile(alpha: float, y_grid: GridSpec | None = None,
                         quad_tol: float = DEFAULTS.quad_tol,
                         xi_cap: float = DEFAULTS.xi_cap) -> KernelProfile:
    """Tabulate ``K(1, y)`` on ``y_grid``.

    Parameters
    ----------
    alpha : float
        Order in (0, 1).
    y_grid : GridSpec, optional
        Window of the table; the default spans [-20, 100] with step 0.05.
    quad_tol : float
        Frequency cutoff tolerance in (1e-14, 1e-3).
    xi_cap : float
        Largest admissible frequency cutoff.

    Returns
    -------
    KernelProfile
        The table, with the analytic mass beyond the right edge.

    Raises
    ------
    PreconditionError
        If the parameters are out of range or the cutoff exceeds ``xi_cap``.
    """
    valid_alpha(alpha)
    valid_quad_tol(quad_tol)
    y_grid = valid_grid(y_grid or _default_y_grid(), 4)
    params = FracParams.one_sided(alpha)
    values, imag_residue, xi_max = sample_kernel(params, 1.0, y_grid.x0, y_grid.dx, y_grid.n,
                                                 quad_tol, xi_cap)
    if imag_residue > quad_tol:
        logger.warning('Kernel table alpha=%g has imaginary residue %.3e above tolerance %.1e',
                       alpha, imag_residue, quad_tol)
    mass_beyond = tail_mass(y_grid.x_end, alpha) if y_grid.x_end > 0 else 1.0
    profile = KernelProfile(params, y_grid, values, quad_tol, xi_max, imag_residue, mass_beyond)
    logger.info('Kernel table alpha=%g: %d samples, xi_max=%.3g, mass=%.12f',
                alpha, y_grid.n, xi_max, profile_mass(profile))
    return profile


def profile_mass(profile: KernelProfile) -> float:
    """Trapezoidal mass of the table plus the analytic right-tail mass."""
    values = profile.values
    trapezoid = profile.y_grid.dx * (np.sum(values) - 0.5 * (values[0] + values[-1]))
    return float(trapezoid + profile.tail_mass)


def fitted_tail_exponent(profile: KernelProfile) -> float:
    """Slope of ``log K(1, y)`` against ``log y`` on ``[edge / 2, edge]``.

    Raises
    ------
    PreconditionError
        If the table does not reach positive ``y`` or is not positive there.
    """
    y = profile.y_grid.x
    edge = profile.y_grid.x_end
    window = (y >= edge / 2) & (y <= edge)
    if edge <= 0 or np.count_nonzero(window) < 2 or np.any(profile.values[window] <= 0):
        raise PreconditionError('The table has no positive right tail to fit.')
    return float(np.polyfit(np.log(y[window]), np.log(profile.values[window]), 1)[0])


def _tail_exponent(profile: KernelProfile) -> float:
    return 2.0 + profile.alpha


def _spline(profile: KernelProfile) -> CubicSpline:
    return CubicSpline(profile.y_grid.x, profile.values)


def _profile_eval(profile: KernelProfile, y: FloatArray, derivative: int = 0) -> FloatArray:
    """``K(1, y)`` or its derivative, with the algebraic model outside the table."""
    grid = profile.y_grid
    p = _tail_exponent(profile)
    out = np.empty_like(y)
    inside = (y >= grid.x0) & (y <= grid.x_end)
    out[inside] = _spline(profile)(y[inside], derivative)
    for mask, edge, value in ((y > grid.x_end, grid.x_end, profile.values[-1]),
                              (y < grid.x0, grid.x0, profile.values[0])):
        if not np.any(mask):
            continue
        amplitude = max(float(value), 0.0) * abs(edge) ** p
        magnitude = np.abs(y[mask])
        if derivative:
            out[mask] = -p * amplitude * np.sign(y[mask]) * magnitude ** (-p - 1.0)
        else:
            out[mask] = amplitude * magnitude ** -p
    return out


def kernel_at(t: float, x, profile: KernelProfile):
    """Evaluate ``K(t, x)`` from the table by self-similarity.

    Outside the table ``K(1, y)`` is continued by ``C / |y|^(2 + alpha)``
    matched to the outermost sample.

    Raises
    ------
    PreconditionError
        If t is not positive.
    """
    if not t > 0:
        raise PreconditionError(f't must be positive, got {t}.')
    scale = t ** (-1.0 / (1.0 + profile.alpha))
    y = np.atleast_1d(np.asarray(x, dtype=float)) * scale
    out = scale * _profile_eval(profile, y)
    return out[0] if np.ndim(x) == 0 else out


def kernel_time_derivative(t: float, x, profile: KernelProfile):
    """``dK/dt = -(K + x dK/dx) / ((1 + alpha) t)``."""
    if not t > 0:
        raise PreconditionError(f't must be positive, got {t}.')
    a = 1.0 + profile.alpha
    scale = t ** (-1.0 / a)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    y = x_arr * scale
    k = scale * _profile_eval(profile, y)
    dk = scale ** 2 * _profile_eval(profile, y, derivative=1)
    out = -(k + x_arr * dk) / (a * t)
    return out[0] if np.ndim(x) == 0 else out


def kernel_derivative_l1(t: float, profile: KernelProfile) -> float:
    """Discrete ``||dK(t, .)/dx||_1`` on the table window.

    Scales like ``t^(-1/(1+alpha))``.
    """
    grid = profile.y_grid
    values, _, _ = sample_kernel(profile.params, t, grid.x0, grid.dx, grid.n,
                                 profile.quad_tol, derivative=1)
    return float(grid.dx * np.sum(np.abs(values)))


@lru_cache(maxsize=16)
def derivative_l1_constant(params: FracParams) -> float:
    """``||dK(1, .)/dy||_1``, the constant of ``||dK(t)||_1 = C t^(-1/beta)``."""
    valid_frac_params(params)
    dy = 0.02
    x0 = -20.0 if params.kind is OperatorKind.ONE_SIDED else -200.0
    n = int(round((200.0 - x0) / dy)) + 1
    values, _, _ = sample_kernel(params, 1.0, x0, dy, n, 1e-12, derivative=1)
    return float(dy * np.sum(np.abs(values)))


def _sampled_weights(params: FracParams, t: float, grid: GridSpec,
                     quad_tol: float) -> tuple[FloatArray, float]:
    """Nonnegative kernel weights ``dx K(t, m dx)`` and the mass they miss."""
    n, dx = grid.n, grid.dx
    if grid.periodic:
        values, _, _ = sample_kernel(params, t, 0.0, dx, n, quad_tol, period=n * dx)
        weights = np.clip(values, 0.0, None) * dx
        return weights / np.sum(weights), 0.0
    values, _, _ = sample_kernel(params, t, -n * dx, dx, 2 * n + 1, quad_tol)
    weights = np.clip(values, 0.0, None) * dx
    edge = (n + 0.5) * dx * t ** (-1.0 / params.beta)
    beyond = min(max(tail_mass(edge, params.alpha), 0.0), 1.0) \
        if params.kind is OperatorKind.ONE_SIDED else 0.0
    return weights * ((1.0 - beyond) / np.sum(weights)), beyond


def convolve_with_kernel(u0: Field, t: float, profile: KernelProfile) -> Field:
    """Discrete ``K(t, .) * u0``.

    The kernel is sampled at the grid offsets, clipped to be nonnegative and
    renormalised to unit mass (including the analytic mass beyond the
    sampled offsets on a truncated line). Constants are preserved and the
    sup norm cannot grow.

    Parameters
    ----------
    u0 : Field
        Data on a periodic grid or a truncated line with constant pads.
    t : float
        Time, positive.
    profile : KernelProfile
        Supplies the order and the quadrature tolerance.

    Returns
    -------
    Field
        The convolution at time ``u0.t + t``.

    Raises
    ------
    PreconditionError
        If t is not positive.
    """
    if not t > 0:
        raise PreconditionError(f't must be positive, got {t}.')
    grid = u0.grid
    n = grid.n
    weights, beyond = _sampled_weights(profile.params, t, grid, profile.quad_tol)
    if grid.periodic:
        values = sfft.irfft(sfft.rfft(u0.values) * sfft.rfft(weights), n)
        return Field(u0.t + t, values, grid)
    cumulative = np.cumsum(weights)
    inner = fftconvolve(u0.values, weights)[n:2 * n]
    idx = np.arange(n)
    left_mass = cumulative[-1] - cumulative[idx + n] + beyond
    right_mass = cumulative[idx]
    values = inner + grid.left_pad * left_mass + grid.right_pad * right_mass
    return Field(u0.t + t, values, grid)


def semigroup_defect(alpha: float, a: float, b: float, dx: float = 0.05, size: int = 2 ** 16,
                     window: float = 20.0,
                     quad_tol: float = 1e-12) -> tuple[float, float]:
    """Relative sup-norm defects of the semigroup law.

    Returns
    -------
    tuple[float, float]
        Defect of ``K(a) * K(b)`` against ``K(a + b)`` and of
        ``K(a) * dK(b)`` against ``dK(a + b)``, both relative to the sup of
        the right-hand side on ``|x| <= window``.
    """
    params = FracParams.one_sided(valid_alpha(alpha))
    x0 = -0.5 * size * dx
    period = size * dx

    def sample(t: float, derivative: int = 0) -> FloatArray:
        return sample_kernel(params, t, x0, dx, size, quad_tol, derivative=derivative,
                             period=period)[0]

    x_conv = 2.0 * x0 + dx * np.arange(2 * size - 1)
    mask = np.abs(x_conv) <= window
    x_win = x_conv[mask]
    k_a = sample(a)
    defects = []
    for derivative in (0, 1):
        conv = dx * fftconvolve(k_a, sample(b, derivative))[mask]
        target = sample(a + b, derivative)[np.rint((x_win - x0) / dx).astype(int)]
        defects.append(float(np.max(np.abs(conv - target)) / np.max(np.abs(target))))
    logger.info('Semigroup defect alpha=%g a=%g b=%g: K %.3e, dK %.3e', alpha, a, b, *defects)
    return defects[0], defects[1]


def export_profile_csv(profile: KernelProfile, path: Path) -> Path:
    """Write the table as CSV with columns ``y, K1_y``."""
    return serialize.write_columns(path, {'y': profile.y_grid.x, 'K1_y': profile.values})


def read_profile_csv(path: Path, alpha: float,
                     quad_tol: float = DEFAULTS.quad_tol) -> KernelProfile:
    """Read a table written by :func:`export_profile_csv`."""
    columns = serialize.read_columns(path)
    y, values = columns['y'], columns['K1_y']
    if y.size < 4:
        raise PreconditionError(f'{path} holds fewer than 4 samples.')
    grid = GridSpec(float(y[0]), float((y[-1] - y[0]) / (y.size - 1)), int(y.size))
    params = FracParams.one_sided(valid_alpha(alpha))
    return KernelProfile(params, grid, values, quad_tol,
                         frequency_cutoff(params, 1.0, quad_tol), 0.0,
                         tail_mass(grid.x_end, alpha))
