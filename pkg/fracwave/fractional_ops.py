"""Discrete fractional operators.

The one-sided operator ``dx D^alpha`` of order ``1 + alpha`` is discretised by
shifted Grunwald-Letnikov sums

    A[u](x) = dx^-(1+alpha) * sum_k w_k u(x + (1 - k) dx),

whose Fourier multiplier on ``exp(i xi x)`` is
``dx^-(1+alpha) exp(i xi dx) (1 - exp(-i xi dx))^(1+alpha)`` and tends to
``(i xi)^(1+alpha)``. The right-sided (adjoint) operator is the mirror image.
A Riesz-Feller operator is the nonnegative combination
``c_left * left + c_right * right`` of one-sided operators of order ``beta``.

Periodic grids apply the infinite-memory sums exactly through the FFT. On a
truncated line the memory inside the window is summed in full and the sums
over the constant pads are closed with partial sums of the weights.
"""

import math
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.special import rgamma

from fracwave.constants import SKEW_RESIDUAL_TOL
from fracwave.custom_types import (Field, FloatArray, FracParams, GridSpec, OperatorKind,
                                   OperatorWeights, Side)
from fracwave.exceptions import ConvergenceError, PreconditionError
from fracwave.log import get_logger
from fracwave.validate import valid_alpha, valid_frac_params, valid_grid

logger = get_logger(__name__)


def binomial_weights(order: float, count: int) -> FloatArray:
    """Return ``(-1)^k binom(order, k)`` for ``k = 0 .. count - 1``.

    Uses the recurrence ``w_k = w_{k-1} (k - 1 - order) / k``.
    """
    k = np.arange(1, count, dtype=float)
    return np.concatenate(([1.0], np.cumprod((k - 1.0 - order) / k)))


def gl_weights(alpha: float, count: int) -> FloatArray:
    """Grunwald-Letnikov weights of the symbol ``(1 - z)^(1 + alpha)``.

    Parameters
    ----------
    alpha : float
        Order in (0, 1).
    count : int
        Number of weights, at least 2.

    Returns
    -------
    FloatArray
        ``w_0 = 1, w_1 = -(1 + alpha)`` and ``w_k >= 0`` for ``k >= 2``.

    Raises
    ------
    PreconditionError
        If count < 2 or alpha is outside (0, 1).
    """
    if count < 2:
        raise PreconditionError(f'count must be at least 2, got {count}.')
    valid_alpha(alpha)
    return binomial_weights(1.0 + alpha, count)


def _principal_power(z, p: float):
    """``z^p`` on the principal branch with ``0^p = 0``."""
    z = np.asarray(z, dtype=complex)
    return np.abs(z) ** p * np.exp(1j * p * np.angle(z))


def exact_symbol(xi, params: FracParams):
    """Fourier multiplier of the continuous operator on ``exp(i xi x)``.

    Parameters
    ----------
    xi : float or array_like
        Frequencies.
    params : FracParams
        Operator parameters.

    Returns
    -------
    complex or ndarray
        ``(i xi)^(1 + alpha)`` for the one-sided family and
        ``-|xi|^beta exp(-i sign(xi) gamma pi / 2)`` for Riesz-Feller.
        The real part is never positive.

    Notes
    -----
    The Riesz-Feller symbol is read in the characteristic function convention,
    so its multiplier on ``exp(i xi x)`` carries ``-sign(xi)``. With this
    reading the one-sided operator of order ``alpha`` coincides with
    Riesz-Feller parameters ``(1 + alpha, 1 - alpha)``.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if params.kind is OperatorKind.ONE_SIDED:
        out = _principal_power(1j * xi_arr, 1.0 + params.alpha)
    else:
        out = (-np.abs(xi_arr) ** params.beta
               * np.exp(-1j * np.sign(xi_arr) * params.gamma * math.pi / 2.0))
    return out[()] if out.ndim == 0 else out


def _left_multiplier(xi, order: float, dx: float):
    xi = np.asarray(xi, dtype=float)
    return dx ** -order * np.exp(1j * xi * dx) * _principal_power(1.0 - np.exp(-1j * xi * dx),
                                                                  order)


@lru_cache(maxsize=64)
def skew_coefficients(beta: float, gamma: float) -> tuple[float, float]:
    """Weights of the left and right one-sided operators of order ``beta``.

    Parameters
    ----------
    beta : float
        Order in (1, 2].
    gamma : float
        Skewness with ``|gamma| <= 2 - beta``.

    Returns
    -------
    tuple[float, float]
        ``(c_left, c_right)``, both nonnegative, such that
        ``c_left (i xi)^beta + c_right (-i xi)^beta`` is the Riesz-Feller symbol.

    Raises
    ------
    ConvergenceError
        If the closed form fails the least squares symbol match on [-8, 8].
    """
    valid_frac_params(FracParams.riesz_feller(beta, gamma))
    if math.isclose(beta, 2.0):
        c_left = c_right = 0.5
    else:
        theta = beta * math.pi / 2.0
        total = -math.cos(gamma * math.pi / 2.0) / math.cos(theta)
        diff = math.sin(gamma * math.pi / 2.0) / math.sin(theta)
        c_left, c_right = 0.5 * (total + diff), 0.5 * (total - diff)
    c_left, c_right = (0.0 if abs(c) < 1e-14 else c for c in (c_left, c_right))

    xi = np.linspace(-8.0, 8.0, 161)
    basis = np.column_stack([_principal_power(1j * xi, beta), _principal_power(-1j * xi, beta)])
    target = exact_symbol(xi, FracParams.riesz_feller(beta, gamma))
    fitted, *_ = np.linalg.lstsq(basis, target, rcond=None)
    mismatch = basis @ np.array([c_left, c_right]) - target
    residual = np.linalg.norm(mismatch) / np.linalg.norm(target)
    drift = float(np.max(np.abs(fitted - np.array([c_left, c_right]))))
    if residual > SKEW_RESIDUAL_TOL or drift > SKEW_RESIDUAL_TOL or min(c_left, c_right) < 0:
        raise ConvergenceError('Skew coefficients do not reproduce the Riesz-Feller symbol.',
                               {'beta': beta, 'gamma': gamma, 'residual': residual,
                                'least_squares': fitted.tolist()})
    logger.debug('skew coefficients beta=%g gamma=%g: (%.15g, %.15g), residual %.2e',
                 beta, gamma, c_left, c_right, residual)
    return c_left, c_right


def operator_skew(params: FracParams) -> tuple[float, float]:
    """``(c_left, c_right)`` for any operator family."""
    if params.kind is OperatorKind.ONE_SIDED:
        return 1.0, 0.0
    return skew_coefficients(params.beta, params.gamma)


def discrete_symbol(xi, params: FracParams, dx: float, side: Side | None = None):
    """Exact Fourier multiplier of the discrete operator.

    Parameters
    ----------
    xi : float or array_like
        Frequencies.
    params : FracParams
        Operator parameters.
    dx : float
        Grid spacing.
    side : Side, optional
        Restrict to the left or right one-sided part; the default combines
        both with the skew coefficients.

    Returns
    -------
    complex or ndarray
        Multiplier on ``exp(i xi x)``.
    """
    left = _left_multiplier(xi, params.beta, dx)
    if side is Side.LEFT:
        out = left
    elif side is Side.RIGHT:
        out = np.conj(left)
    else:
        c_left, c_right = operator_skew(params)
        out = c_left * left + c_right * np.conj(left)
    return out[()] if np.ndim(out) == 0 else out


def symbol_bound(params: FracParams, dx: float) -> float:
    """Largest magnitude of the discrete multiplier, ``(c_l + c_r) (2 / dx)^beta``."""
    c_left, c_right = operator_skew(params)
    return (c_left + c_right) * (2.0 / dx) ** params.beta


class FractionalOperator:
    """Discrete fractional operator bound to one grid.

    Parameters
    ----------
    params : FracParams
        Operator parameters.
    grid : GridSpec
        Grid the operator acts on.
    order : float, optional
        Order of the one-sided sums. Defaults to ``params.beta``; the
        un-differentiated derivative uses ``alpha`` with zero shift.
    shift : int
        1 for the shifted sums of order ``1 + alpha``, 0 otherwise.
    """

    def __init__(self, params: FracParams, grid: GridSpec,
                 order: float | None = None, shift: int = 1) -> None:
        valid_frac_params(params)
        valid_grid(grid, 4)
        self.params = params
        self.grid = grid
        self.order = params.beta if order is None else order
        self.shift = shift
        self.c_left, self.c_right = operator_skew(params) if shift else (1.0, 0.0)
        self._scale = grid.dx ** -self.order
        n = grid.n
        if grid.periodic:
            xi = 2.0 * math.pi * sfft.rfftfreq(n, d=grid.dx)
            left = (np.exp(1j * shift * xi * grid.dx)
                    * _principal_power(1.0 - np.exp(-1j * xi * grid.dx), self.order))
            self._left_hat = self._scale * left
        else:
            self.weights = binomial_weights(self.order, n + 1)
            self._partial = np.cumsum(self.weights)
            self._size = sfft.next_fast_len(2 * n + 1, real=True)
            self._weights_hat = sfft.rfft(self.weights, self._size)

    def _check(self, values: FloatArray) -> FloatArray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.grid.n,):
            size = values.shape[0] if values.ndim else 0
            raise PreconditionError(f'Field has {size} values, grid has {self.grid.n}.')
        return values

    def _periodic(self, values: FloatArray, multiplier) -> FloatArray:
        return sfft.irfft(sfft.rfft(values) * multiplier, self.grid.n)

    def _left(self, values: FloatArray, left_pad: float, right_pad: float) -> FloatArray:
        n, s = self.grid.n, self.shift
        ext = np.append(values, right_pad) if s else values
        conv = sfft.irfft(sfft.rfft(ext, self._size) * self._weights_hat, self._size)[s:n + s]
        return self._scale * (conv - left_pad * self._partial[s:n + s])

    def _right(self, values: FloatArray, left_pad: float, right_pad: float) -> FloatArray:
        return self._left(values[::-1], right_pad, left_pad)[::-1]

    def apply(self, values: FloatArray, side: Side | None = None,
              adjoint: bool = False) -> FloatArray:
        """Apply the operator (or its transpose) to grid values.

        Parameters
        ----------
        values : FloatArray
            Samples at the grid nodes.
        side : Side, optional
            Apply only the left or right one-sided part.
        adjoint : bool
            Swap the left and right parts.

        Returns
        -------
        FloatArray
            Operator values at the grid nodes.
        """
        values = self._check(values)
        c_left, c_right = {Side.LEFT: (1.0, 0.0), Side.RIGHT: (0.0, 1.0)}.get(
            side, (self.c_left, self.c_right))
        if adjoint:
            c_left, c_right = c_right, c_left
        if self.grid.periodic:
            multiplier = c_left * self._left_hat + c_right * np.conj(self._left_hat)
            return self._periodic(values, multiplier)
        pads = (self.grid.left_pad, self.grid.right_pad)
        out = np.zeros(self.grid.n)
        if c_left:
            out += c_left * self._left(values, *pads)
        if c_right:
            out += c_right * self._right(values, *pads)
        return out

    __call__ = apply


@lru_cache(maxsize=32)
def fractional_operator(params: FracParams, grid: GridSpec) -> FractionalOperator:
    """Cached shifted operator of order ``beta`` on ``grid``."""
    return FractionalOperator(params, grid)


@lru_cache(maxsize=32)
def _caputo_operator(alpha: float, grid: GridSpec) -> FractionalOperator:
    return FractionalOperator(FracParams.one_sided(alpha), grid, order=alpha, shift=0)


def build_operator_weights(params: FracParams, grid: GridSpec) -> OperatorWeights:
    """Weights and normalisation of the operator on ``grid``.

    ``normalization`` is ``(1 / Gamma(1 - alpha),)`` for the one-sided family
    and ``(c_left, c_right)`` for Riesz-Feller parameters.
    """
    valid_frac_params(params)
    valid_grid(grid, 4)
    weights = binomial_weights(params.beta, grid.n + 1)
    if params.kind is OperatorKind.ONE_SIDED:
        normalization: tuple[float, ...] = (float(rgamma(1.0 - params.alpha)),)
    else:
        normalization = skew_coefficients(params.beta, params.gamma)
    return OperatorWeights(params, grid.dx, weights, normalization)


def _require_kind(params: FracParams, kind: OperatorKind) -> None:
    if params.kind is not kind:
        raise PreconditionError(f'Expected {kind.value} parameters, got {params.kind.value}.')


def _apply(u: Field, params: FracParams, grid: GridSpec, side: Side | None,
           adjoint: bool = False) -> Field:
    if u.grid != grid:
        raise PreconditionError('Field grid does not match the operator grid.')
    values = fractional_operator(params, grid).apply(u.values, side=side, adjoint=adjoint)
    return Field(u.t, values, grid)


def apply_dx_caputo(u: Field, params: FracParams, grid: GridSpec) -> Field:
    """Left-sided operator ``dx D^alpha`` of order ``1 + alpha``.

    Raises
    ------
    PreconditionError
        If params are not one-sided or the field does not live on ``grid``.
    """
    _require_kind(params, OperatorKind.ONE_SIDED)
    return _apply(u, params, grid, Side.LEFT)


def apply_dx_caputo_adjoint(u: Field, params: FracParams, grid: GridSpec) -> Field:
    """Right-sided operator, the transpose of :func:`apply_dx_caputo`."""
    _require_kind(params, OperatorKind.ONE_SIDED)
    return _apply(u, params, grid, Side.RIGHT)


def apply_riesz_feller(u: Field, params: FracParams, grid: GridSpec) -> Field:
    """Riesz-Feller operator ``c_left * left + c_right * right`` of order ``beta``.

    Raises
    ------
    PreconditionError
        If the parameters violate ``1 < beta <= 2`` or ``|gamma| <= 2 - beta``.
    """
    _require_kind(params, OperatorKind.RIESZ_FELLER)
    return _apply(u, params, grid, None)


def apply_operator(u: Field, params: FracParams, grid: GridSpec) -> Field:
    """Regularising operator of either family."""
    return _apply(u, params, grid, None)


def apply_adjoint(u: Field, params: FracParams, grid: GridSpec) -> Field:
    """Transpose of :func:`apply_operator`."""
    return _apply(u, params, grid, None, adjoint=True)


def apply_caputo(u: Field, alpha: float, grid: GridSpec) -> Field:
    """Un-differentiated derivative ``D^alpha`` of order ``alpha``.

    Uses the difference quotient form
    ``dx^-alpha * sum_{k>=1} g_k (u(x - k dx) - u(x))`` with
    ``g_k = (-1)^k binom(alpha, k)``, the discrete Weyl-Marchaud integral.
    Exponentials are eigenfunctions: ``exp(lam x)`` maps to
    ``((1 - exp(-lam dx)) / dx)^alpha exp(lam x)``.
    """
    valid_alpha(alpha)
    if u.grid != grid:
        raise PreconditionError('Field grid does not match the operator grid.')
    return Field(u.t, _caputo_operator(alpha, grid).apply(u.values), grid)


def convexity_defect(phi: Field, params: FracParams, grid: GridSpec) -> FloatArray:
    """Pointwise ``A[phi^2] - 2 phi A[phi]``.

    Nonnegative for the continuous operator (convexity of ``u^2``); the
    discrete defect may dip below zero by O(dx) quadrature error only.
    """
    square = Field(phi.t, np.square(phi.values), phi.grid._replace(
        left_pad=phi.grid.left_pad ** 2, right_pad=phi.grid.right_pad ** 2))
    a_square = fractional_operator(params, square.grid).apply(square.values)
    a_phi = fractional_operator(params, grid).apply(phi.values)
    return a_square - 2.0 * phi.values * a_phi
