"""Type definitions shared across fracwave.

All records are immutable ``NamedTuple`` values. Array-valued fields hold
``numpy`` arrays that callers must treat as read-only.
"""

from enum import Enum
from typing import Any, Callable, NamedTuple

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
ScalarFn = Callable[[Any], Any]


class OperatorKind(Enum):
    """Family of the nonlocal operator."""

    ONE_SIDED = 'one_sided'
    RIESZ_FELLER = 'riesz_feller'


class Side(Enum):
    """Direction of the memory of a one-sided operator."""

    LEFT = 'left'
    RIGHT = 'right'


class Boundary(Enum):
    """Grid topology."""

    PERIODIC = 'periodic'
    TRUNCATED_LINE = 'truncated_line'


class Scheme(Enum):
    """Time integrator used by the viscous evolution."""

    METHOD_OF_LINES = 'method_of_lines'
    MILD_FIXED_POINT = 'mild_fixed_point'


class ReferenceKind(Enum):
    """Source of the entropy reference in a viscosity sweep."""

    GODUNOV = 'godunov'
    EXACT_RIEMANN = 'exact_riemann'


class U0Kind(Enum):
    """Shape of sweep initial data."""

    SMOOTHED_STEP = 'smoothed_step'
    BUMP = 'bump'
    CUSTOM = 'custom'


class Subcommand(Enum):
    """Command line subcommands."""

    KERNEL = 'kernel'
    EVOLVE = 'evolve'
    CONTRACTION = 'contraction'
    ENTROPY = 'entropy'
    SWEEP = 'sweep'
    TW = 'tw'
    MANIFEST = 'manifest'


class FracParams(NamedTuple):
    """Parameters of a fractional operator.

    The one-sided operator of order ``alpha`` is the Riesz-Feller operator
    with ``beta = 1 + alpha`` and ``gamma = 1 - alpha``; both fields are kept
    so that either family can be addressed uniformly.
    """

    kind: OperatorKind
    alpha: float
    beta: float
    gamma: float

    @classmethod
    def one_sided(cls, alpha: float) -> 'FracParams':
        """Return parameters of the one-sided derivative of order ``1 + alpha``."""
        return cls(OperatorKind.ONE_SIDED, alpha, 1.0 + alpha, 1.0 - alpha)

    @classmethod
    def riesz_feller(cls, beta: float, gamma: float) -> 'FracParams':
        """Return parameters of a Riesz-Feller operator."""
        return cls(OperatorKind.RIESZ_FELLER, beta - 1.0, beta, gamma)


class GridSpec(NamedTuple):
    """Uniform grid ``x_i = x0 + i * dx`` for ``i = 0 .. n - 1``.

    On a truncated line the field is extended by the constants ``left_pad``
    and ``right_pad`` outside the window.
    """

    x0: float
    dx: float
    n: int
    boundary: Boundary = Boundary.TRUNCATED_LINE
    left_pad: float = 0.0
    right_pad: float = 0.0

    @property
    def x(self) -> FloatArray:
        """Node coordinates."""
        return self.x0 + self.dx * np.arange(self.n, dtype=float)

    @property
    def x_end(self) -> float:
        """Coordinate of the last node."""
        return self.x0 + self.dx * (self.n - 1)

    @property
    def periodic(self) -> bool:
        """True for periodic grids."""
        return self.boundary is Boundary.PERIODIC


class Field(NamedTuple):
    """Sampled state at time ``t``."""

    t: float
    values: FloatArray
    grid: GridSpec


Trajectory = tuple[Field, ...]


class OperatorWeights(NamedTuple):
    """Discrete weights of a fractional operator.

    ``normalization`` holds ``(d_alpha,)`` for the one-sided family and the
    skew pair ``(c_left, c_right)`` for the Riesz-Feller family.
    """

    params: FracParams
    dx: float
    weights: FloatArray
    normalization: tuple[float, ...]


class KernelProfile(NamedTuple):
    """Tabulated ``K(1, y)`` on a uniform ``y`` window."""

    params: FracParams
    y_grid: GridSpec
    values: FloatArray
    quad_tol: float
    xi_max: float
    imag_residue: float
    tail_mass: float

    @property
    def alpha(self) -> float:
        """Order of the underlying one-sided operator."""
        return self.params.alpha


class FluxFn(NamedTuple):
    """Flux function with the derivatives the solvers need.

    ``sonic_point`` is the minimiser of a convex flux (``None`` when the
    flux is monotone on the line). ``f_prime_inv`` inverts ``f'`` and is
    required for exact rarefactions.
    """

    label: str
    f: ScalarFn
    f_prime: ScalarFn
    convex: bool = True
    sonic_point: float | None = None
    f_prime_inv: ScalarFn | None = None


class EvolutionConfig(NamedTuple):
    """Settings of one viscous evolution.

    An empty ``output_times`` records every time step. ``dt`` overrides the
    CFL step and is rejected when it exceeds the stable step.
    """

    epsilon: float
    t_end: float
    cfl: float
    scheme: Scheme
    grid: GridSpec
    params: FracParams
    flux: FluxFn
    output_times: tuple[float, ...] = ()
    dt: float | None = None


class EntropyPair(NamedTuple):
    """Kruzhkov entropy ``|u - k|`` with flux ``sign(u - k)(f(u) - f(k))``."""

    k: float
    flux: FluxFn

    def eta(self, u: Any) -> Any:
        """Entropy density."""
        return np.abs(u - self.k)

    def q(self, u: Any) -> Any:
        """Entropy flux."""
        return np.sign(u - self.k) * (self.flux.f(u) - self.flux.f(self.k))


class SpaceTimeBump(NamedTuple):
    """Smooth nonnegative test function with compact support.

    ``phi(t, x) = b((t - t_center) / t_half) * b((x - x_center) / x_half)``
    with ``b(s) = exp(-1 / (1 - s^2))`` on ``|s| < 1``.
    """

    t_center: float
    t_half: float
    x_center: float
    x_half: float


class MaxPrincipleReport(NamedTuple):
    """Sup norms along a trajectory."""

    times: FloatArray
    sup_norms: FloatArray
    monotone: bool


class ContractionReport(NamedTuple):
    """L1 distance of two trajectories sharing boundary pads."""

    times: FloatArray
    l1_distances: FloatArray
    contractive: bool
    bv_seminorms: FloatArray


class RiemannData(NamedTuple):
    """Piecewise constant data with a single jump."""

    u_left: float
    u_right: float
    x_jump: float = 0.0


class TWSpec(NamedTuple):
    """Traveling wave problem connecting ``phi_minus`` to ``phi_plus``."""

    flux: FluxFn
    phi_minus: float
    phi_plus: float
    epsilon: float
    grid: GridSpec
    alpha: float


class TWProfile(NamedTuple):
    """Converged traveling wave profile."""

    spec: TWSpec
    values: FloatArray
    residual_norm: float
    phase_anchor: float
    iterations: int


class TailFit(NamedTuple):
    """Fitted tail behaviour of a traveling wave."""

    lambda_fit: float
    alpha_fit: float
    left_window: tuple[float, float]
    right_window: tuple[float, float]
    right_amplitude: float


class SandwichReport(NamedTuple):
    """Comparison of the right tail with the Mittag-Leffler lower bound."""

    z: FloatArray
    tail: FloatArray
    lower_bound: FloatArray
    holds: bool
    min_margin: float
    two_sided_constant: float


class U0Spec(NamedTuple):
    """Initial data of a viscosity sweep."""

    kind: U0Kind
    u_left: float = 1.0
    u_right: float = 0.0
    width: float = 0.0
    amp: float = 1.0
    center: float = 0.0
    values: tuple[float, ...] = ()


class SweepConfig(NamedTuple):
    """Viscosity sweep settings.

    ``base`` supplies grid, operator, flux, cfl and scheme; its epsilon and
    end time are replaced per run.
    """

    epsilons: tuple[float, ...]
    base: EvolutionConfig
    u0_spec: U0Spec
    t_eval: float
    reference: ReferenceKind = ReferenceKind.GODUNOV
    refine: int = 8


class RateReport(NamedTuple):
    """Outcome of a viscosity sweep."""

    epsilons: FloatArray
    l1_errors: FloatArray
    fitted_rate: float
    theoretical_rate: float
    r_squared: float
    bv_seminorms: FloatArray
    bound_satisfied: bool
    rate_matched: bool
    monotone_prefix: int
    floor_flags: tuple[bool, ...]


class TimeScalingReport(NamedTuple):
    """Sweep errors at ``t_eval`` and ``factor * t_eval``."""

    epsilons: FloatArray
    error_ratios: FloatArray
    bound_ratio: float
    within_bound: bool


class WindowedConvergence(NamedTuple):
    """Sup over output times of windowed L1 errors along a sweep."""

    epsilons: FloatArray
    window: tuple[float, float]
    sup_errors: FloatArray
    monotone: bool


class CheckResult(NamedTuple):
    """Outcome of one manifest check."""

    name: str
    passed: bool
    measured: dict[str, Any]
    tolerances: dict[str, Any]
    error: dict[str, str] | None = None


class ExperimentReport(NamedTuple):
    """Outcome of a manifest run."""

    schema_version: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(check.passed for check in self.checks)


class CliCommand(NamedTuple):
    """One parsed command line: a subcommand and its validated flags."""

    subcommand: Subcommand
    options: dict[str, Any]


class Defaults(NamedTuple):
    """Default values for fracwave.

    Provides immutable encapsulation of constants.
    """

    alpha: float
    quad_tol: float
    cfl: float
    y_min: float
    y_max: float
    dy: float
    xi_cap: float
    threads: int
