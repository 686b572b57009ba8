"""Defaults, admissible ranges, tolerances and preset fluxes."""

from typing import Final

import numpy as np

from fracwave.custom_types import Defaults, FluxFn

DEFAULTS: Final[Defaults] = Defaults(alpha=0.5,
                                     quad_tol=1e-10,
                                     cfl=0.4,
                                     y_min=-20.0,
                                     y_max=100.0,
                                     dy=0.05,
                                     xi_cap=1e5,
                                     threads=4)

# Open intervals unless noted.
ALPHA_RANGE: Final[dict] = {'min': 0.0, 'max': 1.0}
BETA_RANGE: Final[dict] = {'min': 1.0, 'max': 2.0}  # max included
CFL_RANGE: Final[dict] = {'min': 0.0, 'max': 1.0}
QUAD_TOL_RANGE: Final[dict] = {'min': 1e-14, 'max': 1e-3}

CONFIG_SCHEMA_VERSION: Final[int] = 1
REPORT_SCHEMA_VERSION: Final[int] = 1

# Environment variable capping worker threads.
THREADS_ENV: Final[str] = 'FRACWAVE_THREADS'

# Relative slack of one-step monotonicity checks.
STEP_SLACK: Final[float] = 1e-8
# Least squares residual accepted for the Riesz-Feller skew coefficients.
SKEW_RESIDUAL_TOL: Final[float] = 1e-6
# Picard increment at which the mild scheme stops.
PICARD_TOL: Final[float] = 1e-8
PICARD_MAX_ITER: Final[int] = 200
# Distance from the background step of the mild scheme to the window edges,
# in units of the step width.
BACKGROUND_WIDTHS: Final[float] = 10.0
# Newton tolerance and iteration cap of the traveling wave solver.
NEWTON_TOL: Final[float] = 1e-10
NEWTON_MAX_ITER: Final[int] = 60
# Ratio of the aliasing period to the sampled window of a kernel table.
ALIAS_FACTOR: Final[int] = 16
MIN_FFT_SIZE: Final[int] = 2 ** 14
# Accepted deviation of a fitted rate from its theoretical value.
RATE_TOLERANCE: Final[float] = 0.1
# Relative spread of local slopes allowed inside a tail fit window.
TAIL_STATIONARITY: Final[float] = 0.05
# Constant in the entropy tolerance C * (dx + dt) * scale.
ENTROPY_TOL_CONSTANT: Final[float] = 1.0
# Grid cells per viscous length required by a sweep.
SWEEP_CELLS_PER_LAYER: Final[int] = 8
# Fewest cells a thinned sweep grid may keep.
SWEEP_MIN_CELLS: Final[int] = 64
# Mittag-Leffler crossover: series below, asymptotics above, blend between.
ML_SERIES_MAX: Final[float] = 5.0
ML_ASYMPTOTIC_MIN: Final[float] = 10.0


def _quartic_inv(s):
    return np.cbrt(np.asarray(s, dtype=float) / 4.0)


FLUXES: Final[dict[str, FluxFn]] = {
    'burgers': FluxFn('burgers',
                      f=lambda u: 0.5 * np.square(u),
                      f_prime=lambda u: np.asarray(u, dtype=float),
                      sonic_point=0.0,
                      f_prime_inv=lambda s: np.asarray(s, dtype=float)),
    'quartic': FluxFn('quartic',
                      f=lambda u: np.power(u, 4),
                      f_prime=lambda u: 4.0 * np.power(u, 3),
                      sonic_point=0.0,
                      f_prime_inv=_quartic_inv),
    'zero': FluxFn('zero',
                   f=lambda u: np.zeros_like(np.asarray(u, dtype=float)),
                   f_prime=lambda u: np.zeros_like(np.asarray(u, dtype=float))),
}
