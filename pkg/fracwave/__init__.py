"""fracwave.

This package provides numerical tools for scalar conservation laws
regularised by a fractional derivative,

    u_t + f(u)_x = eps * D^(1+alpha) u,

where D^(1+alpha) is the one-sided Caputo-type derivative of order 1 + alpha,
or more generally a Riesz-Feller operator of order beta in (1, 2] and skewness
gamma. It checks, at desk scale, the quantitative behaviour of such problems:
properties of the semigroup kernel, the maximum principle, L1 contraction,
entropy inequalities, the vanishing-viscosity rate eps^(1/(alpha+1)) and the
tails of traveling waves.

Usage
-----
fracwave is run from a terminal window with:

    `python3 -m fracwave <subcommand> [options]`

or, once installed, simply `fracwave <subcommand> [options]`. For example:

    `fracwave kernel --alpha 0.5 --out k.csv`
    `fracwave manifest --config configs/default.toml`

To view the subcommands and the config file schema, enter:

    `python3 -m fracwave --help`

Dependencies
------------
- Python 3.11 or later (`tomllib` reads the config files).
- numpy: arrays and FFTs.
- scipy: special functions, FFT convolution, splines and quadrature.
- mpmath: high precision Mittag-Leffler series.
- matplotlib (optional, `plot` extra): SVG figure of the rate fit.

Package Structure
-----------------
The package is organized as follows:

- `__init__.py`: This file; an overview of the package.
- `__main__.py`: Entry point for the module.
- `cli_io.py`: Command line parsing and dispatch.
- `config.py`: TOML run configurations and their schema.
- `constants.py`: Default values, admissible ranges, tolerances and preset fluxes.
- `custom_types.py`: Type definitions for type hints.
- `exceptions.py`: Precondition, config and convergence errors.
- `log.py`: Package loggers.
- `validate.py`: Validation functions.
- `serialize.py`: CSV and JSON files.
- `fractional_ops.py`: Grunwald-Letnikov discretisations of the fractional operators.
- `semigroup_kernel.py`: The kernel K(t, x) of the linear fractional semigroup.
- `viscous_evolution.py`: Time integration of the regularised problem and its diagnostics.
- `entropy_reference.py`: Exact Riemann solutions and the Godunov scheme.
- `traveling_wave.py`: Traveling wave profiles, tail fits and Mittag-Leffler bounds.
- `experiments.py`: Viscosity sweeps and the reproduction manifest.

Implementation Details
----------------------
- The kernel K(1, y) is obtained by Fourier inversion of exp((i xi)^(1+alpha))
  and tabulated once per alpha; K(t, x) follows by self-similarity.
- Evolutions use the method of lines (local Lax-Friedrichs flux, Heun steps)
  or a mild formulation solved by Picard iteration on the exact semigroup.
- Viscosity sweeps run their viscosities concurrently in a thread pool capped
  by the FRACWAVE_THREADS environment variable.
- Traveling waves are solved by Newton's method on a causal discretisation
  pinned by a phase condition; tails are compared with exp(lambda xi) on the
  left and with a Mittag-Leffler function on the right.

File formats are described in docs/formats.md.

License
-------
Distributed under the MIT License. Please see the LICENSE
file for more information.
"""
