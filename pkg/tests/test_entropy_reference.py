"""Tests for entropy_reference.py."""

import numpy as np
import pytest

from fracwave.constants import FLUXES
from fracwave.custom_types import Boundary, Field, FluxFn, GridSpec, RiemannData
from fracwave.entropy_reference import (
    exact_riemann,
    exact_riemann_cells,
    godunov_contraction,
    godunov_convergence,
    godunov_evolve,
    godunov_flux,
    l1_order,
    prolong,
    refine_grid,
    restrict,
    riemann_field,
    shock_speed)
from fracwave.exceptions import PreconditionError

BURGERS = FLUXES['burgers']
SHOCK = RiemannData(1.0, 0.0, 0.0)
FAN = RiemannData(0.0, 1.0, 0.0)


def line(x0: float, x1: float, dx: float) -> GridSpec:
    """Truncated line with unit-free pads."""
    return GridSpec(x0, dx, int(round((x1 - x0) / dx)) + 1, Boundary.TRUNCATED_LINE)


def test_godunov_flux() -> None:
    """Test the convex Godunov flux."""
    # Case 1: Transonic rarefaction picks the sonic minimum.
    assert godunov_flux(np.array(-1.0), np.array(1.0), BURGERS) == 0.0
    # Case 2: Shock takes the larger flux.
    assert godunov_flux(np.array(1.0), np.array(-0.5), BURGERS) == 0.5
    # Case 3: Supersonic states upwind.
    assert godunov_flux(np.array(0.5), np.array(1.0), BURGERS) == 0.125
    assert godunov_flux(np.array(-1.0), np.array(-0.5), BURGERS) == 0.125
    # Case 4: Consistency.
    u = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(godunov_flux(u, u, BURGERS), 0.5 * u ** 2)


def test_exact_riemann() -> None:
    """Test exact_riemann examples."""
    # Case 1: t = 0 returns the data, left closed at the jump.
    x = np.array([-1.0, 0.0, 1e-12, 1.0])
    np.testing.assert_array_equal(exact_riemann(SHOCK, BURGERS, 0.0, x), [1.0, 1.0, 0.0, 0.0])
    # Case 2: On the shock line the left value is returned.
    assert exact_riemann(SHOCK._replace(x_jump=0.25), BURGERS, 2.0, 1.25) == 1.0
    assert exact_riemann(SHOCK._replace(x_jump=0.25), BURGERS, 2.0, 1.26) == 0.0
    # Case 3: Inside the fan u = x / t.
    assert exact_riemann(FAN, BURGERS, 1.0, 0.5) == pytest.approx(0.5)
    assert exact_riemann(FAN, BURGERS, 1.0, -0.1) == 0.0
    assert exact_riemann(FAN, BURGERS, 1.0, 1.1) == 1.0
    # Case 4: Quartic fan inverts 4 u^3.
    quartic = FLUXES['quartic']
    assert exact_riemann(FAN, quartic, 1.0, 0.5) == pytest.approx((0.5 / 4.0) ** (1.0 / 3.0))


def test_exact_riemann_rejects() -> None:
    """Test exact_riemann preconditions."""
    # Case 1: Negative time.
    with pytest.raises(PreconditionError):
        exact_riemann(SHOCK, BURGERS, -1.0, 0.0)
    # Case 2: Fan without inverse derivative.
    with pytest.raises(PreconditionError) as exc_info:
        exact_riemann(FAN, BURGERS._replace(f_prime_inv=None), 1.0, 0.0)
    assert 'inverse derivative' in str(exc_info.value)
    # Case 3: Equal states.
    with pytest.raises(PreconditionError):
        exact_riemann(RiemannData(1.0, 1.0), BURGERS, 1.0, 0.0)
    # Case 4: Nonconvex flux.
    with pytest.raises(PreconditionError):
        exact_riemann(SHOCK, BURGERS._replace(convex=False), 1.0, 0.0)


def test_shock_speed() -> None:
    """Test the Rankine-Hugoniot speed."""
    assert shock_speed(SHOCK, BURGERS) == 0.5
    assert shock_speed(RiemannData(1.0, -1.0), BURGERS) == 0.0
    assert shock_speed(SHOCK, FLUXES['quartic']) == 1.0


def test_godunov_constant() -> None:
    """Test that constant data stay constant."""
    grid = GridSpec(0.0, 0.1, 32, Boundary.TRUNCATED_LINE, 0.4, 0.4)
    trajectory = godunov_evolve(Field(0.0, np.full(32, 0.4), grid), BURGERS, 1.0, 0.9)
    for field in trajectory:
        np.testing.assert_allclose(field.values, 0.4, rtol=1e-14)


def test_godunov_shock_location() -> None:
    """Test that the Burgers shock sits at x_jump + 1/2 at t = 1."""
    dx = 0.01
    data = SHOCK._replace(x_jump=0.2)
    u0 = riemann_field(data, BURGERS, line(-1.0, 2.0, dx))
    final = godunov_evolve(u0, BURGERS, 1.0, 0.9, (1.0,))[-1]
    assert final.t == 1.0
    crossing = final.grid.x[np.argmax(final.values < 0.5)]
    assert abs(crossing - 0.7) <= 2 * dx
    # Case 2: Monotone data stay monotone, and within the data range.
    assert np.all(np.diff(final.values) <= 1e-14)
    assert np.all((final.values >= -1e-14) & (final.values <= 1.0 + 1e-14))


def test_godunov_rarefaction() -> None:
    """Test the L1 error against the exact fan."""
    errors = []
    for dx in (0.02, 0.01):
        u0 = riemann_field(FAN, BURGERS, line(-1.0, 2.0, dx))
        final = godunov_evolve(u0, BURGERS, 1.0, 0.9, (1.0,))[-1]
        exact = exact_riemann_cells(FAN, BURGERS, final.grid, 1.0)
        error = dx * float(np.sum(np.abs(final.values - exact)))
        assert error <= 2.0 * dx * (1.0 + np.log(1.0 / dx))
        errors.append(error)
    assert errors[1] < errors[0]


def test_godunov_convergence() -> None:
    """Test the empirical L1 order for shock data."""
    dxs, errors, order = godunov_convergence(SHOCK, BURGERS, line(-1.0, 2.0, 0.04), 1.0)
    assert dxs.tolist() == pytest.approx([0.04, 0.02, 0.01])
    assert np.all(np.diff(errors) < 0)
    assert order >= 0.5


def test_godunov_contraction() -> None:
    """Test L1 contraction between two Godunov trajectories."""
    grid = line(-1.0, 2.0, 0.02)._replace(left_pad=1.0, right_pad=0.0)
    u0 = Field(0.0, 0.5 * (1.0 - np.tanh(grid.x / 0.1)), grid)
    v0 = Field(0.0, 0.5 * (1.0 - np.tanh((grid.x - 0.3) / 0.2)), grid)
    report = godunov_contraction(u0, v0, BURGERS, 1.0, 0.9)
    assert report.contractive
    assert np.all(np.diff(report.bv_seminorms) <= 1e-12)
    # Case 2: Pad mismatch.
    with pytest.raises(PreconditionError):
        godunov_contraction(u0, Field(0.0, v0.values, grid._replace(right_pad=0.5)),
                            BURGERS, 1.0, 0.9)


def test_godunov_rejects() -> None:
    """Test godunov_evolve preconditions."""
    grid = GridSpec(0.0, 0.1, 8)
    u0 = Field(0.0, np.zeros(8), grid)
    nonconvex = FluxFn('cubic', lambda u: u ** 3, lambda u: 3 * u ** 2, convex=False)
    with pytest.raises(PreconditionError) as exc_info:
        godunov_evolve(u0, nonconvex, 1.0, 0.5)
    assert 'convex' in str(exc_info.value)
    with pytest.raises(PreconditionError):
        godunov_evolve(u0, BURGERS, 1.0, 1.5)
    with pytest.raises(PreconditionError):
        godunov_evolve(u0, BURGERS, 0.0, 0.5)


def test_refine_restrict() -> None:
    """Test the grid transfer helpers."""
    coarse = GridSpec(0.0, 1.0, 4, Boundary.TRUNCATED_LINE, 1.0, 0.0)
    fine = refine_grid(coarse, 4)
    # Case 1: Fine cells tile the coarse cells.
    assert fine.n == 16
    assert fine.x[:4].mean() == pytest.approx(coarse.x[0])
    # Case 2: Restriction inverts prolongation and conserves mass.
    field = Field(0.0, np.array([1.0, 0.5, 0.25, 0.0]), coarse)
    np.testing.assert_allclose(restrict(prolong(field, 4), coarse).values, field.values)
    random = Field(0.0, np.random.default_rng(1).random(16), fine)
    assert np.sum(restrict(random, coarse).values) * coarse.dx == pytest.approx(
        np.sum(random.values) * fine.dx)
    # Case 3: Misaligned grids.
    with pytest.raises(PreconditionError):
        restrict(Field(0.0, np.zeros(16), fine._replace(x0=0.0)), coarse)


def test_l1_order() -> None:
    """Test l1_order."""
    assert l1_order([0.1, 0.05, 0.025], [0.2, 0.1, 0.05]) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        l1_order([0.1], [0.2])
