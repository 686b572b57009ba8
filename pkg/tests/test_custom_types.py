"""Tests for custom_types module"""


import numpy as np
import pytest

from fracwave.constants import FLUXES
from fracwave.custom_types import (Boundary, CheckResult, EntropyPair, ExperimentReport,
                                   FracParams, GridSpec, OperatorKind, RiemannData)


def test_frac_params() -> None:
    """Test fracwave.custom_types.FracParams"""
    # Case 1: The one-sided family as a Riesz-Feller member.
    p = FracParams.one_sided(0.5)
    assert p.kind is OperatorKind.ONE_SIDED
    assert (p.alpha, p.beta, p.gamma) == (0.5, 1.5, 0.5)
    # Case 2: Riesz-Feller parameters carry alpha = beta - 1.
    q = FracParams.riesz_feller(1.5, 0.2)
    assert q.kind is OperatorKind.RIESZ_FELLER
    assert q.alpha == pytest.approx(0.5)
    # Case 3: Immutable properties
    with pytest.raises(AttributeError):
        p.alpha = 0.7  # Trying to modify 'alpha' should raise an AttributeError
    # Case 4: Comparison and equality
    assert FracParams.one_sided(0.5) == p
    assert FracParams.riesz_feller(1.5, 0.5) != p


def test_grid_spec() -> None:
    """Test fracwave.custom_types.GridSpec"""
    # Case 1: Initialization and attribute access
    g = GridSpec(-1.0, 0.5, 5)
    np.testing.assert_allclose(g.x, [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert g.x_end == 1.0
    assert g.boundary is Boundary.TRUNCATED_LINE and not g.periodic
    assert (g.left_pad, g.right_pad) == (0.0, 0.0)
    assert g._replace(boundary=Boundary.PERIODIC).periodic
    # Case 2: Immutable properties
    with pytest.raises(AttributeError):
        g.dx = 0.1  # Trying to modify 'dx' should raise an AttributeError
    # Case 3: Grids are hashable, so operators can be cached per grid.
    assert len({g, GridSpec(-1.0, 0.5, 5), GridSpec(-1.0, 0.5, 6)}) == 2


def test_entropy_pair() -> None:
    """Test fracwave.custom_types.EntropyPair"""
    pair = EntropyPair(0.5, FLUXES['burgers'])
    u = np.array([0.0, 0.5, 1.0])
    np.testing.assert_allclose(pair.eta(u), [0.5, 0.0, 0.5])
    # q(u) = sign(u - k) (f(u) - f(k)) with f(k) = 0.125.
    np.testing.assert_allclose(pair.q(u), [0.125, 0.0, 0.375])


def test_riemann_data() -> None:
    """Test fracwave.custom_types.RiemannData"""
    d = RiemannData(1.0, 0.0)
    assert d.x_jump == 0.0
    assert d == RiemannData(1.0, 0.0, 0.0)


def test_experiment_report() -> None:
    """Test fracwave.custom_types.ExperimentReport"""
    ok = CheckResult('symbol', True, {'min_order': 1.0}, {'min_order': 0.9})
    bad = CheckResult('sweep', False, {}, {}, {'error': 'PreconditionError', 'message': 'dx'})
    # Case 1: The empty report passes.
    assert ExperimentReport(1, ()).passed
    # Case 2: One failure fails the report.
    assert ExperimentReport(1, (ok,)).passed
    assert not ExperimentReport(1, (ok, bad)).passed
    assert ok.error is None
