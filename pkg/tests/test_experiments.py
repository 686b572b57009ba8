"""Tests for experiments.py."""

import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from fracwave import config as cfg
from fracwave.constants import FLUXES, THREADS_ENV
from fracwave.custom_types import (Boundary, EvolutionConfig, Field, FracParams, GridSpec,
                                   RateReport, ReferenceKind, Scheme, SweepConfig, U0Kind, U0Spec)
from fracwave.exceptions import ConfigError, PreconditionError
from fracwave.experiments import (
    CHECKS,
    initial_field,
    log_log_fit,
    monotone_prefix,
    plot_rate_fit,
    point_grid,
    reference_fields,
    required_dx,
    run_manifest,
    symbol_orders,
    time_scaling_report,
    viscosity_sweep,
    windowed_convergence,
    worker_count)
from fracwave.serialize import read_report_json
from fracwave.traveling_wave import solve_profile

STEP = U0Spec(U0Kind.SMOOTHED_STEP, 1.0, 0.0, width=0.0)


def sweep_config(alpha: float = 0.75, epsilons=(0.4, 0.2, 0.1), dx: float = 0.005,
                 x0: float = -1.0, x_end: float = 2.0, t_eval: float = 0.25,
                 u0_spec: U0Spec = STEP,
                 reference: ReferenceKind = ReferenceKind.EXACT_RIEMANN,
                 refine: int = 8) -> SweepConfig:
    """Burgers sweep on a truncated line with pads 1 and 0."""
    grid = GridSpec(x0, dx, int(round((x_end - x0) / dx)) + 1, Boundary.TRUNCATED_LINE,
                    1.0, 0.0)
    base = EvolutionConfig(epsilon=epsilons[0], t_end=t_eval, cfl=0.4,
                           scheme=Scheme.METHOD_OF_LINES, grid=grid,
                           params=FracParams.one_sided(alpha), flux=FLUXES['burgers'])
    return SweepConfig(tuple(epsilons), base, u0_spec, t_eval, reference, refine)


@pytest.fixture(name='fast_report', scope='module')
def fixture_fast_report():
    """Sweep at alpha = 0.75 against the exact Riemann solution."""
    return viscosity_sweep(sweep_config())


def frozen_run(u0: Field, config: EvolutionConfig):
    """Stand-in for evolve that keeps the initial data until t_end."""
    return (u0, Field(config.t_end, u0.values, u0.grid))


def write_config(path, body: str):
    """Write a TOML config with the current schema version."""
    path.write_text('schema_version = 1\n' + body, encoding='utf-8')
    return path


def test_worker_count(monkeypatch) -> None:
    """Test the thread cap read from the environment."""
    # Case 1: Explicit count.
    monkeypatch.setenv(THREADS_ENV, '3')
    assert worker_count() == 3
    # Case 2: Unset falls back to the core count.
    monkeypatch.delenv(THREADS_ENV)
    with patch('fracwave.experiments.os.cpu_count', return_value=6):
        assert worker_count() == 6


@pytest.mark.parametrize('value', ['abc', '0', '-2', '1.5'])
def test_worker_count_invalid(monkeypatch, value) -> None:
    """Test invalid thread counts are config errors."""
    monkeypatch.setenv(THREADS_ENV, value)
    with pytest.raises(ConfigError, match=THREADS_ENV):
        worker_count()


def test_initial_field() -> None:
    """Test sampling of sweep initial data."""
    grid = GridSpec(-1.0, 0.25, 9)
    # Case 1: A pure step is sampled as cell averages.
    field = initial_field(STEP, grid)
    np.testing.assert_allclose(field.values, [1, 1, 1, 1, 0.5, 0, 0, 0, 0])
    assert (field.grid.left_pad, field.grid.right_pad) == (1.0, 0.0)
    # Case 2: Smoothed steps are monotone between the far-field states.
    smooth = initial_field(STEP._replace(width=0.2, u_left=2.0), grid).values
    assert np.all(np.diff(smooth) < 0) and 0.0 < smooth[-1] < smooth[0] < 2.0
    # Case 3: Bumps vanish outside their support and peak at amp.
    bump = initial_field(U0Spec(U0Kind.BUMP, amp=0.7, width=0.5), grid)
    assert bump.values[4] == pytest.approx(0.7)
    assert np.all(bump.values[np.abs(grid.x) >= 0.5] == 0.0)
    assert (bump.grid.left_pad, bump.grid.right_pad) == (0.0, 0.0)
    # Case 4: Custom values are taken as given.
    custom = initial_field(U0Spec(U0Kind.CUSTOM, values=tuple(range(9))), grid)
    np.testing.assert_array_equal(custom.values, np.arange(9.0))
    # Case 5: Periodic grids keep their topology.
    periodic = GridSpec(-1.0, 0.25, 8, Boundary.PERIODIC)
    assert initial_field(STEP, periodic).grid == periodic


def test_initial_field_rejects() -> None:
    """Test malformed initial data."""
    grid = GridSpec(-1.0, 0.25, 9)
    with pytest.raises(PreconditionError):
        initial_field(U0Spec(U0Kind.BUMP, width=0.0), grid)
    with pytest.raises(PreconditionError, match='9 nodes'):
        initial_field(U0Spec(U0Kind.CUSTOM, values=(1.0, 2.0)), grid)


def test_required_dx() -> None:
    """Test the resolution requirement eps_min^(1/alpha) / 8."""
    # Case 1: One-sided alpha = 0.5.
    config = sweep_config(alpha=0.5, epsilons=(0.2, 0.1, 0.05, 0.025))
    assert required_dx(config) == pytest.approx(0.025 ** 2 / 8)
    # Case 2: Riesz-Feller uses beta - 1.
    params = FracParams.riesz_feller(1.5, 0.2)
    config = config._replace(base=config.base._replace(params=params))
    assert required_dx(config) == pytest.approx(0.025 ** 2 / 8)


def test_point_grid() -> None:
    """Test each viscosity runs on the coarsest thinned grid resolving its layer."""
    config = sweep_config(alpha=0.5, epsilons=(0.2, 0.1, 0.05, 0.025), x0=-0.5, x_end=1.0,
                          dx=0.5 / 6400)
    grids = [point_grid(config, eps) for eps in config.epsilons]
    # Case 1: Strides 64, 16, 4 and 1 keep dx <= eps^2 / 8.
    assert [g.n for g in grids] == [301, 1201, 4801, 19201]
    for eps, grid in zip(config.epsilons, grids):
        assert grid.dx <= eps ** 2 / 8 * (1 + 1e-12)
        assert grid.x0 == config.base.grid.x0
        assert grid.x_end == pytest.approx(config.base.grid.x_end)
    # Case 2: An odd number of cells cannot be thinned.
    odd = sweep_config(x_end=2.005)
    assert odd.base.grid.n == 602
    assert point_grid(odd, 0.4) == odd.base.grid
    # Case 3: At least 64 cells remain.
    small = sweep_config(x0=0.0, x_end=0.64)
    assert point_grid(small, 0.4).n == 65


@pytest.mark.parametrize('changes, message', [
    ({'epsilons': (0.2,)}, 'at least 3'),
    ({'epsilons': (0.2, 0.1)}, 'at least 3'),
    ({'epsilons': (0.1, 0.2, 0.05)}, 'decreasing'),
    ({'epsilons': (0.4, 0.2, 0.0)}, 'positive'),
    ({'dx': 0.05}, 'dx <= '),
    ({'reference': ReferenceKind.GODUNOV, 'refine': 2}, 'refine=2'),
    ({'u0_spec': STEP._replace(width=0.1)}, 'pure step'),
    ({'u0_spec': U0Spec(U0Kind.CUSTOM)}, 'smoothed step or a bump'),
    ({'t_eval': 0.0}, 't_eval'),
])
def test_viscosity_sweep_rejects(changes, message) -> None:
    """Test sweep preconditions are checked before any run."""
    with patch('fracwave.experiments.evolve') as mock_evolve:
        with pytest.raises(PreconditionError, match=message):
            viscosity_sweep(sweep_config(**changes))
        mock_evolve.assert_not_called()


@pytest.mark.timeout(120)
def test_viscosity_sweep(fast_report) -> None:
    """Test a small sweep against the exact reference."""
    report = fast_report
    assert isinstance(report, RateReport)
    # Case 1: Errors are positive and decrease with eps.
    assert np.all(report.l1_errors > 0)
    assert np.all(np.diff(report.l1_errors) < 0)
    assert report.monotone_prefix == 3
    # Case 2: The theoretical rate is 1 / (alpha + 1).
    assert report.theoretical_rate == pytest.approx(1 / 1.75)
    assert 0.2 < report.fitted_rate < 1.2
    assert 0.9 < report.r_squared <= 1.0
    # Case 3: The BV seminorm of a monotone step is preserved.
    np.testing.assert_allclose(report.bv_seminorms, 1.0, atol=1e-6)
    # Case 4: The exact reference has no floor.
    assert report.floor_flags == (False, False, False)
    assert report.rate_matched == (abs(report.fitted_rate - report.theoretical_rate) <= 0.1)


def test_viscosity_sweep_refits_prefix(caplog) -> None:
    """Test non-monotone errors are refit on the decreasing prefix."""
    errors = iter([0.4, 0.2, 0.3])
    with patch('fracwave.experiments.l1_distance', side_effect=lambda *_: next(errors)), \
            patch('fracwave.experiments.evolve', side_effect=frozen_run):
        report = viscosity_sweep(sweep_config(t_eval=0.25))
    assert report.monotone_prefix == 2
    assert report.fitted_rate == pytest.approx(1.0)
    assert 'stop decreasing' in caplog.text


def test_viscosity_sweep_no_decrease() -> None:
    """Test errors growing from the first point are a convergence failure."""
    errors = iter([0.1, 0.2, 0.3])
    with patch('fracwave.experiments.l1_distance', side_effect=lambda *_: next(errors)), \
            patch('fracwave.experiments.evolve', side_effect=frozen_run):
        with pytest.raises(RuntimeError, match='do not decrease'):
            viscosity_sweep(sweep_config())


def test_reference_fields() -> None:
    """Test the Godunov reference and its floor estimate."""
    config = sweep_config(u0_spec=STEP._replace(width=0.05), reference=ReferenceKind.GODUNOV,
                          refine=4)
    grid = initial_field(config.u0_spec, config.base.grid).grid
    fields, floor = reference_fields(config, grid, (0.125, 0.25))
    # Case 1: One field per time on the sweep grid.
    assert [f.t for f in fields] == [0.125, 0.25]
    assert all(f.grid == grid for f in fields)
    # Case 2: The entropy solution stays within the data range.
    assert all(np.min(f.values) >= -1e-12 and np.max(f.values) <= 1 + 1e-12 for f in fields)
    # Case 3: The floor is small but positive.
    assert 0.0 < floor < 1e-2
    # Case 4: The exact reference has no floor.
    _, exact_floor = reference_fields(sweep_config(), grid, (0.25,))
    assert exact_floor == 0.0


def test_monotone_prefix() -> None:
    """Test the leading strictly decreasing run."""
    assert monotone_prefix(np.array([3.0, 2.0, 1.0])) == 3
    assert monotone_prefix(np.array([3.0, 2.0, 2.5, 1.0])) == 2
    assert monotone_prefix(np.array([1.0, 1.0])) == 1
    assert monotone_prefix(np.array([5.0])) == 1


def test_log_log_fit() -> None:
    """Test the slope of an exact power law."""
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    slope, r_squared = log_log_fit(eps, 3.0 * eps ** 0.6)
    assert slope == pytest.approx(0.6)
    assert r_squared == pytest.approx(1.0)
    # Case 2: Noise lowers the coefficient of determination.
    _, noisy = log_log_fit(eps, eps ** 0.6 * np.array([1.0, 1.3, 0.8, 1.2]))
    assert noisy < 1.0


@pytest.mark.timeout(120)
def test_time_scaling_report() -> None:
    """Test errors grow with t no faster than the bound allows."""
    report = time_scaling_report(sweep_config(t_eval=0.2))
    assert report.bound_ratio == pytest.approx(2.0 ** (1 / 1.75))
    assert np.all(report.error_ratios > 0)
    assert report.within_bound
    with pytest.raises(PreconditionError):
        time_scaling_report(sweep_config(), factor=0.0)


@pytest.mark.timeout(120)
def test_windowed_convergence() -> None:
    """Test windowed errors decrease along the sweep."""
    report = windowed_convergence(sweep_config(), (-0.5, 1.0))
    assert report.window == (-0.5, 1.0)
    assert report.sup_errors.shape == (3,)
    assert report.monotone
    # Case 2: The window must not be empty.
    with pytest.raises(PreconditionError, match='empty'):
        windowed_convergence(sweep_config(), (1.0, 1.0))


def test_sweep_points_use_own_grids() -> None:
    """Test every point evolves and is compared on its thinned grid."""
    config = sweep_config()
    with patch('fracwave.experiments.evolve', side_effect=frozen_run) as mock_evolve:
        report = windowed_convergence(config, (-0.5, 1.0), samples=1)
    grids = {call.args[1].epsilon: call.args[0].grid for call in mock_evolve.call_args_list}
    # Case 1: eps = 0.4 takes every 4th node, eps = 0.2 every 2nd and eps = 0.1 all.
    assert [grids[eps].dx for eps in config.epsilons] == pytest.approx([0.02, 0.01, 0.005])
    assert all(call.args[1].grid == call.args[0].grid for call in mock_evolve.call_args_list)
    # Case 2: Frozen data lag the shock by the same area on every grid.
    np.testing.assert_allclose(report.sup_errors, 0.125, rtol=1e-6)


@pytest.mark.parametrize('params', [FracParams.one_sided(0.5),
                                    FracParams.riesz_feller(1.5, 0.0)])
def test_symbol_orders(params) -> None:
    """Test the discrete symbol converges at first order."""
    orders = symbol_orders(params)
    assert orders.shape == (3, 2)
    assert np.all(orders >= 0.9)


def test_plot_rate_fit(tmp_path) -> None:
    """Test the SVG rate plot."""
    eps = np.array([0.4, 0.2, 0.1])
    report = RateReport(eps, eps ** 0.5, 0.5, 1 / 1.75, 1.0, np.ones(3), True, True, 3,
                        (False,) * 3)
    # Case 1: Without matplotlib nothing is written.
    with patch.dict('sys.modules', {'matplotlib.figure': None}):
        assert plot_rate_fit(report, tmp_path / 'none.svg') is None
    assert not (tmp_path / 'none.svg').exists()
    # Case 2: With matplotlib an SVG is written.
    pytest.importorskip('matplotlib')
    path = plot_rate_fit(report, tmp_path / 'rate.svg')
    assert path is not None and '<svg' in path.read_text(encoding='utf-8')


def test_run_manifest_empty(tmp_path) -> None:
    """Test an empty check list gives an empty passing report."""
    path = write_config(tmp_path / 'empty.toml', '[checks]\nrun = []\n')
    report = run_manifest(path)
    assert report.checks == () and report.passed
    stored = read_report_json(tmp_path / 'out' / 'report.json')
    assert stored.checks == () and stored.passed


def test_run_manifest_unknown_check(tmp_path) -> None:
    """Test unknown check names are rejected before running."""
    path = write_config(tmp_path / 'bad.toml', '[checks]\nrun = ["symbol", "magic"]\n')
    with pytest.raises(ConfigError, match='magic'):
        run_manifest(path)
    assert not (tmp_path / 'out').exists()


def test_run_manifest_missing(tmp_path) -> None:
    """Test a missing config names the path."""
    with pytest.raises(FileNotFoundError, match='nowhere.toml'):
        run_manifest(tmp_path / 'nowhere.toml')


def test_run_manifest_structured_error(tmp_path) -> None:
    """Test an under-resolved sweep becomes a structured error in the report."""
    path = write_config(tmp_path / 'coarse.toml', """
[checks]
run = ["sweep", "symbol"]
[output]
dir = "results"
[grid]
x0 = -1.0
x_end = 2.0
dx = 0.05
[operator]
alpha = 0.5
[evolution]
epsilon = 0.1
t_end = 0.5
[initial]
kind = "smoothed_step"
[sweep]
epsilons = [0.2, 0.1, 0.05]
t_eval = 0.5
reference = "exact_riemann"
""")
    report = run_manifest(path)
    assert not report.passed
    sweep, symbol = report.checks
    # Case 1: The rejection is recorded with its type and required dx.
    assert not sweep.passed
    assert sweep.error['error'] == 'PreconditionError'
    assert 'dx <= ' in sweep.error['message']
    # Case 2: Later checks still run.
    assert symbol.passed and symbol.error is None
    # Case 3: The report is written next to the config.
    payload = json.loads((tmp_path / 'results' / 'report.json').read_text(encoding='utf-8'))
    assert payload['passed'] is False
    assert [c['name'] for c in payload['checks']] == ['sweep', 'symbol']


def test_run_manifest_sweep_repeats(tmp_path) -> None:
    """Test repeat_alphas reruns the sweep with one-sided operators of those orders."""
    path = write_config(tmp_path / 'repeat.toml', """
[checks]
run = ["sweep"]
[grid]
x0 = -1.0
x_end = 2.0
dx = 0.05
[evolution]
epsilon = 0.1
t_end = 0.5
[sweep]
epsilons = [0.4, 0.2, 0.1]
t_eval = 0.25
reference = "exact_riemann"
dx = 0.005
repeat_alphas = [0.75]
""")
    orders = []

    def fake_sweep(config: SweepConfig) -> RateReport:
        alpha = config.base.params.beta - 1.0
        orders.append(alpha)
        eps = np.array(config.epsilons)
        return RateReport(eps, eps, 1.0, 1 / (alpha + 1), 1.0, np.ones(3), alpha < 0.6, False,
                          3, (False,) * 3)

    with patch('fracwave.experiments.viscosity_sweep', side_effect=fake_sweep):
        report = run_manifest(path)
    (sweep,) = report.checks
    # Case 1: The [operator] sweep runs first, then each repeat.
    assert orders == pytest.approx([0.5, 0.75])
    assert set(sweep.measured['repeats']) == {'alpha=0.75'}
    # Case 2: Each repeat writes its own series.
    assert (tmp_path / 'out' / 'sweep.csv').exists()
    assert (tmp_path / 'out' / 'sweep_alpha0.75.csv').exists()
    # Case 3: A failing repeat fails the check.
    assert not sweep.passed


def test_run_manifest_reproducible(tmp_path) -> None:
    """Test a rerun of one manifest writes a byte-identical report."""
    path = write_config(tmp_path / 'twice.toml', '[checks]\nrun = ["symbol"]\n')
    report = run_manifest(path)
    first = (tmp_path / 'out' / 'report.json').read_bytes()
    run_manifest(path)
    assert (tmp_path / 'out' / 'report.json').read_bytes() == first
    assert 'seconds' not in report.checks[0].measured


def test_checks_registry() -> None:
    """Test every documented check is registered."""
    assert set(CHECKS) == {'kernel', 'semigroup', 'symbol', 'max_principle', 'contraction',
                           'entropy', 'sweep', 'time_scaling', 'windowed', 'tw_tails',
                           'mittag_leffler'}


def test_default_manifest() -> None:
    """Test the shipped manifest runs every check at the acceptance parameters."""
    config = cfg.load_config(Path(__file__).parents[1] / 'configs' / 'default.toml')
    # Case 1: Every registered check is listed.
    assert set(cfg.check_names(config)) == set(CHECKS)
    # Case 2: The evolution runs eps = 0.1 on 1024 nodes.
    evolution = cfg.build_evolution(config)
    assert (evolution.epsilon, evolution.grid.n) == (0.1, 1024)
    # Case 3: The sweep reaches eps = 0.025 on a grid resolving it and repeats at 0.75.
    sweep = cfg.build_sweep(config)
    assert sweep.epsilons == (0.2, 0.1, 0.05, 0.025)
    assert sweep.base.grid.dx <= required_dx(sweep) * (1 + 1e-12)
    assert config['sweep']['repeat_alphas'] == (0.75,)
    # Case 4: The traveling wave amplitudes cover eps down to 0.25.
    assert config['tw']['epsilons'] == (1.0, 0.5, 0.25)


@pytest.mark.timeout(120)
def test_run_manifest_mittag_leffler(tmp_path) -> None:
    """Test the Mittag-Leffler check passes at its defaults."""
    path = write_config(tmp_path / 'ml.toml',
                        '[checks]\nrun = ["mittag_leffler"]\n[mittag_leffler]\n'
                        'alphas = [0.5, 0.75]\nmu = -0.5\n')
    report = run_manifest(path)
    assert report.passed, report.checks[0].measured


@pytest.mark.timeout(300)
def test_run_manifest_tw_tails(tmp_path) -> None:
    """Test every traveling wave amplitude comes from a solve on the configured window."""
    path = write_config(tmp_path / 'tw.toml', """
[checks]
run = ["tw_tails"]
[tw]
epsilons = [1.0, 0.5]
x0 = -60.0
x_end = 1500.0
dx = 0.25
""")
    with patch('fracwave.experiments.solve_profile', side_effect=solve_profile) as mock_solve:
        report = run_manifest(path)
    (check,) = report.checks
    # Case 1: Both viscosities are solved on one unscaled grid.
    specs = [call.args[0] for call in mock_solve.call_args_list]
    assert [spec.epsilon for spec in specs] == [1.0, 0.5]
    assert specs[0].grid == specs[1].grid
    # Case 2: The amplitude ratio is measured, not implied by the scaling.
    ratios = check.measured['amplitude_ratios']
    assert ratios[0] == 1.0
    assert ratios[1] == pytest.approx(1.0, rel=0.2) and ratios[1] != 1.0
    assert check.passed, check.measured

@pytest.mark.slow
@pytest.mark.timeout(3600)
@pytest.mark.parametrize('alpha', [0.5, 0.75])
def test_viscosity_sweep_acceptance(alpha) -> None:
    """Test the fitted rate of a step 1 -> 0 at t = 0.5 is within 0.1 of 1/(alpha+1)."""
    epsilons = (0.2, 0.1, 0.05, 0.025)
    layer = required_dx(sweep_config(alpha=alpha, epsilons=epsilons))
    # The window holds 75 * 2^k cells so every point grid is a thinning.
    cells = 25 * 2 ** int(np.ceil(np.log2(0.5 / (25 * layer))))
    config = sweep_config(alpha=alpha, epsilons=epsilons, t_eval=0.5, x0=-0.5, x_end=1.0,
                          dx=0.5 / cells)
    report = viscosity_sweep(config)
    assert report.bound_satisfied
    assert abs(report.fitted_rate - 1.0 / (alpha + 1.0)) <= 0.1
