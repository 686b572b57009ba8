"""Tests for cli_io.py."""

import json
from unittest.mock import MagicMock, patch

import pytest

from fracwave.cli_io import (EXIT_FAIL, EXIT_PASS, EXIT_USAGE, build_parser, parse_and_dispatch,
                             parse_command)
from fracwave.constants import DEFAULTS
from fracwave.custom_types import Subcommand
from fracwave.exceptions import ConvergenceError, PreconditionError
from fracwave.serialize import read_columns

EVOLVE_CONFIG = """schema_version = 1
[output]
dir = "results"
[grid]
x0 = -2.0
x_end = 2.0
dx = 0.05
[operator]
alpha = 0.5
[evolution]
epsilon = 0.1
t_end = 0.1
output_times = [0.05]
[initial]
kind = "bump"
width = 1.0
[entropy]
k = [0.25]
t_center = 0.05
t_half = 0.04
x_center = 0.0
x_half = 1.5
"""


@pytest.fixture(name='config_path')
def fixture_config_path(tmp_path):
    """Small evolution config in a temporary folder."""
    path = tmp_path / 'run.toml'
    path.write_text(EVOLVE_CONFIG, encoding='utf-8')
    return path


def last_json(text: str) -> dict:
    """Parse the last JSON line printed."""
    return json.loads(text.strip().splitlines()[-1])


def test_parse_command() -> None:
    """Test subcommands and their validated flags."""
    # Case 1: kernel with defaults.
    command = parse_command(['kernel', '--out', 'k.csv'])
    assert command.subcommand is Subcommand.KERNEL
    assert command.options['alpha'] == DEFAULTS.alpha
    assert command.options['quad_tol'] == DEFAULTS.quad_tol
    assert str(command.options['out']) == 'k.csv'
    # Case 2: Repeated entropy constants.
    command = parse_command(['-v', 'entropy', '--config', 'c.toml', '--k', '0.2', '--k', '0.4'])
    assert command.subcommand is Subcommand.ENTROPY
    assert command.options['k'] == [0.2, 0.4]
    assert command.options['verbose'] == 1
    # Case 3: Every subcommand is registered.
    for subcommand in Subcommand:
        args = ['--out', 'x.csv'] if subcommand is Subcommand.KERNEL else ['--config', 'c.toml']
        assert parse_command([subcommand.value, *args]).subcommand is subcommand


@pytest.mark.parametrize('argv, message', [
    (['kernel', '--alpha', '1.5', '--out', 'k.csv'], 'alpha must lie strictly between'),
    (['kernel', '--alpha', 'half', '--out', 'k.csv'], "invalid alpha value: 'half'"),
    (['kernel', '--quad-tol', '0.5', '--out', 'k.csv'], 'quad_tol must lie in'),
    (['kernel', '--alpha', '0.5'], '--out'),
    (['sweep'], '--config'),
    (['sweep', '--config', 'c.toml', '--speed', '3'], 'unrecognized arguments'),
    (['plot'], 'invalid choice'),
    ([], 'subcommand'),
])
def test_usage_errors(argv, message, capsys) -> None:
    """Test usage errors exit with status 2 and name the problem."""
    assert parse_and_dispatch(argv) == EXIT_USAGE
    assert message in capsys.readouterr().err


def test_help_prints_schema(capsys) -> None:
    """Test --help lists the config schema and exits 0."""
    assert parse_and_dispatch(['--help']) == EXIT_PASS
    out = capsys.readouterr().out
    assert 'schema_version' in out and '[sweep]' in out
    # Case 2: Subcommand help shows the schema too.
    assert parse_and_dispatch(['sweep', '--help']) == EXIT_PASS
    assert '[sweep]' in capsys.readouterr().out


def test_build_parser() -> None:
    """Test the parser keeps the schema table unwrapped."""
    help_text = build_parser().format_help()
    assert '  [tw]              flux, phi_minus' in help_text


@pytest.mark.timeout(60)
def test_kernel(tmp_path, capsys) -> None:
    """Test kernel --alpha 0.5 --out writes the profile CSV."""
    path = tmp_path / 'k.csv'
    assert parse_and_dispatch(['kernel', '--alpha', '0.5', '--out', str(path)]) == EXIT_PASS
    columns = read_columns(path)
    assert list(columns) == ['y', 'K1_y']
    result = last_json(capsys.readouterr().out)
    assert result['check'] == 'kernel' and result['passed']
    assert result['measured']['mass_error'] <= 1e-6


def test_missing_config(tmp_path, capsys) -> None:
    """Test sweep --config missing.toml exits 2 naming the path."""
    missing = tmp_path / 'missing.toml'
    assert parse_and_dispatch(['sweep', '--config', str(missing)]) == EXIT_USAGE
    assert 'missing.toml' in capsys.readouterr().err


def test_invalid_config(tmp_path, capsys) -> None:
    """Test schema violations exit 2."""
    path = tmp_path / 'bad.toml'
    path.write_text('schema_version = 1\n[grid]\nspacing = 1\n', encoding='utf-8')
    assert parse_and_dispatch(['tw', '--config', str(path)]) == EXIT_USAGE
    assert 'spacing' in capsys.readouterr().err


@pytest.mark.timeout(60)
def test_evolve(config_path, capsys) -> None:
    """Test evolve exports the trajectory next to the config."""
    assert parse_and_dispatch(['evolve', '--config', str(config_path)]) == EXIT_PASS
    results = config_path.parent / 'results'
    assert (results / 'evolution.csv').is_file()
    assert (results / 'evolution.json').is_file()
    result = last_json(capsys.readouterr().out)
    assert result['check'] == 'evolve' and result['passed']
    assert result['measured']['steps'] == 2


@pytest.mark.parametrize('outcome, status', [
    ((True, {'value': 1.0}, {}), EXIT_PASS),
    ((False, {'value': 2.0}, {'value': 1.0}), EXIT_FAIL),
])
def test_config_check_status(config_path, outcome, status, capsys) -> None:
    """Test single-check subcommands map the check outcome to the exit status."""
    check = MagicMock(return_value=outcome)
    with patch.dict('fracwave.experiments.CHECKS', {'contraction': check}):
        assert parse_and_dispatch(['contraction', '--config', str(config_path)]) == status
    config, out_dir = check.call_args.args
    assert config['evolution']['epsilon'] == 0.1
    assert out_dir == config_path.resolve().parent / 'results'
    assert last_json(capsys.readouterr().out)['measured'] == outcome[1]


def test_entropy_k_override(config_path) -> None:
    """Test --k replaces the entropy constants of the config."""
    check = MagicMock(return_value=(True, {}, {}))
    with patch.dict('fracwave.experiments.CHECKS', {'entropy': check}):
        argv = ['entropy', '--config', str(config_path), '--k', '0.1', '--k', '0.6']
        assert parse_and_dispatch(argv) == EXIT_PASS
    config, _ = check.call_args.args
    assert config['entropy']['k'] == (0.1, 0.6)
    assert config['entropy']['x_half'] == 1.5


@pytest.mark.parametrize('error, status', [
    (PreconditionError('dx <= 0.001 is required.'), EXIT_USAGE),
    (ConvergenceError('Newton stagnated.', {'iterations': 60}), EXIT_FAIL),
])
def test_check_errors(config_path, error, status, capsys) -> None:
    """Test exceptions raised by a check map to exit statuses."""
    check = MagicMock(side_effect=error)
    with patch.dict('fracwave.experiments.CHECKS', {'tw_tails': check}):
        assert parse_and_dispatch(['tw', '--config', str(config_path)]) == status
    assert str(error) in capsys.readouterr().err


def test_manifest(tmp_path, capsys) -> None:
    """Test manifest exit status mirrors the aggregate result."""
    path = tmp_path / 'manifest.toml'
    # Case 1: Empty check list.
    path.write_text('schema_version = 1\n[checks]\nrun = []\n', encoding='utf-8')
    assert parse_and_dispatch(['manifest', '--config', str(path)]) == EXIT_PASS
    assert (tmp_path / 'out' / 'report.json').is_file()
    # Case 2: One failing check.
    path.write_text('schema_version = 1\n[checks]\nrun = ["symbol", "kernel"]\n',
                    encoding='utf-8')
    checks = {'symbol': MagicMock(return_value=(True, {}, {})),
              'kernel': MagicMock(return_value=(False, {'min': -1.0}, {}))}
    capsys.readouterr()
    with patch.dict('fracwave.experiments.CHECKS', checks):
        assert parse_and_dispatch(['manifest', '--config', str(path)]) == EXIT_FAIL
    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [(r['check'], r['passed']) for r in lines] == [('symbol', True), ('kernel', False)]
    # Case 3: Unknown checks are config errors.
    path.write_text('schema_version = 1\n[checks]\nrun = ["magic"]\n', encoding='utf-8')
    assert parse_and_dispatch(['manifest', '--config', str(path)]) == EXIT_USAGE


def test_verbosity(config_path) -> None:
    """Test -v flags set the log level."""
    with patch('fracwave.cli_io.log.configure') as mock_configure, \
            patch('fracwave.cli_io.dispatch', return_value=True):
        assert parse_and_dispatch(['-vv', 'sweep', '--config', str(config_path)]) == EXIT_PASS
    mock_configure.assert_called_once_with(2)
