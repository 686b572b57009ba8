"""Command line front end.

Each subcommand runs one entry point of the package and prints its measured
values as one JSON line on stdout. Exit status: 0 when the checks pass, 1
when a check fails and 2 on usage, config or precondition errors.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from fracwave import config as cfg
from fracwave import experiments, log, serialize
from fracwave.constants import DEFAULTS
from fracwave.custom_types import CliCommand, Subcommand
from fracwave.exceptions import ConvergenceError, PreconditionError
from fracwave.semigroup_kernel import (build_kernel_profile, export_profile_csv,
                                       fitted_tail_exponent, profile_mass)
from fracwave.validate import valid_alpha_string, valid_quad_tol_string
from fracwave.viscous_evolution import evolve, export_trajectory, max_principle_report

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

logger = log.get_logger(__name__)

# Subcommands that run one manifest check on a config file.
CONFIG_CHECKS: dict[Subcommand, str] = {
    Subcommand.CONTRACTION: 'contraction',
    Subcommand.ENTROPY: 'entropy',
    Subcommand.SWEEP: 'sweep',
    Subcommand.TW: 'tw_tails',
}


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter,
                     argparse.RawDescriptionHelpFormatter):
    """Show defaults and keep the schema table as written."""


def _flag(validator: Callable[[str], Any]) -> Callable[[str], Any]:
    """Wrap a ``*_string`` validator so argparse reports the violated precondition."""
    def convert(value: str) -> Any:
        try:
            return validator(value)
        except PreconditionError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    convert.__name__ = validator.__name__.removeprefix('valid_').removesuffix('_string')
    return convert


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per :class:`Subcommand`."""
    parser = argparse.ArgumentParser(
        prog='fracwave',
        description='Fractional regularisations of scalar conservation laws: '
                    'kernels, viscous evolutions, viscosity sweeps and traveling waves.',
        epilog=cfg.SCHEMA_HELP,
        formatter_class=_HelpFormatter)
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v logs progress, -vv adds solver detail.')
    subparsers = parser.add_subparsers(dest='subcommand', required=True,
                                       metavar='subcommand')

    kernel = subparsers.add_parser('kernel', help='Tabulate the kernel K(1, y) to CSV.',
                                   formatter_class=_HelpFormatter)
    kernel.add_argument('--alpha', type=_flag(valid_alpha_string), default=DEFAULTS.alpha,
                        help='Order of the one-sided derivative minus one.')
    kernel.add_argument('--quad-tol', type=_flag(valid_quad_tol_string),
                        default=DEFAULTS.quad_tol, help='Fourier inversion tolerance.')
    kernel.add_argument('--out', type=Path, required=True, help='CSV file to write.')

    helps = {Subcommand.EVOLVE: 'Run one viscous evolution and export the trajectory.',
             Subcommand.CONTRACTION: 'Check L1 contraction of two evolutions.',
             Subcommand.ENTROPY: 'Check Kruzhkov entropy residuals.',
             Subcommand.SWEEP: 'Measure the vanishing-viscosity rate.',
             Subcommand.TW: 'Solve a traveling wave and fit its tails.',
             Subcommand.MANIFEST: 'Run the checks listed in a config and write report.json.'}
    for subcommand, text in helps.items():
        sub = subparsers.add_parser(subcommand.value, help=text, description=text,
                                    epilog=cfg.SCHEMA_HELP, formatter_class=_HelpFormatter)
        sub.add_argument('--config', type=Path, required=True, help='TOML config file.')
        if subcommand is Subcommand.ENTROPY:
            sub.add_argument('--k', type=float, action='append',
                             help='Entropy constant; repeat for several '
                                  '(default: [entropy] k of the config).')
    return parser


def parse_command(argv: Sequence[str] | None = None) -> CliCommand:
    """Parse ``argv`` into a :class:`CliCommand`.

    Raises
    ------
    SystemExit
        On ``--help`` (code 0) and usage errors (code 2), as argparse does.
    """
    options = vars(build_parser().parse_args(argv))
    subcommand = Subcommand(options.pop('subcommand'))
    return CliCommand(subcommand, options)


def _emit(name: str, passed: bool, measured: dict[str, Any],
          tolerances: dict[str, Any] | None = None) -> None:
    payload = {'check': name, 'passed': bool(passed), 'measured': measured,
               'tolerances': tolerances or {}}
    print(json.dumps(serialize.jsonable(payload), sort_keys=True))


def _run_kernel(options: dict[str, Any]) -> bool:
    profile = build_kernel_profile(options['alpha'], quad_tol=options['quad_tol'])
    path = export_profile_csv(profile, Path(options['out']))
    mass_error = abs(profile_mass(profile) - 1.0)
    minimum = float(profile.values.min())
    passed = mass_error <= 1e-6 and minimum >= -1e-6
    _emit('kernel', passed, {'csv': str(path), 'mass_error': mass_error, 'min': minimum,
                             'tail_exponent': fitted_tail_exponent(profile)},
          {'mass_error': 1e-6, 'min': -1e-6})
    return passed


def _run_evolve(options: dict[str, Any]) -> bool:
    config = cfg.load_config(options['config'])
    u0, evolution = experiments.evolution_inputs(config)
    trajectory = evolve(u0, evolution)
    csv_path, json_path = export_trajectory(trajectory, evolution,
                                            cfg.output_dir(config, options['config']),
                                            'evolution')
    report = max_principle_report(trajectory)
    _emit('evolve', report.monotone, {'csv': str(csv_path), 'json': str(json_path),
                                      'steps': len(trajectory) - 1,
                                      'sup_final': report.sup_norms[-1]})
    return report.monotone


def _run_config_check(subcommand: Subcommand, options: dict[str, Any]) -> bool:
    config = cfg.load_config(options['config'])
    if options.get('k'):
        config = {**config, 'entropy': {**cfg.section(config, 'entropy'),
                                        'k': tuple(options['k'])}}
    out_dir = cfg.output_dir(config, options['config'])
    out_dir.mkdir(parents=True, exist_ok=True)
    name = CONFIG_CHECKS[subcommand]
    passed, measured, tolerances = experiments.CHECKS[name](config, out_dir)
    _emit(name, passed, measured, tolerances)
    return bool(passed)


def _run_manifest(options: dict[str, Any]) -> bool:
    report = experiments.run_manifest(options['config'])
    for check in report.checks:
        _emit(check.name, check.passed, check.error or check.measured, check.tolerances)
    return report.passed


def dispatch(command: CliCommand) -> bool:
    """Run ``command``; returns whether its checks passed."""
    logger.info('Running %s', command.subcommand.value)
    if command.subcommand is Subcommand.KERNEL:
        return _run_kernel(command.options)
    if command.subcommand is Subcommand.EVOLVE:
        return _run_evolve(command.options)
    if command.subcommand is Subcommand.MANIFEST:
        return _run_manifest(command.options)
    return _run_config_check(command.subcommand, command.options)


def parse_and_dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and return the exit status.

    Parameters
    ----------
    argv : Sequence[str], optional
        Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns
    -------
    int
        0 on pass, 1 on a failed check or solver failure, 2 on usage, config
        or precondition errors.
    """
    try:
        command = parse_command(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    log.configure(command.options.get('verbose', 0))
    try:
        passed = dispatch(command)
    except (ValueError, FileNotFoundError) as exc:
        print(f'fracwave: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f'fracwave: {exc} {exc.diagnostics}', file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS if passed else EXIT_FAIL
