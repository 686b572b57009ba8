"""Run configuration files.

Configurations are TOML documents with a mandatory integer
``schema_version``. Every table and key is listed in ``SCHEMA``; anything
else is rejected. Builders turn the checked document into the typed records
of :mod:`fracwave.custom_types`; numeric preconditions are left to the
modules that own them.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from fracwave.constants import CONFIG_SCHEMA_VERSION, DEFAULTS, FLUXES
from fracwave.custom_types import (Boundary, EvolutionConfig, FracParams, FluxFn, GridSpec,
                                   OperatorKind, ReferenceKind, Scheme, SpaceTimeBump,
                                   SweepConfig, TWSpec, U0Kind, U0Spec)
from fracwave.exceptions import ConfigError
from fracwave.log import get_logger

logger = get_logger(__name__)

Table = dict[str, Any]

NUMBER = 'number'
TEXT = 'text'
NUMBERS = 'number list'
TEXTS = 'text list'

SCHEMA: dict[str, dict[str, str]] = {
    'output': {'dir': TEXT},
    'checks': {'run': TEXTS},
    'kernel': {'alphas': NUMBERS, 'quad_tol': NUMBER, 'y_min': NUMBER, 'y_max': NUMBER,
               'dy': NUMBER},
    'grid': {'x0': NUMBER, 'x_end': NUMBER, 'dx': NUMBER, 'boundary': TEXT,
             'left_pad': NUMBER, 'right_pad': NUMBER},
    'operator': {'kind': TEXT, 'alpha': NUMBER, 'beta': NUMBER, 'gamma': NUMBER},
    'flux': {'name': TEXT},
    'evolution': {'epsilon': NUMBER, 't_end': NUMBER, 'cfl': NUMBER, 'scheme': TEXT,
                  'output_times': NUMBERS, 'dt': NUMBER},
    'initial': {'kind': TEXT, 'u_left': NUMBER, 'u_right': NUMBER, 'width': NUMBER,
                'amp': NUMBER, 'center': NUMBER, 'values': NUMBERS},
    'contraction': {'shift': NUMBER, 'width': NUMBER},
    'entropy': {'k': NUMBERS, 't_center': NUMBER, 't_half': NUMBER, 'x_center': NUMBER,
                'x_half': NUMBER},
    'sweep': {'epsilons': NUMBERS, 't_eval': NUMBER, 'reference': TEXT, 'refine': NUMBER,
              'x0': NUMBER, 'x_end': NUMBER, 'dx': NUMBER, 'time_factor': NUMBER,
              'window': NUMBERS, 'repeat_alphas': NUMBERS},
    'tw': {'flux': TEXT, 'phi_minus': NUMBER, 'phi_plus': NUMBER, 'alpha': NUMBER,
           'epsilons': NUMBERS, 'x0': NUMBER, 'x_end': NUMBER, 'dx': NUMBER},
    'mittag_leffler': {'alphas': NUMBERS, 'mu': NUMBER},
}

SCHEMA_HELP = f"""\
config schema (TOML, schema_version = {CONFIG_SCHEMA_VERSION}):
  [output]          dir
  [checks]          run = list of check names
  [kernel]          alphas, quad_tol, y_min, y_max, dy
  [grid]            x0, x_end, dx, boundary (periodic | truncated_line), left_pad, right_pad
  [operator]        kind (one_sided | riesz_feller), alpha | beta, gamma
  [flux]            name (burgers | quartic | zero)
  [evolution]       epsilon, t_end, cfl, scheme (method_of_lines | mild_fixed_point),
                    output_times, dt
  [initial]         kind (smoothed_step | bump | custom), u_left, u_right, width, amp,
                    center, values
  [contraction]     shift, width of the second smoothed step
  [entropy]         k, t_center, t_half, x_center, x_half
  [sweep]           epsilons (decreasing), t_eval, reference (godunov | exact_riemann),
                    refine, x0, x_end, dx, time_factor, window, repeat_alphas
  [tw]              flux, phi_minus, phi_plus, alpha, epsilons, x0, x_end, dx
  [mittag_leffler]  alphas, mu
unknown tables or keys are rejected"""


def _check_value(table: str, key: str, value: Any, kind: str) -> Any:
    where = f'[{table}] {key}'

    def number(item: Any) -> float:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f'{where} must be a number, got {item!r}.')
        return float(item)

    def text(item: Any) -> str:
        if not isinstance(item, str):
            raise ConfigError(f'{where} must be a string, got {item!r}.')
        return item

    if kind in (NUMBERS, TEXTS):
        if not isinstance(value, list):
            raise ConfigError(f'{where} must be a list, got {value!r}.')
        convert = number if kind == NUMBERS else text
        return tuple(convert(item) for item in value)
    return number(value) if kind == NUMBER else text(value)


def parse_config(document: Table) -> Table:
    """Check ``document`` against ``SCHEMA``.

    Returns
    -------
    Table
        The document with numbers as floats and lists as tuples.

    Raises
    ------
    ConfigError
        On a missing or unsupported schema version, unknown tables or keys,
        or values of the wrong type.
    """
    version = document.get('schema_version')
    if isinstance(version, bool) or version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f'Unsupported schema_version {version!r}; '
                          f'expected {CONFIG_SCHEMA_VERSION}.')
    parsed: Table = {'schema_version': version}
    for table, content in document.items():
        if table == 'schema_version':
            continue
        if table not in SCHEMA:
            raise ConfigError(f'Unknown table [{table}].')
        if not isinstance(content, dict):
            raise ConfigError(f'[{table}] must be a table.')
        unknown = sorted(set(content) - set(SCHEMA[table]))
        if unknown:
            raise ConfigError(f'Unknown keys in [{table}]: {", ".join(unknown)}.')
        parsed[table] = {key: _check_value(table, key, value, SCHEMA[table][key])
                         for key, value in content.items()}
    return parsed


def load_config(path: Path) -> Table:
    """Read and check a TOML configuration.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ConfigError
        If the file is not valid TOML or does not match the schema.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'Config file not found: {path}')
    with path.open('rb') as handle:
        try:
            document = tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f'{path}: {exc}') from exc
    logger.info('Loaded config %s', path)
    return parse_config(document)


def section(config: Table, name: str) -> Table:
    """Return table ``name``.

    Raises
    ------
    ConfigError
        If the table is absent.
    """
    if name not in config:
        raise ConfigError(f'The config has no [{name}] table.')
    return config[name]


def _require(table: Table, name: str, key: str) -> Any:
    if key not in table:
        raise ConfigError(f'[{name}] needs {key}.')
    return table[key]


def _enum(enum_type, value: str, name: str):
    try:
        return enum_type(value)
    except ValueError as exc:
        choices = ', '.join(member.value for member in enum_type)
        raise ConfigError(f'[{name}] {value!r} is not one of {choices}.') from exc


def output_dir(config: Table, config_path: Path | None = None) -> Path:
    """Output directory, ``out`` unless ``[output] dir`` is given.

    Relative directories are taken from the folder holding ``config_path``.
    """
    directory = Path(config.get('output', {}).get('dir', 'out'))
    if config_path is None or directory.is_absolute():
        return directory
    return Path(config_path).resolve().parent / directory


def check_names(config: Table) -> tuple[str, ...]:
    """Checks listed under ``[checks] run``; none when absent."""
    return tuple(config.get('checks', {}).get('run', ()))


def build_flux(name: str) -> FluxFn:
    """Preset flux by name."""
    if name not in FLUXES:
        raise ConfigError(f'Unknown flux {name!r}; choose from {", ".join(FLUXES)}.')
    return FLUXES[name]


def build_params(config: Table) -> FracParams:
    """Operator parameters from ``[operator]``."""
    table = config.get('operator', {})
    kind = _enum(OperatorKind, table.get('kind', OperatorKind.ONE_SIDED.value), 'operator')
    if kind is OperatorKind.ONE_SIDED:
        return FracParams.one_sided(table.get('alpha', DEFAULTS.alpha))
    return FracParams.riesz_feller(_require(table, 'operator', 'beta'),
                                   _require(table, 'operator', 'gamma'))


def build_u0_spec(table: Table) -> U0Spec:
    """Initial data description from an ``[initial]``-style table."""
    kind = _enum(U0Kind, table.get('kind', U0Kind.SMOOTHED_STEP.value), 'initial')
    return U0Spec(kind, table.get('u_left', 1.0), table.get('u_right', 0.0),
                  table.get('width', 0.0), table.get('amp', 1.0), table.get('center', 0.0),
                  tuple(table.get('values', ())))


def build_grid(config: Table, dx: float | None = None) -> GridSpec:
    """Grid from ``[grid]``; pads default to the far-field states of ``[initial]``."""
    table = section(config, 'grid')
    x0, x_end = _require(table, 'grid', 'x0'), _require(table, 'grid', 'x_end')
    dx = dx if dx is not None else _require(table, 'grid', 'dx')
    if not (dx > 0 and x_end > x0):
        raise ConfigError('[grid] needs x_end > x0 and dx > 0.')
    boundary = _enum(Boundary, table.get('boundary', Boundary.TRUNCATED_LINE.value), 'grid')
    u0 = build_u0_spec(config.get('initial', {}))
    far_left, far_right = ((0.0, 0.0) if u0.kind is U0Kind.BUMP else (u0.u_left, u0.u_right))
    n = int(round((x_end - x0) / dx)) + (0 if boundary is Boundary.PERIODIC else 1)
    return GridSpec(x0, dx, n, boundary, table.get('left_pad', far_left),
                    table.get('right_pad', far_right))


def build_evolution(config: Table, dx: float | None = None) -> EvolutionConfig:
    """Evolution settings from ``[evolution]``, ``[grid]``, ``[operator]`` and ``[flux]``."""
    table = section(config, 'evolution')
    scheme = _enum(Scheme, table.get('scheme', Scheme.METHOD_OF_LINES.value), 'evolution')
    return EvolutionConfig(epsilon=_require(table, 'evolution', 'epsilon'),
                           t_end=_require(table, 'evolution', 't_end'),
                           cfl=table.get('cfl', DEFAULTS.cfl),
                           scheme=scheme,
                           grid=build_grid(config, dx),
                           params=build_params(config),
                           flux=build_flux(config.get('flux', {}).get('name', 'burgers')),
                           output_times=tuple(table.get('output_times', ())),
                           dt=table.get('dt'))


def build_second_u0_spec(config: Table) -> U0Spec:
    """Initial data compared with ``[initial]`` in the contraction check."""
    first = build_u0_spec(config.get('initial', {}))
    table = config.get('contraction', {})
    return first._replace(center=first.center + table.get('shift', 0.3),
                          width=table.get('width', 2.0 * first.width))


def build_bump(config: Table) -> SpaceTimeBump:
    """Entropy test function from ``[entropy]``."""
    table = section(config, 'entropy')
    return SpaceTimeBump(*(_require(table, 'entropy', key)
                           for key in ('t_center', 't_half', 'x_center', 'x_half')))


def build_sweep(config: Table, alpha: float | None = None) -> SweepConfig:
    """Viscosity sweep from ``[sweep]`` on the ``[grid]`` window.

    ``[sweep] x0``, ``x_end`` and ``dx`` replace those of ``[grid]``. A given
    ``alpha`` replaces ``[operator]`` by the one-sided operator of that order.
    """
    table = section(config, 'sweep')
    window = {key: table[key] for key in ('x0', 'x_end') if key in table}
    config = {**config, 'grid': {**section(config, 'grid'), **window}}
    if alpha is not None:
        config['operator'] = {'kind': OperatorKind.ONE_SIDED.value, 'alpha': alpha}
    reference = _enum(ReferenceKind, table.get('reference', ReferenceKind.GODUNOV.value),
                      'sweep')
    refine = table.get('refine', 8.0)
    if refine != int(refine):
        raise ConfigError('[sweep] refine must be an integer.')
    return SweepConfig(epsilons=_require(table, 'sweep', 'epsilons'),
                       base=build_evolution(config, table.get('dx')),
                       u0_spec=build_u0_spec(config.get('initial', {})),
                       t_eval=_require(table, 'sweep', 't_eval'),
                       reference=reference,
                       refine=int(refine))


def build_tw_spec(config: Table, epsilon: float | None = None) -> TWSpec:
    """Traveling wave problem from ``[tw]``; ``epsilon`` defaults to the first listed."""
    table = section(config, 'tw')
    epsilons = table.get('epsilons', (1.0,))
    if not epsilons:
        raise ConfigError('[tw] epsilons must not be empty.')
    phi_minus, phi_plus = table.get('phi_minus', 1.0), table.get('phi_plus', 0.0)
    x0, x_end, dx = (_require(table, 'tw', key) for key in ('x0', 'x_end', 'dx'))
    n = int(round((x_end - x0) / dx)) + 1
    grid = GridSpec(x0, dx, n, Boundary.TRUNCATED_LINE, phi_minus, phi_plus)
    return TWSpec(build_flux(table.get('flux', 'burgers')), phi_minus, phi_plus,
                  epsilons[0] if epsilon is None else epsilon, grid,
                  table.get('alpha', DEFAULTS.alpha))
