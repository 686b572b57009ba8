"""CSV and JSON serialisation.

Floats are written with 17 significant digits so that every file re-parses to
the value it was written from. Column names and JSON keys are documented in
``docs/formats.md``.
"""

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from fracwave.constants import REPORT_SCHEMA_VERSION
from fracwave.custom_types import (CheckResult, EvolutionConfig, ExperimentReport, Field,
                                   FloatArray, GridSpec, Trajectory)
from fracwave.exceptions import ConfigError

FLOAT_FORMAT = '%.17g'


def safe_path(out_dir: Path, name: str | Path) -> Path:
    """Resolve ``name`` inside ``out_dir``.

    Raises
    ------
    ConfigError
        If the resolved path escapes ``out_dir``.
    """
    root = Path(out_dir).resolve()
    target = (root / name).resolve()
    if root != target and root not in target.parents:
        raise ConfigError(f'Refusing to write {target} outside {root}.')
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_columns(path: Path, columns: Mapping[str, FloatArray]) -> Path:
    """Write equally long columns as CSV with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(col, dtype=float) for col in columns.values()])
    np.savetxt(path, data, fmt=FLOAT_FORMAT, delimiter=',', header=','.join(columns),
               comments='')
    return path


def read_columns(path: Path) -> dict[str, FloatArray]:
    """Read a CSV written by :func:`write_columns`.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    """
    path = Path(path)
    with path.open(encoding='utf-8') as handle:
        names = handle.readline().strip().split(',')
    data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    return {name: data[:, i].copy() for i, name in enumerate(names)}


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    """Write a trajectory in long format with columns ``t, x, u``."""
    t = np.concatenate([np.full(f.grid.n, f.t) for f in trajectory])
    x = np.concatenate([f.grid.x for f in trajectory])
    u = np.concatenate([f.values for f in trajectory])
    return write_columns(path, {'t': t, 'x': x, 'u': u})


def read_trajectory_csv(path: Path, grid: GridSpec) -> Trajectory:
    """Read a trajectory written by :func:`write_trajectory_csv` on ``grid``."""
    columns = read_columns(path)
    t, u = columns['t'], columns['u']
    if t.size % grid.n:
        raise ConfigError(f'{path} does not hold whole records of {grid.n} nodes.')
    return tuple(Field(float(t[i]), u[i:i + grid.n].copy(), grid)
                 for i in range(0, t.size, grid.n))


def jsonable(value: Any) -> Any:
    """Plain JSON form of numpy values, tuples and enums; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value) if np.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, 'value') and hasattr(value, 'name'):
        return value.value
    return value


def grid_payload(grid: GridSpec) -> dict[str, Any]:
    """JSON form of a grid."""
    return {'x0': grid.x0, 'dx': grid.dx, 'n': grid.n, 'boundary': grid.boundary.value,
            'left_pad': grid.left_pad, 'right_pad': grid.right_pad}


def evolution_payload(config: EvolutionConfig) -> dict[str, Any]:
    """JSON form of an evolution config; the flux is recorded by label."""
    params = config.params
    return {'epsilon': config.epsilon, 't_end': config.t_end, 'cfl': config.cfl,
            'scheme': config.scheme.value, 'grid': grid_payload(config.grid),
            'operator': {'kind': params.kind.value, 'alpha': params.alpha,
                         'beta': params.beta, 'gamma': params.gamma},
            'flux': config.flux.label, 'output_times': list(config.output_times),
            'dt': config.dt}


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    """Write a mapping as indented JSON with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as handle:
        json.dump(jsonable(dict(payload)), handle, indent=2, sort_keys=True)
        handle.write('\n')
    return path


def read_json(path: Path) -> dict[str, Any]:
    """Read a JSON object."""
    with Path(path).open(encoding='utf-8') as handle:
        return json.load(handle)


def report_payload(report: ExperimentReport) -> dict[str, Any]:
    """JSON form of a manifest report."""
    return {'schema_version': report.schema_version,
            'passed': report.passed,
            'checks': [{'name': c.name, 'passed': c.passed, 'measured': c.measured,
                        'tolerances': c.tolerances, 'error': c.error} for c in report.checks]}


def write_report_json(path: Path, report: ExperimentReport) -> Path:
    """Write a manifest report."""
    return write_json(path, report_payload(report))


def read_report_json(path: Path) -> ExperimentReport:
    """Read a report written by :func:`write_report_json`.

    Raises
    ------
    ConfigError
        If the schema version is not supported.
    """
    payload = read_json(path)
    if payload.get('schema_version') != REPORT_SCHEMA_VERSION:
        raise ConfigError(f"Unsupported report schema_version {payload.get('schema_version')!r}.")
    checks = tuple(CheckResult(c['name'], c['passed'], c['measured'], c['tolerances'],
                               c.get('error')) for c in payload['checks'])
    return ExperimentReport(payload['schema_version'], checks)
