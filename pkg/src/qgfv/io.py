"""Config parsing and the plain-text output formats.

Outputs are small (coarse meshes), so everything is text: the energy
series is two-column CSV and fields use a four-line header followed by
one grid row per line. Floats are written with shortest round-trip
precision, which makes identical runs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ModelKind, SimulationConfig, parse_model
from .diagnostics import DiagnosticsRecord
from .fields import CellField
from .mesh import StructuredMesh

OUTPUT_DIR_ENV = "QGFV_OUTPUT_DIR"


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration text."""


_REQUIRED_KEYS = ("model", "ro", "re", "nx", "ny", "dt", "t_end", "avg_start")
_FLOAT_KEYS = ("ro", "re", "dt", "t0", "t_end", "avg_start", "alpha", "length",
               "rel_tol", "abs_tol")
_INT_KEYS = ("nx", "ny", "energy_cadence", "max_iter")
_STRING_KEYS = ("model", "output_dir")
_KNOWN_KEYS = set(_FLOAT_KEYS) | set(_INT_KEYS) | set(_STRING_KEYS)


def parse_config(text: str) -> SimulationConfig:
    """Parse a flat `key = value` document (one pair per line, # comments)
    into a validated SimulationConfig. alpha defaults to the mesh size."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[key] = value

    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    kwargs = {}
    for key, value in raw.items():
        try:
            if key == "model":
                kwargs[key] = parse_model(value)
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        except ValueError as err:
            raise ConfigError(f"key '{key}': {err}") from None
    try:
        return SimulationConfig(**kwargs)
    except ValueError as err:
        raise ConfigError(str(err)) from None


def _fmt(x: float) -> str:
    return repr(float(x))


def write_energy_series(record: DiagnosticsRecord, path) -> None:
    path = Path(path)
    lines = ["time,energy"]
    lines += [f"{_fmt(t)},{_fmt(e)}"
              for t, e in zip(record.energy_times, record.energy_values)]
    path.write_text("\n".join(lines) + "\n")


def read_energy_series(path):
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != "time,energy":
        raise ValueError(f"{path}: missing 'time,energy' header")
    times, energies = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            t, e = line.split(",")
            times.append(float(t))
            energies.append(float(e))
        except ValueError:
            raise ValueError(f"{path}: bad series row at line {lineno}: {line!r}") from None
    return np.array(times), np.array(energies)


def write_field(field, mesh: StructuredMesh, path, name: str = "field") -> None:
    """Grid text format: header lines nx / ny / bounds / field name, then
    one row of the grid per line (bottom row first)."""
    values = field.values if isinstance(field, CellField) else np.asarray(field, dtype=float)
    if values.shape != (mesh.n_cells,):
        raise ValueError(f"expected {mesh.n_cells} values, got shape {values.shape}")
    path = Path(path)
    header = [
        f"nx {mesh.nx}",
        f"ny {mesh.ny}",
        f"bounds {_fmt(mesh.x_min)} {_fmt(mesh.x_max)} {_fmt(mesh.y_min)} {_fmt(mesh.y_max)}",
        f"field {name}",
    ]
    grid = values.reshape(mesh.ny, mesh.nx)
    rows = [" ".join(_fmt(v) for v in row) for row in grid]
    path.write_text("\n".join(header + rows) + "\n")


def read_field(path):
    """Read a grid text file; returns (values, meta) with meta holding nx,
    ny, bounds, and name."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if len(lines) < 4:
        raise ValueError(f"{path}: truncated header (expected 4 lines)")
    meta = {}
    for lineno, (key, line) in enumerate(zip(("nx", "ny", "bounds", "field"), lines), start=1):
        parts = line.split()
        if not parts or parts[0] != key:
            raise ValueError(f"{path}: expected '{key} ...' at line {lineno}, got {line!r}")
        try:
            if key in ("nx", "ny"):
                meta[key] = int(parts[1])
            elif key == "bounds":
                meta[key] = tuple(float(p) for p in parts[1:5])
                if len(meta[key]) != 4:
                    raise ValueError
            else:
                meta["name"] = parts[1] if len(parts) > 1 else ""
        except (IndexError, ValueError):
            raise ValueError(f"{path}: bad header at line {lineno}: {line!r}") from None
    nx, ny = meta["nx"], meta["ny"]
    data_lines = lines[4:]
    if len(data_lines) != ny:
        raise ValueError(f"{path}: expected {ny} data rows, found {len(data_lines)}")
    values = np.empty((ny, nx))
    for j, line in enumerate(data_lines):
        row = line.split()
        if len(row) != nx:
            raise ValueError(f"{path}: row {j} has {len(row)} values, expected {nx}")
        values[j] = [float(v) for v in row]
    return values.ravel(), meta


@dataclass
class RunManifest:
    """Written once per run, after completion or failure: the resolved
    config, code version, wall time, run status, and per-system solver
    iteration statistics."""

    config: dict
    version: str
    wall_seconds: float
    solver_stats: dict
    status: str = "completed"


def write_manifest(manifest: RunManifest, path) -> None:
    path = Path(path)
    path.write_text(json.dumps(dataclasses.asdict(manifest), indent=2, sort_keys=True) + "\n")


def config_echo(config: SimulationConfig) -> dict:
    echo = dataclasses.asdict(config)
    echo["model"] = config.model.value
    echo["alpha"] = config.resolved_alpha()
    echo["bounds"] = list(config.bounds)
    return echo


def resolve_output_dir(configured) -> Path:
    """Configured output directory, unless overridden by the environment."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, configured))


def write_run_outputs(result, config: SimulationConfig) -> Path:
    """Write energy series, mean fields, and the manifest for one run."""
    from . import __version__

    out = resolve_output_dir(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = result.record
    mesh = record.mesh
    write_energy_series(record, out / "energy.csv")
    write_field(record.mean_psi, mesh, out / "psi_mean.dat", name="psi_mean")
    write_field(record.mean_q, mesh, out / "q_mean.dat", name="q_mean")
    if config.model is ModelKind.BV_NL_ALPHA:
        write_field(record.mean_a, mesh, out / "a_mean.dat", name="a_mean")
    manifest = RunManifest(config=config_echo(config), version=__version__,
                           wall_seconds=result.wall_seconds,
                           solver_stats=result.solver_stats)
    write_manifest(manifest, out / "manifest.json")
    return out


def write_failure_outputs(config: SimulationConfig, record, solver_stats,
                          wall_seconds, error) -> Path:
    """Manifest (and the energy series collected so far) for an aborted run."""
    from . import __version__

    out = resolve_output_dir(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if record is not None and record.energy_times:
        write_energy_series(record, out / "energy.csv")
    manifest = RunManifest(config=config_echo(config), version=__version__,
                           wall_seconds=wall_seconds, solver_stats=solver_stats,
                           status=f"failed: {error}")
    write_manifest(manifest, out / "manifest.json")
    return out
