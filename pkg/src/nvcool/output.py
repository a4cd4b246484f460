"""Result serialization.

Every run produces a :class:`ResultEnvelope`: the resolved configuration
(canonical text plus its SHA-256), the fully resolved physical parameters,
numeric tables, a scalar summary, and any warnings.  The envelope can be
written as

* CSV — the main table with unit-annotated column names, rows printed with
  17 significant digits, followed by ``# key = value`` summary lines.  The
  CSV contains no timestamps and is byte-identical across repeated runs.
* JSON — the complete envelope (all tables, wall time included).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from ._version import __version__
from .params import SystemParams

__all__ = ["Table", "ResultEnvelope", "make_table", "params_to_dict",
           "build_envelope", "write_csv", "write_json"]


@dataclass
class Table:
    """A rectangular block of numbers with column names."""

    columns: list
    rows: np.ndarray  # shape (n_rows, len(columns))

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.shape[1] != len(self.columns):
            raise ValueError("row width does not match column names")


def make_table(columns: dict) -> Table:
    """Build a table from a name -> 1-d array mapping (insertion order)."""
    names = list(columns)
    arrays = [np.asarray(columns[name], dtype=float) for name in names]
    return Table(columns=names, rows=np.column_stack(arrays))


@dataclass
class ResultEnvelope:
    experiment: str
    config_text: str
    params: dict
    summary: dict
    tables: dict
    warnings: list = field(default_factory=list)
    label: str = ""
    wall_time_s: float = 0.0
    version: str = __version__

    @property
    def config_sha256(self) -> str:
        return hashlib.sha256(self.config_text.encode()).hexdigest()


def params_to_dict(params: SystemParams, xi: float | None = None) -> dict:
    """Flatten a parameter set into dotted-key / value pairs."""
    flat = {}
    for group, values in asdict(params).items():
        for name, value in values.items():
            flat[f"{group}.{name}"] = value
    flat["derived.thermal_occupation"] = params.thermal_occupation()
    if xi is not None:
        flat["derived.pump_rate_xi"] = xi
    return flat


def build_envelope(experiment: str, config_text: str, params: SystemParams,
                   xi: float | None, tables: dict, summary: dict,
                   warnings=(), label: str = "") -> ResultEnvelope:
    return ResultEnvelope(experiment=experiment, config_text=config_text,
                          params=params_to_dict(params, xi), summary=summary,
                          tables=tables, warnings=list(warnings), label=label)


def _format_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "nan" if math.isnan(v) else f"{v:.16e}"
    if isinstance(value, str):
        return value
    # nested structures: stable JSON on one line
    return json.dumps(_jsonable(value), sort_keys=True)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(envelope: ResultEnvelope, path: str,
              table_name: str = "main") -> str:
    """Write one table plus the summary as trailing comment lines."""
    table = envelope.tables[table_name]
    _ensure_parent(path)
    with open(path, "w", newline="\n") as handle:
        handle.write(",".join(table.columns) + "\n")
        for row in table.rows:
            handle.write(",".join(f"{v:.16e}" for v in row) + "\n")
        handle.write(f"# experiment = {envelope.experiment}\n")
        handle.write(f"# version = {envelope.version}\n")
        handle.write(f"# config_sha256 = {envelope.config_sha256}\n")
        for key in sorted(envelope.summary):
            handle.write(f"# {key} = "
                         f"{_format_scalar(envelope.summary[key])}\n")
        for warning in envelope.warnings:
            handle.write(f"# warning: {warning}\n")
    return path


def write_json(envelope: ResultEnvelope, path: str) -> str:
    """Write the complete envelope (all tables) as indented JSON."""
    document = {
        "version": envelope.version,
        "experiment": envelope.experiment,
        "label": envelope.label,
        "config": envelope.config_text,
        "config_sha256": envelope.config_sha256,
        "params": _jsonable(envelope.params),
        "summary": _jsonable(envelope.summary),
        "warnings": list(envelope.warnings),
        "tables": {
            name: {"columns": list(table.columns),
                   "rows": _jsonable(table.rows)}
            for name, table in envelope.tables.items()
        },
        "wall_time_s": envelope.wall_time_s,
    }
    _ensure_parent(path)
    with open(path, "w", newline="\n") as handle:
        json.dump(document, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path
