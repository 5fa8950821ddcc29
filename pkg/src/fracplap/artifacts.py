"""CSV and JSON artifact writers.

Every CSV starts with a '#'-prefixed metadata block: a format-version line
and the full run configuration, so a run is reproducible from any one of its
artifacts.  Floats are written with repr (shortest round-trip), which makes
repeated runs byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = "fracplap-csv v1"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, columns: dict, config: dict | None = None):
    """Write named columns with the metadata header block."""
    path = Path(path)
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[k])) for k in names]
    length = len(arrays[0])
    lines = [f"# {FORMAT_VERSION}"]
    if config is not None:
        lines.append("# config: " + json.dumps(config, sort_keys=True))
    lines.append("# columns: " + ",".join(names))
    lines.append(",".join(names))
    for i in range(length):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, record: dict, config: dict | None = None):
    path = Path(path)
    out = {"format": FORMAT_VERSION, **record}
    if config is not None:
        out["config"] = config
    path.write_text(json.dumps(out, sort_keys=True, indent=2, default=_json_default) + "\n")


def write_jsonl(path, records: list, config: dict | None = None):
    path = Path(path)
    lines = []
    if config is not None:
        lines.append(json.dumps({"format": FORMAT_VERSION, "config": config},
                                sort_keys=True, default=_json_default))
    for rec in records:
        lines.append(json.dumps(rec, sort_keys=True, default=_json_default))
    path.write_text("\n".join(lines) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a toolkit CSV back into named float columns, skipping metadata."""
    rows = []
    header = None
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    if header is None:
        return {}
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, j] for j, name in enumerate(header)}


def grid_csv(path, grid, kappa=None, config=None):
    """One row per node: index, coordinates, kappa when supplied."""
    cols = {"index": np.arange(grid.num_nodes)}
    axis_names = ["x", "y"][: grid.params.dim]
    for d, name in enumerate(axis_names):
        cols[name] = grid.nodes[:, d]
    if kappa is not None:
        cols["kappa"] = kappa
    write_csv(path, cols, config)


def function_csv(path, fn, config=None):
    """index, coordinates, value for a discrete function."""
    grid = fn.grid
    cols = {"index": np.arange(grid.num_nodes)}
    for d, name in enumerate(["x", "y"][: grid.params.dim]):
        cols[name] = grid.nodes[:, d]
    cols["value"] = fn.values
    write_csv(path, cols, config)
