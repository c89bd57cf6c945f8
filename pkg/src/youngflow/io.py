"""Path CSV exchange format and deterministic JSON/CSV writers.

Paths travel as UTF-8 CSV with header `t,x1,...,xd`, one row per sample,
`.` decimal separator.  Floats are written with repr (shortest
round-trip), which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .paths import SampledPath


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def path_to_csv(path: SampledPath, destination) -> None:
    if path.values.ndim != 2:
        raise DataError("only vector-valued paths serialise to CSV")
    dest = Path(destination)
    header = "t," + ",".join(f"x{i + 1}" for i in range(path.dimension))
    lines = [header]
    for t, row in zip(path.times, path.values):
        lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
    dest.write_text("\n".join(lines) + "\n", encoding="utf-8")


def path_from_csv(source) -> SampledPath:
    text = Path(source).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("t,"):
        raise DataError(f"{source}: expected header t,x1,...,xd")
    rows = [ln.split(",") for ln in lines[1:]]
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] < 2:
        raise DataError(f"{source}: need at least one value column")
    return SampledPath(data[:, 0], data[:, 1:])


def write_json(obj, destination) -> None:
    Path(destination).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_csv_table(rows: Iterable[dict], columns: Sequence[str], destination) -> None:
    """Write dict rows under a fixed column order (deterministic bytes)."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col, "")) for col in columns))
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8")
