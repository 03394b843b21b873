"""Deterministic JSON reports and CSV series.

Floats are always written with 17 significant digits so that the same
inputs give byte-identical files across runs.  Non-finite floats become the
strings ``"inf"``, ``"-inf"`` and ``"nan"`` to keep the output valid JSON.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["format_float", "to_jsonable", "dumps", "write_json", "write_csv",
           "trajectory_rows", "write_trajectories"]

TRAJECTORY_COLUMNS = ("point", "t", "re_w", "im_w", "rho", "r_of_t")
CHAIN_COLUMNS = ("t", "re_z", "im_z", "re_f", "im_f", "abs_f")


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_jsonable(obj):
    """Recursively convert numpy scalars, arrays, tuples and complex numbers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else format_float(obj)
    return obj


def dumps(obj) -> str:
    """Indented JSON with sorted keys and 17-significant-digit floats."""
    return _dump_py(to_jsonable(obj))


def _dump_py(obj, level=0) -> str:
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_dump_py(obj[k], level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump_py(v, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj, ensure_ascii=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n", encoding="utf-8")
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def trajectory_rows(trajs, system):
    """Rows ``(point, t, re_w, im_w, rho, r_of_t)`` for a list of trajectories."""
    for k, tr in enumerate(trajs):
        for t, w in zip(tr.times, tr.points):
            yield (k, float(t), float(w.real), float(w.imag), float(abs(w)), float(system.r(t)))


def write_trajectories(path, trajs, system) -> Path:
    return write_csv(path, TRAJECTORY_COLUMNS, trajectory_rows(trajs, system))
