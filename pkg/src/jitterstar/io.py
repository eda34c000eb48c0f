"""CSV and JSON interchange without loss of double precision.

CSV numbers are written with 17 significant digits. JSON floats use
Python's shortest round-trip repr, which parses back to the same double.
"""
from __future__ import annotations

import csv
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from .errors import DomainError
from .samplers import PointSet


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_points_csv(points: PointSet, path=None):
    with _open_out(path) as fh:
        fh.write(",".join(f"dim{j}" for j in range(points.d)) + "\n")
        for row in points.points:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_points_csv(path) -> PointSet:
    fh = sys.stdin if path == "-" else open(path, newline="")
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header != [f"dim{j}" for j in range(len(header))]:
            raise DomainError(f"expected header dim0,...,dim{{d-1}}, got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed point CSV: {exc}") from exc
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not rows:
        raise DomainError("point CSV has no rows")
    if any(len(r) != len(header) for r in rows):
        raise DomainError("ragged point CSV")
    return PointSet(np.array(rows, dtype=float), kind="file")


def _prepare(obj):
    if isinstance(obj, dict):
        return {k: _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_prepare(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return x
    return obj


def dumps(obj) -> str:
    """JSON text; floats use the shortest repr that round-trips exactly."""
    return json.dumps(_prepare(obj), indent=2)


def write_json(obj, path=None):
    with _open_out(path) as fh:
        fh.write(dumps(obj) + "\n")


def write_experiment_csv(result, path=None):
    with _open_out(path) as fh:
        fh.write("replication,sampler,discrepancy\n")
        for k, label, value in result.rows():
            fh.write(f"{k},{label},{fmt(value)}\n")
