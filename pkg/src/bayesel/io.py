"""CSV reading and deterministic CSV writing.

Numbers are written with ``%.17g`` so every float64 round-trips exactly and
output is byte-identical across runs.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .models import DataError

__all__ = ["load_csv", "write_csv", "write_json", "FLOAT_FORMAT"]

FLOAT_FORMAT = "%.17g"


def _parse_row(row, lineno):
    try:
        vals = [float(c) for c in row]
    except ValueError:
        raise DataError(f"line {lineno}: non-numeric cell in {row!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise DataError(f"line {lineno}: non-finite value")
    return vals


def load_csv(path) -> np.ndarray:
    """Read a rectangular numeric CSV file into an ``(n, p)`` array.

    A first line that does not parse as numbers is taken as a header.
    Blank lines are skipped.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    rows = []
    width = None
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or all(c == "" for c in row):
                continue
            if width is None and not rows:
                try:
                    [float(c) for c in row]
                except ValueError:
                    # header line
                    width = len(row)
                    continue
            if width is None:
                width = len(row)
            if len(row) != width:
                raise DataError(f"line {lineno}: expected {width} columns, found {len(row)}")
            rows.append(_parse_row(row, lineno))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def write_csv(path, array, header=None) -> None:
    arr = np.asarray(array)
    if arr.ndim == 1:
        arr = arr[:, None]
    fmt = "%d" if arr.dtype.kind in "biu" else FLOAT_FORMAT
    with open(path, "w", newline="") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        np.savetxt(fh, arr, fmt=fmt, delimiter=",")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
