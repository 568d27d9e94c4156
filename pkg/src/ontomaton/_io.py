"""Text serialisation helpers: 16-significant-digit floats, JSON and CSV writers."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SIG_DIGITS = 16


def fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        return "0"  # no negative zero in outputs
    return format(x, f".{SIG_DIGITS}g")


def _round_floats(obj):
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return 0.0 if x == 0.0 else float(fmt(x))
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=False) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def complex_columns_csv(vectors: np.ndarray, names: Sequence[str] | None = None) -> str:
    """Interleaved real/imag CSV: one row per basis index, a ``re``/``im`` column pair per vector."""
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    if names is None:
        names = [str(j) for j in range(v.shape[1])] if v.shape[1] > 1 else [""]
    header = ["index"]
    for name in names:
        suffix = f"_{name}" if name else ""
        header += [f"re{suffix}", f"im{suffix}"]
    rows = []
    for i in range(v.shape[0]):
        row = [i]
        for j in range(v.shape[1]):
            row += [float(v[i, j].real), float(v[i, j].imag)]
        rows.append(row)
    return csv_text(header, rows)


def read_complex_csv(text: str) -> np.ndarray:
    """Inverse of :func:`complex_columns_csv`; returns shape ``(rows, vectors)``."""
    reader = csv.reader(io.StringIO(text))
    next(reader)
    data = [[float(x) for x in row[1:]] for row in reader if row]
    arr = np.asarray(data, dtype=float)
    return arr[:, 0::2] + 1j * arr[:, 1::2]
