"""CSV and JSON formats shared by the command line.

CSV: header row, feature columns ``x1..xd``, label column ``y``, UTF-8, no
index column. JSON: ``{"config", "results", "version"}`` with floats written
to 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import LabeledDataset


class InputError(ValueError):
    """Malformed user input (bad CSV, bad config); maps to exit code 2."""


def _feature_columns(header, path, need_label):
    names = [h.strip() for h in header]
    xs = [c for c in names if c.startswith("x") and c[1:].isdigit()]
    expected = [f"x{i}" for i in range(1, len(xs) + 1)]
    if not xs or xs != expected or names[: len(xs)] != expected:
        raise InputError(f"{path}:1: header must start with x1..xd, got {names}")
    extra = names[len(xs) :]
    if need_label and extra != ["y"]:
        raise InputError(f"{path}:1: expected a single label column 'y' after features, got {extra}")
    if not need_label and extra not in ([], ["y"]):
        raise InputError(f"{path}:1: unexpected columns {extra}")
    return len(xs), len(names)


def read_csv(path, need_label: bool = True, dim: int | None = None):
    """Read a dataset (``need_label``) or a query file.

    Returns ``(X, y)`` where ``y`` is ``None`` for label-free query files.
    An empty file yields ``(None, None)``.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        if need_label:
            raise InputError(f"{path}: empty file")
        return None, None
    d, width = _feature_columns(rows[0], path, need_label)
    if dim is not None and d != dim:
        raise InputError(f"{path}:1: {d} feature columns, expected {dim}")
    X, y = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise InputError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{path}:{lineno}: non-finite value")
        X.append(vals[:d])
        if width > d:
            y.append(vals[d])
    X = np.array(X, dtype=float).reshape(-1, d)
    if need_label:
        if len(X) == 0:
            raise InputError(f"{path}: no data rows")
        return X, np.array(y, dtype=float)
    return X, None


def read_dataset(path) -> LabeledDataset:
    X, y = read_csv(path, need_label=True)
    return LabeledDataset(X, y)


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def csv_text(columns: list, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def dataset_csv(ds: LabeledDataset, yhat=None) -> str:
    cols = [f"x{i}" for i in range(1, ds.dim + 1)] + ["y"]
    data = np.column_stack([ds.points, ds.labels])
    if yhat is not None:
        cols.append("yhat")
        data = np.column_stack([data, yhat])
    return csv_text(cols, data.tolist())


def _dump(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_text(obj) -> str:
    return _dump(obj, 2, 0) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
