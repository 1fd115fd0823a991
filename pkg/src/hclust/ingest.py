"""CSV loading and per-column normalisation."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

NORMALIZATIONS = ("none", "minmax", "zscore")


@dataclass(frozen=True)
class DataMatrix:
    """``n`` objects by ``m`` attributes, with optional labels and weights."""

    values: np.ndarray
    labels: tuple[str, ...] = ()
    weights: np.ndarray | None = None
    columns: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got {values.ndim}-D")
        if not np.all(np.isfinite(values)):
            raise DataError("values contain non-finite entries")
        object.__setattr__(self, "values", values)
        n, m = values.shape
        labels = tuple(self.labels) or tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise DataError(f"{len(labels)} labels for {n} rows")
        if len(set(labels)) != n:
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise DataError(f"duplicate labels: {', '.join(dupes[:5])}")
        object.__setattr__(self, "labels", labels)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).ravel()
            if w.shape != (n,):
                raise DataError(f"{w.size} weights for {n} rows")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise DataError("weights must be finite and positive")
            object.__setattr__(self, "weights", w)
        columns = tuple(self.columns) or tuple(f"x{j}" for j in range(m))
        if len(columns) != m:
            raise DataError(f"{len(columns)} column names for {m} columns")
        object.__setattr__(self, "columns", columns)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def _resolve(col: str | int, header: list[str] | None, width: int) -> int:
    if isinstance(col, int) or (isinstance(col, str) and col.isdigit() and header is None):
        idx = int(col)
    elif header is not None and col in header:
        idx = header.index(col)
    else:
        raise DataError(f"unknown column {col!r}")
    if not 0 <= idx < width:
        raise DataError(f"column index {idx} out of range (width {width})")
    return idx


def _number(cell: str) -> float:
    x = float(cell)
    if not math.isfinite(x):
        raise ValueError(cell)
    return x


def load_csv(
    path: str | Path,
    *,
    delimiter: str = ",",
    header: bool = True,
    label_column: str | int | None = None,
    weight_column: str | int | None = None,
    columns: Sequence[str | int] | None = None,
) -> DataMatrix:
    """Read a numeric matrix from a UTF-8 CSV file.

    Columns may be named (with a header) or given by 0-based index. By
    default every column except the label and weight columns is used.
    Missing or non-numeric cells are rejected, never imputed; the error
    lists the offending data rows (1-based, header excluded).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    if header:
        if not rows:
            raise DataError(f"{path}: empty file")
        head, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        head = None
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(head) if head is not None else len(rows[0])

    label_idx = None if label_column is None else _resolve(label_column, head, width)
    weight_idx = None if weight_column is None else _resolve(weight_column, head, width)
    if columns is None:
        selected = [j for j in range(width) if j not in (label_idx, weight_idx)]
    else:
        selected = [_resolve(c, head, width) for c in columns]
    if not selected:
        raise DataError("no attribute columns selected")

    first_line = 2 if header else 1
    numeric_cols = selected + ([weight_idx] if weight_idx is not None else [])
    failing = dict.fromkeys(numeric_cols, 0)
    values, labels, weights, bad = [], [], [], []
    for r, row in enumerate(rows, start=1):
        if len(row) != width:
            bad.append(f"row {r} (line {r + first_line - 1}): expected {width} fields, got {len(row)}")
            continue
        try:
            values.append([_number(row[j]) for j in selected])
            if weight_idx is not None:
                weights.append(_number(row[weight_idx]))
        except ValueError:
            cells = []
            for j in numeric_cols:
                try:
                    _number(row[j])
                except ValueError:
                    failing[j] += 1
                    cells.append(row[j])
            bad.append(f"row {r} (line {r + first_line - 1}): non-numeric or missing cell(s) {cells}")
            continue
        labels.append(row[label_idx].strip() if label_idx is not None else str(r - 1))
    if bad:
        shown = bad[:10] + ([f"... and {len(bad) - 10} more"] if len(bad) > 10 else [])
        msg = f"{path}: {len(bad)} malformed row(s):\n  " + "\n  ".join(shown)
        text_cols = [j for j, count in failing.items() if count == len(rows)]
        if text_cols:
            names = ", ".join(repr(head[j]) if head is not None else str(j) for j in text_cols)
            msg += f"\ncolumn(s) {names} are not numeric in any row; use a label column or select columns"
        raise DataError(msg)

    names = tuple(head[j] if head is not None else f"x{j}" for j in selected)
    w = np.array(weights) if weight_idx is not None else None
    if w is not None and np.any(w <= 0):
        rows_bad = [str(i + 1) for i in np.flatnonzero(w <= 0)[:10]]
        raise DataError(f"nonpositive weight in row(s) {', '.join(rows_bad)}")
    return DataMatrix(np.array(values, dtype=float), tuple(labels), w, names)


def write_csv(X: DataMatrix, path: str | Path, *, delimiter: str = ",") -> None:
    """Write ``X`` with a header, a label column and 12 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, delimiter=delimiter)
        head = ["label", *X.columns] + (["weight"] if X.weights is not None else [])
        out.writerow(head)
        for i in range(X.n):
            row = [X.labels[i], *(format(v, ".12g") for v in X.values[i])]
            if X.weights is not None:
                row.append(format(X.weights[i], ".12g"))
            out.writerow(row)


def normalize(X: DataMatrix, policy: str = "none") -> DataMatrix:
    """Per-column ``"none"``, ``"minmax"`` (to [0, 1]) or ``"zscore"`` scaling.

    Constant columns are left unchanged and reported with a warning.
    """
    if policy not in NORMALIZATIONS:
        raise ValueError(f"unknown normalisation {policy!r}; expected one of {NORMALIZATIONS}")
    if policy == "none":
        return X
    V = X.values.copy()
    for j in range(X.m):
        col = V[:, j]
        if policy == "minmax":
            lo, hi = col.min(), col.max()
            spread = hi - lo
        else:
            lo, spread = col.mean(), col.std()
        if spread == 0:
            warnings.warn(f"column {X.columns[j]!r} is constant; left unchanged", stacklevel=2)
            continue
        V[:, j] = (col - lo) / spread
        if policy == "minmax":
            # rounding may overshoot the unit interval by an ulp
            np.clip(V[:, j], 0.0, 1.0, out=V[:, j])
    return replace(X, values=V)
