"""CSV ingestion for the command-line tools.

Input files are UTF-8, comma-delimited, RFC-4180-style quoted, with a
required header row and '.' decimal points.  Cells that are empty or one
of the usual NA spellings count as missing; by default a missing value in
a designated column rejects the file, and with ``drop_missing=True`` the
affected rows are dropped listwise (the count is reported on the Dataset).
Anything else that fails to parse as a finite number is an error either
way.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

_MISSING_TOKENS = {"", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class Dataset:
    columns: tuple[str, ...]
    y: np.ndarray
    x: np.ndarray
    y_col: str
    x_cols: tuple[str, ...]
    n_dropped: int


def _parse_cell(token: str, column: str, line: int) -> float | None:
    stripped = token.strip()
    if stripped.lower() in _MISSING_TOKENS:
        return None
    try:
        value = float(stripped)
    except ValueError:
        raise DataError(
            f"line {line}: column {column!r} has non-numeric value {token!r}"
        ) from None
    if not np.isfinite(value):
        raise DataError(f"line {line}: column {column!r} has non-finite value {token!r}")
    return value


def load_dataset(path, y_col: str, x_cols, drop_missing: bool = False) -> Dataset:
    """Read the designated columns of a CSV file into a Dataset."""
    x_cols = tuple(x_cols)
    if not x_cols:
        raise DataError("at least one x column is required")
    if y_col in x_cols:
        raise DataError(f"y column {y_col!r} also appears among the x columns")
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except (StopIteration, csv.Error):
            raise DataError(f"{path}: missing header row") from None
        positions = {}
        for name in (y_col, *x_cols):
            if name not in header:
                raise DataError(f"{path}: column {name!r} not found in header")
            positions[name] = header.index(name)

        y_vals: list[float] = []
        x_rows: list[list[float]] = []
        dropped = 0
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < len(header):
                raise DataError(f"line {line}: expected {len(header)} fields, got {len(row)}")
            cells = [_parse_cell(row[positions[name]], name, line) for name in (y_col, *x_cols)]
            if any(c is None for c in cells):
                if drop_missing:
                    dropped += 1
                    continue
                raise DataError(
                    f"line {line}: missing value in a designated column "
                    "(use the drop-rows option for listwise deletion)"
                )
            y_vals.append(cells[0])
            x_rows.append(cells[1:])

    if len(y_vals) < 3:
        raise DataError(f"{path}: need at least 3 usable rows, got {len(y_vals)}")
    return Dataset(
        columns=tuple(header),
        y=np.asarray(y_vals, dtype=float),
        x=np.asarray(x_rows, dtype=float),
        y_col=y_col,
        x_cols=x_cols,
        n_dropped=dropped,
    )
