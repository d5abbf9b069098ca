"""Dataset ingestion and deterministic result writers.

``load_column`` reads one numeric column from delimited text.  The UCI Air
Quality export is semicolon separated, uses a decimal comma and marks missing
readings with -200, so delimiter, decimal mark and sentinel are explicit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    ColumnNotFound,
    DegenerateRange,
    EmptyAfterCleaning,
    ParseError,
)
from .svgplot import PlotSpec, Series, render_line_plot  # noqa: F401  (re-export)

SWEEP_HEADER = ("n", "k", "mean", "std_error", "trials")
AIR_QUALITY_SENTINEL = -200.0


@dataclass(frozen=True)
class DatasetRef:
    path: str
    column: str | int
    missing_sentinel: float | None = None
    delimiter: str = ","
    decimal: str = "."
    header: bool = True

    def __post_init__(self):
        if len(self.delimiter) != 1 or not self.delimiter.isprintable():
            raise ValueError(f"delimiter must be one printable character, got {self.delimiter!r}")
        if self.decimal not in (".", ","):
            raise ValueError(f"decimal mark must be '.' or ',', got {self.decimal!r}")
        if self.decimal == self.delimiter:
            raise ValueError("decimal mark and delimiter must differ")
        if isinstance(self.column, int) and self.column < 0:
            raise ValueError("column index must be non-negative")
        if isinstance(self.column, str) and not self.header:
            raise ValueError("column names need a header row")

    @classmethod
    def from_json(cls, obj):
        return cls(**obj)

    def to_json(self):
        return {
            "path": str(self.path),
            "column": self.column,
            "missing_sentinel": self.missing_sentinel,
            "delimiter": self.delimiter,
            "decimal": self.decimal,
            "header": self.header,
        }


@dataclass(frozen=True)
class LoadedColumn:
    values: np.ndarray
    name: str
    dropped: int


def bundled(name: str) -> Path:
    """Path of a fixture shipped in ``smote_lab/data``."""
    return Path(str(resources.files("smote_lab") / "data" / name))


def air_quality_ref(path, column="CO(GT)") -> DatasetRef:
    """Reader settings for the UCI Air Quality CSV export."""
    return DatasetRef(str(path), column, AIR_QUALITY_SENTINEL, delimiter=";", decimal=",")


def housing_ref(path, column="median_income") -> DatasetRef:
    return DatasetRef(str(path), column)


def _resolve_column(ref: DatasetRef, header):
    if isinstance(ref.column, int):
        name = header[ref.column] if header and ref.column < len(header) else str(ref.column)
        return ref.column, name
    names = [h.strip() for h in header]
    if ref.column.strip() not in names:
        raise ColumnNotFound(ref.column, [h for h in names if h])
    return names.index(ref.column.strip()), ref.column.strip()


def load_column(ref: DatasetRef) -> LoadedColumn:
    """Finite values of one column; sentinel, blank and non-finite cells are dropped.

    Fully blank rows (trailing ``;;;;`` lines in the UCI export) are skipped
    without being counted.  Row numbers in errors are 1-based file lines.
    """
    path = Path(ref.path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    values, dropped = [], 0
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh, delimiter=ref.delimiter)
        header = next(reader, None) if ref.header else None
        if ref.header and header is None:
            raise ParseError("file is empty", row=1)
        col, name = _resolve_column(ref, header or [])
        first = 2 if ref.header else 1
        for row_no, row in enumerate(reader, start=first):
            if not any(cell.strip() for cell in row):
                continue
            if col >= len(row):
                raise ParseError(f"row has {len(row)} fields, column {name!r} is field {col + 1}", row=row_no)
            cell = row[col].strip()
            if not cell:
                dropped += 1
                continue
            if ref.decimal == ",":
                cell = cell.replace(",", ".")
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"cannot parse {row[col]!r} as a number", row=row_no) from None
            if not math.isfinite(v) or (ref.missing_sentinel is not None and v == ref.missing_sentinel):
                dropped += 1
                continue
            values.append(v)
    if not values:
        raise EmptyAfterCleaning(f"column {name!r} has no usable values ({dropped} dropped)")
    return LoadedColumn(np.array(values), name, dropped)


def normalize_minmax(sample):
    """Map ``sample`` affinely onto [0, 1]; returns ``(scaled, min, max)``."""
    x = np.asarray(sample, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise DegenerateRange(f"cannot normalise: all values equal {lo}")
    scaled = (x - lo) / (hi - lo)
    return scaled, lo, hi


def denormalize(scaled, lo: float, hi: float):
    return lo + np.asarray(scaled, dtype=float) * (hi - lo)


def format_number(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(f"{float(v):.9g}")  # round first so the exponent below is final
    if v == 0.0:
        return "0"
    decimals = max(0, 8 - math.floor(math.log10(abs(v))))
    return f"{v:.{decimals}f}"


def write_table_csv(header, rows, path) -> Path:
    """Comma-separated table with 9-significant-digit floats and ``\\n`` line ends."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(format_number(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
    return path


def write_sweep_csv(result, path) -> Path:
    rows = sorted(result.rows, key=lambda r: (r.k, r.n))
    return write_table_csv(SWEEP_HEADER, [(r.n, r.k, r.mean, r.std_error, r.trials) for r in rows], path)


def read_table_csv(path) -> tuple[list[str], list[list[float]]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [[float(c) for c in row] for row in reader]


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="")
    return path
