"""CSV ingestion and output helpers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DataError
from .simulate import TimeSeries


def ingest_csv(path: str | Path, time_column: str | None = "t",
               value_column: str = "x", log_transform: bool = False,
               delta_t: float | None = None) -> TimeSeries:
    """Read an observed series from a CSV file with a header row.

    ``delta_t`` is configuration and is never inferred from the time column;
    the time column, when named, only has to exist. Row numbers in error
    messages count file lines, the header being row 1.
    """
    if delta_t is None:
        raise DataError("delta_t must be supplied; it is not inferred from the data")
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path} is empty")
        header = [h.strip() for h in header]
        needed = [value_column] + ([time_column] if time_column else [])
        missing = [c for c in needed if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {missing}; found {header}")
        col = header.index(value_column)
        values = []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if col >= len(row):
                raise DataError(f"{path}, row {line}: no value in column {value_column!r}")
            cell = row[col].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}, row {line}: cannot parse {cell!r} as a number") from None
            if not math.isfinite(v):
                raise DataError(f"{path}, row {line}: non-finite value {cell!r}")
            if log_transform:
                if v <= 0:
                    raise DataError(
                        f"{path}, row {line}: value {cell} is not positive, cannot take its log"
                    )
                v = math.log(v)
            values.append(v)
    if len(values) < 3:
        raise DataError(f"{path}: need at least 3 observations, found {len(values)}")
    meta = {"source": str(path), "value_column": value_column,
            "log_transform": bool(log_transform)}
    return TimeSeries(float(delta_t), np.array(values), meta)


def write_series_csv(series: TimeSeries, path: str | Path) -> None:
    """Write ``t,x`` rows at full double precision."""
    data = np.column_stack([series.times, series.values])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header="t,x", comments="")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(obj: Any, path: str | Path) -> None:
    """Dump ``obj`` with shortest round-trip floats; NaN and inf become null."""
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n")


def to_json_text(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False)


def write_table_csv(rows: list[dict[str, Any]], path: str | Path) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})
