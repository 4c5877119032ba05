"""CSV/JSON writers shared by the CLI and report helpers."""

from __future__ import annotations

import contextlib
import csv
import io
import json
import math
import sys

import numpy as np


def fmt_float(v: float) -> str:
    # 17 significant digits round-trips any double
    return format(float(v), ".17g")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return f"{fmt_float(v.real)}{'+' if v.imag >= 0 or math.isnan(v.imag) else '-'}{fmt_float(abs(v.imag))}j"
    return "" if v is None else str(v)


@contextlib.contextmanager
def _open(path_or_file, mode="w"):
    if path_or_file is None or path_or_file == "-":
        yield sys.stdout
    elif hasattr(path_or_file, "write"):
        yield path_or_file
    else:
        with open(path_or_file, mode, newline="", encoding="utf-8") as fh:
            yield fh


def write_csv(path_or_file, header, rows) -> None:
    with _open(path_or_file) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r[h] if isinstance(r, dict) else r[i]) for i, h in enumerate(header)])


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    return obj


def dump_json(obj, path_or_file=None) -> None:
    with _open(path_or_file) as fh:
        json.dump(to_jsonable(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")
