"""Text formats: the checkpoint document and the CSV files.

Floats are always written with 17 significant digits (``%.17g``), which
round-trips every IEEE double exactly, so write -> read -> write is
byte-stable.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v!r}")
    return format(v, ".17g")


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            out.append(f"{pad}  {json.dumps(str(key))}: ")
            _emit(val, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, val in enumerate(obj):
            out.append(pad + "  ")
            _emit(val, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps_document(obj: dict) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    out: list[str] = []
    _emit(obj, 0, out)
    return "".join(out) + "\n"


def loads_document(text: str) -> dict:
    return json.loads(text)


# -- CSV ---------------------------------------------------------------------

def coord_header(d: int) -> list[str]:
    return [f"x{j}" for j in range(d)]


def write_table(path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = zip(*[np.asarray(c, dtype=np.float64) for c in columns])
    lines = [",".join(header)]
    lines += [",".join(fmt_float(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[list[str], np.ndarray]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].strip().split(",")
    rows = [ln.split(",") for ln in lines[1:] if ln.strip()]
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    data = np.array([[float(v) for v in r] for r in rows], dtype=np.float64).reshape(len(rows), len(header))
    return header, data


def write_samples(path, x: np.ndarray, y: np.ndarray, value_name: str = "y") -> None:
    x = np.asarray(x, dtype=np.float64)
    write_table(path, coord_header(x.shape[1]) + [value_name], [*x.T, y])


def read_samples(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Coordinates are the leading ``x*`` columns; the value is the last column."""
    header, data = read_table(path)
    d = sum(1 for h in header if h.startswith("x"))
    if d not in (1, 2) or d >= len(header):
        raise ValueError(f"{path}: expected header x0[,x1],<value>, got {','.join(header)}")
    return data[:, :d], data[:, -1], header
