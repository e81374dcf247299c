"""On-disk formats for channel matrices and result tables.

Binary channel dump: a 16-byte little-endian header (magic ``b"HMNF"``,
``u32`` rows, ``u32`` cols, ``u32`` reserved = 0) followed by row-major
``f64`` pairs ``re, im``.

CSV: comma-separated, header row, UTF-8, floats written with ``repr`` so
they read back bit-exactly.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

MAGIC = b"HMNF"
_HEADER = struct.Struct("<4sIII")


def format_float(x) -> str:
    # repr is the shortest string that round-trips
    return repr(float(x))


def format_complex(z) -> str:
    """``re+imj`` with both parts at full precision, e.g. ``1.5-0.25j``."""
    z = complex(z)
    im = repr(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{z.real!r}{im}j"


def parse_complex(text: str) -> complex:
    return complex(text.strip())


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return format_complex(v)
    return "" if v is None else str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_matrix_csv(path, data) -> Path:
    """One CSV row per matrix row; the header names columns ``c0, c1, ...``."""
    data = np.asarray(data, dtype=complex)
    header = [f"c{j}" for j in range(data.shape[1])]
    return write_csv(path, header, (list(row) for row in data))


def read_matrix_csv(path) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[parse_complex(c) for c in row] for row in reader]
    return np.array(rows, dtype=complex)


def write_matrix_bin(path, data) -> Path:
    data = np.asarray(data, dtype=complex)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {data.shape}")
    rows, cols = data.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.ascontiguousarray(data).astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols, 0))
        fh.write(payload)
    return path


def read_matrix_bin(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, rows, cols, _ = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 16 * rows * cols
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    return np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(rows, cols).copy()
