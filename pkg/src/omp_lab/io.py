"""Matrix/vector CSV and report JSON.

CSV layout: the first line is ``n,N``; then ``n`` lines of ``N``
comma-separated floats written with ``repr`` (shortest round-trip form), so
write-then-read is bit exact. Vectors are stored as ``n x 1`` matrices and
either orientation is accepted on read.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DataFormatError


def _parse_float(token: str, path, line: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DataFormatError(f"{path}:{line}: column {col}: not a number: {token.strip()!r}") from None
    if not math.isfinite(value):
        raise DataFormatError(f"{path}:{line}: column {col}: non-finite value {token.strip()!r}")
    return value


def read_matrix_csv(path) -> np.ndarray:
    path = Path(path)
    lines = path.read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise DataFormatError(f"{path}:1: empty file, expected header 'n,N'")
    header = lines[0].split(",")
    if len(header) != 2:
        raise DataFormatError(f"{path}:1: header must be 'n,N', got {lines[0]!r}")
    try:
        n, N = (int(h) for h in header)
    except ValueError:
        raise DataFormatError(f"{path}:1: header dimensions must be integers, got {lines[0]!r}") from None
    if n < 1 or N < 1:
        raise DataFormatError(f"{path}:1: dimensions must be positive, got {n}x{N}")
    if len(lines) - 1 != n:
        raise DataFormatError(f"{path}: header declares {n} rows but file has {len(lines) - 1}")
    out = np.empty((n, N))
    for i, raw in enumerate(lines[1:]):
        tokens = raw.split(",")
        if len(tokens) != N:
            raise DataFormatError(f"{path}:{i + 2}: expected {N} values, got {len(tokens)}")
        for j, tok in enumerate(tokens):
            out[i, j] = _parse_float(tok, path, i + 2, j + 1)
    return out


def write_matrix_csv(path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    rows = [f"{a.shape[0]},{a.shape[1]}"]
    rows.extend(",".join(repr(float(v)) for v in row) for row in a)
    Path(path).write_text("\n".join(rows) + "\n")


def read_vector_csv(path) -> np.ndarray:
    a = read_matrix_csv(path)
    if a.shape[1] == 1 or a.shape[0] == 1:
        return a.reshape(-1)
    raise DataFormatError(f"{path}: expected a vector (n x 1 or 1 x n), got {a.shape[0]}x{a.shape[1]}")


def write_vector_csv(path, v) -> None:
    write_matrix_csv(path, np.asarray(v, dtype=np.float64).reshape(-1, 1))


def read_json(path) -> dict:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise DataFormatError(f"{path}: top-level JSON value must be an object")
    return data


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))
