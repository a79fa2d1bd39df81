"""Kernel backend selection.

The numba kernels are used when numba imports cleanly and the environment
variable ``OMP_LAB_PURE_NUMPY`` is unset (or ``0``). Setting it to ``1``
forces the vectorised numpy/LAPACK path everywhere. Tests and the benchmark
switch backends at runtime with :func:`use_backend`.
"""

from __future__ import annotations

import contextlib
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False

_PURE_NUMPY = os.environ.get("OMP_LAB_PURE_NUMPY", "0") not in ("", "0")
_active = "numba" if HAVE_NUMBA and not _PURE_NUMPY else "numpy"


def backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def worker_count() -> int:
    """Worker cap from ``OMP_LAB_THREADS``; defaults to the CPU count."""
    raw = os.environ.get("OMP_LAB_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1
