"""Dense linear algebra used by the decoder and the RIP estimators.

Matrices are plain 2-D ``float64`` numpy arrays and index sets are strictly
increasing ``int64`` arrays; :func:`as_matrix`, :func:`as_vector` and
:func:`as_index_set` enforce those invariants at the boundary.
"""

from __future__ import annotations

import numpy as np

from . import _backend
from .errors import ContractViolation

RANK_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolation(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("matrix entries must be finite")
    return arr


def as_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise ContractViolation(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} entries must be finite")
    return arr


def as_index_set(indices, dim: int) -> np.ndarray:
    """Validate a strictly increasing set of indices into ``range(dim)``."""
    arr = np.asarray(indices, dtype=np.int64).reshape(-1)
    if arr.size and (arr[0] < 0 or arr[-1] >= dim):
        raise ContractViolation(f"index out of range for dimension {dim}")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ContractViolation("index set must be strictly increasing")
    return arr


def matvec(a, v) -> np.ndarray:
    a = as_matrix(a)
    v = as_vector(v, a.shape[1], "v")
    return a @ v


def transpose_matvec(a, r) -> np.ndarray:
    a = as_matrix(a)
    r = as_vector(r, a.shape[0], "r")
    return a.T @ r


def _lstsq_numpy(sub: np.ndarray, y: np.ndarray) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(sub, y, rcond=RANK_RTOL)
    return coef


def _lstsq_numba(sub: np.ndarray, y: np.ndarray) -> np.ndarray:
    from ._kernels import lstsq_min_norm

    coef, _ = lstsq_min_norm(np.ascontiguousarray(sub), y, RANK_RTOL)
    return coef


def lstsq_columns(sub: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-norm least squares on an already-extracted column block.

    No validation; callers in this package have already checked shapes.
    """
    if _backend.backend() == "numba":
        return _lstsq_numba(sub, y)
    return _lstsq_numpy(sub, y)


def least_squares_on_support(phi, y, support) -> np.ndarray:
    """Minimise ``||y - phi z||_2`` over ``z`` supported on ``support``.

    Rank-deficient column sets get the minimum-norm minimiser; coordinates
    outside ``support`` are exactly zero.
    """
    phi = as_matrix(phi)
    y = as_vector(y, phi.shape[0], "y")
    support = as_index_set(support, phi.shape[1])
    if support.size == 0:
        raise ContractViolation("support must be non-empty")
    z = np.zeros(phi.shape[1])
    z[support] = lstsq_columns(phi[:, support], y)
    return z


def _extremes_numpy(gram: np.ndarray) -> tuple[float, float]:
    ev = np.linalg.eigvalsh(gram)
    return float(ev[0]), float(ev[-1])


def gram_eigen_bounds(phi_t) -> tuple[float, float]:
    """Smallest and largest eigenvalue of ``phi_t.T @ phi_t``."""
    phi_t = as_matrix(phi_t)
    gram = phi_t.T @ phi_t
    gram = 0.5 * (gram + gram.T)
    if _backend.backend() == "numba":
        from ._kernels import sym_extremes

        lo, hi = sym_extremes(gram)
        return float(lo), float(hi)
    return _extremes_numpy(gram)


def gram_extremes_batch(gram: np.ndarray, supports: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extremal eigenvalues of ``gram[T, T]`` for every row ``T`` of ``supports``."""
    if _backend.backend() == "numba":
        from ._kernels import gram_extremes_batch as kernel

        return kernel(gram, np.ascontiguousarray(supports, dtype=np.int64))
    sub = gram[supports[:, :, None], supports[:, None, :]]
    ev = np.linalg.eigvalsh(sub)
    return ev[:, 0], ev[:, -1]
