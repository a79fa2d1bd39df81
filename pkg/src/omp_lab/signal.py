"""lp norms, best k-term approximation and its error, supports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, UnsupportedExponentError
from .linalg import as_vector


@dataclass(frozen=True)
class KTermApprox:
    """Best k-term approximation of a signal.

    ``approx`` keeps the entries of the signal on ``kept`` and is zero
    elsewhere; ``error_p`` is the lp distance between the two.
    """

    k: int
    p: float
    approx: np.ndarray
    error_p: float
    kept: np.ndarray


def _check_p(p: float) -> float:
    p = float(p)
    if np.isnan(p) or p < 1.0:
        raise UnsupportedExponentError(f"p must satisfy p >= 1 or p = inf, got {p}")
    return p


def lp_norm(x, p: float) -> float:
    """``(sum |x_i|^p)^(1/p)``, or ``max |x_i|`` when ``p`` is infinite."""
    p = _check_p(p)
    x = as_vector(x, name="x")
    if x.size == 0:
        return 0.0
    if np.isinf(p):
        return float(np.max(np.abs(x)))
    if p == 2.0:
        return float(np.linalg.norm(x))
    if p == 1.0:
        return float(np.sum(np.abs(x)))
    a = np.abs(x)
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # rescale so large p cannot overflow
    return float(scale * np.sum((a / scale) ** p) ** (1.0 / p))


def magnitude_order(x: np.ndarray) -> np.ndarray:
    """Indices by decreasing ``|x_i|``; equal magnitudes keep ascending index."""
    return np.argsort(-np.abs(x), kind="stable")


def best_k_term(x, k: int, p: float = 2.0) -> KTermApprox:
    x = as_vector(x, name="x")
    p = _check_p(p)
    k = int(k)
    if k < 0 or k > x.size:
        raise ContractViolation(f"k must lie in [0, {x.size}], got {k}")
    kept = np.sort(magnitude_order(x)[:k])
    approx = np.zeros_like(x)
    approx[kept] = x[kept]
    return KTermApprox(k=k, p=p, approx=approx, error_p=lp_norm(x - approx, p), kept=kept)


def sigma_k(x, k: int, p: float = 2.0) -> float:
    return best_k_term(x, k, p).error_p


def support(x, tol: float = 0.0) -> np.ndarray:
    if tol < 0:
        raise ContractViolation("tol must be non-negative")
    x = as_vector(x, name="x")
    return np.flatnonzero(np.abs(x) > tol).astype(np.int64)
