"""Evaluators and empirical verifiers for the OMP error bounds.

Verifiers never assert. They run the decoder, evaluate both sides of an
inequality and return a :class:`~omp_lab.reports.BoundReport` carrying the
status of the RIP premise the inequality is conditional on.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .constants import (
    TheoremConstants,
    alpha_of,
    c0_constant,
    c1_constant,
    c2_constant,
    c3_constant,
    constants,
    zhang_factor,
)
from .errors import ContractViolation, ExcludedCaseError, IterationBudgetError
from .linalg import as_index_set, as_matrix, as_vector, least_squares_on_support
from .omp import OmpOptions, omp_decode
from .reports import NOT_CHECKED, BoundReport
from .sensing import check_rip_premise
from .signal import lp_norm, sigma_k

__all__ = [
    "TheoremConstants",
    "alpha_of",
    "constants",
    "c0_constant",
    "c1_constant",
    "c2_constant",
    "c3_constant",
    "lemma1_order",
    "theorem1_rhs",
    "verify_theorem1",
    "verify_theorem2",
    "verify_zhang",
    "verify_lemma1",
    "check_lemma2",
    "check_holder",
    "oracle_ls_decoder",
    "RankDeficientWarning",
]


class RankDeficientWarning(UserWarning):
    pass


def _check_pq(p: float, q: float) -> None:
    if not 1.0 <= p <= q <= 2.0:
        raise ContractViolation(f"need 1 <= p <= q <= 2, got p={p}, q={q}")
    if p == 2.0:
        raise ExcludedCaseError("p = 2 (hence (p, q) = (2, 2)) is excluded; use verify_theorem2")


def lemma1_order(N: int, k: int, p: float) -> int:
    """RIP order ``k (N/k)^(2 - 2/p)`` rounded up and clamped to ``[k, N]``."""
    value = k * (N / k) ** (2.0 - 2.0 / p)
    nearest = round(value)
    L = nearest if abs(value - nearest) <= 1e-12 * value else math.ceil(value)
    return int(min(max(L, k), N))


def theorem1_rhs(x, k: int, p: float, q: float, eps: float, delta: float) -> float:
    """``C0 sigma_k(x)_p / k^(1/p - 1/q) + C1 k^(1/q - 1/2) eps``."""
    _check_pq(p, q)
    if int(k) < 1:
        raise ContractViolation("k must be >= 1")
    if eps < 0:
        raise ContractViolation("eps must be non-negative")
    c = constants(delta, q)
    approx_term = c.C0 * sigma_k(x, k, p) / k ** (1.0 / p - 1.0 / q)
    noise_term = c.C1 * k ** (1.0 / q - 0.5) * eps
    return approx_term + noise_term


def _iteration_budget(M: int, N: int, what: str) -> None:
    if M > N:
        raise IterationBudgetError(f"{what} needs {M} OMP iterations but the matrix has only {N} columns")


def verify_theorem1(phi, x, e, k: int, p: float, q: float, delta: float,
                    premise_status: str = NOT_CHECKED, stop_rel: float = 1e-12) -> BoundReport:
    """Decode ``phi x + e`` with ``OMP_{2(alpha-1)k}`` and compare ``||x* - x||_q``
    with the noisy instance-optimality bound."""
    phi = as_matrix(phi)
    n, N = phi.shape
    x = as_vector(x, N, "x")
    e = as_vector(e, n, "e")
    _check_pq(p, q)
    alpha = alpha_of(delta)
    M = 2 * (alpha - 1) * int(k)
    _iteration_budget(M, N, "Theorem 1")
    eps = float(np.linalg.norm(e))
    result = omp_decode(phi, phi @ x + e, OmpOptions(M, stop_rel))
    lhs = lp_norm(result.estimate - x, q)
    rhs = theorem1_rhs(x, k, p, q, eps, delta)
    context = {
        "k": int(k), "p": float(p), "q": float(q), "delta": float(delta), "alpha": alpha,
        "eps": eps, "iterations": M, "iterations_run": result.iterations_run,
        "stopped_early": result.stopped_early, "L": lemma1_order(N, int(k), p),
    }
    return BoundReport("theorem1", lhs, rhs, premise_status, context)


def verify_theorem2(phi, x, k: int, delta: float, c_bound: float,
                    premise_status: str = NOT_CHECKED, stop_rel: float = 1e-12) -> BoundReport:
    """``||OMP_{(alpha-1)k}(phi x) - x||_2`` against ``C3 sigma_k(x)_2``."""
    phi = as_matrix(phi)
    N = phi.shape[1]
    x = as_vector(x, N, "x")
    alpha = alpha_of(delta)
    M = (alpha - 1) * int(k)
    _iteration_budget(M, N, "Theorem 2")
    result = omp_decode(phi, phi @ x, OmpOptions(M, stop_rel))
    lhs = float(np.linalg.norm(result.estimate - x))
    c3 = c3_constant(delta, c_bound)
    rhs = c3 * sigma_k(x, k, 2.0)
    context = {
        "k": int(k), "delta": float(delta), "alpha": alpha, "C": float(c_bound), "C3": c3,
        "iterations": M, "iterations_run": result.iterations_run,
        "stopped_early": result.stopped_early,
    }
    return BoundReport("theorem2", lhs, rhs, premise_status, context)


def verify_zhang(phi, y, xbar, delta: float, use_exact: bool = True, samples: int = 2000,
                 seed: int = 0, stop_rel: float = 1e-12) -> BoundReport:
    """Squared residual of ``OMP_s`` with ``s = (alpha-1)||xbar||_0`` against
    ``(11 + 20 delta) ||phi xbar - y||^2``, with the premise at order
    ``||xbar||_0`` checked alongside."""
    phi = as_matrix(phi)
    n, N = phi.shape
    y = as_vector(y, n, "y")
    xbar = as_vector(xbar, N, "xbar")
    sparsity = int(np.count_nonzero(xbar))
    if sparsity < 1:
        raise ContractViolation("xbar must have at least one non-zero entry")
    alpha = alpha_of(delta)
    s = (alpha - 1) * sparsity
    _iteration_budget(s, N, "Zhang's residual bound")
    result = omp_decode(phi, y, OmpOptions(s, stop_rel))
    lhs = float(np.sum((phi @ result.estimate - y) ** 2))
    rhs = zhang_factor(delta) * float(np.sum((phi @ xbar - y) ** 2))
    premise = check_rip_premise(phi, sparsity, delta, use_exact=use_exact, samples=samples, seed=seed)
    context = {
        "sparsity": sparsity, "delta": float(delta), "alpha": alpha, "iterations": s,
        "iterations_run": result.iterations_run, "stopped_early": result.stopped_early,
        "premise": premise.to_dict(),
    }
    return BoundReport("zhang", lhs, rhs, premise.premise_status, context)


def verify_lemma1(phi, z, k: int, p: float, delta: float,
                  premise_status: str = NOT_CHECKED) -> BoundReport:
    """``||phi z||_2`` against ``sqrt(1+delta) (||z||_2 + ||z||_p / k^(1/p - 1/2))``.

    ``delta`` should be a certified upper bound on ``delta_L`` with
    ``L = lemma1_order(N, k, p)``.
    """
    phi = as_matrix(phi)
    N = phi.shape[1]
    z = as_vector(z, N, "z")
    if not 1.0 <= p < 2.0:
        raise ContractViolation(f"need 1 <= p < 2, got {p}")
    if int(k) < 1:
        raise ContractViolation("k must be >= 1")
    if delta < 0:
        raise ContractViolation("delta must be non-negative")
    lhs = float(np.linalg.norm(phi @ z))
    rhs = math.sqrt(1.0 + delta) * (lp_norm(z, 2.0) + lp_norm(z, p) / k ** (1.0 / p - 0.5))
    context = {"k": int(k), "p": float(p), "delta": float(delta), "L": lemma1_order(N, int(k), p)}
    return BoundReport("lemma1", lhs, rhs, premise_status, context)


def check_lemma2(z, k: int, p: float, q: float) -> BoundReport:
    """``sigma_k(z)_q <= ||z||_p / k^(1/p - 1/q)`` for ``p <= q``."""
    if not 1.0 <= p <= q:
        raise ContractViolation(f"need 1 <= p <= q, got p={p}, q={q}")
    r = 1.0 / p - 1.0 / q
    lhs = sigma_k(z, k, q)
    rhs = lp_norm(z, p) / k**r
    return BoundReport("lemma2", lhs, rhs, context={"k": int(k), "p": float(p), "q": float(q)})


def check_holder(b, q: float) -> BoundReport:
    """``||b||_q / len(b)^(1/q - 1/2) <= ||b||_2`` for ``1 <= q < 2``."""
    if not 1.0 <= q < 2.0:
        raise ContractViolation(f"need 1 <= q < 2, got {q}")
    b = as_vector(b, name="b")
    k = b.size
    lhs = lp_norm(b, q) / k ** (1.0 / q - 0.5)
    rhs = lp_norm(b, 2.0)
    return BoundReport("holder", lhs, rhs, context={"k": k, "q": float(q)})


def oracle_ls_decoder(phi, y, support) -> np.ndarray:
    """Least squares on a known support, zero elsewhere.

    Emits :class:`RankDeficientWarning` and returns the minimum-norm solution
    when the support columns are linearly dependent.
    """
    phi = as_matrix(phi)
    support = as_index_set(support, phi.shape[1])
    if support.size == 0:
        raise ContractViolation("support must be non-empty")
    if np.linalg.matrix_rank(phi[:, support]) < support.size:
        warnings.warn("oracle support columns are rank deficient; using the minimum-norm solution",
                      RankDeficientWarning, stacklevel=2)
    return least_squares_on_support(phi, y, support)
