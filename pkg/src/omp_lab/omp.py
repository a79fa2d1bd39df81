"""Orthogonal Matching Pursuit with a full per-iteration trace."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .linalg import as_matrix, as_vector, lstsq_columns


@dataclass(frozen=True)
class OmpOptions:
    max_iterations: int
    residual_stop_rel: float = 1e-12

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ContractViolation("max_iterations must be >= 1")
        if not self.residual_stop_rel >= 0:
            raise ContractViolation("residual_stop_rel must be >= 0")


@dataclass(frozen=True)
class RecoveryResult:
    """Decoder output.

    ``residual_norms[l]`` is ``||y - phi c^l||_2`` for ``l = 0..iterations_run``,
    so it always has one more entry than ``chosen_order``.
    """

    estimate: np.ndarray
    selected: np.ndarray
    chosen_order: list[int]
    residual_norms: list[float]
    iterations_run: int
    stopped_early: bool
    max_iterations: int = field(default=0)

    def to_dict(self) -> dict:
        return {
            "estimate": [float(v) for v in self.estimate],
            "selected": [int(i) for i in self.selected],
            "chosen_order": list(self.chosen_order),
            "residual_norms": list(self.residual_norms),
            "iterations_run": self.iterations_run,
            "stopped_early": self.stopped_early,
            "max_iterations": self.max_iterations,
        }


def omp_decode(phi, y, opts: OmpOptions | int) -> RecoveryResult:
    """Run ``OMP_M`` on measurements ``y``.

    Each iteration correlates the residual with every column not yet chosen,
    adds the column of largest absolute correlation (lowest index on ties),
    re-solves least squares on the chosen columns and recomputes the
    residual. Stops after ``M`` iterations, or earlier once the residual is
    at most ``residual_stop_rel * ||y||_2`` or every remaining correlation
    is exactly zero.
    """
    if not isinstance(opts, OmpOptions):
        opts = OmpOptions(int(opts))
    phi = as_matrix(phi)
    n, N = phi.shape
    y = as_vector(y, n, "y")
    M = int(opts.max_iterations)
    if M > N:
        raise ContractViolation(f"cannot run {M} iterations with only {N} columns")

    y_norm = float(np.linalg.norm(y))
    stop_at = opts.residual_stop_rel * y_norm
    r = y.copy()
    coef = np.zeros(0)
    chosen: list[int] = []
    in_support = np.zeros(N, dtype=bool)
    norms = [y_norm]
    stopped_early = False

    while len(chosen) < M:
        if norms[-1] <= stop_at:
            stopped_early = True
            break
        h = np.abs(phi.T @ r)
        h[in_support] = -1.0
        j = int(np.argmax(h))
        if h[j] <= 0.0:
            stopped_early = True
            break
        chosen.append(j)
        in_support[j] = True
        cols = phi[:, chosen]
        coef = lstsq_columns(cols, y)
        r = y - cols @ coef
        norms.append(float(np.linalg.norm(r)))

    estimate = np.zeros(N)
    if chosen:
        estimate[chosen] = coef
    return RecoveryResult(
        estimate=estimate,
        selected=np.array(sorted(chosen), dtype=np.int64),
        chosen_order=chosen,
        residual_norms=norms,
        iterations_run=len(chosen),
        stopped_early=stopped_early,
        max_iterations=M,
    )
