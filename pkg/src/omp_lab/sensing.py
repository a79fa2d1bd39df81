"""Random sensing matrices, RIP constants and the boundedness property.

The restricted isometry constant of order k is the worst deviation from 1 of
any eigenvalue of a k-by-k principal submatrix of the Gram matrix
``phi.T @ phi``. It is computed exactly by enumerating every support (small
problems only), bounded below by sampling supports, and bounded above by
eigenvalue interlacing and a Gershgorin estimate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .constants import alpha_of
from .errors import ContractViolation, EnumerationBudgetError
from .linalg import as_matrix, as_vector, gram_extremes_batch
from .reports import HOLDS, INCONCLUSIVE, REFUTED, SLACK, UNDEFINED, BoundReport
from .seeding import box_muller, check_seed, generator, substream_seeds

ENSEMBLES = ("gaussian", "bernoulli", "orthogonal")
DEFAULT_BUDGET = 2_000_000
_CHUNK = 32_768

EXACT = "exact"
LOWER = "monte_carlo_lower_bound"
UPPER = "upper_bound"


@dataclass(frozen=True)
class MatrixSpec:
    ensemble: str
    rows: int
    cols: int
    seed: int = 0

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ContractViolation(f"ensemble must be one of {ENSEMBLES}, got {self.ensemble!r}")
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise ContractViolation("rows and cols must be positive")
        if self.ensemble == "orthogonal" and self.rows != self.cols:
            raise ContractViolation("orthogonal ensemble requires rows == cols")
        if self.rows > self.cols:
            raise ContractViolation("random ensembles require rows <= cols")
        try:
            check_seed(self.seed)
        except ValueError as exc:
            raise ContractViolation(str(exc)) from None


def generate(spec: MatrixSpec) -> np.ndarray:
    """Draw a sensing matrix, deterministic in ``spec.seed``.

    gaussian: i.i.d. N(0, 1/n). bernoulli: i.i.d. +-1/sqrt(n).
    orthogonal: Q from the QR factorisation of a square gaussian draw, with
    column signs fixed so that R has a positive diagonal.
    """
    n, N = spec.rows, spec.cols
    rng = generator(spec.seed)
    if spec.ensemble == "bernoulli":
        u = rng.random(n * N).reshape(n, N)
        return np.where(u < 0.5, 1.0, -1.0) / math.sqrt(n)
    g = box_muller(rng, n * N).reshape(n, N)
    if spec.ensemble == "gaussian":
        return g / math.sqrt(n)
    q, r = np.linalg.qr(g)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs


@dataclass(frozen=True)
class RipEstimate:
    k: int
    delta: float
    method: str
    supports_examined: int
    seed: int | None = None
    support: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "method": self.method,
            "supports_examined": self.supports_examined,
            "seed": self.seed,
            "support": None if self.support is None else list(self.support),
        }


def _gram(phi: np.ndarray) -> np.ndarray:
    g = phi.T @ phi
    return np.ascontiguousarray(0.5 * (g + g.T))


def _check_order(phi: np.ndarray, k: int) -> int:
    k = int(k)
    if not 1 <= k <= phi.shape[1]:
        raise ContractViolation(f"order k must lie in [1, {phi.shape[1]}], got {k}")
    return k


def _support_chunks(n_items: int, k: int):
    if _backend.backend() == "numba":
        from ._kernels import fill_combinations

        first = np.arange(k, dtype=np.int64)
        while True:
            out = np.empty((_CHUNK, k), dtype=np.int64)
            written = fill_combinations(first, n_items, out)
            if written:
                yield out[:written]
            if written < _CHUNK:
                return
    else:
        combos = itertools.combinations(range(n_items), k)
        while True:
            block = list(itertools.islice(combos, _CHUNK))
            if not block:
                return
            yield np.array(block, dtype=np.int64)


def _scan(gram: np.ndarray, chunks) -> tuple[float, tuple[int, ...], int]:
    best = -1.0
    best_support: tuple[int, ...] = ()
    examined = 0
    for supports in chunks:
        lo, hi = gram_extremes_batch(gram, supports)
        dev = np.maximum(hi - 1.0, 1.0 - lo)
        i = int(np.argmax(dev))
        if dev[i] > best:
            best = float(dev[i])
            best_support = tuple(int(v) for v in supports[i])
        examined += supports.shape[0]
    return max(best, 0.0), best_support, examined


def rip_delta_exact(phi, k: int, budget: int = DEFAULT_BUDGET) -> RipEstimate:
    """Exact ``delta_k`` by enumerating all ``C(N, k)`` supports.

    ``support`` of the result is the first maximising support in
    lexicographic order.
    """
    phi = as_matrix(phi)
    k = _check_order(phi, k)
    total = math.comb(phi.shape[1], k)
    if total > budget:
        raise EnumerationBudgetError(
            f"C({phi.shape[1]}, {k}) = {total} supports exceeds the enumeration budget "
            f"of {budget}; use rip_delta_lower_bound (Monte-Carlo) instead"
        )
    delta, support, examined = _scan(_gram(phi), _support_chunks(phi.shape[1], k))
    return RipEstimate(k=k, delta=delta, method=EXACT, supports_examined=examined, support=support)


def _random_supports(rng: np.random.Generator, n_items: int, k: int, count: int) -> np.ndarray:
    # a uniformly random k-subset per row: the k smallest of N uniform keys
    keys = rng.random((count, n_items))
    return np.sort(np.argpartition(keys, k - 1, axis=1)[:, :k], axis=1)


def rip_delta_lower_bound(phi, k: int, samples: int, seed: int) -> RipEstimate:
    """Lower bound on ``delta_k`` from uniformly sampled supports.

    When ``samples`` reaches ``C(N, k)`` every support is examined instead,
    which makes the bound tight.
    """
    phi = as_matrix(phi)
    k = _check_order(phi, k)
    samples = int(samples)
    if samples < 1:
        raise ContractViolation("samples must be >= 1")
    seed = check_seed(seed)
    N = phi.shape[1]
    gram = _gram(phi)
    if samples >= math.comb(N, k):
        delta, support, examined = _scan(gram, _support_chunks(N, k))
    else:
        rng = generator(seed)
        drawn = []
        left = samples
        while left:
            batch = min(left, 4096)
            drawn.append(_random_supports(rng, N, k, batch))
            left -= batch
        unique = np.unique(np.concatenate(drawn), axis=0)
        delta, support, examined = _scan(gram, [unique])
    return RipEstimate(k=k, delta=delta, method=LOWER, supports_examined=examined, seed=seed, support=support)


def rip_delta_upper_bound(phi, k: int) -> RipEstimate:
    """Certified upper bound on ``delta_k`` without enumeration.

    Takes the tighter of two bounds on the eigenvalues of every k-by-k
    principal submatrix of the Gram matrix: interlacing with the full Gram
    spectrum, and Gershgorin discs using the k-1 largest off-diagonal
    magnitudes of each row.
    """
    phi = as_matrix(phi)
    k = _check_order(phi, k)
    n, N = phi.shape
    s = np.linalg.svd(phi, compute_uv=False)
    lam_max = float(s[0] ** 2)
    lam_min = float(s[-1] ** 2) if n >= N else 0.0
    interlacing = max(lam_max - 1.0, 1.0 - lam_min)

    gram = _gram(phi)
    off = np.abs(gram - np.diag(np.diag(gram)))
    if k > 1:
        radii = -np.sort(-off, axis=1)[:, : k - 1].sum(axis=1)
    else:
        radii = np.zeros(N)
    diag = np.diag(gram)
    gershgorin = float(max(np.max(diag + radii - 1.0), np.max(1.0 - (diag - radii))))
    delta = max(min(interlacing, gershgorin), 0.0)
    return RipEstimate(k=k, delta=delta, method=UPPER, supports_examined=0)


def rip_interval(phi, k: int, use_exact: bool = True, samples: int = 2000, seed: int = 0,
                 budget: int = DEFAULT_BUDGET) -> tuple[RipEstimate, RipEstimate]:
    """(lower, upper) estimates of ``delta_k``; both exact when enumeration is affordable."""
    phi = as_matrix(phi)
    if use_exact and math.comb(phi.shape[1], int(k)) <= budget:
        exact = rip_delta_exact(phi, k, budget)
        return exact, exact
    lower = rip_delta_lower_bound(phi, k, samples, seed)
    upper = rip_delta_upper_bound(phi, k)
    if upper.delta < lower.delta:
        # rounding only; both are certified
        upper = replace(upper, delta=lower.delta)
    return lower, upper


def _status(lhs_lo: float, lhs_hi: float, rhs: float) -> str:
    if lhs_hi <= rhs + SLACK * max(1.0, rhs):
        return HOLDS
    if lhs_lo > rhs + SLACK * max(1.0, rhs):
        return REFUTED
    return INCONCLUSIVE


def _estimate_context(lo: RipEstimate, hi: RipEstimate) -> dict:
    return {"lower": lo.delta, "upper": hi.delta, "lower_method": lo.method, "upper_method": hi.method,
            "supports_examined": lo.supports_examined}


def check_rip_premise(phi, k: int, delta: float, use_exact: bool = True, samples: int = 2000,
                      seed: int = 0, budget: int = DEFAULT_BUDGET) -> BoundReport:
    """Check ``delta_k + (1 + delta) delta_{alpha k} <= delta``.

    Every RIP constant is bracketed by a certified interval, so the status is
    ``holds`` when the upper end satisfies the inequality, ``refuted`` when
    even the lower end violates it, and ``inconclusive`` otherwise. The
    reported ``lhs`` is the upper end for ``holds`` and the lower end
    otherwise.
    """
    phi = as_matrix(phi)
    if not 0 < delta <= 1:
        raise ContractViolation(f"delta must lie in (0, 1], got {delta}")
    k = _check_order(phi, k)
    alpha = alpha_of(delta)
    N = phi.shape[1]
    context = {"k": k, "delta": float(delta), "alpha": alpha, "order_alpha_k": alpha * k, "N": N}
    if alpha * k > N:
        return BoundReport("rip_premise", math.inf, float(delta), UNDEFINED, context)

    lo_k, hi_k = rip_interval(phi, k, use_exact, samples, seed, budget)
    lo_ak, hi_ak = rip_interval(phi, alpha * k, use_exact, samples, seed, budget)
    lhs_lo = lo_k.delta + (1.0 + delta) * lo_ak.delta
    lhs_hi = hi_k.delta + (1.0 + delta) * hi_ak.delta
    status = _status(lhs_lo, lhs_hi, float(delta))
    context.update(
        delta_k=_estimate_context(lo_k, hi_k),
        delta_alpha_k=_estimate_context(lo_ak, hi_ak),
        lhs_lower=lhs_lo,
        lhs_upper=lhs_hi,
        conclusive=status != INCONCLUSIVE,
    )
    lhs = lhs_hi if status == HOLDS else lhs_lo
    return BoundReport("rip_premise", lhs, float(delta), status, context)


def check_rip_order(phi, order: int, delta: float, use_exact: bool = True, samples: int = 2000,
                    seed: int = 0, budget: int = DEFAULT_BUDGET) -> BoundReport:
    """Check ``RIP(order, delta)``, i.e. ``delta_order < delta``."""
    phi = as_matrix(phi)
    order = _check_order(phi, order)
    lo, hi = rip_interval(phi, order, use_exact, samples, seed, budget)
    if hi.delta < delta:
        status = HOLDS
    elif lo.delta >= delta:
        status = REFUTED
    else:
        status = INCONCLUSIVE
    lhs = hi.delta if status == HOLDS else lo.delta
    context = {"order": order, "delta": float(delta), **_estimate_context(lo, hi)}
    return BoundReport("rip_order", lhs, float(delta), status, context)


def boundedness_probability(spec: MatrixSpec, x, c_bound: float, trials: int, seed: int) -> float:
    """Fraction of fresh draws with ``||phi x||^2 <= C ||x||^2``.

    Draw ``t`` uses the matrix seed of substream ``t`` of ``seed``;
    ``spec.seed`` is ignored.
    """
    x = as_vector(x, spec.cols, "x")
    if not np.any(x):
        raise ContractViolation("x must be non-zero; the inequality is vacuous at 0")
    if not c_bound > 0:
        raise ContractViolation("C must be positive")
    trials = int(trials)
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    limit = float(c_bound) * float(x @ x)
    hits = 0
    for t in range(trials):
        phi = generate(replace(spec, seed=substream_seeds(seed, t)[0]))
        v = phi @ x
        if float(v @ v) <= limit:
            hits += 1
    return hits / trials
