"""Closed-form constants of the OMP instance-optimality bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ContractViolation

# 16 + 15*delta landing within this relative distance of an integer is taken
# to be that integer, so delta = 1/15 gives 17 rather than 18.
_INTEGER_SNAP = 1e-12


def _check_delta(delta) -> None:
    if not 0 < delta <= 1:
        raise ContractViolation(f"delta must lie in (0, 1], got {delta}")


def alpha_of(delta) -> int:
    """``ceil(16 + 15 * delta)``."""
    _check_delta(delta)
    if isinstance(delta, (int, Fraction)):
        return math.ceil(16 + 15 * Fraction(delta))
    value = 16.0 + 15.0 * float(delta)
    nearest = round(value)
    if abs(value - nearest) <= _INTEGER_SNAP * value:
        return int(nearest)
    return math.ceil(value)


def zhang_factor(delta: float) -> float:
    """``11 + 20 delta``: the squared-residual inflation of ``OMP_{(alpha-1)s}``."""
    return 11.0 + 20.0 * float(delta)


def _core(delta: float) -> float:
    # 2(1+delta)(sqrt(11+20 delta) + 1)
    return 2.0 * (1.0 + delta) * (math.sqrt(zhang_factor(delta)) + 1.0)


def c1_constant(delta: float, q: float) -> float:
    alpha = alpha_of(delta)
    return (2.0 * alpha) ** (1.0 / q - 0.5) * (_core(float(delta)) + 1.0)


def c0_constant(delta: float, q: float) -> float:
    alpha = alpha_of(delta)
    return 1.0 + c1_constant(delta, q) + (2.0 * alpha) ** (1.0 / q - 0.5)


def c2_constant(delta: float) -> float:
    _check_delta(delta)
    return _core(float(delta)) + 3.0


def c3_constant(delta: float, c_bound: float) -> float:
    _check_delta(delta)
    if not c_bound > 0:
        raise ContractViolation(f"boundedness constant must be positive, got {c_bound}")
    delta = float(delta)
    return 1.0 + math.sqrt(c_bound * (1.0 + delta)) * (1.0 + math.sqrt(zhang_factor(delta)))


@dataclass(frozen=True)
class TheoremConstants:
    delta: float
    alpha: int
    q: float
    C0: float
    C1: float
    C2: float
    C3: float | None = None
    C_bound: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def constants(delta: float, q: float = 2.0, c_bound: float | None = None) -> TheoremConstants:
    _check_delta(delta)
    if not 1.0 <= q <= 2.0:
        raise ContractViolation(f"q must lie in [1, 2], got {q}")
    return TheoremConstants(
        delta=float(delta),
        alpha=alpha_of(delta),
        q=float(q),
        C0=c0_constant(delta, q),
        C1=c1_constant(delta, q),
        C2=c2_constant(delta),
        C3=None if c_bound is None else c3_constant(delta, c_bound),
        C_bound=None if c_bound is None else float(c_bound),
    )
