"""Bound-check reports shared by the premise checker and the verifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

SLACK = 1e-9

HOLDS = "holds"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"
UNDEFINED = "premise_undefined"
NOT_CHECKED = "not_checked"


def within(lhs: float, rhs: float) -> bool:
    """``lhs <= rhs`` up to floating-point evaluation slack."""
    return bool(lhs <= rhs + SLACK * max(1.0, rhs))


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return _jsonable(value.item())
    return value


@dataclass(frozen=True)
class BoundReport:
    name: str
    lhs: float
    rhs: float
    premise_status: str = NOT_CHECKED
    context: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return within(self.lhs, self.rhs)

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "name": self.name,
                "lhs": float(self.lhs),
                "rhs": float(self.rhs),
                "holds": self.holds,
                "premise_status": self.premise_status,
                "context": self.context,
            }
        )
