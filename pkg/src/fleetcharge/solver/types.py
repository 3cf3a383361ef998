"""Result types and failures shared by the LP and MILP solvers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = ["SolveStatus", "Solution", "NumericalFailure", "TooLarge"]


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class NumericalFailure(RuntimeError):
    """The LP solver could not make progress within its iteration budget."""


class TooLarge(ValueError):
    """Model exceeds the brute-force enumeration cap."""


@dataclass
class Solution:
    """Outcome of a solve: status, variable values, objective, and bounds.

    ``gap`` is (objective - best_bound) / max(|objective|, 1e-9) for
    minimization; OPTIMAL implies gap <= the configured tolerance. ``values``
    covers the model's structural columns and is None when no feasible point
    was found.
    """

    status: SolveStatus
    values: np.ndarray | None = None
    objective: float | None = None
    best_bound: float | None = None
    gap: float | None = None
    node_count: int = 0
    wall_time: float = 0.0
    trace: list[str] = field(default_factory=list)

    @property
    def is_feasible(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE) \
            and self.values is not None


def relative_gap(objective: float, bound: float) -> float:
    return (objective - bound) / max(abs(objective), 1e-9)
