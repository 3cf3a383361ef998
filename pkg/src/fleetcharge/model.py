"""Solver-agnostic mixed-integer linear model container.

A :class:`LinearModel` is plain data: column bounds with integrality marks,
rows as (sparse coefficient list, relation, rhs), and a linear objective
with a constant offset. Rows and columns are appended in a deterministic
order by the builder, so two builds of the same scenario are identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["LE", "GE", "EQ", "Row", "LinearModel"]

LE = "<="
GE = ">="
EQ = "="

INF = math.inf


@dataclass(frozen=True, slots=True)
class Row:
    name: str
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float


@dataclass
class LinearModel:
    col_names: list[str] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    integer: list[bool] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    objective_offset: float = 0.0
    rows: list[Row] = field(default_factory=list)
    # Higher values branch first; structural design columns outrank
    # per-block scheduling columns.
    branch_priority: list[int] = field(default_factory=list)

    @property
    def num_cols(self) -> int:
        return len(self.col_names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def integer_cols(self) -> list[int]:
        return [j for j, flag in enumerate(self.integer) if flag]

    def add_column(
        self,
        name: str,
        lower: float = 0.0,
        upper: float = INF,
        objective: float = 0.0,
        integer: bool = False,
        branch_priority: int = 0,
    ) -> int:
        if upper < lower:
            raise ValueError(f"column {name}: upper {upper} < lower {lower}")
        self.col_names.append(name)
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.integer.append(bool(integer))
        self.objective.append(float(objective))
        self.branch_priority.append(int(branch_priority))
        return len(self.col_names) - 1

    def add_row(
        self,
        name: str,
        coeffs: list[tuple[int, float]],
        sense: str,
        rhs: float,
    ) -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"row {name}: unknown sense {sense!r}")
        n = self.num_cols
        for j, _ in coeffs:
            if not (0 <= j < n):
                raise ValueError(f"row {name}: column index {j} out of range")
        self.rows.append(Row(name, tuple(coeffs), sense, float(rhs)))
        return len(self.rows) - 1

    def set_objective(self, col: int, coefficient: float) -> None:
        self.objective[col] = float(coefficient)

    def add_objective(self, col: int, coefficient: float) -> None:
        self.objective[col] += float(coefficient)

    def objective_value(self, values) -> float:
        total = self.objective_offset
        for c, x in zip(self.objective, values):
            if c != 0.0:
                total += c * x
        return total

    def to_lp_format(self) -> str:
        """Human-readable LP interchange text for external cross-checking."""

        def term(coef: float, name: str) -> str:
            sign = "+" if coef >= 0 else "-"
            return f"{sign} {abs(coef):.12g} {name}"

        lines = []
        if self.objective_offset:
            lines.append(f"\\ constant objective offset: {self.objective_offset:.12g}")
        lines += ["Minimize", " obj:"]
        parts = [
            term(c, self.col_names[j])
            for j, c in enumerate(self.objective)
            if c != 0.0
        ]
        for i in range(0, max(len(parts), 1), 6):
            lines.append("   " + " ".join(parts[i:i + 6]))
        lines.append("Subject To")
        sense_text = {LE: "<=", GE: ">=", EQ: "="}
        for row in self.rows:
            body = " ".join(term(c, self.col_names[j]) for j, c in row.coeffs)
            lines.append(f" {row.name}: {body} {sense_text[row.sense]} {row.rhs:.12g}")
        lines.append("Bounds")
        for j, name in enumerate(self.col_names):
            lo, hi = self.lower[j], self.upper[j]
            lo_text = "-inf" if lo == -INF else f"{lo:.12g}"
            hi_text = "+inf" if hi == INF else f"{hi:.12g}"
            lines.append(f" {lo_text} <= {name} <= {hi_text}")
        integers = [self.col_names[j] for j in self.integer_cols]
        if integers:
            lines.append("Generals")
            for i in range(0, len(integers), 8):
                lines.append(" " + " ".join(integers[i:i + 8]))
        lines.append("End")
        return "\n".join(lines) + "\n"
