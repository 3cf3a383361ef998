"""Dense bounded-variable primal simplex.

Two phases: artificial variables give a starting basis, phase 1 minimizes
their sum, phase 2 minimizes the real objective. Variables live between
(possibly infinite) bounds and sit nonbasic at a bound or free at zero;
each row gets one slack column whose bounds encode the row sense, so every
row is an equality internally. Artificial columns are +-unit vectors and
are handled implicitly rather than stored.

Pricing is Dantzig (most violating reduced cost) with a permanent switch to
Bland's least-index rule after a stall, which breaks cycling. The basis
inverse is updated by elementary row operations and refactorized from
scratch periodically. Rows and the cost vector are rescaled to unit
magnitude so absolute tolerances are meaningful across problems; the
reported objective is recomputed from unscaled data.

Desk-scale instances only: everything is dense numpy, nothing is sparse.
"""

from __future__ import annotations

import numpy as np

from ..model import EQ, GE, LE, LinearModel
from .types import NumericalFailure, Solution, SolveStatus

__all__ = ["PreparedLP", "solve_lp", "check_solution"]

INF = float("inf")

BASIC = 0
AT_LOWER = 1
AT_UPPER = 2
FREE = 3

TOL_DUAL = 1e-9
TOL_PIVOT = 1e-10
TOL_PHASE1 = 1e-7
REFACTOR_EVERY = 96
STALL_LIMIT = 400


class PreparedLP:
    """A model converted once to dense arrays, solvable under many bounds.

    Branch-and-bound reuses a single instance across nodes, passing
    per-node structural bounds to :meth:`solve`. Instances are immutable
    after construction, so concurrent solves are safe.
    """

    def __init__(self, model: LinearModel):
        self.model = model
        m, n = model.num_rows, model.num_cols
        self.m, self.n = m, n

        A = np.zeros((m, n))
        b = np.zeros(m)
        slack_lower = np.zeros(m)
        slack_upper = np.zeros(m)
        for i, row in enumerate(model.rows):
            for j, coef in row.coeffs:
                A[i, j] += coef
            b[i] = row.rhs
            if row.sense == LE:
                slack_lower[i], slack_upper[i] = 0.0, INF
            elif row.sense == GE:
                slack_lower[i], slack_upper[i] = -INF, 0.0
            else:
                slack_lower[i], slack_upper[i] = 0.0, 0.0

        # Row equilibration keeps |a| near one so absolute tolerances behave.
        row_scale = np.abs(A).max(axis=1, initial=0.0)
        row_scale = np.where(row_scale > 0, row_scale, 1.0)
        A /= row_scale[:, None]
        b /= row_scale

        c = np.asarray(model.objective, dtype=float)
        self.cost_scale = max(1.0, float(np.abs(c).max(initial=0.0)))

        # Real columns: structural then one slack per row.
        self.n_real = n + m
        self.A_real = np.hstack([A, np.eye(m)]) if m else np.zeros((0, n))
        self.AT_real = np.ascontiguousarray(self.A_real.T)
        self.b = b
        self.slack_lower = slack_lower
        self.slack_upper = slack_upper
        self.c_real = np.zeros(self.n_real)
        self.c_real[:n] = c / self.cost_scale

    def solve(self, lower=None, upper=None) -> Solution:
        """Solve min c'x under the given structural bounds (default: model's)."""
        n, m = self.n, self.m
        lo = np.asarray(self.model.lower if lower is None else lower, dtype=float)
        hi = np.asarray(self.model.upper if upper is None else upper, dtype=float)
        if np.any(lo > hi + 1e-12):
            return Solution(status=SolveStatus.INFEASIBLE, best_bound=INF, gap=0.0)
        if m == 0:
            return self._solve_unconstrained(lo, hi)

        state = _SimplexState(self, lo, hi)
        if state.run_phase1() > TOL_PHASE1:
            return Solution(status=SolveStatus.INFEASIBLE, best_bound=INF, gap=0.0)
        status = state.run_phase2()
        if status == SolveStatus.UNBOUNDED:
            return Solution(status=SolveStatus.UNBOUNDED, best_bound=-INF)

        x = state.values()[:n]
        x = np.minimum(np.maximum(x, lo), hi)  # clamp roundoff noise
        objective = self.model.objective_value(x)
        return Solution(
            status=SolveStatus.OPTIMAL,
            values=x,
            objective=objective,
            best_bound=objective,
            gap=0.0,
        )

    def _solve_unconstrained(self, lo, hi) -> Solution:
        c = np.asarray(self.model.objective, dtype=float)
        target = np.where(c > 0, lo, np.where(c < 0, hi, 0.0))
        if np.any((c != 0) & ~np.isfinite(target)):
            return Solution(status=SolveStatus.UNBOUNDED, best_bound=-INF)
        fallback = np.where(np.isfinite(lo), lo, np.minimum(hi, 0.0))
        fallback = np.where(np.isfinite(fallback), fallback, 0.0)
        x = np.where(c == 0, fallback, target)
        objective = self.model.objective_value(x)
        return Solution(
            status=SolveStatus.OPTIMAL, values=x, objective=objective,
            best_bound=objective, gap=0.0,
        )


class _SimplexState:
    """Mutable per-solve state: bounds, basis, statuses, basis inverse."""

    def __init__(self, prep: PreparedLP, lo, hi):
        self.prep = prep
        self.m, self.n = prep.m, prep.n
        self.n_real = prep.n_real
        self.width = self.n_real + self.m  # artificials appended implicitly
        self.b = prep.b

        self.lower = np.concatenate([lo, prep.slack_lower, np.zeros(self.m)])
        self.upper = np.concatenate([hi, prep.slack_upper, np.full(self.m, INF)])

        self.col_status = np.full(self.width, AT_LOWER, dtype=np.int8)
        self.basis = np.empty(0, dtype=int)  # placeholder until crash below
        for j in range(self.n_real):
            if np.isfinite(self.lower[j]):
                self.col_status[j] = AT_LOWER
            elif np.isfinite(self.upper[j]):
                self.col_status[j] = AT_UPPER
            else:
                self.col_status[j] = FREE

        # Crash basis: a row whose residual fits inside its slack bounds
        # starts with the slack basic; only the rest need artificials.
        residual = self.b - self.prep.A_real @ self._nonbasic_values()
        self.art_signs = np.ones(self.m)
        basis = np.empty(self.m, dtype=int)
        diag = np.empty(self.m)
        x_B = np.empty(self.m)
        n = self.n
        for i in range(self.m):
            r = residual[i]
            slack = n + i
            if self.lower[slack] - 1e-12 <= r <= self.upper[slack] + 1e-12:
                basis[i] = slack
                diag[i] = 1.0
                x_B[i] = r
                self.col_status[slack] = BASIC
                # This row's artificial is never needed; pin it.
                self.upper[self.n_real + i] = 0.0
            else:
                basis[i] = self.n_real + i
                self.art_signs[i] = 1.0 if r >= 0 else -1.0
                diag[i] = self.art_signs[i]
                x_B[i] = abs(r)
                self.col_status[self.n_real + i] = BASIC
        self.basis = basis
        self.B_inv = np.diag(diag)
        self.x_B = x_B
        self._outer_buf = np.empty((self.m, self.m))

    # -- column access (artificials are implicit +-unit vectors) ------------

    def _column(self, j: int) -> np.ndarray:
        if j < self.n_real:
            return self.prep.A_real[:, j]
        col = np.zeros(self.m)
        col[j - self.n_real] = self.art_signs[j - self.n_real]
        return col

    def _ftran(self, j: int) -> np.ndarray:
        """B_inv times column j."""
        if j < self.n_real:
            return self.B_inv @ self.prep.A_real[:, j]
        i = j - self.n_real
        return self.art_signs[i] * self.B_inv[:, i]

    def _reduced_costs(self, c: np.ndarray) -> np.ndarray:
        y = c[self.basis] @ self.B_inv  # = B_inv.T @ c_B, cache-friendly
        z = np.empty(self.width)
        z[:self.n_real] = c[:self.n_real] - self.prep.AT_real @ y
        z[self.n_real:] = c[self.n_real:] - self.art_signs * y
        return z

    # -- values --------------------------------------------------------------

    def _nonbasic_values(self) -> np.ndarray:
        x = np.zeros(self.n_real)
        status = self.col_status[:self.n_real]
        at_lo = status == AT_LOWER
        at_hi = status == AT_UPPER
        x[at_lo] = self.lower[:self.n_real][at_lo]
        x[at_hi] = self.upper[:self.n_real][at_hi]
        x[self.basis[self.basis < self.n_real]] = 0.0
        return x

    def values(self) -> np.ndarray:
        x = np.zeros(self.width)
        x[:self.n_real] = self._nonbasic_values()
        x[self.basis] = self.x_B
        return x

    def _refactor(self) -> None:
        B = np.empty((self.m, self.m))
        for k, j in enumerate(self.basis):
            B[:, k] = self._column(j)
        try:
            self.B_inv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular basis during refactorization") from exc
        # Nonbasic artificials sit at zero, so only the real residual matters.
        r = self.b - self.prep.A_real @ self._nonbasic_values()
        self.x_B = self.B_inv @ r

    # -- phases ---------------------------------------------------------------

    def run_phase1(self) -> float:
        c = np.zeros(self.width)
        c[self.n_real:] = 1.0
        status = self._iterate(c, allow_unbounded=False)
        if status != SolveStatus.OPTIMAL:
            raise NumericalFailure("phase 1 did not reach an optimum")
        infeasibility = float(c[self.basis] @ self.x_B)
        if infeasibility <= TOL_PHASE1:
            self._expel_artificials()
        return infeasibility

    def _expel_artificials(self) -> None:
        """Pivot zero-valued artificials out; pin the redundant-row ones."""
        for pos in range(self.m):
            col = self.basis[pos]
            if col < self.n_real:
                continue
            row = self.B_inv[pos] @ self.prep.A_real
            nonbasic = self.col_status[:self.n_real] != BASIC
            candidates = np.where((np.abs(row) > 1e-7) & nonbasic)[0]
            if len(candidates) == 0:
                continue  # redundant row; artificial stays pinned at zero
            enter = int(candidates[np.argmax(np.abs(row[candidates]))])
            x = self.values()
            self._pivot(pos, enter, float(x[enter]), d=self._ftran(enter))
        # No artificial may move again.
        self.upper[self.n_real:] = 0.0
        self.lower[self.n_real:] = 0.0

    def run_phase2(self) -> SolveStatus:
        c = np.zeros(self.width)
        c[:self.n_real] = self.prep.c_real
        return self._iterate(c, allow_unbounded=True)

    # -- core loop --------------------------------------------------------------

    def _iterate(self, c: np.ndarray, allow_unbounded: bool) -> SolveStatus:
        m = self.m
        max_iters = max(20000, 60 * (m + self.width))
        use_bland = False
        stall = 0
        # Bounds of real columns never change inside a phase; artificials
        # are excluded from entering outright.
        fixed = (self.upper - self.lower) <= 1e-15

        for iteration in range(1, max_iters + 1):
            if iteration % REFACTOR_EVERY == 0:
                self._refactor()

            z = self._reduced_costs(c)

            viol = np.zeros(self.width)
            at_lo = (self.col_status == AT_LOWER) & ~fixed
            at_hi = (self.col_status == AT_UPPER) & ~fixed
            free = self.col_status == FREE
            viol[at_lo] = -z[at_lo]
            viol[at_hi] = z[at_hi]
            viol[free] = np.abs(z[free])
            viol[self.n_real:] = 0.0  # artificials never re-enter

            eligible = viol > TOL_DUAL
            if not eligible.any():
                return SolveStatus.OPTIMAL

            if use_bland:
                enter = int(np.argmax(eligible))  # least index with True
            else:
                enter = int(np.argmax(viol))

            if self.col_status[enter] == AT_UPPER:
                direction = -1.0
            elif self.col_status[enter] == FREE:
                direction = 1.0 if z[enter] < 0 else -1.0
            else:
                direction = 1.0

            d = self._ftran(enter)
            delta = -d * direction  # per-unit change of each basic value

            lo_b = self.lower[self.basis]
            hi_b = self.upper[self.basis]
            lim = np.full(m, INF)
            grow = delta > TOL_PIVOT
            shrink = delta < -TOL_PIVOT
            with np.errstate(invalid="ignore"):
                lim[grow] = (hi_b[grow] - self.x_B[grow]) / delta[grow]
                lim[shrink] = (lo_b[shrink] - self.x_B[shrink]) / delta[shrink]
            np.nan_to_num(lim, copy=False, nan=INF, posinf=INF)
            np.maximum(lim, 0.0, out=lim)

            range_e = self.upper[enter] - self.lower[enter]
            t_enter = range_e if np.isfinite(range_e) else INF
            t_rows = float(lim.min()) if m else INF

            if min(t_rows, t_enter) == INF:
                if allow_unbounded:
                    return SolveStatus.UNBOUNDED
                raise NumericalFailure("unbounded ray in phase 1")

            if t_enter <= t_rows:
                # Bound flip: the entering column crosses its own box first.
                if t_enter > 0:
                    self.x_B += delta * t_enter
                self.col_status[enter] = AT_UPPER if direction > 0 else AT_LOWER
                stall = stall + 1 if t_enter <= 1e-12 else 0
            else:
                ties = np.where(lim <= t_rows * (1 + 1e-9) + 1e-12)[0]
                leave_pos = int(min(ties, key=lambda i: (-abs(d[i]), self.basis[i])))
                t_star = float(lim[leave_pos])
                base = (self.upper[enter] if self.col_status[enter] == AT_UPPER
                        else self.lower[enter] if self.col_status[enter] == AT_LOWER
                        else 0.0)
                if t_star > 0:
                    self.x_B += delta * t_star
                self._pivot(leave_pos, enter, base + direction * t_star, d=d)
                stall = stall + 1 if t_star <= 1e-12 else 0

            if stall > STALL_LIMIT and not use_bland:
                use_bland = True
                stall = 0
        raise NumericalFailure(
            f"simplex exceeded {max_iters} iterations without converging")

    def _pivot(self, leave_pos: int, enter: int, enter_value: float, d: np.ndarray) -> None:
        pivot = d[leave_pos]
        if abs(pivot) < TOL_PIVOT:
            raise NumericalFailure("vanishing pivot element")
        leave_col = self.basis[leave_pos]
        leave_val = self.x_B[leave_pos]
        lo, hi = self.lower[leave_col], self.upper[leave_col]
        if np.isfinite(lo) and (not np.isfinite(hi) or abs(leave_val - lo) <= abs(leave_val - hi)):
            self.col_status[leave_col] = AT_LOWER
        else:
            self.col_status[leave_col] = AT_UPPER
        if leave_col >= self.n_real:
            self.upper[leave_col] = 0.0  # artificial out: pin it

        self.basis[leave_pos] = enter
        self.col_status[enter] = BASIC
        self.x_B[leave_pos] = enter_value

        # Rank-one basis-inverse update; the pivot row is restored afterward
        # because the full outer product zeroes it out exactly.
        piv_row = self.B_inv[leave_pos] / pivot
        np.multiply(d[:, None], piv_row[None, :], out=self._outer_buf)
        self.B_inv -= self._outer_buf
        self.B_inv[leave_pos] = piv_row


def solve_lp(model: LinearModel, lower=None, upper=None) -> Solution:
    """LP solve with integrality relaxed (marks ignored).

    Deterministic: identical input produces the identical pivot sequence
    and solution. Raises :class:`NumericalFailure` when the iteration
    budget is exhausted.
    """
    return PreparedLP(model).solve(lower, upper)


def check_solution(model: LinearModel, values, tol: float = 1e-6) -> list[str]:
    """Independent row-by-row and bound re-check; returns violation messages."""
    x = np.asarray(values, dtype=float)
    problems = []
    for j in range(model.num_cols):
        if x[j] < model.lower[j] - tol or x[j] > model.upper[j] + tol:
            problems.append(
                f"column {model.col_names[j]} = {x[j]} outside "
                f"[{model.lower[j]}, {model.upper[j]}]")
        if model.integer[j] and abs(x[j] - round(x[j])) > 1e-6:
            problems.append(f"column {model.col_names[j]} = {x[j]} not integral")
    for row in model.rows:
        lhs = sum(coef * x[j] for j, coef in row.coeffs)
        scale = max(1.0, max((abs(coef) for _, coef in row.coeffs), default=1.0))
        if row.sense == LE and lhs > row.rhs + tol * scale:
            problems.append(f"row {row.name}: {lhs} > {row.rhs}")
        elif row.sense == GE and lhs < row.rhs - tol * scale:
            problems.append(f"row {row.name}: {lhs} < {row.rhs}")
        elif row.sense == EQ and abs(lhs - row.rhs) > tol * scale:
            problems.append(f"row {row.name}: {lhs} != {row.rhs}")
    return problems
