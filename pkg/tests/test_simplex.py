"""LP solver: textbook cases, the exact-arithmetic oracle, determinism."""

import numpy as np
import pytest

from fleetcharge.model import EQ, GE, LE, LinearModel
from fleetcharge.solver import SolveStatus, check_solution, solve_lp

from oracles import INFEASIBLE, OPTIMAL, lp_to_exact_inputs, random_lp, solve_lp_exact

INF = float("inf")


def simple_model(objective, bounds, rows):
    model = LinearModel()
    for i, (obj, (lo, hi)) in enumerate(zip(objective, bounds)):
        model.add_column(f"x{i}", lo, hi, objective=obj)
    for i, (coeffs, sense, rhs) in enumerate(rows):
        model.add_row(f"r{i}", coeffs, sense, rhs)
    return model


class TestTextbookCases:
    def test_single_lower_bound(self):
        model = simple_model([1.0], [(0, 10)], [([(0, 1.0)], GE, 3.0)])
        sol = solve_lp(model)
        assert sol.status == SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(3.0)
        assert sol.values[0] == pytest.approx(3.0)

    def test_two_variable_maximization(self):
        model = simple_model(
            [-1.0, -1.0], [(0, INF), (0, INF)],
            [([(0, 1.0), (1, 1.0)], LE, 1.0)])
        sol = solve_lp(model)
        assert sol.status == SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(-1.0)

    def test_infeasible(self):
        model = simple_model(
            [1.0], [(0, 10)],
            [([(0, 1.0)], LE, 1.0), ([(0, 1.0)], GE, 2.0)])
        assert solve_lp(model).status == SolveStatus.INFEASIBLE

    def test_unbounded(self):
        model = simple_model([-1.0], [(0, INF)], [([(0, 1.0)], GE, 0.0)])
        assert solve_lp(model).status == SolveStatus.UNBOUNDED

    def test_equality_with_negative_rhs(self):
        model = simple_model(
            [2.0, 3.0], [(0, 10), (0, 10)],
            [([(0, 1.0), (1, 1.0)], EQ, 4.0),
             ([(0, 1.0), (1, -1.0)], GE, -2.0)])
        sol = solve_lp(model)
        assert sol.status == SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(8.0)  # all mass on the cheap column

    def test_upper_bounded_columns(self):
        model = simple_model(
            [-5.0, -4.0], [(0, 2), (0, 3)],
            [([(0, 1.0), (1, 1.0)], LE, 4.0)])
        sol = solve_lp(model)
        assert sol.objective == pytest.approx(-5 * 2 - 4 * 2)

    def test_free_variable(self):
        model = simple_model(
            [1.0], [(-INF, INF)], [([(0, 1.0)], GE, -7.0)])
        sol = solve_lp(model)
        assert sol.objective == pytest.approx(-7.0)

    def test_fixed_column(self):
        model = simple_model(
            [1.0, 1.0], [(2, 2), (0, 5)],
            [([(0, 1.0), (1, 1.0)], GE, 3.0)])
        sol = solve_lp(model)
        assert sol.values[0] == pytest.approx(2.0)
        assert sol.objective == pytest.approx(3.0)

    def test_no_rows(self):
        model = simple_model([1.0, -2.0], [(1, 4), (0, 6)], [])
        sol = solve_lp(model)
        assert sol.objective == pytest.approx(1 * 1 - 2 * 6)


class TestExactOracle:
    """Random LPs against rational-arithmetic ground truth."""

    @pytest.mark.parametrize("seed", range(1, 13))
    def test_matches_exact_solver(self, seed):
        model = random_lp(seed, size=8)
        mine = solve_lp(model)
        status, objective = solve_lp_exact(*lp_to_exact_inputs(model))
        if status == OPTIMAL:
            assert mine.status == SolveStatus.OPTIMAL
            assert mine.objective == pytest.approx(float(objective), abs=1e-7)
        elif status == INFEASIBLE:
            assert mine.status == SolveStatus.INFEASIBLE
        else:
            assert mine.status == SolveStatus.UNBOUNDED

    def test_solution_passes_independent_check(self):
        for seed in (3, 5, 8):
            model = random_lp(seed)
            sol = solve_lp(model)
            if sol.status == SolveStatus.OPTIMAL:
                assert check_solution(model, sol.values) == []


class TestDeterminism:
    def test_identical_runs(self, depot_scenario):
        import fleetcharge as fc

        model = fc.build_problem(depot_scenario).model
        a = solve_lp(model)
        b = solve_lp(model)
        assert a.objective == b.objective
        assert np.array_equal(a.values, b.values)


class TestCheckSolution:
    def test_flags_violations(self):
        model = simple_model([1.0], [(0, 10)], [([(0, 1.0)], GE, 3.0)])
        assert check_solution(model, [1.0])  # below the row
        assert check_solution(model, [11.0])  # above the bound
        assert check_solution(model, [5.0]) == []

    def test_flags_fractional_integers(self):
        model = LinearModel()
        model.add_column("y", 0, 1, integer=True)
        assert check_solution(model, [0.4])
        assert check_solution(model, [1.0]) == []
