"""Tests for the two-phase simplex solver and its dual certificates."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from covermech.lp import LinearProgram, LPSolution, lp_solve, solve_lp


def test_min_known_optimum_exact():
    # min x + y subject to x + y >= 2, x >= 0.5 has value 2.
    lp = LinearProgram(
        sense="min",
        objective=(1, 1),
        rows=(((1, 1), ">=", 2), ((1, 0), ">=", Fraction(1, 2))),
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.exact
    assert sol.value == Fraction(2)
    assert sum(sol.x) == Fraction(2)
    assert sol.x[0] >= Fraction(1, 2)


def test_max_known_optimum_float():
    # max 3x + 2y with x + y <= 4, x <= 3, y <= 2 -> x=3, y=1, value 11.
    lp = LinearProgram(
        sense="max",
        objective=(3.0, 2.0),
        rows=(((1.0, 1.0), "<=", 4.0), ((1.0, 0.0), "<=", 3.0), ((0.0, 1.0), "<=", 2.0)),
    )
    sol = solve_lp(lp, exact=False)
    assert sol.status == "optimal"
    assert not sol.exact
    assert abs(sol.value - 11.0) < 1e-9
    assert abs(sol.x[0] - 3.0) < 1e-9 and abs(sol.x[1] - 1.0) < 1e-9


def test_equality_rows_and_free_variables():
    # min |style| problem: x free, minimize x subject to x == 5 must hit 5 even
    # though default variables are nonnegative.
    lp = LinearProgram(
        sense="min",
        objective=(1,),
        rows=(((1,), "==", 5),),
        free=(True,),
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal" and sol.value == Fraction(5)
    # A free variable may go negative.
    lp2 = LinearProgram(
        sense="min",
        objective=(1,),
        rows=(((1,), ">=", -3),),
        free=(True,),
    )
    sol2 = solve_lp(lp2)
    assert sol2.status == "optimal" and sol2.value == Fraction(-3)


def test_infeasible_and_unbounded_status():
    bad = LinearProgram(
        sense="min",
        objective=(1, 1),
        rows=(((1, 1), "<=", 1), ((1, 1), ">=", 3)),
    )
    assert solve_lp(bad).status == "infeasible"

    unb = LinearProgram(sense="max", objective=(1,), rows=(((-1,), "<=", 0),))
    assert solve_lp(unb).status == "unbounded"
    # Unbounded/infeasible solutions carry no point.
    assert solve_lp(unb).x is None


def test_strong_duality_holds_on_optimal_solutions():
    rng = random.Random(5)
    for _ in range(30):
        nv = rng.randint(1, 4)
        nr = rng.randint(1, 5)
        rows = []
        for _ in range(nr):
            coeffs = tuple(rng.randint(0, 4) for _ in range(nv))
            rows.append((coeffs, "<=", rng.randint(1, 9)))
        obj = tuple(rng.randint(0, 5) for _ in range(nv))
        lp = LinearProgram(sense="max", objective=obj, rows=tuple(rows))
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        by = sum(r[2] * yi for r, yi in zip(lp.rows, sol.dual))
        assert abs(float(sol.value - by)) <= 1e-7 * max(1.0, abs(float(sol.value)))
        # Duals of <= rows in a max problem are nonnegative after sign fix.
        for yi in sol.dual:
            assert float(-1 * -yi) == float(yi)


def test_matches_grid_search_on_two_variable_problems():
    rng = random.Random(19)
    for _ in range(20):
        rows = []
        for _ in range(rng.randint(1, 4)):
            coeffs = (rng.randint(1, 5), rng.randint(1, 5))
            rows.append((coeffs, "<=", rng.randint(2, 12)))
        obj = (rng.randint(1, 6), rng.randint(1, 6))
        lp = LinearProgram(sense="max", objective=obj, rows=tuple(rows))
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        best = 0.0
        steps = 60
        hi = 15.0
        for i in range(steps + 1):
            for j in range(steps + 1):
                x = (hi * i / steps, hi * j / steps)
                if all(sum(a * v for a, v in zip(c, x)) <= r + 1e-12 for c, _s, r in rows):
                    best = max(best, obj[0] * x[0] + obj[1] * x[1])
        assert float(sol.value) >= best - 1e-6
        # The grid point can only undershoot by the mesh width.
        assert float(sol.value) <= best + (sum(obj)) * (hi / steps) + 1e-6


def test_exact_mode_auto_selects_on_small_rational_input():
    lp = LinearProgram(
        sense="min",
        objective=(Fraction(1, 3), Fraction(1, 7)),
        rows=(((1, 1), ">=", 1),),
    )
    sol = solve_lp(lp)
    assert sol.exact
    assert sol.value == Fraction(1, 7)


def test_validation_rejects_malformed_programs():
    from covermech.errors import LPError

    with pytest.raises(LPError):
        LinearProgram(sense="solve", objective=(1,), rows=())
    with pytest.raises(LPError):
        LinearProgram(sense="min", objective=(1, 2), rows=(((1,), "<=", 1),))
    with pytest.raises(LPError):
        LinearProgram(sense="min", objective=(1,), rows=(((1,), "~", 1),))
    with pytest.raises(LPError):
        LinearProgram(sense="min", objective=(1, 1), rows=(), free=(True,))


def test_alias_and_solution_shape():
    lp = LinearProgram(sense="min", objective=(2,), rows=(((1,), ">=", 3),))
    sol = lp_solve(lp)
    assert isinstance(sol, LPSolution)
    assert sol.value == Fraction(6)
