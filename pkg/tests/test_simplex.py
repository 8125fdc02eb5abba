from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queens_completion.simplex import LPStatus, reconstruct, solve, solve_exact


def test_textbook_max():
    # max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
    res = solve([3, 2], [[1, 1], [1, 3]], [4, 6], upper=[3, np.inf])
    assert res.status is LPStatus.OPTIMAL
    assert res.value == pytest.approx(11.0)
    assert res.x == pytest.approx([3, 1])


def test_needs_phase_one():
    # max x + y with x + y >= 2 written as -x - y <= -2, and x, y <= 1.5
    res = solve([1, 1], [[-1, -1], [1, 1]], [-2, 3], upper=[1.5, 1.5])
    assert res.status is LPStatus.OPTIMAL and res.value == pytest.approx(3.0)


def test_negative_optimum():
    # max -x - 2y with x + y >= 1.4 and y <= 1
    res = solve([-1, -2], [[-1, -1]], [-1.4], upper=[1, 1])
    assert res.status is LPStatus.OPTIMAL and res.value == pytest.approx(-1.8)


def test_infeasible():
    res = solve([1], [[1], [-1]], [1, -2])
    assert res.status is LPStatus.INFEASIBLE


def test_unbounded():
    res = solve([1, 1], [[1, -1]], [1])
    assert res.status is LPStatus.UNBOUNDED


def test_duals_satisfy_strong_duality():
    c = np.array([3.0, 2.0])
    A = np.array([[1.0, 1.0], [1.0, 3.0]])
    b = np.array([4.0, 6.0])
    res = solve(c, A, b)
    assert res.duals @ b == pytest.approx(res.value)
    assert (A.T @ res.duals >= c - 1e-9).all()


def test_reconstruct_and_exact_solve():
    assert reconstruct([0.3333333333333333, 2.5]) == [Fraction(1, 3), Fraction(5, 2)]
    rows = [{0: Fraction(2), 1: Fraction(1)}, {0: Fraction(1), 1: Fraction(3)}]
    assert solve_exact(rows, [Fraction(3), Fraction(4)], 2) == [Fraction(1), Fraction(1)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10**6))
def test_against_scipy(m, k, seed):
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 6, size=(m, k)).astype(float)
    b = rng.integers(-2, 10, size=m).astype(float)
    c = rng.integers(-4, 6, size=k).astype(float)
    ub = rng.integers(1, 5, size=k).astype(float)
    ours = solve(c, A, b, upper=ub)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=list(zip([0] * k, ub)), method="highs")
    if ref.status == 2:
        assert ours.status is LPStatus.INFEASIBLE
    else:
        assert ref.status == 0
        assert ours.status is LPStatus.OPTIMAL
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
        assert (A @ ours.x <= b + 1e-7).all() and (ours.x >= -1e-9).all() and (ours.x <= ub + 1e-9).all()
