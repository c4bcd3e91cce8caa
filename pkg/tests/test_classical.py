"""Classical simplex reference against independent oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_ratio_test, tableau_simplex
from qsimplex.classical import (basic_solution, direction, pivot_report,
                                ratio_test, reduced_cost, reduced_costs,
                                solve_classical)
from qsimplex.instances import random_lp
from qsimplex.lp import LpInstance, slack_identity_basis


def test_reduced_cost_of_basic_column_is_zero():
    inst = random_lp(3, 6, seed=1)
    basis = slack_identity_basis(inst)
    for k in basis:
        assert reduced_cost(inst, basis, k) == pytest.approx(0.0, abs=1e-12)


def test_reduced_cost_direct_arithmetic():
    # A_B = I2, c_B = (1,1)/sqrt(2), A_k = (0.6, 0.8), c_k = 0.1:
    # c_bar = 0.1 - 1.4/sqrt(2)
    s = 1 / np.sqrt(2)
    A = np.array([[1.0, 0.0, 0.6], [0.0, 1.0, 0.8]])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [s, s, 0.1])
    expected = 0.1 - 1.4 / np.sqrt(2)
    assert reduced_cost(inst, (0, 1), 2) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(-0.8899494936611665, rel=1e-12)


def test_reduced_costs_at_optimum_nonnegative():
    from qsimplex.instances import random_bounded_lp

    inst = random_bounded_lp(4, 9, seed=5)
    basis = slack_identity_basis(inst)
    sol = solve_classical(inst, basis, rule="dantzig")
    assert sol.status == "optimal"
    assert np.all(reduced_costs(inst, sol.basis) >= -1e-9)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_reduced_costs_match_dense_inverse(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 8))
    inst = random_lp(m, m + int(rng.integers(2, 6)), seed=seed)
    basis = slack_identity_basis(inst)
    B = inst.dense()[:, list(basis)]
    y = inst.c[list(basis)] @ np.linalg.inv(B)
    nonbasic = [j for j in range(inst.n) if j not in basis]
    expected = inst.c[nonbasic] - y @ inst.dense()[:, nonbasic]
    assert np.allclose(reduced_costs(inst, basis), expected, atol=1e-10)


def test_ratio_test_tie_breaks_lowest_row():
    # A_k = A_B x_B makes every ratio equal to 1
    inst0 = random_lp(3, 6, seed=9)
    basis = slack_identity_basis(inst0)
    x = basic_solution(inst0, basis)
    B = inst0.dense()[:, list(basis)]
    A = np.hstack([inst0.dense(), (B @ x).reshape(-1, 1)])
    inst = LpInstance.from_dense(A, inst0.b, np.append(inst0.c, -1.0))
    row, rstar = ratio_test(inst, basis, inst.n - 1)
    assert row == 0
    assert rstar == pytest.approx(1.0, rel=1e-12)


def test_ratio_test_unbounded_direction():
    A = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, -0.5]])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [0.0, 0.0, -1.0])
    assert ratio_test(inst, (0, 1), 2) is None


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_ratio_test_matches_exhaustive_scan(seed):
    rng = np.random.default_rng(seed)
    inst = random_lp(6, 10, seed=seed)
    basis = slack_identity_basis(inst)
    k = int(rng.choice([j for j in range(inst.n) if j not in basis]))
    delta = float(rng.choice([0.0, 0.05, 0.2]))
    hit = ratio_test(inst, basis, k, delta)
    truth = exhaustive_ratio_test(basic_solution(inst, basis),
                                  direction(inst, basis, k), delta)
    if truth is None:
        assert hit is None
    else:
        assert hit[0] == truth[0]
        assert hit[1] == pytest.approx(truth[1], rel=1e-10)


def test_solve_one_pivot_lp():
    # min -x1 s.t. x1 + s = 1
    inst = LpInstance.from_dense([[1.0, 1.0]], [1.0], [-1.0, 0.0])
    sol = solve_classical(inst, (1,))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-1.0)
    assert sol.pivots == 1


def test_solve_two_box_lp():
    # min -x1 - x2 s.t. x_i + s_i = 1
    A = np.hstack([np.eye(2), np.eye(2)])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [-1.0, -1.0, 0.0, 0.0])
    sol = solve_classical(inst, (2, 3))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-2.0)


def test_random_rule_reproducible():
    inst = random_lp(4, 9, seed=21)
    basis = slack_identity_basis(inst)
    a = solve_classical(inst, basis, rule="random", seed=5, keep_reports=True)
    b = solve_classical(inst, basis, rule="random", seed=5, keep_reports=True)
    assert [r.entering for r in a.reports] == [r.entering for r in b.reports]


@pytest.mark.parametrize("seed", range(20))
def test_solve_matches_tableau_oracle(seed):
    inst = random_lp(int(np.random.default_rng(seed).integers(2, 7)),
                     int(np.random.default_rng(seed + 1).integers(8, 13)),
                     seed=seed)
    basis = slack_identity_basis(inst)
    mine = solve_classical(inst, basis, rule="dantzig")
    ref_status, ref_obj, _ = tableau_simplex(inst.dense(), inst.b, inst.c, basis)
    assert mine.status == ref_status
    if ref_status == "optimal":
        assert mine.objective == pytest.approx(ref_obj, abs=1e-8)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_feasibility_and_objective_monotone(seed):
    inst = random_lp(4, 8, seed=seed)
    basis = list(slack_identity_basis(inst))
    last_obj = np.inf
    for _ in range(60):
        rep = pivot_report(instance=inst, basis=basis, rule="dantzig")
        assert np.all(basic_solution(inst, basis) >= -1e-9)
        assert rep.objective <= last_obj + 1e-9
        last_obj = rep.objective
        if rep.entering is None or rep.leaving_row is None:
            break
        basis[rep.leaving_row] = rep.entering
