"""LP data model, normalization, and spectral statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsimplex.lp import (BasisSingular, LpInstance, SymmetrizedSystem,
                         basis_matrix, estimate_sigma_max, normalize,
                         slack_identity_basis, sparsity_stats)


def small_instance():
    A = np.array([[1.0, 0.0, 0.6, 2.0],
                  [0.0, 1.0, 0.8, 0.0]])
    return LpInstance.from_dense(A, [1.0, 1.0], [1.0, 1.0, 0.1, -0.5])


def test_instance_metadata():
    inst = small_instance()
    assert (inst.m, inst.n) == (2, 4)
    assert inst.col_nnz_max == 2
    assert inst.max_abs_entry == 2.0  # rounded up to a power of two


def test_max_entry_rounds_up():
    inst = LpInstance.from_dense([[3.0]], [1.0], [1.0])
    assert inst.max_abs_entry == 4.0


def test_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        LpInstance.from_dense(np.eye(2), [1.0], [1.0, 1.0])


def test_normalize_identity_example():
    # A_B = I2, c_B = (1,1), eps' = 1e-4: cost_scale = 1/sqrt(2),
    # matrix_scale ~ 0.9999, kappa ~ 1.0001
    inst = small_instance()
    state = normalize(inst, (0, 1), eps_prime=1e-4)
    assert state.cost_scale == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert state.matrix_scale == pytest.approx(0.9999, rel=1e-10)
    assert state.kappa == pytest.approx(1.0001, rel=1e-4)
    assert state.nonbasic == (2, 3)


def test_normalize_identity_unit_cost():
    A = np.hstack([np.eye(3), np.ones((3, 1))])
    c = np.array([1.0, 0.0, 0.0, -1.0])
    inst = LpInstance.from_dense(A, np.ones(3), c)
    state = normalize(inst, (0, 1, 2))
    assert state.cost_scale == pytest.approx(1.0)


def test_normalize_flags_degenerate_cost():
    A = np.hstack([np.eye(2), np.ones((2, 1))])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [0.0, 0.0, -1.0])
    state = normalize(inst, (0, 1))
    assert state.cost_degenerate
    assert state.cost_scale == 1.0


def test_normalize_singular_basis_raises():
    A = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 0.0]])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(BasisSingular):
        normalize(inst, (0, 1))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_normalize_scaled_spectrum_within_bounds(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    B = rng.standard_normal((m, m)) + np.eye(m)
    if abs(np.linalg.det(B)) < 1e-6:
        return
    A = np.hstack([B, np.eye(m)])
    inst = LpInstance.from_dense(A, np.ones(m), rng.standard_normal(m + m))
    state = normalize(inst, tuple(range(m)))
    svals = np.linalg.svd(state.matrix_scale * B, compute_uv=False)
    assert svals[0] <= 1.0 + 1e-12
    assert svals[-1] >= 1.0 / state.kappa - 1e-12
    # scaled basis costs have unit norm
    c_B = state.cost_scale * inst.c[list(state.basis)]
    assert np.linalg.norm(c_B) == pytest.approx(1.0, abs=1e-12)


def test_normalize_idempotent():
    rng = np.random.default_rng(7)
    B = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    inst = LpInstance.from_dense(np.hstack([B, np.eye(4)]), np.ones(4),
                                 rng.standard_normal(8))
    first = normalize(inst, tuple(range(4)))
    again = normalize(inst, first)
    assert again.matrix_scale == pytest.approx(first.matrix_scale, rel=1e-12)
    assert again.cost_scale == pytest.approx(first.cost_scale, rel=1e-12)


def test_normalize_matches_dense_svd():
    # matrix_scale * sigma_max(A_B) = 1 - eps' within 1e-3 relative
    rng = np.random.default_rng(0)
    B = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    inst = LpInstance.from_dense(np.hstack([B, np.eye(4)]), np.ones(4),
                                 rng.standard_normal(8))
    eps_prime = 1e-4
    state = normalize(inst, tuple(range(4)), eps_prime=eps_prime)
    sigma_max = np.linalg.svd(B, compute_uv=False)[0]
    assert state.matrix_scale * sigma_max == pytest.approx(1 - eps_prime, rel=1e-3)


def test_rescaling_preserves_reduced_cost_signs_and_ratio():
    # scaling multiplies every reduced cost by cost_scale > 0 and leaves
    # u = A_B^-1 A_k untouched (the A rescale cancels), so signs are exact
    # and the relative ratio matches up to the common 1/|c_B| factor
    from qsimplex.classical import reduced_cost, scaled_pricing_norm

    rng = np.random.default_rng(3)
    B = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    G = rng.standard_normal((4, 3))
    inst = LpInstance.from_dense(np.hstack([B, G]), np.ones(4),
                                 rng.standard_normal(7))
    basis = tuple(range(4))
    state = normalize(inst, basis)
    scaled_inst = LpInstance.from_dense(
        state.matrix_scale * inst.dense(), state.matrix_scale * inst.b,
        state.cost_scale * inst.c)
    for k in (4, 5, 6):
        raw = reduced_cost(inst, basis, k)
        scl = reduced_cost(scaled_inst, basis, k)
        assert np.sign(raw) == np.sign(scl)
        u_raw = np.linalg.solve(B, inst.column(k))
        u_scl = np.linalg.solve(state.matrix_scale * B,
                                state.matrix_scale * inst.column(k))
        assert np.allclose(u_raw, u_scl, atol=1e-12)
        ratio_raw = raw / scaled_pricing_norm(inst, basis, k)
        ratio_scl = scl / scaled_pricing_norm(scaled_inst, basis, k)
        assert ratio_scl * np.linalg.norm(inst.c[list(basis)]) == pytest.approx(
            ratio_raw * np.linalg.norm(scaled_inst.c[list(basis)]), rel=1e-10)


def test_estimate_sigma_max_diagonal():
    sigma, iters, cap = estimate_sigma_max(np.diag([3.0, 1.0]), 1e-4)
    assert 3 * (1 - 1e-4) <= sigma <= 3.0
    assert not cap


def test_estimate_sigma_max_permutation():
    sigma, _, _ = estimate_sigma_max(np.array([[0.0, 1.0], [1.0, 0.0]]), 1e-4)
    assert sigma == pytest.approx(1.0, abs=1e-9)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_estimate_sigma_max_vs_svd(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((6, 6))
    M[rng.random((6, 6)) < 0.4] = 0.0
    if not np.any(M):
        return
    eps_prime = 1e-3
    sigma, _, cap = estimate_sigma_max(M, eps_prime, seed=seed)
    truth = np.linalg.svd(M, compute_uv=False)[0]
    assert sigma <= truth + 1e-9
    if not cap:
        assert sigma >= (1 - eps_prime) * truth - 1e-9


def test_sparsity_stats_identity():
    A = np.hstack([np.eye(4), np.ones((4, 1))])
    inst = LpInstance.from_dense(A, np.ones(4), np.zeros(5))
    d_c, d_r, d, kappa = sparsity_stats(inst, tuple(range(4)))
    assert (d_r, kappa) == (1, 1.0)
    assert d_c == 4  # the dense appended column dominates
    assert d == 4


def test_sparsity_stats_triangular():
    A = np.array([[1.0, 1.0, 0.3], [0.0, 1.0, 0.4]])
    inst = LpInstance.from_dense(A, [1.0, 1.0], [0.0, 0.0, 1.0])
    d_c, d_r, d, kappa = sparsity_stats(inst, (0, 1))
    assert (d_c, d_r, d) == (2, 2, 2)
    svals = np.linalg.svd(np.array([[1.0, 1.0], [0.0, 1.0]]), compute_uv=False)
    assert kappa == pytest.approx(svals[0] / svals[-1], rel=1e-12)


def test_dense_column_count():
    A = np.zeros((5, 3))
    A[:, 0] = 1.0
    A[0, 1] = 1.0
    A[1, 2] = 1.0
    inst = LpInstance.from_dense(A, np.ones(5), np.zeros(3))
    assert inst.col_nnz_max == 5


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_symmetrized_system_singular_values(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 8))
    M = rng.standard_normal((m, m))
    sym = SymmetrizedSystem.from_system(M, rng.standard_normal(m))
    eig = np.sort(np.abs(np.linalg.eigvalsh(sym.matrix)))
    svals = np.sort(np.concatenate([np.linalg.svd(M, compute_uv=False)] * 2))
    assert np.allclose(eig, svals, atol=1e-9)
    assert sym.dimension == 2 * m
    assert np.allclose(sym.rhs[m:], 0.0)


def test_slack_identity_basis_detection():
    inst = small_instance()
    assert slack_identity_basis(inst) == (0, 1)
    neg_b = LpInstance.from_dense(np.eye(2), [-1.0, 1.0], [0.0, 0.0])
    assert slack_identity_basis(neg_b) is None


def test_basis_matrix_validates():
    inst = small_instance()
    with pytest.raises(ValueError):
        basis_matrix(inst, (0, 0))
