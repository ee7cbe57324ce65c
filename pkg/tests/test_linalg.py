import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from parbandit import linalg
from parbandit.linalg import (
    CovarianceState,
    _chol_rank1_inplace,
    det_ratio_bound_check,
    elliptical_potential_check,
    inv_sqrt_apply,
    mahalanobis_inv,
    make_regularized,
    min_doubling_coefficient,
    psd_dominates,
    rank1_update,
)

from .conftest import random_state

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def vec_seq(d, max_n=30):
    return arrays(np.float64, st.tuples(st.integers(0, max_n), st.just(d)), elements=finite)


# ---- make_regularized


def test_make_regularized_identity():
    s = make_regularized(3, 1.0)
    np.testing.assert_array_equal(s.gram, np.eye(3))
    assert s.logdet == 0.0
    assert s.n_updates == 0


def test_make_regularized_diagonal_logdet():
    s = make_regularized(2, 4.0)
    assert s.logdet == pytest.approx(2 * math.log(4), abs=1e-12)
    assert s.logdet == pytest.approx(2.7726, abs=1e-4)


@pytest.mark.parametrize("d,lam", [(1, 0.0), (0, 1.0), (2, -1.0), (1.5, 1.0)])
def test_make_regularized_rejects(d, lam):
    with pytest.raises(ValueError):
        make_regularized(d, lam)


# ---- rank1_update


def test_rank1_diagonal_update():
    s = rank1_update(make_regularized(2, 1.0), np.array([1.0, 0.0]))
    np.testing.assert_allclose(s.gram, np.diag([2.0, 1.0]))
    assert s.logdet == pytest.approx(math.log(2))
    assert s.n_updates == 1


def test_rank1_zero_vector_is_noop():
    base = make_regularized(2, 1.0)
    s = rank1_update(base, np.zeros(2))
    np.testing.assert_array_equal(s.gram, base.gram)
    np.testing.assert_array_equal(s.factor, base.factor)
    assert s.logdet == base.logdet


def test_rank1_does_not_mutate_input():
    base = make_regularized(3, 1.0)
    rank1_update(base, np.ones(3))
    np.testing.assert_array_equal(base.gram, np.eye(3))


def test_rank1_dimension_mismatch():
    with pytest.raises(ValueError):
        rank1_update(make_regularized(3, 1.0), np.ones(2))
    with pytest.raises(ValueError):
        make_regularized(3, 1.0).update(np.ones((2, 3)))


def test_fifty_updates_match_direct(rng):
    lam = 0.7
    s, xs = random_state(rng, 8, 50, lam)
    direct = lam * np.eye(8) + xs.T @ xs
    np.testing.assert_allclose(s.gram, direct, rtol=1e-8)
    assert s.logdet == pytest.approx(np.linalg.slogdet(direct)[1], rel=1e-8)


def test_givens_sweep_matches_cholesky(rng):
    # the large-d code path, exercised directly at small d
    d = 12
    s, _ = random_state(rng, d, 30)
    f = s.factor.copy(order="F")
    x = rng.standard_normal(d)
    _chol_rank1_inplace(f, x.copy())
    ref = np.linalg.cholesky(s.gram + np.outer(x, x))
    np.testing.assert_allclose(f, ref, rtol=1e-10, atol=1e-12)


def test_large_dimension_uses_givens_path(rng):
    d = linalg.RANK1_LOOP_MIN_DIM + 8
    s = make_regularized(d, 1.0)
    xs = rng.standard_normal((3, d))
    for x in xs:
        s.update(x)
    direct = np.eye(d) + xs.T @ xs
    np.testing.assert_allclose(s.factor @ s.factor.T, direct, rtol=1e-10, atol=1e-10)
    assert s.logdet == pytest.approx(np.linalg.slogdet(direct)[1], rel=1e-10)


def test_update_many_matches_sequential(rng):
    xs = rng.standard_normal((40, 6))
    a = make_regularized(6, 1.0)
    for x in xs:
        a.update(x)
    b = make_regularized(6, 1.0).update_many(xs)
    np.testing.assert_allclose(a.gram, b.gram, rtol=1e-12)
    assert a.logdet == pytest.approx(b.logdet, rel=1e-12)
    assert a.n_updates == b.n_updates == 40


@given(vec_seq(5), st.floats(0.1, 10))
def test_state_invariants(xs, lam):
    s = make_regularized(5, lam)
    for x in xs:
        s.update(x)
    g = s.gram
    assert np.allclose(g, g.T, rtol=1e-10, atol=0)
    recon = s.factor @ s.factor.T
    assert np.linalg.norm(recon - g) <= 1e-8 * np.linalg.norm(g)
    assert abs(s.logdet - 2 * np.sum(np.log(np.diag(s.factor)))) <= 1e-8
    ev = np.linalg.eigvalsh(g)
    assert ev.min() >= lam * (1 - 1e-9)
    L2 = float(np.max(np.sum(xs**2, axis=1))) if len(xs) else 0.0
    assert np.trace(g) <= 5 * lam + len(xs) * L2 + 1e-9 * max(1.0, np.trace(g))
    assert s.n_updates == len(xs)


@given(vec_seq(4))
def test_logdet_matrix_determinant_identity(xs):
    s = make_regularized(4, 1.0)
    for x in xs:
        expect = s.logdet + math.log1p(mahalanobis_inv(s, x) ** 2)
        s.update(x)
        assert s.logdet == pytest.approx(expect, rel=1e-9, abs=1e-9)


# ---- mahalanobis_inv / inv_sqrt_apply


def test_mahalanobis_identity():
    assert mahalanobis_inv(make_regularized(2, 1.0), np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_mahalanobis_diagonal():
    s = CovarianceState.from_gram(np.diag([4.0, 1.0]))
    assert mahalanobis_inv(s, np.array([2.0, 0.0])) == pytest.approx(1.0)


def test_mahalanobis_dense_inverse(rng):
    s, _ = random_state(rng, 7, 25)
    X = rng.standard_normal((10, 7))
    Vinv = np.linalg.inv(s.gram)
    expect = np.sqrt(np.einsum("ij,jk,ik->i", X, Vinv, X))
    np.testing.assert_allclose(mahalanobis_inv(s, X), expect, rtol=1e-8)
    assert mahalanobis_inv(s, X[0]) == pytest.approx(expect[0], rel=1e-8)


def test_mahalanobis_dimension_mismatch():
    with pytest.raises(ValueError):
        mahalanobis_inv(make_regularized(3, 1.0), np.ones(4))


def test_inv_sqrt_identity():
    np.testing.assert_allclose(inv_sqrt_apply(make_regularized(2, 1.0), np.array([1.0, 2.0])), [1.0, 2.0])


def test_inv_sqrt_diagonal():
    s = CovarianceState.from_gram(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(inv_sqrt_apply(s, np.ones(2)), [0.5, 1 / 3])


def test_inv_sqrt_factorizes_inverse(rng):
    s, _ = random_state(rng, 6, 20)
    M = inv_sqrt_apply(s, np.eye(6)).T  # columns M e_i
    np.testing.assert_allclose(M @ M.T, np.linalg.inv(s.gram), rtol=1e-8, atol=1e-12)


def test_inv_sqrt_monte_carlo_covariance(rng):
    s, _ = random_state(rng, 4, 6)
    eta = rng.standard_normal((100_000, 4))
    draws = inv_sqrt_apply(s, eta)
    emp = np.cov(draws.T)
    target = np.linalg.inv(s.gram)
    scale = np.sqrt(np.outer(np.diag(target), np.diag(target)))
    # 5% entrywise, relative to the diagonal scale so near-zero covariances are not penalized
    assert np.all(np.abs(emp - target) <= 0.05 * scale)


def test_inv_sqrt_dimension_mismatch():
    with pytest.raises(ValueError):
        inv_sqrt_apply(make_regularized(2, 1.0), np.ones(3))


# ---- psd_dominates / min_doubling_coefficient


def test_psd_reflexive():
    B = make_regularized(3, 2.0)
    res = psd_dominates(B, B, 1.0)
    assert res.dominated
    assert res.witness_value == pytest.approx(1.0)


def test_psd_exact_scaling_boundary(rng):
    B, _ = random_state(rng, 5, 8)
    res = psd_dominates(2.0 * B.gram, B, 2.0)
    assert res.witness_value == pytest.approx(2.0, rel=1e-12)
    assert res.dominated


def test_psd_rank1_shift(rng):
    B, _ = random_state(rng, 4, 10)
    x = rng.standard_normal(4)
    x *= math.sqrt(1.5) / mahalanobis_inv(B, x)
    A = rank1_update(B, x)
    res = psd_dominates(A, B, 2.0)
    assert res.witness_value == pytest.approx(2.5, rel=1e-10)
    dense = np.linalg.eigvals(np.linalg.solve(B.gram, A.gram)).real.max()
    assert res.witness_value == pytest.approx(dense, rel=1e-8)
    assert not res.dominated


def test_psd_dimension_mismatch():
    with pytest.raises(ValueError):
        psd_dominates(make_regularized(3, 1.0), make_regularized(2, 1.0))


def test_psd_power_iteration_path(rng):
    d = linalg.DENSE_EIG_MAX_DIM + 4
    B = make_regularized(d, 1.0)
    x = rng.standard_normal(d)
    A = rank1_update(B, x)
    res = psd_dominates(A, B, 2.0)
    assert res.witness_value == pytest.approx(1 + x @ x, rel=1e-7)


@given(vec_seq(3, 8), st.floats(1.0, 4.0), st.floats(0.0, 3.0))
def test_psd_monotone_in_c(xs, c, extra):
    B = make_regularized(3, 1.0)
    A = B.copy()
    for x in xs:
        A.update(x)
    if psd_dominates(A, B, c).dominated:
        assert psd_dominates(A, B, c + extra).dominated
    assert psd_dominates(A, B, c).dominated == (psd_dominates(A, B, c).witness_value <= c + linalg.DEFAULT_RTOL * c)


def test_min_doubling_coefficient_examples(rng):
    B, _ = random_state(rng, 3, 5)
    assert min_doubling_coefficient(B, B) == pytest.approx(1.0)
    assert min_doubling_coefficient(B, 2 * B.gram) == pytest.approx(2.0)
    I2 = make_regularized(2, 1.0)
    assert min_doubling_coefficient(I2, rank1_update(I2, np.array([1.0, 0.0]))) == pytest.approx(2.0)


@given(vec_seq(3, 6))
def test_min_doubling_at_least_one(xs):
    B = make_regularized(3, 1.0)
    A = B.copy().update_many(xs) if len(xs) else B.copy()
    alpha = min_doubling_coefficient(B, A)
    assert alpha >= 1.0
    if not np.any(xs):
        assert alpha == pytest.approx(1.0)
    elif np.max(np.abs(xs)) > 0.1:
        assert alpha > 1.0 + 1e-6


# ---- elliptical potential / determinant ratio


def test_elliptical_empty_and_single():
    assert elliptical_potential_check(1.0, np.zeros((0, 3))) == (0.0, 0.0)
    x = np.array([0.3, -1.2, 2.0])
    lhs, rhs = elliptical_potential_check(1.0, x[None])
    assert lhs == pytest.approx(math.log1p(x @ x))
    assert rhs == pytest.approx(math.log1p(x @ x))


@given(vec_seq(4, 40), st.floats(0.05, 5.0))
def test_elliptical_identity_property(xs, lam):
    lhs, rhs = elliptical_potential_check(lam, xs)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_det_ratio_examples():
    B = make_regularized(2, 1.0)
    assert det_ratio_bound_check(B, B) == pytest.approx((1.0, 1.0))
    A = make_regularized(2, 2.0)
    assert det_ratio_bound_check(A, B) == pytest.approx((2.0, 4.0))


def test_det_ratio_rejects_non_dominating():
    with pytest.raises(ValueError):
        det_ratio_bound_check(make_regularized(2, 1.0), make_regularized(2, 2.0))


def test_det_ratio_fuzz(rng):
    for _ in range(1000):
        B, _ = random_state(rng, 6, int(rng.integers(0, 5)), lam=float(rng.uniform(0.2, 3)))
        A = B.copy().update_many(rng.standard_normal((int(rng.integers(1, 4)), 6)))
        ray, ratio = det_ratio_bound_check(A, B)
        dense = np.linalg.eigvals(np.linalg.solve(B.gram, A.gram)).real.max()
        assert ray == pytest.approx(dense, rel=1e-8)
        assert ray <= ratio + 1e-8
