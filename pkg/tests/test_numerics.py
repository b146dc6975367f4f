import numpy as np
import pytest

from mdpembed.numerics import (
    FactorPair,
    KatzDivergenceError,
    finite_diff_check,
    katz_matrix,
    spectral_radius,
    truncated_factorization,
)


def test_spectral_radius_closed_forms():
    assert spectral_radius(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0)
    assert spectral_radius(np.eye(3)) == pytest.approx(1.0)
    assert spectral_radius(np.array([[0.0, 2.0], [0.0, 0.0]])) == 0.0
    assert spectral_radius(np.zeros((4, 4))) == 0.0
    # scaled all-ones: rho = n * c
    assert spectral_radius(np.full((5, 5), 0.3)) == pytest.approx(1.5, rel=1e-8)


def test_spectral_radius_matches_numpy_on_random_graphs():
    rng = np.random.default_rng(0)
    for _ in range(10):
        A = (rng.random((12, 12)) < 0.3).astype(float)
        truth = float(np.max(np.abs(np.linalg.eigvals(A))))
        est = spectral_radius(A)
        assert est == pytest.approx(truth, abs=1e-6)
        assert spectral_radius(A.T) == pytest.approx(est, abs=1e-6)


def test_spectral_radius_rejects_non_square():
    with pytest.raises(ValueError):
        spectral_radius(np.zeros((2, 3)))


def test_katz_nilpotent_terminates_at_first_term():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    S = katz_matrix(A, beta=0.5)
    assert np.allclose(S, [[0.0, 0.5], [0.0, 0.0]], atol=1e-12)


def test_katz_two_cycle_closed_form():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    S = katz_matrix(A, beta=0.5)
    # (I - 0.5 A)^{-1} 0.5 A  =  [[1/3, 2/3], [2/3, 1/3]]
    assert np.allclose(S, [[1 / 3, 2 / 3], [2 / 3, 1 / 3]], atol=1e-9)


def test_katz_matches_direct_inverse_on_random_graph():
    rng = np.random.default_rng(7)
    A = (rng.random((15, 15)) < 0.25).astype(float)
    beta = 0.5 / max(spectral_radius(A), 1e-12)
    S = katz_matrix(A, beta=beta)
    truth = np.linalg.solve(np.eye(15) - beta * A, beta * A)
    assert np.allclose(S, truth, atol=1e-8)
    # fixed-point residual invariant
    resid = np.linalg.norm(S - beta * A @ (S + np.eye(15)))
    assert resid < 1e-10 * (1 + np.linalg.norm(S))


def test_katz_default_beta_is_half_inverse_radius():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])  # rho = 1 -> default beta 0.5
    assert np.allclose(katz_matrix(A), katz_matrix(A, beta=0.5))


def test_katz_divergence_error():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(KatzDivergenceError):
        katz_matrix(A, beta=1.0)
    with pytest.raises(KatzDivergenceError):
        katz_matrix(A, beta=1.5)


def test_factorization_rank1_exact():
    S = np.array([[0.0, 0.5], [0.0, 0.0]])
    pair = truncated_factorization(S, 1, seed=0)
    assert isinstance(pair, FactorPair)
    recon = pair.source @ pair.target.T
    assert np.linalg.norm(recon - S) < 1e-8
    assert pair.source.shape == (2, 1) and pair.target.shape == (2, 1)


def test_factorization_full_rank_exact():
    rng = np.random.default_rng(3)
    S = rng.standard_normal((6, 6))
    pair = truncated_factorization(S, 6, seed=1)
    assert np.linalg.norm(pair.source @ pair.target.T - S) < 1e-8


def test_factorization_error_monotone_in_rank():
    rng = np.random.default_rng(11)
    S = rng.standard_normal((10, 10))
    errs = []
    for d in range(1, 8):
        pair = truncated_factorization(S, d, seed=5)
        errs.append(np.linalg.norm(pair.source @ pair.target.T - S))
    for lo, hi in zip(errs[1:], errs[:-1]):
        assert lo <= hi + 1e-10
    # and it is near the optimal rank-d error given by the SVD tail
    sv = np.linalg.svd(S, compute_uv=False)
    for d, err in zip(range(1, 8), errs):
        optimal = np.sqrt(np.sum(sv[d:] ** 2))
        assert err <= optimal * (1 + 1e-6) + 1e-9


def test_factorization_deterministic_and_validated():
    S = np.arange(12.0).reshape(3, 4)
    a = truncated_factorization(S, 2, seed=9)
    b = truncated_factorization(S, 2, seed=9)
    assert np.array_equal(a.source, b.source) and np.array_equal(a.target, b.target)
    with pytest.raises(ValueError):
        truncated_factorization(S, 0)
    with pytest.raises(ValueError):
        truncated_factorization(S, 4)  # > min(3, 4)


def test_finite_diff_quadratic():
    loss = lambda x: float(np.sum(x**2))
    x = np.array([3.0])
    assert finite_diff_check(loss, x, np.array([6.0]), eps=1e-5) < 1e-8


def test_finite_diff_detects_doubled_gradient():
    loss = lambda x: float(np.sum(x**2))
    x = np.array([3.0])
    err = finite_diff_check(loss, x, np.array([12.0]), eps=1e-5)
    assert err == pytest.approx(1 / 3, abs=1e-6)


def test_finite_diff_stationary_point():
    loss = lambda x: float(np.sum(x**2))
    x = np.zeros(3)
    assert finite_diff_check(loss, x, np.zeros(3), eps=1e-5) < 1e-6


def test_finite_diff_multidim_and_errors():
    # matrix-shaped params with a mixed loss
    rng = np.random.default_rng(2)
    W = rng.standard_normal((2, 3))
    loss = lambda w: float(np.sum(np.sin(w)) + 0.5 * np.sum(w**2))
    grad = np.cos(W) + W
    assert finite_diff_check(loss, W, grad, eps=1e-6) < 1e-7
    with pytest.raises(ValueError):
        finite_diff_check(loss, W, np.zeros((3, 2)))
    bad = lambda w: float("nan")
    with pytest.raises(ValueError):
        finite_diff_check(bad, W, grad)
