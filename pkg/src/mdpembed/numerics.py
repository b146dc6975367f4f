"""Small dense linear-algebra kernel shared by the embedding trainers.

Matrices are plain float64 numpy arrays (row-major); nothing here is sparse
because the state spaces stay in the hundreds.  Includes power-iteration
spectral radius, Katz proximity via fixed-point iteration, a seeded randomized
truncated factorization, and the central-difference gradient checker that
every trainer's backprop is validated against.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np


class KatzDivergenceError(ValueError):
    """beta * spectral_radius(A) >= 1: the Katz series does not converge."""


class FactorPair(NamedTuple):
    """Source/target factor matrices of a low-rank decomposition S ~ source @ target.T."""

    source: np.ndarray  # n x d
    target: np.ndarray  # m x d


def spectral_radius(A: np.ndarray, iters: int = 200, tol: float = 1e-12) -> float:
    """Dominant-eigenvalue magnitude of a nonnegative square matrix.

    Power iteration from the all-ones vector; the norm ratio of successive
    iterates converges to the Perron root.  Returns 0.0 when the iteration
    hits the zero vector (nilpotent matrices).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("spectral_radius needs a square matrix")
    n = A.shape[0]
    if n == 0:
        return 0.0
    x = np.ones(n)
    est = 0.0
    for _ in range(iters):
        y = A @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        new_est = norm / float(np.linalg.norm(x))
        x = y / norm
        if abs(new_est - est) < tol * max(1.0, new_est):
            return new_est
        est = new_est
    return est


def katz_matrix(A: np.ndarray, beta: float | None = None, tol: float = 1e-10,
                max_iters: int = 10_000) -> np.ndarray:
    """Katz proximity S = sum_{k>=1} beta^k A^k = (I - beta A)^{-1} beta A.

    Computed by the fixed-point iteration S <- beta A (S + I), stopped when the
    update's Frobenius norm drops below ``tol * (1 + ||S||_F)``.  With ``beta``
    unset, uses the safety default 0.5 / spectral_radius(A).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("katz_matrix needs a square matrix")
    rho = spectral_radius(A)
    if beta is None:
        beta = 0.5 / rho if rho > 0 else 0.5
    if beta * rho >= 1.0 - 1e-12:
        raise KatzDivergenceError(
            f"beta * spectral_radius = {beta * rho:.6g} >= 1; series diverges"
        )
    bA = beta * A
    S = bA.copy()
    for _ in range(max_iters):
        S_new = bA @ S + bA
        delta = float(np.linalg.norm(S_new - S))
        S = S_new
        if delta < tol * (1.0 + float(np.linalg.norm(S))):
            return S
    raise KatzDivergenceError("Katz iteration failed to converge; beta too close to 1/rho")


def truncated_factorization(S: np.ndarray, d: int, seed: int = 0,
                            power_iters: int = 4, oversample: int = 8) -> FactorPair:
    """Rank-d decomposition S ~ source @ target.T via seeded randomized SVD.

    Gaussian sketch of width d + oversample, a few power iterations with QR
    re-orthonormalization for spectral sharpening, then an exact SVD of the
    small projected matrix.  Singular values are split evenly between the two
    factors, matching dual source/target embedding conventions.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2:
        raise ValueError("S must be a matrix")
    n, m = S.shape
    if not (1 <= d <= min(n, m)):
        raise ValueError(f"rank d={d} out of range for {n}x{m} matrix")
    rng = np.random.default_rng(seed)
    k = min(d + oversample, m)
    Y = S @ rng.standard_normal((m, k))
    Q, _ = np.linalg.qr(Y)
    for _ in range(power_iters):
        Z, _ = np.linalg.qr(S.T @ Q)
        Q, _ = np.linalg.qr(S @ Z)
    B = Q.T @ S
    Ub, sv, Vt = np.linalg.svd(B, full_matrices=False)
    U = (Q @ Ub)[:, :d]
    V = Vt[:d].T
    root = np.sqrt(sv[:d])
    return FactorPair(source=U * root, target=V * root)


def finite_diff_check(loss_fn: Callable[[np.ndarray], float], params: np.ndarray,
                      analytic_grad: np.ndarray, eps: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Per entry: |g_fd - g_an| / max(1, |g_fd| + |g_an|).  The max(1, .) floor
    keeps near-zero gradients from blowing up the ratio.
    """
    params = np.asarray(params, dtype=float)
    analytic_grad = np.asarray(analytic_grad, dtype=float)
    if params.shape != analytic_grad.shape:
        raise ValueError("gradient shape must match parameter shape")
    flat = params.ravel().copy()
    g_an = analytic_grad.ravel()
    worst = 0.0
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = float(loss_fn(flat.reshape(params.shape)))
        flat[i] = orig - eps
        lo = float(loss_fn(flat.reshape(params.shape)))
        flat[i] = orig
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise ValueError("loss is not finite near the checkpoint")
        g_fd = (hi - lo) / (2.0 * eps)
        err = abs(g_fd - g_an[i]) / max(1.0, abs(g_fd) + abs(g_an[i]))
        worst = max(worst, err)
    return worst
