"""Shared negative-sampling SGD core.

One loss serves DeepWalk, APP, NERD and (through its own encoder) GraphSAGE:

    L(u, v) = -log sigma(e_u . c_v) - sum_k log sigma(-e_u . c_nk)

where e is the center/source table and c the context/target table.  The batch
functions return summed loss and dense gradients; trainers do the parameter
updates so the same code can be exercised by the finite-difference checker.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit


def _softplus(x: np.ndarray) -> np.ndarray:
    # log(1 + e^x), stable for large |x|
    return np.logaddexp(0.0, x)


def neg_sampling_batch(U: np.ndarray, V: np.ndarray, pu: np.ndarray,
                       pv: np.ndarray, neg: np.ndarray):
    """Summed skip-gram loss with negatives and its gradients w.r.t. U, V.

    pu, pv: (B,) row indices of positive pairs; neg: (B, K) negative context
    rows.  Returns (loss, dU, dV) with dense gradient matrices.
    """
    u = U[pu]                                   # (B, d)
    vpos = V[pv]                                # (B, d)
    vneg = V[neg]                               # (B, K, d)
    s_pos = np.einsum("bd,bd->b", u, vpos)
    s_neg = np.einsum("bd,bkd->bk", u, vneg)
    loss = float(np.sum(_softplus(-s_pos)) + np.sum(_softplus(s_neg)))

    g_pos = expit(s_pos) - 1.0                  # dL/ds_pos
    g_neg = expit(s_neg)                        # dL/ds_neg
    du = g_pos[:, None] * vpos + np.einsum("bk,bkd->bd", g_neg, vneg)

    dU = np.zeros_like(U)
    dV = np.zeros_like(V)
    np.add.at(dU, pu, du)
    np.add.at(dV, pv, g_pos[:, None] * u)
    np.add.at(dV.reshape(-1, V.shape[1]), neg.ravel(),
              (g_neg[:, :, None] * u[:, None, :]).reshape(-1, V.shape[1]))
    return loss, dU, dV


def pair_embeddings_loss(Z: np.ndarray, pu: np.ndarray, pv: np.ndarray,
                         neg: np.ndarray):
    """Same loss with a single table (z_u . z_v); returns (loss, dZ).

    Used by encoders (GraphSAGE) whose output plays both roles.
    """
    u = Z[pu]
    vpos = Z[pv]
    vneg = Z[neg]
    s_pos = np.einsum("bd,bd->b", u, vpos)
    s_neg = np.einsum("bd,bkd->bk", u, vneg)
    loss = float(np.sum(_softplus(-s_pos)) + np.sum(_softplus(s_neg)))

    g_pos = expit(s_pos) - 1.0
    g_neg = expit(s_neg)
    dZ = np.zeros_like(Z)
    np.add.at(dZ, pu, g_pos[:, None] * vpos + np.einsum("bk,bkd->bd", g_neg, vneg))
    np.add.at(dZ, pv, g_pos[:, None] * u)
    np.add.at(dZ.reshape(-1, Z.shape[1]), neg.ravel(),
              (g_neg[:, :, None] * u[:, None, :]).reshape(-1, Z.shape[1]))
    return loss, dZ


def init_table(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """word2vec-style init: uniform in [-0.5/d, 0.5/d)."""
    return (rng.random((n, d)) - 0.5) / d


def linear_decay(lr: float, done: int, total: int, floor: float = 1e-4) -> float:
    """Learning rate after `done` of `total` examples, never below floor*lr."""
    frac = 1.0 - done / max(total, 1)
    return lr * max(frac, floor)


def run_pair_sgd(U: np.ndarray, V: np.ndarray, centers: np.ndarray,
                 contexts: np.ndarray, spec, rng: np.random.Generator,
                 n_context_rows: int, batch_size: int = 512) -> None:
    """Epochs of shuffled minibatch SGD over fixed (center, context) pairs.

    Mutates U and V in place; negatives are redrawn uniformly every batch.
    """
    n_pairs = centers.size
    if n_pairs == 0:
        return
    total = n_pairs * spec.epochs
    done = 0
    for _ in range(spec.epochs):
        order = rng.permutation(n_pairs)
        for lo in range(0, n_pairs, batch_size):
            idx = order[lo:lo + batch_size]
            pu, pv = centers[idx], contexts[idx]
            neg = rng.integers(0, n_context_rows,
                               size=(idx.size, spec.negatives_per_positive))
            lr = linear_decay(spec.learning_rate, done, total)
            _, dU, dV = neg_sampling_batch(U, V, pu, pv, neg)
            U -= lr * dU
            V -= lr * dV
            done += idx.size
