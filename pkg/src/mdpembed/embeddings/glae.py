"""Graph Linear Autoencoder: Z = Ahat W, edges decoded by sigma(z_u . z_v).

Ahat is the symmetrically normalized adjacency (with self-loops) of the
undirected view.  The loss is mean binary cross-entropy over all unique
undirected edges plus an equal number of uniformly sampled non-edges,
re-drawn every epoch; W is the only parameter.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from mdpembed.embeddings.sgd import linear_decay
from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import TrainSpec
from mdpembed.mdpgraph import MDPGraph, undirected_view


def normalized_adjacency(graph: MDPGraph) -> np.ndarray:
    """D^{-1/2} (A + I) D^{-1/2}; existing self-loops are not double-counted."""
    A = graph.adjacency()
    np.fill_diagonal(A, 1.0)
    d = A.sum(axis=1)
    inv_root = 1.0 / np.sqrt(d)
    return A * inv_root[:, None] * inv_root[None, :]


def bce_loss_and_grad(Ahat: np.ndarray, W: np.ndarray, pu: np.ndarray,
                      pv: np.ndarray, y: np.ndarray):
    """Mean BCE over labelled pairs and its gradient w.r.t. W."""
    Z = Ahat @ W
    s = np.einsum("bd,bd->b", Z[pu], Z[pv])
    # BCE(sigma(s), y) = softplus(s) - y s
    loss = float(np.mean(np.logaddexp(0.0, s) - y * s))
    g = (expit(s) - y) / s.size
    dZ = np.zeros_like(Z)
    np.add.at(dZ, pu, g[:, None] * Z[pv])
    np.add.at(dZ, pv, g[:, None] * Z[pu])
    return loss, Ahat.T @ dZ


def _edge_arrays(A: np.ndarray):
    """Unique undirected edges (u <= v) and the complementary non-edge pool."""
    iu, iv = np.triu_indices(A.shape[0])
    present = A[iu, iv] > 0
    return (iu[present], iv[present]), (iu[~present], iv[~present])


def glae(graph: MDPGraph, spec: TrainSpec, steps_per_epoch: int = 40,
         lr_scale: float = 20.0) -> EmbeddingTable:
    spec.validate()
    view = undirected_view(graph)
    rng = np.random.default_rng(spec.seed)
    n = view.n_nodes
    if n == 0:
        return EmbeddingTable(kind="single", method_tag="glae",
                              node_ids=np.zeros(0, dtype=np.int64),
                              vectors=np.zeros((0, spec.d)))
    Ahat = normalized_adjacency(view)
    (pos_u, pos_v), (zero_u, zero_v) = _edge_arrays(view.adjacency())
    m = pos_u.size
    W = (rng.random((n, spec.d)) - 0.5) * 2.0 / np.sqrt(n)
    lr0 = spec.learning_rate * lr_scale
    total = spec.epochs * steps_per_epoch
    step = 0
    for _ in range(spec.epochs):
        if zero_u.size:
            take = rng.choice(zero_u.size, size=m, replace=zero_u.size < m)
            pu = np.concatenate([pos_u, zero_u[take]])
            pv = np.concatenate([pos_v, zero_v[take]])
            y = np.concatenate([np.ones(m), np.zeros(m)])
        else:       # degenerate: complete graph, positives only
            pu, pv, y = pos_u, pos_v, np.ones(m)
        for _ in range(steps_per_epoch):
            lr = linear_decay(lr0, step, total)
            _, dW = bce_loss_and_grad(Ahat, W, pu, pv, y)
            W -= lr * dW
            step += 1
    Z = Ahat @ W
    return EmbeddingTable(kind="single", method_tag="glae",
                          node_ids=view.node_list.copy(), vectors=Z)
