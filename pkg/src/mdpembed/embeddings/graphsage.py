"""Unsupervised GraphSAGE with the GCN-style mean aggregator.

Node features are one-hot identities (the mazes carry no attributes), so the
first layer's input is just the mean-aggregation matrix itself.  Two tanh
layers, final row normalization, and the DeepWalk-style negative-sampling
loss over co-occurring walk pairs, backpropagated into the two weight
matrices by hand.
"""
from __future__ import annotations

import numpy as np

from mdpembed.embeddings.sgd import linear_decay, pair_embeddings_loss
from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import TrainSpec, random_walks, window_pairs
from mdpembed.mdpgraph import MDPGraph, undirected_view

_EPS = 1e-12


def mean_aggregate_matrix(graph: MDPGraph) -> np.ndarray:
    """Row-stochastic M with M[v] uniform over N(v) + v (binary membership)."""
    A = graph.adjacency()
    np.fill_diagonal(A, 1.0)
    return A / A.sum(axis=1, keepdims=True)


def forward(M: np.ndarray, W1: np.ndarray, W2: np.ndarray):
    """Two aggregation layers then row normalization; returns (Z, cache)."""
    H1 = np.tanh(M @ W1)             # identity features: M @ I @ W1
    G1 = M @ H1
    T2 = np.tanh(G1 @ W2)
    r = np.maximum(np.linalg.norm(T2, axis=1, keepdims=True), _EPS)
    Z = T2 / r
    return Z, (H1, G1, T2, r)


def loss_and_grads(M: np.ndarray, W1: np.ndarray, W2: np.ndarray,
                   pu: np.ndarray, pv: np.ndarray, neg: np.ndarray):
    """Summed pair loss and gradients w.r.t. both weight matrices."""
    Z, (H1, G1, T2, r) = forward(M, W1, W2)
    loss, dZ = pair_embeddings_loss(Z, pu, pv, neg)
    # through row normalization: d(h/r) pulled back onto h
    zdot = np.sum(Z * dZ, axis=1, keepdims=True)
    dT2 = (dZ - Z * zdot) / r
    dX2 = dT2 * (1.0 - T2**2)
    dW2 = G1.T @ dX2
    dH1 = M.T @ (dX2 @ W2.T)
    dX1 = dH1 * (1.0 - H1**2)
    dW1 = M.T @ dX1
    return loss, dW1, dW2


def graphsage_unsup(graph: MDPGraph, spec: TrainSpec,
                    batch_size: int = 4096) -> EmbeddingTable:
    spec.validate()
    view = undirected_view(graph)
    rng = np.random.default_rng(spec.seed)
    n = view.n_nodes
    if n == 0:
        return EmbeddingTable(kind="single", method_tag="graphsage",
                              node_ids=np.zeros(0, dtype=np.int64),
                              vectors=np.zeros((0, spec.d)))
    M = mean_aggregate_matrix(view)
    corpus = random_walks(view, spec, rng=rng)
    centers, contexts = window_pairs(corpus, spec.window, view.node_index)
    W1 = (rng.random((n, spec.d)) - 0.5) * 2.0 / np.sqrt(n)
    W2 = (rng.random((spec.d, spec.d)) - 0.5) * 2.0 / np.sqrt(spec.d)

    n_pairs = centers.size
    total = n_pairs * spec.epochs
    done = 0
    for _ in range(spec.epochs):
        order = rng.permutation(n_pairs)
        for lo in range(0, n_pairs, batch_size):
            idx = order[lo:lo + batch_size]
            neg = rng.integers(0, n, size=(idx.size, spec.negatives_per_positive))
            lr = linear_decay(spec.learning_rate, done, total)
            _, dW1, dW2 = loss_and_grads(M, W1, W2, centers[idx], contexts[idx], neg)
            W1 -= lr * dW1
            W2 -= lr * dW2
            done += idx.size
    Z, _ = forward(M, W1, W2)
    return EmbeddingTable(kind="single", method_tag="graphsage",
                          node_ids=view.node_list.copy(), vectors=Z)
