"""HOPE: dual embeddings from a truncated factorization of Katz proximity."""
from __future__ import annotations

import numpy as np

from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import TrainSpec
from mdpembed.mdpgraph import MDPGraph
from mdpembed.numerics import katz_matrix, spectral_radius, truncated_factorization


def hope(graph: MDPGraph, spec: TrainSpec) -> EmbeddingTable:
    """S = Katz(A); U^s (U^t)^T ~ S by seeded randomized factorization.

    With katz_beta unset the decay defaults to 0.5 / spectral_radius(A),
    which always converges.
    """
    spec.validate()
    n = graph.n_nodes
    if n == 0:
        return EmbeddingTable(kind="dual", method_tag="hope",
                              node_ids=np.zeros(0, dtype=np.int64),
                              source=np.zeros((0, spec.d)),
                              target=np.zeros((0, spec.d)))
    if spec.d > n:
        raise ValueError(f"d={spec.d} exceeds the {n}-node graph size")
    A = graph.adjacency()
    S = katz_matrix(A, beta=spec.katz_beta)
    pair = truncated_factorization(S, spec.d, seed=spec.seed)
    return EmbeddingTable(kind="dual", method_tag="hope",
                          node_ids=graph.node_list.copy(),
                          source=pair.source, target=pair.target)


def hope_reconstruction_error(graph: MDPGraph, spec: TrainSpec) -> float:
    """Frobenius error ||S - U^s (U^t)^T||_F at dimension spec.d."""
    A = graph.adjacency()
    S = katz_matrix(A, beta=spec.katz_beta)
    pair = truncated_factorization(S, spec.d, seed=spec.seed)
    return float(np.linalg.norm(S - pair.source @ pair.target.T))
