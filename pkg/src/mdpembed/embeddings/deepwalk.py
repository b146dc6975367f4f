"""DeepWalk: skip-gram over uniform random walks (negative sampling)."""
from __future__ import annotations

import numpy as np

from mdpembed.embeddings.sgd import init_table, run_pair_sgd
from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import TrainSpec, random_walks, window_pairs
from mdpembed.mdpgraph import MDPGraph, undirected_view


def deepwalk(graph: MDPGraph, spec: TrainSpec) -> EmbeddingTable:
    """Single-table embedding; edge directions are ignored (symmetrised walk)."""
    spec.validate()
    view = undirected_view(graph)
    rng = np.random.default_rng(spec.seed)
    n = view.n_nodes
    if n == 0:
        return EmbeddingTable(kind="single", method_tag="deepwalk",
                              node_ids=np.zeros(0, dtype=np.int64),
                              vectors=np.zeros((0, spec.d)))
    corpus = random_walks(view, spec, rng=rng)
    centers, contexts = window_pairs(corpus, spec.window, view.node_index)
    U = init_table(rng, n, spec.d)
    V = np.zeros((n, spec.d))          # context table, discarded at output
    run_pair_sgd(U, V, centers, contexts, spec, rng, n_context_rows=n)
    return EmbeddingTable(kind="single", method_tag="deepwalk",
                          node_ids=view.node_list.copy(), vectors=U)
