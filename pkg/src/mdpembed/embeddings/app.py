"""APP: asymmetric proximity embeddings from rooted-PageRank walk samples.

Each training pair (u, v) comes from a walk that starts at root u, repeatedly
moves to a uniform out-neighbor, and after every move stops with probability
alpha, emitting the stop node as v.  The softmax P(v|u) over phi_s(u).phi_t(v)
is optimized by negative sampling with separate source and target tables.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from mdpembed.embeddings.sgd import init_table, run_pair_sgd
from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import (
    DanglingNodeError,
    TrainSpec,
    _Neighbors,
    pairs_per_walk,
)
from mdpembed.mdpgraph import MDPGraph


def sample_rooted_pairs(graph: MDPGraph, per_node: int, alpha: float,
                        max_moves: int, rng: np.random.Generator):
    """(root_row, stop_row) samples, per_node walks from every node.

    The number of moves before stopping is Geometric(alpha), capped at
    max_moves.  Walks are rooted at every node, so any node without
    out-edges raises DanglingNodeError up front (it could never move).
    """
    nbrs = _Neighbors(graph)
    n = graph.n_nodes
    for row in range(n):
        if nbrs.counts[row] == 0:
            raise DanglingNodeError(
                f"node {int(graph.node_list[row])} has no outgoing edges; "
                "cannot root a walk there"
            )
    roots = np.repeat(np.arange(n, dtype=np.int64), per_node)
    roots = rng.permutation(roots)
    moves_left = np.minimum(rng.geometric(alpha, size=roots.size), max_moves)
    current = roots.copy()
    stops = np.empty_like(roots)
    active = np.arange(roots.size)
    while active.size:
        current[active] = nbrs.step(current[active], rng)
        moves_left[active] -= 1
        finished = active[moves_left[active] == 0]
        stops[finished] = current[finished]
        active = active[moves_left[active] > 0]
    return roots, stops


def app(graph: MDPGraph, spec: TrainSpec) -> EmbeddingTable:
    """Dual-table embedding trained on rooted-walk (root, stop) pairs.

    The per-node pair budget matches what DeepWalk's window pairs would give
    under the same walk settings, so the two methods see comparable numbers
    of SGD examples per epoch.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = graph.n_nodes
    if n == 0:
        return EmbeddingTable(kind="dual", method_tag="app",
                              node_ids=np.zeros(0, dtype=np.int64),
                              source=np.zeros((0, spec.d)),
                              target=np.zeros((0, spec.d)))
    per_node = spec.walks_per_node * pairs_per_walk(spec.walk_length, spec.window)
    U = init_table(rng, n, spec.d)
    V = init_table(rng, n, spec.d)
    # every pair is a fresh Monte-Carlo draw, so the whole budget (all epochs'
    # worth) is sampled up front and consumed once under a single lr decay
    roots, stops = sample_rooted_pairs(
        graph, per_node * spec.epochs, spec.restart_prob, spec.walk_length, rng
    )
    one_pass = replace(spec, epochs=1)
    run_pair_sgd(U, V, roots, stops, one_pass, rng, n_context_rows=n)
    return EmbeddingTable(kind="dual", method_tag="app",
                          node_ids=graph.node_list.copy(), source=U, target=V)


def context_distribution(table: EmbeddingTable, node: int) -> np.ndarray:
    """Softmax P(. | node) over all nodes under the dual-table logits."""
    row = table.row(node)
    if row is None:
        raise KeyError(f"node {node} not in table")
    logits = table.target @ table.source[row]
    logits = logits - logits.max()
    e = np.exp(logits)
    return e / e.sum()
