"""NERD: role-separated embeddings from SALSA-style alternating walks.

A walk hops source -> (out-edge) -> target -> (reversed in-edge) -> source ...
so a node's role is fixed by its position's parity.  Training pairs couple
source-role occurrences with target-role occurrences inside a window, and the
usual negative-sampling loss updates the two role tables.
"""
from __future__ import annotations

import numpy as np

from mdpembed.embeddings.sgd import init_table, run_pair_sgd
from mdpembed.embeddings.tables import EmbeddingTable
from mdpembed.embeddings.walks import TrainSpec, _Neighbors
from mdpembed.mdpgraph import MDPGraph

SOURCE, TARGET = 0, 1


def alternating_walk(row: int, start_role: int, length: int,
                     out_nbrs: _Neighbors, in_nbrs: _Neighbors,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One alternating walk in row space; truncates at a role dead end."""
    rows = [row]
    roles = [start_role]
    cur, role = row, start_role
    for _ in range(length - 1):
        hop = out_nbrs if role == SOURCE else in_nbrs
        cnt = hop.counts[cur]
        if cnt == 0:
            break
        cur = int(hop.flat[hop.ptr[cur] + int(rng.random() * cnt)])
        role = 1 - role
        rows.append(cur)
        roles.append(role)
    return np.array(rows, dtype=np.int64), np.array(roles, dtype=np.int64)


def _cross_role_pairs(rows: np.ndarray, roles: np.ndarray, window: int):
    """(source_row, target_row) pairs within the window.

    Roles alternate strictly, so only odd offsets can cross roles; which side
    is the source depends on the earlier position's role.
    """
    src, tgt = [], []
    L = rows.size
    for off in range(1, min(window, L - 1) + 1, 2):
        a, b = rows[:-off], rows[off:]
        first_is_src = roles[:-off] == SOURCE
        src.append(a[first_is_src])
        tgt.append(b[first_is_src])
        src.append(b[~first_is_src])
        tgt.append(a[~first_is_src])
    if not src:
        e = np.zeros(0, dtype=np.int64)
        return e, e
    return np.concatenate(src), np.concatenate(tgt)


def nerd(graph: MDPGraph, spec: TrainSpec) -> EmbeddingTable:
    spec.validate()
    if not graph.directed:
        raise ValueError("nerd expects a directed graph; roles collapse otherwise")
    rng = np.random.default_rng(spec.seed)
    n = graph.n_nodes
    if n == 0:
        return EmbeddingTable(kind="dual", method_tag="nerd",
                              node_ids=np.zeros(0, dtype=np.int64),
                              source=np.zeros((0, spec.d)),
                              target=np.zeros((0, spec.d)))
    out_nbrs = _Neighbors(graph)
    in_nbrs = _Neighbors(graph, reverse=True)
    for row in range(n):
        if out_nbrs.counts[row] == 0 and in_nbrs.counts[row] == 0:
            raise ValueError(
                f"node {int(graph.node_list[row])} has neither in- nor out-edges"
            )

    all_src, all_tgt = [], []
    for row in range(n):
        # roots with out-edges walk in the source role, the rest as targets
        start_role = SOURCE if out_nbrs.counts[row] > 0 else TARGET
        for _ in range(spec.walks_per_node):
            rows, roles = alternating_walk(
                row, start_role, spec.walk_length, out_nbrs, in_nbrs, rng
            )
            s, t = _cross_role_pairs(rows, roles, spec.window)
            all_src.append(s)
            all_tgt.append(t)
    centers = np.concatenate(all_src) if all_src else np.zeros(0, dtype=np.int64)
    contexts = np.concatenate(all_tgt) if all_tgt else np.zeros(0, dtype=np.int64)
    U = init_table(rng, n, spec.d)
    V = init_table(rng, n, spec.d)
    run_pair_sgd(U, V, centers, contexts, spec, rng, n_context_rows=n)
    return EmbeddingTable(kind="dual", method_tag="nerd",
                          node_ids=graph.node_list.copy(), source=U, target=V)
