"""Random-walk corpora and the shared training-pair bookkeeping.

Walks operate in row-index space (0..n-1 over graph.node_list) for speed; the
corpus stores node ids so its invariant -- every consecutive pair is an edge
of the generating graph -- can be checked directly against the graph.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mdpembed.mdpgraph import MDPGraph


class DanglingNodeError(ValueError):
    """A walk start (or root) has no outgoing edges in the walked view."""


@dataclass
class TrainSpec:
    """Hyperparameters shared by all trainers; unused fields are ignored."""

    d: int = 30
    epochs: int = 5
    learning_rate: float = 0.025
    negatives_per_positive: int = 5
    window: int = 5
    walk_length: int = 20
    walks_per_node: int = 10
    restart_prob: float = 0.15   # APP stop probability
    katz_beta: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.d < 1:
            raise ValueError("embedding dimension must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not (0.0 < self.restart_prob < 1.0):
            raise ValueError("restart_prob must lie in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.walk_length < 1 or self.walks_per_node < 1:
            raise ValueError("walk settings must be >= 1")
        if self.negatives_per_positive < 1:
            raise ValueError("need at least one negative per positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class WalkCorpus:
    walks: list[np.ndarray]        # node-id sequences
    walk_length: int
    walks_per_node: int


class _Neighbors:
    """CSR-style distinct-successor lists in row-index space."""

    def __init__(self, graph: MDPGraph, reverse: bool = False):
        n = graph.n_nodes
        lists = []
        for node in graph.node_list:
            nbrs = graph.in_neighbors(int(node)) if reverse else graph.out_neighbors(int(node))
            lists.append(np.array([graph.node_index[v] for v in nbrs], dtype=np.int64))
        self.counts = np.array([len(l) for l in lists], dtype=np.int64)
        self.ptr = np.concatenate([[0], np.cumsum(self.counts)])
        self.flat = (
            np.concatenate(lists) if lists and self.ptr[-1] > 0
            else np.zeros(0, dtype=np.int64)
        )

    def step(self, rows: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One uniform neighbor step for each row; caller guarantees counts > 0."""
        picks = (rng.random(rows.size) * self.counts[rows]).astype(np.int64)
        return self.flat[self.ptr[rows] + picks]


def random_walks(graph: MDPGraph, spec: TrainSpec,
                 rng: np.random.Generator | None = None) -> WalkCorpus:
    """walks_per_node uniform random walks of walk_length nodes from every node."""
    spec.validate()
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    nbrs = _Neighbors(graph)
    for row, cnt in enumerate(nbrs.counts):
        if cnt == 0:
            raise DanglingNodeError(
                f"node {int(graph.node_list[row])} has no outgoing edges in the walked view"
            )
    n = graph.n_nodes
    walks = []
    if n == 0:
        return WalkCorpus(walks=walks, walk_length=spec.walk_length,
                          walks_per_node=spec.walks_per_node)
    # all walks advance in lockstep: column j holds step j of every walk
    starts = np.repeat(np.arange(n, dtype=np.int64), spec.walks_per_node)
    steps = [starts]
    for _ in range(spec.walk_length - 1):
        steps.append(nbrs.step(steps[-1], rng))
    trails = np.stack(steps, axis=1)          # (n*walks_per_node, walk_length)
    ids = graph.node_list[trails]
    walks = [ids[i] for i in range(ids.shape[0])]
    return WalkCorpus(walks=walks, walk_length=spec.walk_length,
                      walks_per_node=spec.walks_per_node)


def pairs_per_walk(walk_length: int, window: int) -> int:
    """Number of (center, context) pairs a full-length walk yields."""
    total = 0
    for i in range(walk_length):
        total += min(i + window, walk_length - 1) - max(i - window, 0)
    return total


def window_pairs(corpus: WalkCorpus, window: int,
                 node_index: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """All (center_row, context_row) pairs within the window, as row indices."""
    centers, contexts = [], []
    for walk in corpus.walks:
        rows = np.array([node_index[int(v)] for v in walk], dtype=np.int64)
        L = rows.size
        for off in range(1, window + 1):
            if off >= L:
                break
            a, b = rows[:-off], rows[off:]
            centers.append(a)
            contexts.append(b)
            centers.append(b)
            contexts.append(a)
    if not centers:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(centers), np.concatenate(contexts)
