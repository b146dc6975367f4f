"""Estimated MDP graphs built from random transition samples.

Sampling picks a uniformly random state, then a uniformly random available
action, then takes the deterministic step.  The resulting (s, a, s') triples
are assembled into a directed multigraph-without-multiplicity: one edge per
distinct triple, self-loops (wall bumps) kept.  Transition probabilities are
not estimated -- the environments are deterministic, so edge presence is the
whole story.
"""
from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

import numpy as np

from mdpembed.gridworld import Action, GridWorld


class TransitionSample(NamedTuple):
    s: int
    a: int
    s_next: int


class MDPGraph:
    """Immutable directed graph over sampled states.

    ``out_edges[u]`` / ``in_edges[v]`` hold (action, neighbour) pairs sorted
    for determinism; ``in_edges`` is the exact transpose of ``out_edges``.
    """

    def __init__(self, edges: set[tuple[int, int, int]], directed: bool = True):
        nodes = set()
        for u, _, v in edges:
            nodes.add(u)
            nodes.add(v)
        self.nodes = nodes
        self.node_list = np.array(sorted(nodes), dtype=np.int64)
        self.node_index = {int(n): i for i, n in enumerate(self.node_list)}
        self.directed = directed
        self.edges = frozenset(edges)
        self.out_edges: dict[int, list[tuple[int, int]]] = {int(n): [] for n in nodes}
        self.in_edges: dict[int, list[tuple[int, int]]] = {int(n): [] for n in nodes}
        for u, a, v in sorted(edges):
            self.out_edges[u].append((a, v))
            self.in_edges[v].append((a, u))

    @property
    def n_nodes(self) -> int:
        return len(self.node_list)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_neighbors(self, u: int) -> list[int]:
        """Distinct successor nodes of u, sorted."""
        return sorted({v for _, v in self.out_edges[u]})

    def in_neighbors(self, v: int) -> list[int]:
        return sorted({u for _, u in self.in_edges[v]})

    def adjacency(self) -> np.ndarray:
        """Dense 0/1 adjacency over node_list order (parallel labels collapse)."""
        n = self.n_nodes
        A = np.zeros((n, n))
        for u, _, v in self.edges:
            A[self.node_index[u], self.node_index[v]] = 1.0
        return A


def sample_transitions(world: GridWorld, n: int, seed: int = 0) -> list[TransitionSample]:
    """Draw n (s, a, s') samples; deterministic for a given seed."""
    if n < 0:
        raise ValueError("sample count must be >= 0")
    rng = np.random.default_rng(seed)
    states = rng.integers(0, world.n_states, size=n)
    # uniform index into each state's available-action list
    picks = (rng.random(n) * world.action_counts[states]).astype(np.int64)
    actions = world.available_sorted[states, picks]
    nexts = world._next[states, actions]
    return [
        TransitionSample(int(s), int(a), int(v))
        for s, a, v in zip(states, actions, nexts)
    ]


def build_graph(samples: list[TransitionSample], directed: bool = True) -> MDPGraph:
    edges = {(int(s), int(a), int(v)) for s, a, v in samples}
    return MDPGraph(edges, directed=directed)


def true_graph(world: GridWorld) -> MDPGraph:
    """Graph of the full transition table (the sampling limit)."""
    edges = {(s, int(a), v) for s, a, v in world.enumerate_transitions()}
    return MDPGraph(edges)


def coverage(graph: MDPGraph, world: GridWorld) -> float:
    """Fraction of the environment's true edges present in the graph."""
    truth = {(s, int(a), v) for s, a, v in world.enumerate_transitions()}
    if not truth:
        return 1.0
    return len(graph.edges & truth) / len(truth)


def expected_samples_full_coverage(n_pairs: int) -> float:
    """Coupon-collector expectation n*H(n) for seeing all n pairs at least once."""
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    harmonic = np.sum(1.0 / np.arange(1, n_pairs + 1))
    return float(n_pairs * harmonic)


def undirected_view(graph: MDPGraph) -> MDPGraph:
    """Symmetrised copy: each u->v edge gains a v->u twin with the same label."""
    edges = set(graph.edges)
    edges |= {(v, a, u) for u, a, v in graph.edges}
    return MDPGraph(edges, directed=False)


# -- edgelist file format ---------------------------------------------------
#
#   # nodes=<n> directed=<0|1>
#   src dst action_id


def write_edgelist(graph: MDPGraph, path: str | Path) -> None:
    lines = [f"# nodes={graph.n_nodes} directed={int(graph.directed)}"]
    for u, v, a in sorted((u, v, a) for u, a, v in graph.edges):
        lines.append(f"{u} {v} {a}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path: str | Path) -> MDPGraph:
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("edgelist must start with a '# nodes=... directed=...' header")
    header = dict(
        kv.split("=") for kv in lines[0].lstrip("#").split() if "=" in kv
    )
    try:
        n_nodes = int(header["nodes"])
        directed = bool(int(header["directed"]))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad edgelist header {lines[0]!r}") from exc
    edges = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"bad edgelist line {ln!r}")
        u, v, a = (int(p) for p in parts)
        if not (0 <= a < 4):
            raise ValueError(f"bad action id in line {ln!r}")
        edges.add((u, a, v))
    g = MDPGraph(edges, directed=directed)
    if g.n_nodes != n_nodes:
        raise ValueError(
            f"header says {n_nodes} nodes but edges touch {g.n_nodes}"
        )
    return g
