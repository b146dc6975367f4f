"""Embedding tables, the DQN state-input rule, and the on-disk format.

A table maps graph node ids to real vectors.  "single" tables carry one
matrix; "dual" tables carry separate source and target matrices (asymmetric
methods).  Files store a ``n d kind method_tag`` header then one row per
vector, source block first for dual tables; floats are printed with 17
significant digits so the round trip is bit-exact.  File rows are indexed by
state id 0..n-1; tables trained on partially sampled graphs are expanded with
zero rows when written (the same zero-vector rule the in-memory lookup uses
for unseen states).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mdpembed.gridworld import GridWorld

log = logging.getLogger("mdpembed.embeddings")


@dataclass
class EmbeddingTable:
    kind: str                      # "single" | "dual"
    method_tag: str
    node_ids: np.ndarray           # sorted graph node ids, one per row
    vectors: np.ndarray | None = None    # n x d (single)
    source: np.ndarray | None = None     # n x d (dual)
    target: np.ndarray | None = None     # n x d (dual)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind == "single":
            assert self.vectors is not None
            mats = [self.vectors]
        elif self.kind == "dual":
            assert self.source is not None and self.target is not None
            assert self.source.shape == self.target.shape
            mats = [self.source, self.target]
        else:
            raise ValueError(f"unknown table kind {self.kind!r}")
        for m in mats:
            if m.shape[0] != len(self.node_ids):
                raise ValueError("row count does not match node ids")
            if not np.all(np.isfinite(m)):
                raise ValueError("embedding contains non-finite entries")
        self._index = {int(v): i for i, v in enumerate(self.node_ids)}

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def d(self) -> int:
        m = self.vectors if self.kind == "single" else self.source
        return m.shape[1]

    @property
    def input_dim(self) -> int:
        """Length of the state-input vector this table produces."""
        return self.d if self.kind == "single" else 2 * self.d

    def row(self, node: int) -> int | None:
        return self._index.get(int(node))


@dataclass
class MatrixBaseline:
    """Raw flattened-grid state input (the no-embedding baseline)."""

    method_tag: str = "matrix"


def input_dim(table: EmbeddingTable | MatrixBaseline, world: GridWorld) -> int:
    if isinstance(table, MatrixBaseline):
        return world.n_states
    return table.input_dim


_warned_states: set[tuple[int, int, str]] = set()


def state_input(table: EmbeddingTable | MatrixBaseline, world: GridWorld,
                s: int) -> np.ndarray:
    """Input vector for state s: phi(s), source(s)||target(s), or the grid."""
    if isinstance(table, MatrixBaseline):
        return world.matrix_representation(s)
    row = table.row(s)
    if row is None:
        key = (id(table), s, table.method_tag)
        if key not in _warned_states:
            _warned_states.add(key)
            log.warning(
                "state %d absent from %s embedding; falling back to zero vector",
                s, table.method_tag,
            )
        return np.zeros(table.input_dim)
    if table.kind == "single":
        return table.vectors[row].copy()
    return np.concatenate([table.source[row], table.target[row]])


# -- file format ------------------------------------------------------------


def write_embedding(table: EmbeddingTable, path: str | Path,
                    n_states: int | None = None) -> None:
    """Write a table; rows in the file are indexed by state id directly.

    When the table does not already cover states 0..n-1 contiguously,
    ``n_states`` must be given and missing states are written as zero rows.
    """
    ids = table.node_ids
    contiguous = ids.size > 0 and np.array_equal(ids, np.arange(ids.size))
    if not contiguous and n_states is None:
        raise ValueError(
            "table rows are not the contiguous state range; pass n_states to expand"
        )
    n = ids.size if n_states is None else n_states
    if ids.size and ids.max() >= n:
        raise ValueError("node id exceeds n_states")

    def expand(m):
        full = np.zeros((n, table.d))
        full[ids] = m
        return full

    if table.kind == "single":
        blocks = [expand(table.vectors)]
    else:
        blocks = [expand(table.source), expand(table.target)]

    lines = [f"{n} {table.d} {table.kind} {table.method_tag}"]
    for block in blocks:
        for row in block:
            lines.append(" ".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_embedding(path: str | Path) -> EmbeddingTable:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty embedding file")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"bad embedding header {lines[0]!r}")
    n, d, kind, tag = int(head[0]), int(head[1]), head[2], head[3]
    expect = n if kind == "single" else 2 * n
    body = lines[1:]
    if len(body) != expect:
        raise ValueError(f"expected {expect} rows, found {len(body)}")
    if body:
        data = np.array([[float(x) for x in ln.split()] for ln in body])
        if data.shape[1] != d:
            raise ValueError("row length does not match header dimension")
    else:
        data = np.zeros((0, d))
    ids = np.arange(n, dtype=np.int64)
    if kind == "single":
        return EmbeddingTable(kind="single", method_tag=tag, node_ids=ids,
                              vectors=data.reshape(n, d))
    return EmbeddingTable(kind="dual", method_tag=tag, node_ids=ids,
                          source=data[:n], target=data[n:])
