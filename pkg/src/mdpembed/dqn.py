"""From-scratch DQN: tanh MLP Q-network, manual backprop, replay, eps-greedy.

The network has two hidden tanh layers and a tanh output layer with one
neuron per action, so Q-values live in (-1, 1) -- which is also why returns
are discounted (gamma below): undiscounted maze returns would leave that
range.  Training is plain SGD on the MSE between Q(x_t)[a] and the bootstrap
target r + gamma * max_a' Q(x_{t+1})[a'], with the target treated as a
constant.  One update per environment step, sampled from a FIFO replay ring.

Episodes start at the world's start state and end when the goal is reached or
the cumulative reward drops to the floor (-25 by default).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from mdpembed.embeddings.tables import EmbeddingTable, MatrixBaseline, input_dim, state_input
from mdpembed.gridworld import Action, GridWorld


@dataclass
class AgentConfig:
    h1: int = 64
    h2: int = 64
    learning_rate: float = 0.01
    gamma: float = 0.95
    epsilon_start: float = 1.0
    epsilon_min: float = 0.05
    epsilon_decay: float = 0.95      # multiplied in after every episode
    batch_size: int = 32
    replay_capacity: int = 10_000
    reward_floor: float = -25.0
    episodes: int = 60
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError("gamma must lie in [0, 1]")
        if not (0.0 <= self.epsilon_min <= self.epsilon_start <= 1.0):
            raise ValueError("need 0 <= epsilon_min <= epsilon_start <= 1")
        if self.reward_floor >= 0:
            raise ValueError("reward_floor must be negative")
        if min(self.h1, self.h2, self.batch_size, self.replay_capacity,
               self.episodes) < 1:
            raise ValueError("sizes must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")


@dataclass
class MLPParams:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray

    @property
    def in_dim(self) -> int:
        return self.W1.shape[0]

    def copy(self) -> "MLPParams":
        return MLPParams(*(m.copy() for m in self.as_tuple()))

    def as_tuple(self):
        return (self.W1, self.b1, self.W2, self.b2, self.W3, self.b3)

    def flat(self) -> np.ndarray:
        return np.concatenate([m.ravel() for m in self.as_tuple()])

    @classmethod
    def from_flat(cls, vec: np.ndarray, shapes) -> "MLPParams":
        mats, off = [], 0
        for shp in shapes:
            size = int(np.prod(shp))
            mats.append(vec[off:off + size].reshape(shp))
            off += size
        return cls(*mats)

    def shapes(self):
        return [m.shape for m in self.as_tuple()]


def init_params(in_dim: int, config: AgentConfig, rng: np.random.Generator) -> MLPParams:
    """Per-layer uniform init in +-1/sqrt(fan_in) for weights and biases."""
    def layer(n_in, n_out):
        bound = 1.0 / np.sqrt(n_in)
        W = rng.uniform(-bound, bound, size=(n_in, n_out))
        b = rng.uniform(-bound, bound, size=n_out)
        return W, b

    W1, b1 = layer(in_dim, config.h1)
    W2, b2 = layer(config.h1, config.h2)
    W3, b3 = layer(config.h2, 4)
    return MLPParams(W1, b1, W2, b2, W3, b3)


def mlp_forward(params: MLPParams, x: np.ndarray) -> np.ndarray:
    """Q-values; accepts a single input vector or a (B, in_dim) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != params.in_dim:
        raise ValueError(
            f"input length {X.shape[1]} does not match network input {params.in_dim}"
        )
    H1 = np.tanh(X @ params.W1 + params.b1)
    H2 = np.tanh(H1 @ params.W2 + params.b2)
    Q = np.tanh(H2 @ params.W3 + params.b3)
    return Q[0] if single else Q


def td_target(r: float, q_next: np.ndarray, terminal: bool, gamma: float) -> float:
    if terminal:
        return float(r)
    return float(r + gamma * np.max(q_next))


class ReplayTransition(NamedTuple):
    x: np.ndarray
    a: int
    r: float
    x_next: np.ndarray
    terminal: bool


class Batch(NamedTuple):
    x: np.ndarray          # (B, dim)
    a: np.ndarray          # (B,)
    r: np.ndarray          # (B,)
    x_next: np.ndarray     # (B, dim)
    terminal: np.ndarray   # (B,) bool


def batch_from_transitions(transitions) -> Batch:
    ts = list(transitions)
    if not ts:
        raise ValueError("empty batch")
    return Batch(
        x=np.stack([t.x for t in ts]),
        a=np.array([t.a for t in ts], dtype=np.int64),
        r=np.array([t.r for t in ts]),
        x_next=np.stack([t.x_next for t in ts]),
        terminal=np.array([t.terminal for t in ts], dtype=bool),
    )


class ReplayBuffer:
    """FIFO ring of transitions in preallocated arrays."""

    def __init__(self, capacity: int, dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.x = np.zeros((capacity, dim))
        self.a = np.zeros(capacity, dtype=np.int64)
        self.r = np.zeros(capacity)
        self.x_next = np.zeros((capacity, dim))
        self.terminal = np.zeros(capacity, dtype=bool)
        self.size = 0
        self._head = 0   # next slot to overwrite = oldest entry once full

    def __len__(self) -> int:
        return self.size

    def push(self, t: ReplayTransition) -> None:
        i = self._head
        self.x[i] = t.x
        self.a[i] = t.a
        self.r[i] = t.r
        self.x_next[i] = t.x_next
        self.terminal[i] = t.terminal
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(self.x[idx], self.a[idx], self.r[idx],
                     self.x_next[idx], self.terminal[idx])

    def oldest(self) -> ReplayTransition:
        i = self._head if self.size == self.capacity else 0
        return ReplayTransition(self.x[i].copy(), int(self.a[i]), float(self.r[i]),
                                self.x_next[i].copy(), bool(self.terminal[i]))


def batch_loss_and_grads(params: MLPParams, batch: Batch, gamma: float):
    """MSE against frozen bootstrap targets; returns (loss, grads tuple)."""
    X, A = batch.x, batch.a
    B = X.shape[0]
    if B == 0:
        raise ValueError("empty batch")
    q_next = mlp_forward(params, batch.x_next)
    targets = np.where(batch.terminal, batch.r,
                       batch.r + gamma * q_next.max(axis=1))

    H1 = np.tanh(X @ params.W1 + params.b1)
    H2 = np.tanh(H1 @ params.W2 + params.b2)
    Q = np.tanh(H2 @ params.W3 + params.b3)
    pred = Q[np.arange(B), A]
    diff = pred - targets
    loss = float(np.mean(diff**2))
    if not np.isfinite(loss):
        raise ValueError("non-finite training loss")

    dQ = np.zeros_like(Q)
    dQ[np.arange(B), A] = 2.0 * diff / B
    dZ3 = dQ * (1.0 - Q**2)
    dW3 = H2.T @ dZ3
    db3 = dZ3.sum(axis=0)
    dH2 = dZ3 @ params.W3.T
    dZ2 = dH2 * (1.0 - H2**2)
    dW2 = H1.T @ dZ2
    db2 = dZ2.sum(axis=0)
    dH1 = dZ2 @ params.W2.T
    dZ1 = dH1 * (1.0 - H1**2)
    dW1 = X.T @ dZ1
    db1 = dZ1.sum(axis=0)
    return loss, (dW1, db1, dW2, db2, dW3, db3)


def train_step(params: MLPParams, batch, gamma: float, lr: float) -> float:
    """One SGD update in place; returns the pre-update loss."""
    if isinstance(batch, (list, tuple)) and not isinstance(batch, Batch):
        batch = batch_from_transitions(batch)
    loss, grads = batch_loss_and_grads(params, batch, gamma)
    for m, g in zip(params.as_tuple(), grads):
        m -= lr * g
    return loss


def select_action(q: np.ndarray, available, epsilon: float,
                  rng: np.random.Generator) -> Action:
    """eps-greedy over the available actions, argmax ties to the lowest id."""
    acts = sorted(int(a) for a in available)
    if not acts:
        raise ValueError("no available actions")
    if epsilon > 0.0 and rng.random() < epsilon:
        return Action(acts[int(rng.integers(len(acts)))])
    best = acts[0]
    for a in acts[1:]:
        if q[a] > q[best]:
            best = a
    return Action(best)


class EpisodeLog(NamedTuple):
    rewards: np.ndarray
    reached_goal: bool

    @property
    def total(self) -> float:
        return float(self.rewards.sum())

    @property
    def steps(self) -> int:
        return len(self.rewards)


@dataclass
class TrainingLog:
    episodes: list
    params: MLPParams
    config: AgentConfig

    @property
    def episode_totals(self) -> np.ndarray:
        return np.array([ep.total for ep in self.episodes])


def encode_all(table: EmbeddingTable | MatrixBaseline, world: GridWorld) -> np.ndarray:
    """State-input matrix with one row per world state."""
    return np.stack([state_input(table, world, s) for s in range(world.n_states)])


def run_episode(world: GridWorld, params: MLPParams, table, config: AgentConfig,
                rng: np.random.Generator, epsilon: float, buffer: ReplayBuffer,
                enc: np.ndarray | None = None) -> EpisodeLog:
    """One episode with per-step replay updates; see module docstring."""
    if enc is None:
        enc = encode_all(table, world)
    s = world.start
    rewards = []
    cum = 0.0
    reached = False
    while True:
        x = enc[s]
        q = mlp_forward(params, x)
        a = select_action(q, world.valid_actions(s), epsilon, rng)
        out = world.step(s, a)
        rewards.append(out.reward)
        cum += out.reward
        buffer.push(ReplayTransition(x, int(a), out.reward,
                                     enc[out.next_state], out.terminal))
        if len(buffer) >= config.batch_size:
            train_step(params, buffer.sample(config.batch_size, rng),
                       config.gamma, config.learning_rate)
        s = out.next_state
        if out.terminal:
            reached = True
            break
        if cum <= config.reward_floor:
            break
    return EpisodeLog(rewards=np.array(rewards), reached_goal=reached)


def train_agent(world: GridWorld, table, config: AgentConfig) -> TrainingLog:
    """Fresh network, config.episodes episodes, epsilon decaying per episode."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    enc = encode_all(table, world)
    params = init_params(enc.shape[1], config, rng)
    buffer = ReplayBuffer(config.replay_capacity, enc.shape[1])
    eps = config.epsilon_start
    logs = []
    for _ in range(config.episodes):
        logs.append(run_episode(world, params, table, config, rng,
                                epsilon=eps, buffer=buffer, enc=enc))
        eps = max(config.epsilon_min, eps * config.epsilon_decay)
    return TrainingLog(episodes=logs, params=params, config=config)


class PathResult(NamedTuple):
    steps: int | None          # None when the goal was not reached
    total_reward: float
    reached: bool


def greedy_policy_path(world: GridWorld, params: MLPParams, table,
                       max_steps: int = 1000) -> PathResult:
    """Roll out the eps=0 policy from the start; no learning, no reward floor."""
    enc = encode_all(table, world)
    rng = np.random.default_rng(0)   # unused at epsilon 0, keeps the API uniform
    s = world.start
    total = 0.0
    for step in range(1, max_steps + 1):
        q = mlp_forward(params, enc[s])
        a = select_action(q, world.valid_actions(s), 0.0, rng)
        out = world.step(s, a)
        total += out.reward
        s = out.next_state
        if out.terminal:
            return PathResult(steps=step, total_reward=total, reached=True)
    return PathResult(steps=None, total_reward=total, reached=False)


# -- checkpoint format ------------------------------------------------------


def save_params(params: MLPParams, path: str | Path) -> None:
    """Text checkpoint: `mlp in h1 h2 out` header then one line per matrix row."""
    in_dim, h1 = params.W1.shape
    h2, out = params.W3.shape
    lines = [f"mlp {in_dim} {h1} {h2} {out}"]
    for m in params.as_tuple():
        rows = m if m.ndim == 2 else m[None, :]
        for row in rows:
            lines.append(" ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_params(path: str | Path) -> MLPParams:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 5 or head[0] != "mlp":
        raise ValueError(f"bad checkpoint header {lines[0]!r}")
    in_dim, h1, h2, out = (int(v) for v in head[1:])
    shapes = [(in_dim, h1), (h1,), (h1, h2), (h2,), (h2, out), (out,)]
    body = lines[1:]
    expect = sum(s[0] if len(s) == 2 else 1 for s in shapes)
    if len(body) != expect:
        raise ValueError(f"expected {expect} body lines, found {len(body)}")
    mats, pos = [], 0
    for shp in shapes:
        n_rows = shp[0] if len(shp) == 2 else 1
        block = np.array([[float(v) for v in body[pos + i].split()]
                          for i in range(n_rows)])
        pos += n_rows
        mats.append(block if len(shp) == 2 else block[0])
    p = MLPParams(*mats)
    if p.W1.shape != (in_dim, h1) or p.W3.shape != (h2, out):
        raise ValueError("checkpoint body does not match header shapes")
    return p
