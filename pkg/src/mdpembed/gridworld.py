"""Deterministic grid-world MDP environments.

A world is a rectangular grid with four walls, soft obstacles (enterable at a
heavy penalty), one start cell and one goal cell.  Cells are indexed row-major:
``index = row * width + col`` with row 0 at the top.  The reward model has
exactly four cases:

* +1.00  moving onto the goal cell (episode-terminal)
* -0.30  moving onto an obstacle cell
* -0.10  bumping into the outer wall (the agent stays put)
* -0.01  any other valid move

Directed variants remove (cell, action) pairs, either explicitly or at random
with a seeded fraction; a removed action is simply unavailable to the agent.
Worlds are immutable after construction and safe to share across workers; the
agent position is caller-owned.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from pathlib import Path

import numpy as np

REWARD_GOAL = 1.0
REWARD_OBSTACLE = -0.3
REWARD_WALL = -0.1
REWARD_MOVE = -0.01


class Action(IntEnum):
    """The four moves, encoded to match the Q-network's output neurons."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


# (row delta, col delta); row 0 is the top row, so UP decreases the row.
_DELTAS = {
    Action.UP: (-1, 0),
    Action.DOWN: (1, 0),
    Action.LEFT: (0, -1),
    Action.RIGHT: (0, 1),
}

_ACTION_CHARS = {"U": Action.UP, "D": Action.DOWN, "L": Action.LEFT, "R": Action.RIGHT}
_CHAR_ACTIONS = {v: k for k, v in _ACTION_CHARS.items()}


class InvalidSpecError(ValueError):
    """A GridSpec violates one of its invariants."""


class UnreachableGoalError(InvalidSpecError):
    """No obstacle-free path from start to goal under the available actions."""


@dataclass(frozen=True)
class GridSpec:
    """Declarative description of a maze.

    ``obstacles`` are cell indices, ``removed_actions`` are (cell, action)
    pairs that are unavailable.  ``removal_fraction`` additionally removes that
    fraction of all (cell, action) pairs at random, reproducibly via ``seed``.
    """

    width: int
    height: int
    obstacles: frozenset[int] = frozenset()
    start: int = 0
    goal: int = 0
    removed_actions: frozenset[tuple[int, int]] = frozenset()
    removal_fraction: float = 0.0
    seed: int = 0

    @property
    def n_states(self) -> int:
        return self.width * self.height

    def validate(self) -> None:
        n = self.n_states
        if self.width < 1 or self.height < 1:
            raise InvalidSpecError("grid dimensions must be positive")
        if not (0 <= self.start < n) or not (0 <= self.goal < n):
            raise InvalidSpecError("start/goal outside the grid")
        if self.start == self.goal:
            raise InvalidSpecError("start and goal must differ")
        if self.start in self.obstacles or self.goal in self.obstacles:
            raise InvalidSpecError("start and goal must not be obstacles")
        if any(not (0 <= c < n) for c in self.obstacles):
            raise InvalidSpecError("obstacle index outside the grid")
        if not (0.0 <= self.removal_fraction <= 1.0):
            raise InvalidSpecError("removal_fraction must be in [0, 1]")
        for cell, action in self.removed_actions:
            if not (0 <= cell < n):
                raise InvalidSpecError(f"removed action references bad cell {cell}")
            if not (0 <= int(action) < 4):
                raise InvalidSpecError(f"bad action id {action} in removed_actions")


@dataclass(frozen=True)
class StepOutcome:
    next_state: int
    reward: float
    terminal: bool


class GridWorld:
    """Immutable maze MDP with a precomputed transition table.

    Construct via :func:`build_maze`; stepping is a pure lookup.
    """

    def __init__(self, spec: GridSpec, removed: frozenset[tuple[int, int]]):
        self.spec = spec
        self.width = spec.width
        self.height = spec.height
        self.n_states = spec.n_states
        self.start = spec.start
        self.goal = spec.goal
        self.obstacles = frozenset(spec.obstacles)
        self.removed = removed

        n = self.n_states
        self._next = np.empty((n, 4), dtype=np.int64)
        self._reward = np.empty((n, 4), dtype=np.float64)
        self._avail = np.ones((n, 4), dtype=bool)
        for s in range(n):
            r, c = divmod(s, self.width)
            for a in Action:
                dr, dc = _DELTAS[a]
                nr, nc = r + dr, c + dc
                if not (0 <= nr < self.height and 0 <= nc < self.width):
                    nxt, rew = s, REWARD_WALL
                else:
                    nxt = nr * self.width + nc
                    if nxt == self.goal:
                        rew = REWARD_GOAL
                    elif nxt in self.obstacles:
                        rew = REWARD_OBSTACLE
                    else:
                        rew = REWARD_MOVE
                self._next[s, a] = nxt
                self._reward[s, a] = rew
        for cell, action in removed:
            self._avail[cell, action] = False

        # padded per-state list of available actions, for vectorised sampling
        self.action_counts = self._avail.sum(axis=1).astype(np.int64)
        self.available_sorted = np.full((n, 4), -1, dtype=np.int64)
        for s in range(n):
            acts = np.flatnonzero(self._avail[s])
            self.available_sorted[s, : len(acts)] = acts

    # -- core MDP interface -------------------------------------------------

    def step(self, s: int, a: Action | int) -> StepOutcome:
        """Deterministic transition; raises if ``a`` is removed at ``s``."""
        self._check_state(s)
        a = int(a)
        if not (0 <= a < 4):
            raise ValueError(f"invalid action {a}")
        if not self._avail[s, a]:
            raise ValueError(f"action {Action(a).name} is removed at state {s}")
        nxt = int(self._next[s, a])
        return StepOutcome(nxt, float(self._reward[s, a]), nxt == self.goal)

    def valid_actions(self, s: int) -> tuple[Action, ...]:
        self._check_state(s)
        return tuple(Action(a) for a in np.flatnonzero(self._avail[s]))

    def matrix_representation(self, agent: int) -> np.ndarray:
        """Flat grid encoding: free 1.0, obstacle 0.0, goal 0.75, agent 0.5.

        The agent value overrides whatever its cell would otherwise encode, so
        the output always contains exactly one 0.5 entry.
        """
        self._check_state(agent)
        m = np.ones(self.n_states)
        m[list(self.obstacles)] = 0.0
        m[self.goal] = 0.75
        m[agent] = 0.5
        return m

    def enumerate_transitions(self) -> list[tuple[int, Action, int]]:
        """Every available (s, a) -> s' triple; ground truth for graph tests."""
        out = []
        for s in range(self.n_states):
            for a in np.flatnonzero(self._avail[s]):
                out.append((s, Action(a), int(self._next[s, a])))
        return out

    # -- helpers ------------------------------------------------------------

    def _check_state(self, s: int) -> None:
        if not (0 <= s < self.n_states):
            raise ValueError(f"state {s} outside grid of {self.n_states} cells")

    def cell(self, row: int, col: int) -> int:
        return row * self.width + col

    def coords(self, s: int) -> tuple[int, int]:
        return divmod(s, self.width)


def build_maze(spec: GridSpec) -> GridWorld:
    """Validate a spec, apply random action removal, and build the world.

    Random removal targets ``round(removal_fraction * 4 * n_states)`` pairs on
    top of any explicit removals, never taking a cell's last remaining action.
    A BFS from start to goal over non-obstacle cells (honouring removals) must
    succeed, otherwise :class:`UnreachableGoalError` is raised.  Obstacles are
    soft in the dynamics but a well-formed maze must offer a way around them.
    """
    spec.validate()
    removed = set(spec.removed_actions)
    counts = {s: 4 for s in range(spec.n_states)}
    for cell, action in removed:
        counts[cell] -= 1
    if any(c <= 0 for c in counts.values()):
        raise InvalidSpecError("removed_actions strips a cell of all actions")

    if spec.removal_fraction > 0.0:
        rng = np.random.default_rng(spec.seed)
        target = int(round(spec.removal_fraction * 4 * spec.n_states))
        eligible = [
            (s, int(a))
            for s in range(spec.n_states)
            for a in range(4)
            if (s, a) not in removed
        ]
        order = rng.permutation(len(eligible))
        taken = 0
        for idx in order:
            if taken >= target:
                break
            cell, action = eligible[idx]
            if counts[cell] <= 1:
                continue
            removed.add((cell, action))
            counts[cell] -= 1
            taken += 1

    world = GridWorld(spec, frozenset(removed))
    if shortest_path_steps(world) is None:
        raise UnreachableGoalError("goal unreachable from start")
    return world


def shortest_path_steps(world: GridWorld, start: int | None = None) -> int | None:
    """BFS step count from start to goal through free cells, or None.

    Obstacle cells are excluded as waypoints even though the dynamics allow
    entering them; the optimal-policy comparisons in the tests use the same
    convention.
    """
    src = world.start if start is None else start
    if src == world.goal:
        return 0
    dist = {src: 0}
    queue = deque([src])
    while queue:
        s = queue.popleft()
        for a in np.flatnonzero(world._avail[s]):
            nxt = int(world._next[s, a])
            if nxt == s or nxt in world.obstacles or nxt in dist:
                continue
            dist[nxt] = dist[s] + 1
            if nxt == world.goal:
                return dist[nxt]
            queue.append(nxt)
    return None


# -- maze text format -------------------------------------------------------
#
#   [RANDOM_REMOVAL fraction seed]
#   grid rows of . # S G
#   [REMOVED:]
#   [row,col,action   with action in U D L R]


def parse_maze(text: str) -> GridSpec:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip() != ""]
    if not lines:
        raise InvalidSpecError("empty maze file")

    fraction, seed = 0.0, 0
    if lines[0].startswith("RANDOM_REMOVAL"):
        parts = lines[0].split()
        if len(parts) != 3:
            raise InvalidSpecError("RANDOM_REMOVAL header needs: fraction seed")
        fraction, seed = float(parts[1]), int(parts[2])
        lines = lines[1:]

    grid_rows: list[str] = []
    removed_lines: list[str] = []
    in_removed = False
    for ln in lines:
        if ln.strip() == "REMOVED:":
            in_removed = True
            continue
        (removed_lines if in_removed else grid_rows).append(ln.strip())

    if not grid_rows:
        raise InvalidSpecError("maze file has no grid rows")
    width = len(grid_rows[0])
    if any(len(r) != width for r in grid_rows):
        raise InvalidSpecError("ragged maze rows")
    height = len(grid_rows)

    obstacles, start, goal = set(), None, None
    for r, row in enumerate(grid_rows):
        for c, ch in enumerate(row):
            idx = r * width + c
            if ch == "#":
                obstacles.add(idx)
            elif ch == "S":
                if start is not None:
                    raise InvalidSpecError("multiple start cells")
                start = idx
            elif ch == "G":
                if goal is not None:
                    raise InvalidSpecError("multiple goal cells")
                goal = idx
            elif ch != ".":
                raise InvalidSpecError(f"bad maze character {ch!r}")
    if start is None or goal is None:
        raise InvalidSpecError("maze needs exactly one S and one G")

    removed = set()
    for ln in removed_lines:
        parts = ln.split(",")
        if len(parts) != 3 or parts[2].strip() not in _ACTION_CHARS:
            raise InvalidSpecError(f"bad REMOVED line {ln!r}")
        r, c = int(parts[0]), int(parts[1])
        removed.add((r * width + c, int(_ACTION_CHARS[parts[2].strip()])))

    return GridSpec(
        width=width,
        height=height,
        obstacles=frozenset(obstacles),
        start=start,
        goal=goal,
        removed_actions=frozenset(removed),
        removal_fraction=fraction,
        seed=seed,
    )


def format_maze(spec: GridSpec) -> str:
    """Inverse of :func:`parse_maze` (modulo line ordering of REMOVED)."""
    out = []
    if spec.removal_fraction > 0.0:
        out.append(f"RANDOM_REMOVAL {spec.removal_fraction:g} {spec.seed}")
    for r in range(spec.height):
        row = []
        for c in range(spec.width):
            idx = r * spec.width + c
            if idx == spec.start:
                row.append("S")
            elif idx == spec.goal:
                row.append("G")
            elif idx in spec.obstacles:
                row.append("#")
            else:
                row.append(".")
        out.append("".join(row))
    if spec.removed_actions:
        out.append("REMOVED:")
        for cell, action in sorted(spec.removed_actions):
            r, c = divmod(cell, spec.width)
            out.append(f"{r},{c},{_CHAR_ACTIONS[Action(action)]}")
    return "\n".join(out) + "\n"


def load_maze(path: str | Path) -> GridWorld:
    return build_maze(parse_maze(Path(path).read_text()))


def builtin_maze_path(name: str) -> Path:
    """Path of a shipped maze asset, e.g. ``builtin_maze_path("maze1")``."""
    p = resources.files("mdpembed") / "assets" / f"{name}.txt"
    if not p.is_file():
        raise FileNotFoundError(f"no built-in maze named {name!r}")
    return Path(str(p))
