"""
DQN quickstart: from maze to learned policy
===========================================

Trains the replay-buffer DQN on a small maze twice -- once on DeepWalk
embedding inputs, once on the raw matrix encoding -- and prints the learning
curves side by side, then walks the greedy policy through the maze.
"""

import numpy as np

from mdpembed import (AgentConfig, GridSpec, MatrixBaseline, TrainSpec,
                      build_maze, greedy_policy_path, shortest_path_steps,
                      train_agent, true_graph)
from mdpembed.embeddings.deepwalk import deepwalk

# a 10x10 maze with two obstacles in the middle of the 4th row
spec = GridSpec(width=10, height=10, obstacles=frozenset({44, 45}),
                start=0, goal=99)
world = build_maze(spec)
print(f"maze: 10x10, optimal path {shortest_path_steps(world)} steps")

graph = true_graph(world)
table = deepwalk(graph, TrainSpec(d=16, seed=0))
config = AgentConfig(episodes=60, seed=0)

runs = {"deepwalk": table, "matrix": MatrixBaseline()}
logs = {}
for name, tab in runs.items():
    print(f"\ntraining on {name} inputs ...")
    logs[name] = train_agent(world, tab, config)

# learning curves: cumulative reward per episode, smoothed over 10 episodes
print("\nepisode block   deepwalk    matrix")
for lo in range(0, 60, 10):
    row = f"   {lo + 1:2d}-{lo + 10:<8d}"
    for name in runs:
        totals = logs[name].episode_totals[lo:lo + 10]
        row += f"{np.mean(totals):9.2f} "
    print(row)

# greedy rollout with the trained deepwalk agent
path = greedy_policy_path(world, logs["deepwalk"].params, table)
print(f"\ngreedy policy: reached={path.reached} steps={path.steps} "
      f"reward={path.total_reward:.2f}")
