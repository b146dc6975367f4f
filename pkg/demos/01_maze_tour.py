"""
A tour of the built-in mazes
============================

Loads each shipped maze, prints its layout and shortest solution, and shows
how random transition sampling gradually recovers the underlying MDP graph.
"""

import numpy as np

from mdpembed import (build_graph, builtin_maze_path, coverage,
                      expected_samples_full_coverage, load_maze,
                      sample_transitions, shortest_path_steps, true_graph)

# the five mazes cover: a wall with one gap, a longer detour, the same grid
# with swapped start/goal, a movement-restricted variant, and random removals
for name in ("maze1", "maze2", "maze3", "maze4", "maze5"):
    world = load_maze(builtin_maze_path(name))
    spec = world.spec
    print(f"\n=== {name}: {spec.width}x{spec.height}, "
          f"{len(spec.obstacles)} obstacles, "
          f"{len(spec.removed_actions)} removed actions ===")

    # draw the grid: S start, G goal, # obstacle, . free
    for r in range(spec.height):
        row = ""
        for c in range(spec.width):
            s = r * spec.width + c
            row += ("S" if s == spec.start else
                    "G" if s == spec.goal else
                    "#" if s in spec.obstacles else ".")
        print("   " + row)
    print(f"   shortest path: {shortest_path_steps(world)} steps")

# how fast does uniform sampling cover the graph?  maze1 has 20x20 = 400
# states; the coupon-collector bound says ~n*H(n) draws for n (state, action)
# pairs
world = load_maze(builtin_maze_path("maze1"))
truth = true_graph(world)
n_pairs = int(world.action_counts.sum())
print(f"\nmaze1 has {truth.n_edges} distinct transitions "
      f"({n_pairs} state-action pairs)")
print(f"expected draws for full coverage: "
      f"{expected_samples_full_coverage(n_pairs):.0f}")

print("\n samples  coverage")
for n in (500, 1000, 2000, 4000, 8000, 16000):
    g = build_graph(sample_transitions(world, n, seed=0))
    print(f"  {n:6d}   {coverage(g, world):.3f}")
