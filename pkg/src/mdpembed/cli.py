"""Command-line front end.

Subcommands mirror the pipeline stages so each piece can be driven on its
own: `sample` writes an edgelist, `embed` turns an edgelist into an embedding
file, `train` runs the DQN on a maze given an embedding (or the raw matrix
encoding), and `bench` / `sweep-dim` / `sweep-samples` run the full
multi-seed experiment loop.

bench and the sweeps read a flat key=value config file whose keys match
ExperimentConfig field names; every key can also be overridden by the
same-name command-line flag (underscores become dashes).  Exit status is 0
on success and 1 with a message on stderr otherwise.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from mdpembed.dqn import AgentConfig, train_agent
from mdpembed.embeddings import (METHODS, MatrixBaseline, TrainSpec,
                                 read_embedding, write_embedding)
from mdpembed.harness import (FULL, AggregateCurve, ExperimentConfig,
                              RunResult, aggregate, emit_csv, emit_plot,
                              resolve_maze, run_experiment, sweep_dimension,
                              sweep_samples)
from mdpembed.mdpgraph import (build_graph, read_edgelist, sample_transitions,
                               true_graph, write_edgelist)

_INT_KEYS = {"d", "episodes", "repeats", "base_seed"}
_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def parse_budget(text):
    """'full' -> FULL sentinel, anything else -> non-negative int."""
    if text is None:
        return None
    if isinstance(text, int):
        return text
    if text.strip().lower() == "full":
        return FULL
    return int(text)


def read_config_file(path):
    vals = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        vals[key] = value
    return vals


def build_config(args) -> ExperimentConfig:
    """Defaults <- config file <- explicit CLI flags."""
    cfg = ExperimentConfig()
    file_vals = read_config_file(args.config) if args.config else {}
    for key, value in file_vals.items():
        if key == "sample_budget":
            value = parse_budget(value)
        elif key in _INT_KEYS:
            value = int(value)
        setattr(cfg, key, value)
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, parse_budget(value) if key == "sample_budget"
                    else value)
    cfg.validate()
    return cfg


def add_config_flags(parser):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--maze", help="maze asset path or built-in name")
    parser.add_argument("--method",
                        choices=["matrix"] + sorted(METHODS))
    parser.add_argument("--d", type=int, help="embedding dimension")
    parser.add_argument("--sample-budget", dest="sample_budget",
                        help="transition sample count, or 'full'")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--base-seed", dest="base_seed", type=int)
    parser.add_argument("--out-dir", dest="out_dir")


def cmd_sample(args):
    world = resolve_maze(args.maze)
    budget = parse_budget(args.n)
    if budget is FULL:
        graph = true_graph(world)
    else:
        graph = build_graph(sample_transitions(world, budget, seed=args.seed))
    write_edgelist(graph, args.out)
    print(f"wrote {graph.n_edges} edges over {graph.n_nodes} nodes to {args.out}")
    return 0


def cmd_embed(args):
    graph = read_edgelist(args.edges)
    if args.method not in METHODS:
        raise ValueError(f"unknown embedding method {args.method!r}")
    spec = TrainSpec(d=args.d, seed=args.seed)
    table = METHODS[args.method](graph, spec)
    n_states = args.n_states
    if n_states is None:
        n_states = int(max(table.node_ids)) + 1 if table.n else 0
    write_embedding(table, args.out, n_states=n_states)
    print(f"wrote {args.method} embedding ({n_states} states, d={table.d}) "
          f"to {args.out}")
    return 0


def cmd_train(args):
    world = resolve_maze(args.maze)
    if args.embedding == "matrix":
        table = MatrixBaseline()
    else:
        table = read_embedding(args.embedding)
    config = AgentConfig(episodes=args.episodes, seed=args.seed)
    log = train_agent(world, table, config)
    result = RunResult(
        config=ExperimentConfig(maze=args.maze, method=table.method_tag,
                                episodes=args.episodes, repeats=1,
                                base_seed=args.seed),
        seeds=[args.seed],
        episode_logs=[log.episodes],
        series=[np.cumsum(np.concatenate([ep.rewards for ep in log.episodes]))],
    )
    emit_csv(result, args.out)
    goals = sum(ep.reached_goal for ep in log.episodes)
    print(f"trained {args.episodes} episodes ({goals} reached the goal); "
          f"raw log at {args.out}")
    return 0


def cmd_bench(args):
    cfg = build_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_experiment(cfg)
    steps = aggregate(result, axis="steps")
    episodes = aggregate(result, axis="episodes")
    emit_csv(steps, out / f"{cfg.method}_steps.csv")
    emit_csv(episodes, out / f"{cfg.method}_episodes.csv")
    emit_csv(result, out / f"{cfg.method}_raw.csv")
    emit_plot([steps], out / f"{cfg.method}.svg",
              x_label="step", y_label="cumulative reward",
              title=f"{cfg.method} on {Path(cfg.maze).stem}")
    print(f"bench complete: {cfg.repeats} seeds x {cfg.episodes} episodes; "
          f"outputs in {out}")
    return 0


def _parse_int_list(text, what):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"{what} must be a comma-separated list of ints")
    if not values:
        raise ValueError(f"{what} must be non-empty")
    return values


def cmd_sweep_dim(args):
    cfg = build_config(args)
    dims = _parse_int_list(args.dims, "--dims")
    sweep_dimension(cfg, dims)
    print(f"dimension sweep over {dims} done; outputs in {cfg.out_dir}")
    return 0


def cmd_sweep_samples(args):
    cfg = build_config(args)
    budgets = _parse_int_list(args.budgets, "--budgets")
    sweep_samples(cfg, budgets)
    print(f"sample-budget sweep over {budgets} + full done; "
          f"outputs in {cfg.out_dir}")
    return 0


def make_parser():
    parser = argparse.ArgumentParser(
        prog="mdpembed",
        description="grid-world MDP embeddings and DQN benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample transitions into an edgelist")
    p.add_argument("--maze", required=True)
    p.add_argument("--n", required=True, help="sample count, or 'full'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("embed", help="train an embedding from an edgelist")
    p.add_argument("--edges", required=True)
    p.add_argument("--method", required=True, choices=sorted(METHODS))
    p.add_argument("--d", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-states", dest="n_states", type=int, default=None,
                   help="total state count for the output file "
                        "(default: highest node id + 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="train the DQN on a maze")
    p.add_argument("--maze", required=True)
    p.add_argument("--embedding", required=True,
                   help="embedding file, or 'matrix' for the raw encoding")
    p.add_argument("--episodes", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="raw episode CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="multi-seed benchmark of one method")
    add_config_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep-dim", help="benchmark across dimensions")
    add_config_flags(p)
    p.add_argument("--dims", required=True,
                   help="comma-separated dimensions, e.g. 8,16,30,50")
    p.set_defaults(func=cmd_sweep_dim)

    p = sub.add_parser("sweep-samples",
                       help="benchmark across sample budgets (plus full)")
    add_config_flags(p)
    p.add_argument("--budgets", required=True,
                   help="comma-separated sample counts, e.g. 1000,2000,4000")
    p.set_defaults(func=cmd_sweep_samples)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
