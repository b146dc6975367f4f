"""Acceptance gate: ten end-to-end criteria, one pass/fail line each.

The statistical criteria (6-9) run at a frozen base seed on a shared
"desk-scale" 10x10 maze so the whole gate is deterministic.  Expected total
runtime is a few minutes, dominated by the dimension and sample sweeps.
"""
import math
import time

import numpy as np
import pytest

from mdpembed.cli import main as cli_main
from mdpembed.dqn import (AgentConfig, MLPParams, batch_from_transitions,
                          batch_loss_and_grads, greedy_policy_path,
                          init_params, mlp_forward, ReplayTransition)
from mdpembed.embeddings import TrainSpec
from mdpembed.embeddings.deepwalk import deepwalk
from mdpembed.embeddings.glae import bce_loss_and_grad, normalized_adjacency
from mdpembed.embeddings.graphsage import loss_and_grads as sage_loss_and_grads
from mdpembed.embeddings.graphsage import mean_aggregate_matrix
from mdpembed.embeddings.hope import hope_reconstruction_error
from mdpembed.embeddings.sgd import neg_sampling_batch
from mdpembed.gridworld import (Action, GridSpec, REWARD_GOAL, REWARD_MOVE,
                                REWARD_OBSTACLE, REWARD_WALL, build_maze,
                                builtin_maze_path, format_maze, load_maze,
                                shortest_path_steps)
from mdpembed.harness import (ExperimentConfig, run_experiment, stage_seed,
                              sweep_dimension, sweep_samples)
from mdpembed.mdpgraph import (MDPGraph, build_graph, coverage,
                               expected_samples_full_coverage,
                               sample_transitions, true_graph,
                               undirected_view)
from mdpembed.numerics import finite_diff_check

BASE_SEED = 200
EPISODES = 60
REPEATS = 20


def verdict(num, label, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    line = f"criterion {num:02d} {'PASS' if ok else 'FAIL'} - {label}{tail}"
    print(line)
    return line


@pytest.fixture(scope="module")
def desk(tmp_path_factory):
    """10x10 maze, two obstacles mid-grid, corner-to-corner."""
    spec = GridSpec(width=10, height=10, obstacles=frozenset({44, 45}),
                    start=0, goal=99)
    world = build_maze(spec)
    path = tmp_path_factory.mktemp("desk") / "desk.txt"
    path.write_text(format_maze(world.spec))
    return world, str(path)


@pytest.fixture(scope="module")
def deepwalk_run(desk):
    """Shared 20-seed DeepWalk d=16 run used by criteria 6 and 7."""
    _, maze_path = desk
    cfg = ExperimentConfig(maze=maze_path, method="deepwalk", d=16,
                           sample_budget=None, episodes=EPISODES,
                           repeats=REPEATS, base_seed=BASE_SEED)
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    return result, time.perf_counter() - t0


def test_criterion_01_reward_semantics(desk):
    world, _ = desk
    checks = [
        (world.step(98, Action.RIGHT).reward, REWARD_GOAL, 1.0),
        (world.step(43, Action.RIGHT).reward, REWARD_OBSTACLE, -0.3),
        (world.step(0, Action.UP).reward, REWARD_WALL, -0.1),
        (world.step(0, Action.RIGHT).reward, REWARD_MOVE, -0.01),
    ]
    ok = all(got == const == expected for got, const, expected in checks)
    line = verdict(1, "reward semantics exact (+1/-0.3/-0.1/-0.01)", ok)
    assert ok, line


def test_criterion_02_graph_recovery_all_mazes():
    bad = []
    for name in ("maze1", "maze2", "maze3", "maze4", "maze5"):
        world = load_maze(builtin_maze_path(name))
        recovered = build_graph(world.enumerate_transitions())
        truth = set()
        for s in range(world.n_states):
            for a in world.valid_actions(s):
                truth.add((s, int(a), world.step(s, a).next_state))
        if recovered.edges != frozenset(truth):
            bad.append(name + ":edges")
        if coverage(recovered, world) != 1.0:
            bad.append(name + ":coverage")
    ok = not bad
    line = verdict(2, "exhaustive graph recovery on all five mazes", ok,
                   detail=",".join(bad) if bad else "edge-identical, coverage 1.0")
    assert ok, line


def test_criterion_03_gradient_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    n, d, n_pairs, n_neg = 12, 5, 30, 4
    errs = {}

    def pair_loss_err(tag):
        pu = rng.integers(0, n, size=n_pairs)
        pv = rng.integers(0, n, size=n_pairs)
        neg = rng.integers(0, n, size=(n_pairs, n_neg))
        worst = 0.0
        for _ in range(10):
            theta = rng.normal(scale=0.5, size=2 * n * d)

            def loss_fn(t):
                U = t[:n * d].reshape(n, d)
                V = t[n * d:].reshape(n, d)
                return neg_sampling_batch(U, V, pu, pv, neg)[0]

            U0 = theta[:n * d].reshape(n, d)
            V0 = theta[n * d:].reshape(n, d)
            _, dU, dV = neg_sampling_batch(U0, V0, pu, pv, neg)
            grad = np.concatenate([dU.ravel(), dV.ravel()])
            worst = max(worst, finite_diff_check(loss_fn, theta, grad))
        errs[tag] = worst

    # skip-gram, APP and NERD all train the same contrastive objective on
    # their own pair distributions
    pair_loss_err("skip-gram")
    pair_loss_err("app")
    pair_loss_err("nerd")

    # graphsage: two weight matrices through the aggregate-normalize stack
    edges = {(i, 0, (i + 1) % 10) for i in range(10)}
    edges |= {(int(rng.integers(10)), 1, int(rng.integers(10)))
              for _ in range(15)}
    g = undirected_view(MDPGraph(edges=edges, directed=True))
    M = mean_aggregate_matrix(g)
    ds = 6
    pu = rng.integers(0, 10, size=20)
    pv = rng.integers(0, 10, size=20)
    neg = rng.integers(0, 10, size=(20, 3))
    worst = 0.0
    for _ in range(10):
        theta = rng.normal(scale=0.5, size=10 * ds + ds * ds)

        def sage_loss(t):
            W1 = t[:10 * ds].reshape(10, ds)
            W2 = t[10 * ds:].reshape(ds, ds)
            return sage_loss_and_grads(M, W1, W2, pu, pv, neg)[0]

        W1 = theta[:10 * ds].reshape(10, ds)
        W2 = theta[10 * ds:].reshape(ds, ds)
        _, dW1, dW2 = sage_loss_and_grads(M, W1, W2, pu, pv, neg)
        worst = max(worst, finite_diff_check(
            sage_loss, theta, np.concatenate([dW1.ravel(), dW2.ravel()])))
    errs["graphsage"] = worst

    # glae: binary cross-entropy on reconstructed adjacency entries
    Ahat = normalized_adjacency(g)
    pu = rng.integers(0, 10, size=25)
    pv = rng.integers(0, 10, size=25)
    y = rng.integers(0, 2, size=25).astype(float)
    worst = 0.0
    for _ in range(10):
        theta = rng.normal(scale=0.5, size=10 * ds)

        def glae_loss(t):
            return bce_loss_and_grad(Ahat, t.reshape(10, ds), pu, pv, y)[0]

        _, dW = bce_loss_and_grad(Ahat, theta.reshape(10, ds), pu, pv, y)
        worst = max(worst, finite_diff_check(glae_loss, theta, dW.ravel()))
    errs["glae"] = worst

    # dqn: MSE on Bellman targets; targets are data, so freeze them at the
    # base point before differentiating
    in_dim = 6
    config = AgentConfig(h1=8, h2=8)
    transitions = [
        ReplayTransition(x=rng.normal(size=in_dim),
                         a=int(rng.integers(4)),
                         r=float(rng.normal()),
                         x_next=rng.normal(size=in_dim),
                         terminal=bool(rng.integers(2)))
        for _ in range(16)
    ]
    batch = batch_from_transitions(transitions)
    worst = 0.0
    for _ in range(10):
        base = init_params(in_dim, config, rng)
        shapes = base.shapes()
        _, grads = batch_loss_and_grads(base, batch, config.gamma)
        q_next = mlp_forward(base, batch.x_next)
        targets = np.where(batch.terminal, batch.r,
                           batch.r + config.gamma * q_next.max(axis=1))

        def dqn_loss(t):
            p = MLPParams.from_flat(t, shapes)
            q = mlp_forward(p, batch.x)
            q_sel = q[np.arange(len(batch.a)), batch.a]
            return np.mean((q_sel - targets) ** 2)

        grad_flat = np.concatenate([g.ravel() for g in grads])
        worst = max(worst, finite_diff_check(dqn_loss, base.flat(), grad_flat))
    errs["dqn"] = worst

    elapsed = time.perf_counter() - t0
    worst_tag = max(errs, key=errs.get)
    ok = max(errs.values()) < 1e-4 and elapsed < 60.0
    line = verdict(3, "finite-difference check on all six losses", ok,
                   detail=f"max rel err {errs[worst_tag]:.2e} ({worst_tag}), "
                          f"{elapsed:.1f}s")
    assert ok, line


def test_criterion_04_factorization_oracle():
    nilpotent = MDPGraph(edges={(0, 0, 1)}, directed=True)
    err1 = hope_reconstruction_error(nilpotent, TrainSpec(d=1, seed=0))

    rng = np.random.default_rng(11)
    edges = {(i, 0, (i + 1) % 10) for i in range(10)}
    edges |= {(int(rng.integers(10)), int(rng.integers(4)),
               int(rng.integers(10))) for _ in range(20)}
    g = MDPGraph(edges=edges, directed=True)
    errors = [hope_reconstruction_error(g, TrainSpec(d=k, seed=0))
              for k in range(1, 6)]
    monotone = all(errors[i + 1] <= errors[i] + 1e-9 for i in range(4))
    ok = err1 < 1e-8 and monotone
    line = verdict(4, "hope factorization exact at rank, non-increasing in d",
                   ok, detail=f"nilpotent err {err1:.2e}, "
                              f"errors {['%.3f' % e for e in errors]}")
    assert ok, line


def test_criterion_05_coupon_collector(desk):
    world, _ = desk
    expected = expected_samples_full_coverage(4)
    rng = np.random.default_rng(123)
    trials = 1_000_000
    draws = np.zeros(trials)
    for k in range(4, 0, -1):
        draws += rng.geometric(k / 4.0, size=trials)
    mc = draws.mean()
    mc_ok = abs(expected - mc) / expected < 0.01

    n_pairs = int(world.action_counts.sum())
    budget = math.ceil(3 * expected_samples_full_coverage(n_pairs))
    hits = 0
    for seed in range(100):
        g = build_graph(sample_transitions(world, budget, seed=seed))
        if coverage(g, world) == 1.0:
            hits += 1
    cov_ok = hits >= 95
    ok = mc_ok and cov_ok
    line = verdict(5, "coupon-collector bound and sampling coverage", ok,
                   detail=f"E={expected:.3f} vs MC {mc:.3f}; "
                          f"full coverage in {hits}/100 seeds "
                          f"(budget {budget})")
    assert ok, line


def test_criterion_06_learning_sanity(desk, deepwalk_run):
    world, _ = desk
    result, elapsed = deepwalk_run
    final10 = result.episode_totals[:, -10:].mean(axis=1)
    n_pos = int((final10 > 0).sum())
    frac_ok = n_pos >= math.ceil(0.70 * REPEATS)

    best = int(np.argmax(final10))
    graph = true_graph(world)
    table = deepwalk(graph, TrainSpec(
        d=16, seed=stage_seed(result.seeds[best], "embed", best)))
    path = greedy_policy_path(world, result.params[best], table)
    optimal = shortest_path_steps(world)
    path_ok = path.reached and path.steps <= optimal + 2
    time_ok = elapsed < 600.0
    ok = frac_ok and path_ok and time_ok
    line = verdict(6, "desk-scale learning sanity (20 seeds)", ok,
                   detail=f"{n_pos}/{REPEATS} positive final-10; best greedy "
                          f"{path.steps} vs optimal {optimal}; {elapsed:.0f}s")
    assert ok, line


def test_criterion_07_embeddings_beat_matrix(desk, deepwalk_run):
    _, maze_path = desk
    dw_result, _ = deepwalk_run
    cfg = ExperimentConfig(maze=maze_path, method="matrix", d=16,
                           episodes=EPISODES, repeats=REPEATS,
                           base_seed=BASE_SEED)
    mat_result = run_experiment(cfg)
    from mdpembed.harness import auc_per_seed
    horizon = max(max(len(s) for s in dw_result.series),
                  max(len(s) for s in mat_result.series))
    auc_dw = auc_per_seed(dw_result, horizon).mean()
    auc_mat = auc_per_seed(mat_result, horizon).mean()
    ok = auc_dw > auc_mat
    line = verdict(7, "deepwalk beats matrix baseline on mean step AUC", ok,
                   detail=f"deepwalk {auc_dw:.3g} vs matrix {auc_mat:.3g}")
    assert ok, line


def test_criterion_08_dimension_sensitivity(desk, tmp_path):
    _, maze_path = desk
    cfg = ExperimentConfig(maze=maze_path, method="deepwalk", d=16,
                           sample_budget=None, episodes=EPISODES,
                           repeats=REPEATS, base_seed=BASE_SEED,
                           out_dir=str(tmp_path))
    sweep_dimension(cfg, [8, 16, 30, 50])
    rows = {}
    for line_ in (tmp_path / "sweep_dim_auc.csv").read_text().splitlines()[1:]:
        parts = line_.split(",")
        rows[int(parts[0])] = tuple(float(v) for v in parts[1:])
    mean30 = rows[30][0]
    lo50, hi50 = rows[50][1], rows[50][2]
    ok = lo50 <= mean30 <= hi50
    line = verdict(8, "d=30 mean AUC within 90% CI of d=50", ok,
                   detail=f"d30 {mean30:.3g} in [{lo50:.3g}, {hi50:.3g}]")
    assert ok, line


def test_criterion_09_sample_sensitivity(desk, tmp_path):
    world, maze_path = desk
    n_pairs = int(world.action_counts.sum())
    full_budget = expected_samples_full_coverage(n_pairs)
    budgets = [round(full_budget * f) for f in (0.10, 0.25, 0.50)]
    cfg = ExperimentConfig(maze=maze_path, method="deepwalk", d=16,
                           episodes=EPISODES, repeats=REPEATS,
                           base_seed=BASE_SEED, out_dir=str(tmp_path))
    sweep_samples(cfg, budgets)
    means = {}
    for line_ in (tmp_path / "sweep_samples_auc.csv").read_text().splitlines()[1:]:
        parts = line_.split(",")
        means[parts[0]] = float(parts[1])
    lowest_arm = str(budgets[0])
    ok = means[lowest_arm] == min(means.values())
    line = verdict(9, "lowest sample budget has lowest mean AUC", ok,
                   detail=", ".join(f"{k}={v:.3g}" for k, v in means.items()))
    assert ok, line


def test_criterion_10_bench_determinism(desk, tmp_path):
    _, maze_path = desk
    cfg_file = tmp_path / "bench.cfg"
    outs = [tmp_path / "run_a", tmp_path / "run_b"]
    cfg_file.write_text(
        f"maze = {maze_path}\nmethod = hope\nd = 8\nsample_budget = full\n"
        f"episodes = 3\nrepeats = 2\nbase_seed = 5\n")
    for out in outs:
        code = cli_main(["bench", "--config", str(cfg_file),
                         "--out-dir", str(out)])
        assert code == 0
    names = sorted(p.name for p in outs[0].glob("*.csv"))
    identical = bool(names) and all(
        (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
        for n in names)
    ok = identical
    line = verdict(10, "bench re-run produces byte-identical CSVs", ok,
                   detail=f"{len(names)} CSV files compared")
    assert ok, line
