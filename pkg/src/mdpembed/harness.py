"""Experiment orchestration: multi-seed runs, curve aggregation, CSV/SVG.

A run is a pipeline per repeat seed: sample transitions from the maze (or
enumerate the full table), build the graph, train the chosen embedding, train
the DQN on top, and keep both the per-episode logs and the flattened
step-wise cumulative-reward series.  Aggregation pads step series with their
final value so a seed that finished early "stays at its final reward", then
reports pointwise means with two-sided 90% Student-t confidence intervals.

Every stochastic stage draws its seed from (base_seed, stage tag, repeat
index), so re-running any configuration is bit-identical and sweep arms that
share a base seed are paired across arms.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from xml.etree import ElementTree as ET

import numpy as np
from scipy import stats

from mdpembed.dqn import AgentConfig, EpisodeLog, train_agent
from mdpembed.embeddings import METHODS, MatrixBaseline, TrainSpec
from mdpembed.gridworld import GridWorld, builtin_maze_path, load_maze
from mdpembed.mdpgraph import build_graph, sample_transitions, true_graph

FULL = None   # sample_budget sentinel: use the exhaustive transition table


@dataclass
class ExperimentConfig:
    maze: str = "maze1"                 # asset path or builtin name
    method: str = "deepwalk"            # matrix | deepwalk | app | nerd | hope | graphsage | glae
    d: int = 30
    sample_budget: int | None = FULL    # transition samples; None = FULL
    episodes: int = 60
    repeats: int = 40
    base_seed: int = 0
    out_dir: str = "results"

    def validate(self) -> None:
        if self.method != "matrix" and self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.repeats < 1 or self.episodes < 1 or self.d < 1:
            raise ValueError("repeats, episodes and d must all be >= 1")
        if self.sample_budget is not None and self.sample_budget < 0:
            raise ValueError("sample_budget must be >= 0 or FULL")


@dataclass
class RunResult:
    config: ExperimentConfig
    seeds: list
    episode_logs: list                  # per seed: list of EpisodeLog
    series: list                        # per seed: flattened cumulative rewards
    params: list = field(default_factory=list)   # per seed: final MLPParams

    @property
    def episode_totals(self) -> np.ndarray:
        """(n_seeds, episodes) matrix of per-episode cumulative rewards."""
        return np.array([[ep.total for ep in logs] for logs in self.episode_logs])


@dataclass
class AggregateCurve:
    x: np.ndarray
    mean: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    label: str = ""


def stage_seed(base_seed: int, tag: str, index: int) -> int:
    """Stable per-(seed, stage, repeat) integer seed."""
    ss = np.random.SeedSequence((base_seed, zlib.crc32(tag.encode()), index))
    return int(ss.generate_state(1)[0])


def resolve_maze(name_or_path: str) -> GridWorld:
    p = Path(name_or_path)
    if p.is_file():
        return load_maze(p)
    try:
        return load_maze(builtin_maze_path(name_or_path))
    except FileNotFoundError:
        raise FileNotFoundError(
            f"maze {name_or_path!r} is neither a file nor a built-in asset"
        ) from None


def run_experiment(config: ExperimentConfig) -> RunResult:
    config.validate()
    world = resolve_maze(config.maze)
    seeds = [config.base_seed + i for i in range(config.repeats)]
    episode_logs, series, params = [], [], []
    for i, seed in enumerate(seeds):
        if config.method == "matrix":
            table = MatrixBaseline()
        else:
            if config.sample_budget is FULL:
                graph = true_graph(world)
            else:
                samples = sample_transitions(
                    world, config.sample_budget,
                    seed=stage_seed(seed, "sample", i),
                )
                graph = build_graph(samples)
            spec = TrainSpec(d=config.d, seed=stage_seed(seed, "embed", i))
            table = METHODS[config.method](graph, spec)
        agent_cfg = AgentConfig(episodes=config.episodes,
                                seed=stage_seed(seed, "agent", i))
        log = train_agent(world, table, agent_cfg)
        episode_logs.append(log.episodes)
        flat = np.concatenate([ep.rewards for ep in log.episodes])
        series.append(np.cumsum(flat))
        params.append(log.params)
    return RunResult(config=config, seeds=seeds,
                     episode_logs=episode_logs, series=series, params=params)


# -- aggregation ------------------------------------------------------------


def pad_series(series: list[np.ndarray], length: int | None = None) -> np.ndarray:
    """Stack 1-D series into a matrix, padding each with its final value."""
    if not series:
        raise ValueError("nothing to pad")
    L = max(len(s) for s in series) if length is None else length
    out = np.empty((len(series), L))
    for i, s in enumerate(series):
        k = min(len(s), L)
        out[i, :k] = s[:k]
        out[i, k:] = s[k - 1] if k else 0.0
    return out


def t_confidence(data: np.ndarray, level: float = 0.90):
    """(mean, half_width) of the two-sided Student-t CI along axis 0."""
    n = data.shape[0]
    if n < 2:
        raise ValueError("confidence intervals need at least 2 seeds")
    mean = data.mean(axis=0)
    sd = data.std(axis=0, ddof=1)
    half = stats.t.ppf(0.5 + level / 2.0, n - 1) * sd / np.sqrt(n)
    # identical observations get an exactly zero-width interval; without this
    # the mean round-trip (3*0.4/3 != 0.4) leaves ~1e-17 of spurious width
    constant = np.all(data == data[0], axis=0)
    mean = np.where(constant, data[0], mean)
    half = np.where(constant, 0.0, half)
    return mean, half


def aggregate(result: RunResult, axis: str = "steps") -> AggregateCurve:
    if axis == "episodes":
        data = result.episode_totals
        x = np.arange(1, data.shape[1] + 1)
    elif axis == "steps":
        data = pad_series(result.series)
        x = np.arange(1, data.shape[1] + 1)
    else:
        raise ValueError(f"axis must be 'steps' or 'episodes', not {axis!r}")
    mean, half = t_confidence(data)
    return AggregateCurve(x=x, mean=mean, ci_low=mean - half, ci_high=mean + half,
                          label=result.config.method)


def auc_per_seed(result: RunResult, horizon: int | None = None) -> np.ndarray:
    """Area under each seed's padded cumulative-reward curve."""
    return pad_series(result.series, length=horizon).sum(axis=1)


# -- sweeps -----------------------------------------------------------------


def sweep_dimension(config: ExperimentConfig, dims) -> dict:
    if not dims:
        raise ValueError("dims must be non-empty")
    curves = {}
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {d: run_experiment(replace(config, d=int(d))) for d in dims}
    horizon = max(max(len(s) for s in r.series) for r in results.values())
    rows = []
    summary = []
    for d, res in results.items():
        curve = aggregate(res, axis="steps")
        curve.label = f"d={d}"
        curves[d] = curve
        for j in range(curve.x.size):
            rows.append((d, curve.x[j], curve.mean[j],
                         curve.ci_low[j], curve.ci_high[j]))
        aucs = auc_per_seed(res, horizon)
        if len(aucs) >= 2:
            m, h = t_confidence(aucs[:, None])
            summary.append((d, m[0], m[0] - h[0], m[0] + h[0]))
        else:
            summary.append((d, float(aucs[0]), float(aucs[0]), float(aucs[0])))
    _write_rows(out / "sweep_dim.csv", "d,x,mean,ci_low,ci_high", rows)
    _write_rows(out / "sweep_dim_auc.csv", "d,auc_mean,auc_ci_low,auc_ci_high",
                summary)
    emit_plot(list(curves.values()), out / "sweep_dim.svg",
              x_label="step", y_label="cumulative reward")
    return curves


def sweep_samples(config: ExperimentConfig, budgets) -> dict:
    if not budgets:
        raise ValueError("budgets must be non-empty")
    arms = [int(b) for b in budgets]
    keys = arms + ["full"]
    curves = {}
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for key in keys:
        budget = FULL if key == "full" else key
        results[key] = run_experiment(replace(config, sample_budget=budget))
    horizon = max(max(len(s) for s in r.series) for r in results.values())
    rows, summary = [], []
    for key, res in results.items():
        curve = aggregate(res, axis="steps")
        curve.label = f"samples={key}"
        curves[key] = curve
        for j in range(curve.x.size):
            rows.append((key, curve.x[j], curve.mean[j],
                         curve.ci_low[j], curve.ci_high[j]))
        aucs = auc_per_seed(res, horizon)
        if len(aucs) >= 2:
            m, h = t_confidence(aucs[:, None])
            summary.append((key, m[0], m[0] - h[0], m[0] + h[0]))
        else:
            summary.append((key, float(aucs[0]), float(aucs[0]), float(aucs[0])))
    _write_rows(out / "sweep_samples.csv", "budget,x,mean,ci_low,ci_high", rows)
    _write_rows(out / "sweep_samples_auc.csv",
                "budget,auc_mean,auc_ci_low,auc_ci_high", summary)
    emit_plot(list(curves.values()), out / "sweep_samples.svg",
              x_label="step", y_label="cumulative reward")
    return curves


# -- CSV --------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _write_rows(path: Path, header: str, rows) -> None:
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def emit_csv(obj, path: str | Path) -> None:
    """Curves: x,mean,ci_low,ci_high.  Raw results: seed,episode,step,reward,cumulative."""
    path = Path(path)
    if isinstance(obj, AggregateCurve):
        rows = zip(obj.x, obj.mean, obj.ci_low, obj.ci_high)
        _write_rows(path, "x,mean,ci_low,ci_high", rows)
    elif isinstance(obj, RunResult):
        rows = []
        for seed, logs in zip(obj.seeds, obj.episode_logs):
            cum = 0.0
            for e, ep in enumerate(logs, start=1):
                for t, r in enumerate(ep.rewards, start=1):
                    cum += float(r)
                    rows.append((seed, e, t, float(r), cum))
        _write_rows(path, "seed,episode,step,reward,cumulative", rows)
    else:
        raise TypeError(f"cannot emit CSV for {type(obj).__name__}")


def read_curve_csv(path: str | Path) -> AggregateCurve:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "x,mean,ci_low,ci_high":
        raise ValueError("not a curve CSV")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        data = np.zeros((0, 4))
    return AggregateCurve(x=data[:, 0], mean=data[:, 1],
                          ci_low=data[:, 2], ci_high=data[:, 3])


# -- SVG --------------------------------------------------------------------

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f"]


def _scale(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def emit_plot(curves, path: str | Path, x_label: str = "x",
              y_label: str = "y", title: str = "") -> None:
    """Static SVG: one mean polyline + translucent CI band per curve."""
    curves = list(curves)
    if not curves:
        raise ValueError("emit_plot needs at least one curve")
    W, H = 640, 480
    L, R, T, B = 70, 20, 30, 50
    xs = np.concatenate([c.x for c in curves])
    ys = np.concatenate([np.concatenate([c.ci_low, c.ci_high]) for c in curves])
    sx = _scale(float(xs.min()), float(xs.max()), L, W - R)
    sy = _scale(float(ys.min()), float(ys.max()), H - B, T)

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(W), height=str(H),
                     viewBox=f"0 0 {W} {H}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(W), height=str(H),
                  fill="white")
    # axes
    ET.SubElement(svg, "line", x1=str(L), y1=str(H - B), x2=str(W - R),
                  y2=str(H - B), stroke="black")
    ET.SubElement(svg, "line", x1=str(L), y1=str(T), x2=str(L), y2=str(H - B),
                  stroke="black")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = float(xs.min()) + frac * (float(xs.max()) - float(xs.min()))
        yv = float(ys.min()) + frac * (float(ys.max()) - float(ys.min()))
        xp, yp = sx(xv), sy(yv)
        ET.SubElement(svg, "line", x1=f"{xp:.2f}", y1=str(H - B),
                      x2=f"{xp:.2f}", y2=str(H - B + 5), stroke="black")
        tick = ET.SubElement(svg, "text",
                             {"x": f"{xp:.2f}", "y": str(H - B + 18),
                              "text-anchor": "middle", "font-size": "11"})
        tick.text = f"{xv:.3g}"
        ET.SubElement(svg, "line", x1=str(L - 5), y1=f"{yp:.2f}", x2=str(L),
                      y2=f"{yp:.2f}", stroke="black")
        tick = ET.SubElement(svg, "text",
                             {"x": str(L - 8), "y": f"{yp + 4:.2f}",
                              "text-anchor": "end", "font-size": "11"})
        tick.text = f"{yv:.3g}"
    xl = ET.SubElement(svg, "text",
                       {"x": str((L + W - R) // 2), "y": str(H - 12),
                        "text-anchor": "middle", "font-size": "13"})
    xl.text = x_label
    yl = ET.SubElement(svg, "text",
                       {"x": "18", "y": str((T + H - B) // 2),
                        "text-anchor": "middle", "font-size": "13",
                        "transform": f"rotate(-90 18 {(T + H - B) // 2})"})
    yl.text = y_label
    if title:
        tt = ET.SubElement(svg, "text",
                           {"x": str(W // 2), "y": "20",
                            "text-anchor": "middle", "font-size": "14"})
        tt.text = title

    for k, c in enumerate(curves):
        color = _PALETTE[k % len(_PALETTE)]
        band_pts = [f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                    for x, y in zip(c.x, c.ci_high)]
        band_pts += [f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                     for x, y in zip(c.x[::-1], c.ci_low[::-1])]
        ET.SubElement(svg, "polygon", points=" ".join(band_pts), fill=color,
                      opacity="0.2", stroke="none")
        line_pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                            for x, y in zip(c.x, c.mean))
        ET.SubElement(svg, "polyline", points=line_pts, fill="none",
                      stroke=color, **{"stroke-width": "1.5"})
        # legend entry
        ly = T + 10 + 16 * k
        ET.SubElement(svg, "line", x1=str(W - R - 150), y1=str(ly),
                      x2=str(W - R - 125), y2=str(ly), stroke=color,
                      **{"stroke-width": "2"})
        leg = ET.SubElement(svg, "text",
                            {"x": str(W - R - 118), "y": str(ly + 4),
                             "font-size": "12", "class": "legend"})
        leg.text = c.label or f"curve {k + 1}"

    text = ET.tostring(svg, encoding="unicode")
    Path(path).write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + text + "\n")
