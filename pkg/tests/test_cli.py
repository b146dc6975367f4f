"""End-to-end tests of the command-line interface (in-process via main())."""
import numpy as np
import pytest

from mdpembed.cli import main, parse_budget, read_config_file
from mdpembed.embeddings import read_embedding
from mdpembed.gridworld import GridSpec, build_maze, format_maze
from mdpembed.mdpgraph import read_edgelist


@pytest.fixture(scope="module")
def tiny_maze(tmp_path_factory):
    spec = GridSpec(width=4, height=4, obstacles=frozenset({5}),
                    start=12, goal=3)
    world = build_maze(spec)
    path = tmp_path_factory.mktemp("maze") / "tiny.txt"
    path.write_text(format_maze(world.spec))
    return str(path)


def test_parse_budget():
    assert parse_budget("full") is None
    assert parse_budget("Full") is None
    assert parse_budget("250") == 250
    assert parse_budget(None) is None
    with pytest.raises(ValueError):
        parse_budget("lots")


def test_sample_full_writes_complete_edgelist(tiny_maze, tmp_path):
    out = tmp_path / "edges.txt"
    assert main(["sample", "--maze", tiny_maze, "--n", "full",
                 "--out", str(out)]) == 0
    graph = read_edgelist(out)
    assert graph.n_nodes == 16
    assert graph.n_edges == 64


def test_sample_budgeted_is_subset(tiny_maze, tmp_path):
    full = tmp_path / "full.txt"
    part = tmp_path / "part.txt"
    main(["sample", "--maze", tiny_maze, "--n", "full", "--out", str(full)])
    assert main(["sample", "--maze", tiny_maze, "--n", "30", "--seed", "1",
                 "--out", str(part)]) == 0
    g_full = read_edgelist(full)
    g_part = read_edgelist(part)
    assert g_part.edges <= g_full.edges
    assert 0 < g_part.n_edges <= 30


def test_embed_produces_readable_table(tiny_maze, tmp_path):
    edges = tmp_path / "edges.txt"
    emb = tmp_path / "dw.emb"
    main(["sample", "--maze", tiny_maze, "--n", "full", "--out", str(edges)])
    assert main(["embed", "--edges", str(edges), "--method", "deepwalk",
                 "--d", "6", "--seed", "2", "--out", str(emb)]) == 0
    table = read_embedding(emb)
    assert table.n == 16 and table.d == 6
    assert np.all(np.isfinite(table.vectors))


def test_embed_dual_method(tiny_maze, tmp_path):
    edges = tmp_path / "edges.txt"
    emb = tmp_path / "hope.emb"
    main(["sample", "--maze", tiny_maze, "--n", "full", "--out", str(edges)])
    assert main(["embed", "--edges", str(edges), "--method", "hope",
                 "--d", "4", "--out", str(emb)]) == 0
    table = read_embedding(emb)
    assert table.kind == "dual"
    assert table.input_dim == 8


def test_train_with_embedding_and_matrix(tiny_maze, tmp_path):
    edges = tmp_path / "edges.txt"
    emb = tmp_path / "glae.emb"
    main(["sample", "--maze", tiny_maze, "--n", "full", "--out", str(edges)])
    main(["embed", "--edges", str(edges), "--method", "glae",
          "--d", "4", "--out", str(emb)])
    for source in (str(emb), "matrix"):
        out = tmp_path / f"run_{'emb' if source != 'matrix' else 'mat'}.csv"
        assert main(["train", "--maze", tiny_maze, "--embedding", source,
                     "--episodes", "3", "--seed", "1", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "seed,episode,step,reward,cumulative"
        assert len(lines) > 3


def write_config(path, maze, out_dir, **extra):
    vals = {"maze": maze, "method": "hope", "d": 4, "sample_budget": "full",
            "episodes": 2, "repeats": 2, "base_seed": 3, "out_dir": out_dir}
    vals.update(extra)
    path.write_text("# benchmark settings\n" +
                    "\n".join(f"{k} = {v}" for k, v in vals.items()) + "\n")


def test_bench_from_config_file(tiny_maze, tmp_path):
    cfg = tmp_path / "cfg.txt"
    write_config(cfg, tiny_maze, str(tmp_path / "out"))
    assert main(["bench", "--config", str(cfg)]) == 0
    out = tmp_path / "out"
    for name in ("hope_steps.csv", "hope_episodes.csv", "hope_raw.csv",
                 "hope.svg"):
        assert (out / name).exists(), name
    steps = (out / "hope_steps.csv").read_text().splitlines()
    assert steps[0] == "x,mean,ci_low,ci_high"


def test_cli_flag_overrides_config_file(tiny_maze, tmp_path):
    cfg = tmp_path / "cfg.txt"
    write_config(cfg, tiny_maze, str(tmp_path / "out"))
    assert main(["bench", "--config", str(cfg), "--method", "matrix",
                 "--out-dir", str(tmp_path / "out2")]) == 0
    assert (tmp_path / "out2" / "matrix_steps.csv").exists()
    assert not (tmp_path / "out" / "hope_steps.csv").exists()


def test_bench_without_config_uses_flags(tiny_maze, tmp_path):
    assert main(["bench", "--maze", tiny_maze, "--method", "matrix",
                 "--episodes", "2", "--repeats", "2",
                 "--out-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "matrix_raw.csv").exists()


def test_bench_rerun_byte_identical(tiny_maze, tmp_path):
    cfg = tmp_path / "cfg.txt"
    write_config(cfg, tiny_maze, str(tmp_path / "rep"))
    assert main(["bench", "--config", str(cfg)]) == 0
    first = {p.name: p.read_bytes()
             for p in (tmp_path / "rep").glob("*.csv")}
    assert main(["bench", "--config", str(cfg)]) == 0
    second = {p.name: p.read_bytes()
              for p in (tmp_path / "rep").glob("*.csv")}
    assert first.keys() == second.keys() and len(first) == 3
    for name in first:
        assert first[name] == second[name], name


def test_sweep_dim_command(tiny_maze, tmp_path):
    cfg = tmp_path / "cfg.txt"
    write_config(cfg, tiny_maze, str(tmp_path / "sd"))
    assert main(["sweep-dim", "--config", str(cfg), "--dims", "4,6"]) == 0
    lines = (tmp_path / "sd" / "sweep_dim_auc.csv").read_text().splitlines()
    assert len(lines) == 3


def test_sweep_samples_command(tiny_maze, tmp_path):
    cfg = tmp_path / "cfg.txt"
    write_config(cfg, tiny_maze, str(tmp_path / "ss"))
    assert main(["sweep-samples", "--config", str(cfg),
                 "--budgets", "30"]) == 0
    lines = (tmp_path / "ss" / "sweep_samples_auc.csv").read_text().splitlines()
    assert {ln.split(",")[0] for ln in lines[1:]} == {"30", "full"}


# -- failure modes ----------------------------------------------------------

def test_missing_config_file_exits_nonzero(capsys):
    assert main(["bench", "--config", "/no/such/file.cfg"]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_config_key_exits_nonzero(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mazze = maze1\n")
    assert main(["bench", "--config", str(cfg)]) == 1
    assert "unknown config key" in capsys.readouterr().err


def test_malformed_config_line_exits_nonzero(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just some words\n")
    assert main(["bench", "--config", str(cfg)]) == 1
    assert "key=value" in capsys.readouterr().err


def test_unknown_maze_exits_nonzero(capsys):
    assert main(["bench", "--maze", "maze99", "--method", "matrix",
                 "--episodes", "1", "--repeats", "2"]) == 1
    assert "maze" in capsys.readouterr().err


def test_oversized_dimension_exits_nonzero(tiny_maze, tmp_path, capsys):
    edges = tmp_path / "edges.txt"
    main(["sample", "--maze", tiny_maze, "--n", "full", "--out", str(edges)])
    assert main(["embed", "--edges", str(edges), "--method", "hope",
                 "--d", "99", "--out", str(tmp_path / "x.emb")]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand_is_argparse_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_config_file_comments_and_blanks(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\n\nmethod = matrix  # trailing\nrepeats = 2\n")
    vals = read_config_file(cfg)
    assert vals == {"method": "matrix", "repeats": "2"}
