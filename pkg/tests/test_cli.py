from pathlib import Path

from click.testing import CliRunner

from cgbp import __version__
from cgbp.cli import main
from cgbp.graph import load_dimacs_col, load_gset
from cgbp.training import read_trajectory


def _invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_info():
    result = _invoke("info")
    assert result.exit_code == 0
    assert f"cgbp {__version__}" in result.output
    assert "kernel backend:" in result.output


def test_version_flag():
    result = _invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_gen_regular_gset(tmp_path):
    path = tmp_path / "inst.g"
    result = _invoke("gen", "--regular", "12,3,0", "--out", str(path))
    assert result.exit_code == 0
    assert "wrote 12 nodes / 18 edges" in result.output
    g = load_gset(path)
    assert (g.n_nodes, g.n_edges) == (12, 18)


def test_gen_queen_dimacs(tmp_path):
    path = tmp_path / "queen.col"
    result = _invoke("gen", "--queen", "5x5", "--format", "dimacs",
                     "--out", str(path))
    assert result.exit_code == 0
    g = load_dimacs_col(path)
    assert (g.n_nodes, g.n_edges) == (25, 160)


def test_gen_selector_errors(tmp_path):
    out = str(tmp_path / "x")
    assert _invoke("gen", "--out", out).exit_code != 0
    assert _invoke("gen", "--regular", "8,3,0", "--queen", "4",
                   "--out", out).exit_code != 0
    result = _invoke("gen", "--regular", "8,3", "--out", out)
    assert result.exit_code != 0 and "n,d,seed" in result.output
    result = _invoke("gen", "--queen", "axb", "--out", out)
    assert result.exit_code != 0 and "RxC" in result.output


def test_gen_impossible_instance(tmp_path):
    # odd n with odd degree has no regular graph
    result = _invoke("gen", "--regular", "7,3,0", "--out",
                     str(tmp_path / "x"))
    assert result.exit_code != 0


def test_solve_smoke(tmp_path):
    out = tmp_path / "run"
    result = _invoke("solve", "--regular", "16,3,0", "--epochs", "15",
                     "--seeds", "0,1", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert result.output.count("seed ") >= 3  # two per-seed lines plus best
    assert "best:" in result.output
    assert f"artifacts written to {out}" in result.output
    assert (out / "manifest.txt").exists()
    assert (out / "seed_1" / "solution.txt").exists()


def test_solve_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("regular=16,3,0\nepochs=5\nseeds=0\n")
    out = tmp_path / "run"
    result = _invoke("solve", "--config", str(cfg), "--epochs", "9",
                     "--out", str(out))
    assert result.exit_code == 0, result.output
    cols = read_trajectory(out / "seed_0" / "trajectory.csv")
    assert len(cols["epoch"]) == 9


def test_solve_fixed_node_zero(tmp_path):
    # node 0 must survive the flag merge even though it is falsy
    out = tmp_path / "run"
    result = _invoke("solve", "--regular", "12,3,0", "--epochs", "8",
                     "--seeds", "0", "--fixed-node", "0", "--out", str(out))
    assert result.exit_code == 0, result.output
    cols = read_trajectory(out / "seed_0" / "trajectory.csv")
    assert (cols["node"] == 0).all()


def test_solve_missing_graph_names_path():
    result = _invoke("solve", "--graph", "/no/such/file.col")
    assert result.exit_code != 0
    assert "/no/such/file.col" in result.output


def test_solve_parse_error_names_line(tmp_path):
    bad = tmp_path / "bad.g"
    bad.write_text("4 1\n1 9\n")
    result = _invoke("solve", "--graph", str(bad), "--epochs", "2")
    assert result.exit_code != 0
    assert "line 2" in result.output


def test_toy_writes_csv(tmp_path):
    path = tmp_path / "traj.csv"
    result = _invoke("toy", "--mode", "cgbp-1", "--epochs", "50",
                     "--out", str(path))
    assert result.exit_code == 0
    assert "final loss" in result.output
    text = path.read_text()
    assert "np.float64" not in text
    assert text.splitlines()[0] == "epoch,w,b,o1,o2,o3,loss,loss_c,z,node"


def test_toy_default_output_name():
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(main, ["toy", "--mode", "bp",
                                      "--epochs", "20"])
        assert result.exit_code == 0
        assert Path("toy_bp.csv").exists()


def test_sweep_smoke(tmp_path):
    out = tmp_path / "sweep"
    result = _invoke("sweep", "--regular", "12,3,0", "--epochs", "10",
                     "--seeds", "0", "--budget", "2", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert "winner: candidate" in result.output
    assert (out / "leaderboard.csv").exists()
    assert (out / "best_config.txt").exists()
    # winning config round-trips through solve
    rerun = _invoke("solve", "--config", str(out / "best_config.txt"),
                    "--epochs", "5")
    assert rerun.exit_code == 0, rerun.output


def test_bench_queen(tmp_path):
    out = tmp_path / "bench"
    result = _invoke("bench", "--suite", "queen", "--epochs", "10",
                     "--seeds", "0", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert "[queen] queen5-5" in result.output
    assert (out / "queen.csv").exists()


def test_bench_gset_without_data(tmp_path):
    out = tmp_path / "bench"
    result = _invoke("bench", "--suite", "gset", "--data",
                     str(tmp_path / "empty"), "--out", str(out))
    assert result.exit_code == 0, result.output
    assert "no instances found" in result.output
