import json
import subprocess
import sys

import pytest

from rdrmesh.cli import main
from rdrmesh.meshio import generate_synthetic, read_mesh, save_mesh


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def grid_files(tmp_path):
    m = generate_synthetic(8, 9, 0.3, 5)
    save_mesh(m, tmp_path / "g.node", tmp_path / "g.ele")
    return m, tmp_path / "g.node", tmp_path / "g.ele"


class TestGenerate:
    def test_three_by_three(self, tmp_path, capsys):
        assert run("generate", "--synthetic", "3x3", "--seed", 1, "-o", tmp_path / "a") == 0
        m = read_mesh(tmp_path / "a.node", tmp_path / "a.ele")
        assert (m.n_vertices, m.n_triangles) == (9, 8)
        assert json.loads(capsys.readouterr().out)["vertices"] == 9

    def test_deterministic_bytes(self, tmp_path):
        for name in ("a", "b"):
            run("generate", "--synthetic", "20x7", "--jitter", 0.3, "--seed", 9, "-o", tmp_path / name)
        assert (tmp_path / "a.node").read_bytes() == (tmp_path / "b.node").read_bytes()
        assert (tmp_path / "a.ele").read_bytes() == (tmp_path / "b.ele").read_bytes()

    def test_bad_jitter(self, tmp_path, capsys):
        assert run("--json-errors", "generate", "--synthetic", "3x3", "--jitter", 0.6, "-o", tmp_path / "a") == 1
        err = json.loads(capsys.readouterr().err)
        assert "jitter" in err["error"]


class TestQuality:
    def test_equilateral(self, tmp_path, capsys):
        (tmp_path / "t.node").write_text("3 2 0 0\n1 0 0\n2 1 0\n3 0.5 0.8660254037844386\n")
        (tmp_path / "t.ele").write_text("1 3 0\n1 1 2 3\n")
        assert run("quality", "--node", tmp_path / "t.node", "--ele", tmp_path / "t.ele") == 0
        out = json.loads(capsys.readouterr().out)
        assert out["global_quality"] == pytest.approx(1.0)
        assert sum(out["histogram"]["counts"]) == 3

    def test_synthetic_repeatable(self, capsys):
        run("quality", "--synthetic", "3x3")
        first = capsys.readouterr().out
        run("quality", "--synthetic", "3x3")
        assert capsys.readouterr().out == first

    def test_missing_file(self, tmp_path, capsys):
        assert run("quality", "--node", tmp_path / "x.node", "--ele", tmp_path / "x.ele") != 0
        assert "x.node" in capsys.readouterr().err

    def test_parse_error_context(self, tmp_path, capsys):
        (tmp_path / "b.node").write_text("2 2 0 0\n1 0 0\n2 1 oops\n")
        (tmp_path / "b.ele").write_text("0 3 0\n")
        assert run("quality", "--node", tmp_path / "b.node", "--ele", tmp_path / "b.ele") == 1
        assert "b.node:3" in capsys.readouterr().err


class TestReorder:
    def test_ori_roundtrip(self, grid_files, tmp_path):
        m, node, ele = grid_files
        assert run("reorder", "--node", node, "--ele", ele, "--ordering", "ori", "-o", tmp_path / "o") == 0
        assert read_mesh(tmp_path / "o.node", tmp_path / "o.ele").same_as(m)

    def test_rdr_deterministic_and_quality(self, grid_files, tmp_path, capsys):
        _, node, ele = grid_files
        for name in ("r1", "r2"):
            run("reorder", "--node", node, "--ele", ele, "--ordering", "rdr", "-o", tmp_path / name,
                "--perm-out", tmp_path / f"{name}.perm")
        outs = capsys.readouterr().out
        assert (tmp_path / "r1.node").read_bytes() == (tmp_path / "r2.node").read_bytes()
        assert (tmp_path / "r1.perm").read_text().splitlines()[0] == "72"
        run("quality", "--node", node, "--ele", ele)
        q_in = json.loads(capsys.readouterr().out)["global_quality"]
        run("quality", "--node", tmp_path / "r1.node", "--ele", tmp_path / "r1.ele")
        q_out = json.loads(capsys.readouterr().out)["global_quality"]
        assert q_out == pytest.approx(q_in, abs=1e-12)
        assert outs.count("checksum") == 2

    def test_unknown_strategy(self, grid_files, tmp_path):
        _, node, ele = grid_files
        with pytest.raises(SystemExit) as info:
            run("reorder", "--node", node, "--ele", ele, "--ordering", "zorder", "-o", tmp_path / "z")
        assert info.value.code != 0


class TestCompare:
    def test_ori_only_ratios(self, tmp_path):
        assert run("compare", "--synthetic", "12x12", "--jitter", 0.3, "--ordering", "ori",
                   "--out", tmp_path) == 0
        rep = json.loads((tmp_path / "comparison.json").read_text())
        ratios = rep["orderings"]["ori"]["ratios_vs_ori"]
        assert set(ratios.values()) == {1.0}

    def test_outputs_and_trend(self, tmp_path):
        run("compare", "--synthetic", "50x50", "--jitter", 0.3, "--seed", 42,
            "--ordering", "random", "--ordering", "bfs", "--ordering", "rdr", "--out", tmp_path)
        rep = json.loads((tmp_path / "comparison.json").read_text())
        o = rep["orderings"]
        assert o["rdr"]["quantiles"]["q90"] <= o["bfs"]["quantiles"]["q90"]
        assert rep["iterations_consistent"]
        lines = (tmp_path / "quantiles.csv").read_text().splitlines()
        assert lines[0] == "mesh,ordering,q50,q75,q90,q100,n_accesses"
        assert len(lines) == 4
        prof = (tmp_path / "profile_rdr.csv").read_text().splitlines()
        assert prof[0] == "iteration,window,mean_distance" and len(prof) == 101
        assert (tmp_path / "mesh_rdr.node").exists()

    def test_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            run("compare", "--synthetic", "15x15", "--jitter", 0.3, "--seed", 3, "--out", tmp_path / d,
                "--profile-iterations", 2, "--threads", 2)
        for f in ("comparison.json", "quantiles.csv", "profile_ori.csv", "profile_rdr.csv", "mesh_random.node"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_profile_iterations(self, tmp_path):
        run("compare", "--synthetic", "15x15", "--ordering", "bfs", "--profile-iterations", 3,
            "--out", tmp_path)
        rows = (tmp_path / "profile_bfs.csv").read_text().splitlines()[1:]
        assert len(rows) == 300 and rows[-1].startswith("3,99,")

    def test_cache_flags(self, tmp_path):
        run("compare", "--synthetic", "10x10", "--ordering", "random", "--l1", 660, "--l2", 1320,
            "--l3", 3300, "--lat", "1,2,3", "--out", tmp_path)
        rep = json.loads((tmp_path / "comparison.json").read_text())
        assert rep["cache"]["e1"] == 10 and rep["cache"]["latencies"] == [1.0, 2.0, 3.0]


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "rdrmesh", "generate", "--synthetic", "2x2",
                        "-o", str(tmp_path / "m")], capture_output=True, text=True)
    assert r.returncode == 0 and (tmp_path / "m.ele").exists()
