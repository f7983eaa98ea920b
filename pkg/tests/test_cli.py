import json
import subprocess
import sys

import numpy as np
import pytest

from warpqi.cli import main


def run(argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.fixture
def square(tmp_path):
    path = tmp_path / "sq.csv"
    assert run(["synth", "square", "--n", 200, "--seed", 7, "-o", path]) == 0
    return path


def test_synth_writes_points_and_manifest(square):
    rows = square.read_text().splitlines()
    assert rows[0] == "x0,x1,x2" and len(rows) == 201
    manifest = json.loads((square.parent / "sq.csv.manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["rng"] == "numpy.random.PCG64"
    assert manifest["command"][:3] == ["warpqi", "synth", "square"]
    assert manifest["config"] == {"dataset": "square", "n": 200, "noise": 0.001}


@pytest.mark.parametrize("argv", [["synth", "square", "--n", 2], ["synth", "square", "--noise", -1], ["synth", "disc"]])
def test_synth_usage_errors(tmp_path, argv, capsys):
    assert run([*argv, "-o", tmp_path / "x.csv"]) == 2
    assert "usage" in capsys.readouterr().err


def test_project_unknown_method(square, tmp_path):
    assert run(["project", "umap", "-i", square, "-o", tmp_path / "l.csv"]) == 2


def test_project_perplexity_too_large(square, tmp_path, capsys):
    assert run(["project", "tsne", "--perplexity", 2000, "-i", square, "-o", tmp_path / "l.csv"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("warpqi: error:") and "perplexity" in err


def test_missing_input_names_path(tmp_path, capsys):
    missing = tmp_path / "nowhere.csv"
    assert run(["project", "pca", "-i", missing, "-o", tmp_path / "l.csv"]) == 1
    assert str(missing) in capsys.readouterr().err


def test_metrics_size_mismatch(square, tmp_path, capsys):
    layout = tmp_path / "l.csv"
    np.savetxt(layout, np.random.default_rng(0).random((150, 2)), delimiter=",")
    assert run(["metrics", "-i", square, "-l", layout]) == 1
    err = capsys.readouterr().err
    assert "200" in err and "150" in err


def test_metrics_identity(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    np.savetxt(pts, np.random.default_rng(1).random((100, 2)), delimiter=",")
    assert run(["metrics", "-i", pts, "-l", pts]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["warping_index"] <= 1e-9  # Heron vs shoelace rounding
    assert report["stress"] == pytest.approx(0, abs=1e-12)
    assert report["trustworthiness"] == 1
    for key in ("k_neighbors", "n_points", "n_triangles", "degenerate_triangle_count"):
        assert key in report


def test_metrics_pca_and_table(square, tmp_path, capsys):
    pca = tmp_path / "pca.csv"
    assert run(["project", "pca", "-i", square, "-o", pca]) == 0
    assert run(["metrics", "-i", square, "-l", pca, "--table"]) == 0
    out = capsys.readouterr().out
    head, _, row = out.splitlines()
    assert head.split() == ["Method", "Stress", "Trust.", "Warping", "Index"]
    assert row.split()[0] == "pca"
    assert float(row.split()[3]) <= 0.01


def test_metrics_per_triangle_and_distances(square, tmp_path, capsys):
    pca, dist = tmp_path / "pca.csv", tmp_path / "d.csv"
    run(["project", "pca", "-i", square, "-o", pca])
    pts = np.loadtxt(square, delimiter=",", skiprows=1)
    np.savetxt(dist, np.linalg.norm(pts[:, None] - pts[None], axis=-1), delimiter=",")
    out = tmp_path / "m.json"
    assert run(["metrics", "--distances", dist, "-l", pca, "--per-triangle", "-o", out]) == 0
    report = json.loads(out.read_text())
    assert len(report["triangles"]) == report["n_triangles"] == len(report["quality"]["q_values"])
    run(["metrics", "-i", square, "-l", pca])
    direct = json.loads(capsys.readouterr().out)
    assert report["warping_index"] == pytest.approx(direct["warping_index"], abs=1e-12)


def test_metrics_strict_flag(tmp_path):
    dist, layout = tmp_path / "d.csv", tmp_path / "l.csv"
    dist.write_text("0,1,3,2\n1,0,1,2.5\n3,1,0,2\n2,2.5,2,0\n")
    layout.write_text("0,0\n1,0\n1,1\n0,1\n")
    assert run(["metrics", "--distances", dist, "-l", layout, "--k", 1]) == 0
    assert run(["metrics", "--distances", dist, "-l", layout, "--k", 1, "--strict-metric"]) == 1


def test_render_identity_is_midpoint(tmp_path):
    pts, svg = tmp_path / "p.csv", tmp_path / "q.svg"
    np.savetxt(pts, np.random.default_rng(3).random((80, 2)), delimiter=",")
    assert run(["render", "-i", pts, "-l", pts, "-o", svg]) == 0
    fills = set(__import__("re").findall(r'<polygon [^>]*fill="(#[0-9a-f]{6})"', svg.read_text()))
    assert fills == {"#ffffff"}
    assert (tmp_path / "q.svg.manifest.json").exists()


def _outputs(workdir):
    sq, pca, tsne = workdir / "sq.csv", workdir / "pca.csv", workdir / "tsne.csv"
    cmds = [
        ["synth", "square", "--n", 150, "--seed", 3, "-o", sq],
        ["project", "pca", "-i", sq, "-o", pca],
        ["project", "tsne", "-i", sq, "--perplexity", 10, "--iterations", 60, "--seed", 3, "-o", tsne],
        ["metrics", "-i", sq, "-l", tsne, "--per-triangle", "-o", workdir / "m.json"],
        ["render", "-i", sq, "-l", tsne, "-o", workdir / "t.svg"],
    ]
    for argv in cmds:
        assert run(argv) == 0
    return {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}


def test_every_command_is_byte_deterministic(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    a, b = _outputs(tmp_path / "a"), _outputs(tmp_path / "b")
    assert len(a) == 10  # five outputs plus five manifests
    for name in a:
        if name.endswith(".manifest.json"):
            # the manifest echoes the output path; everything else must agree
            da, db = json.loads(a[name]), json.loads(b[name])
            for doc in (da, db):
                doc.pop("output"), doc.pop("command"), doc.pop("inputs")
            assert da == db
        else:
            assert a[name] == b[name], name


def test_thread_cap_env(square, tmp_path, monkeypatch):
    monkeypatch.setenv("WARPQI_THREADS", "1")
    assert run(["project", "pca", "-i", square, "-o", tmp_path / "pca.csv"]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "warpqi", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("warpqi ")
