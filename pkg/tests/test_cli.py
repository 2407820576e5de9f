import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from tda_nhst.cli import main
from tda_nhst.datasets import concurrence_demo_path
from tda_nhst.diagrams import make_diagram, read_diagram_file, read_diagram_set, write_diagram_file, write_diagram_set
from tda_nhst.matching import diagram_distance, pairwise_distance_matrix
from tda_nhst.nhst import Labeling, randomization_test
from tda_nhst.persistence import rips_persistence


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def diagram_set(tmp_path, rng):
    dgms = []
    for shift in (0.0, 0.0, 0.0, 2.0, 2.0, 2.0):
        b = rng.uniform(0, 1, 4) + shift
        dgms.append(make_diagram(np.column_stack([b, b + rng.uniform(0.5, 1.5, 4)])))
    labels = ["a"] * 3 + ["b"] * 3
    root = tmp_path / "set"
    write_diagram_set(dgms, labels, root)
    return root, dgms, labels


def test_dist_self(capsys, tmp_path):
    path = tmp_path / "a.dgm"
    write_diagram_file(make_diagram([(0, 2), (1, math.inf)]), path)
    code, out, _ = run(capsys, "dist", path, path)
    assert code == 0
    assert float(out) == 0.0


def test_dist_value_and_policy(capsys, tmp_path):
    a, b = tmp_path / "a.dgm", tmp_path / "b.dgm"
    write_diagram_file(make_diagram([(0, 2)]), a)
    write_diagram_file(make_diagram([(0, math.inf)]), b)
    _, out, _ = run(capsys, "dist", a, b)
    assert float(out) == diagram_distance(make_diagram([(0, 2)]), make_diagram([]))
    _, out, _ = run(capsys, "dist", a, b, "--inf", "truncate=4")
    assert float(out) == pytest.approx(2.0)


def test_missing_argument_is_usage_error(capsys, tmp_path):
    path = tmp_path / "a.dgm"
    write_diagram_file(make_diagram([]), path)
    with pytest.raises(SystemExit) as exc:
        main(["dist", str(path)])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["frobnicate"], ["dist", "a", "b", "--bogus"], ["test", "x", "--reps", "0"], ["dist", "a", "b", "--inf", "keep"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_data_errors(capsys, tmp_path):
    code, _, err = run(capsys, "dist", tmp_path / "nope.dgm", tmp_path / "nope.dgm")
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.dgm"
    bad.write_text("2 1\n")
    code, _, err = run(capsys, "dist", bad, bad)
    assert code == 2
    assert "bad.dgm:1" in err


def test_pairwise(capsys, diagram_set, tmp_path):
    root, dgms, _ = diagram_set
    out = tmp_path / "d.csv"
    assert run(capsys, "pairwise", root, "-o", out)[0] == 0
    rows = list(csv.reader(open(out)))
    names, _, _ = read_diagram_set(root)
    assert rows[0] == [""] + names
    d = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    np.testing.assert_array_equal(d, pairwise_distance_matrix(dgms))


def test_pairwise_without_manifest(capsys, tmp_path):
    for name, pts in [("z.dgm", [(0, 1)]), ("a.dgm", [(0, 3)])]:
        write_diagram_file(make_diagram(pts), tmp_path / name)
    out = tmp_path / "d.csv"
    assert run(capsys, "pairwise", tmp_path, "-o", out)[0] == 0
    assert next(csv.reader(open(out))) == ["", "a.dgm", "z.dgm"]


def test_rips(capsys, tmp_path, rng):
    pts = rng.normal(size=(15, 2))
    src = tmp_path / "pts.csv"
    np.savetxt(src, pts, delimiter=",", fmt="%.17g")
    out = tmp_path / "rips"
    assert run(capsys, "rips", src, "--maxdim", 1, "-o", out)[0] == 0
    expected = rips_persistence(pts, 1)
    for k in (0, 1):
        assert read_diagram_file(out / f"dim{k}.dgm") == expected[k]


def test_concurrence_single_and_set(capsys, tmp_path):
    demo = concurrence_demo_path()
    out = tmp_path / "one"
    assert run(capsys, "concurrence", demo / "network_0.csv", "--cutoff", 0.5, "--maxdim", 1, "-o", out)[0] == 0
    assert {p.name for p in out.iterdir()} == {"dim0.dgm", "dim1.dgm"}
    out = tmp_path / "set"
    assert run(capsys, "concurrence", demo, "--cutoff", 0.5, "--maxdim", 1, "-o", out)[0] == 0
    names, dgms, labels = read_diagram_set(out / "dim0")
    assert len(names) == 8 and set(labels) == {"network", "independent"}
    assert dgms[0] == read_diagram_file(tmp_path / "one" / "dim0.dgm")


def test_concurrence_budget(capsys):
    demo = concurrence_demo_path()
    code, _, err = run(capsys, "concurrence", demo / "network_0.csv", "--cutoff", 0.5, "--maxdim", 2, "--budget", 5, "-o", "unused")
    assert code == 2 and "too large" in err


def test_pht(capsys, tmp_path):
    src = tmp_path / "poly.csv"
    np.savetxt(src, [(0, 0), (1, 0), (1, 1), (0, 1)], delimiter=",")
    out = tmp_path / "pht"
    assert run(capsys, "pht", src, "--dirs", 4, "-o", out)[0] == 0
    assert sorted(p.name for p in out.glob("*.dgm")) == [f"dir{k:03d}.dgm" for k in range(4)]
    assert np.loadtxt(out / "directions.csv", delimiter=",").shape == (4, 2)
    assert read_diagram_file(out / "dir001.dgm") == make_diagram([(0, 1)])


def test_test_plain_output(capsys, diagram_set):
    root, dgms, labels = diagram_set
    code, out, _ = run(capsys, "test", root, "--reps", 1000, "--seed", 7)
    assert code == 0
    fields = dict(line.split() for line in out.strip().splitlines())
    ref = randomization_test(pairwise_distance_matrix(dgms), Labeling.from_labels(labels), 1000, seed=7)
    assert int(fields["count"]) == ref.count
    assert float(fields["p_value"]) == ref.p_value
    assert float(fields["observed_loss"]) == ref.observed_loss
    assert fields["replicates"] == "1000" and fields["seed"] == "7"


def test_test_json_is_deterministic(capsys, diagram_set):
    root = diagram_set[0]
    first = run(capsys, "test", root, "--reps", 1000, "--seed", 7, "--json")[1]
    second = run(capsys, "test", root, "--reps", 1000, "--seed", 7, "--json")[1]
    assert first == second
    payload = json.loads(first)
    for key in ("observed_loss", "p_value", "n_replicates", "count", "seed", "method"):
        assert key in payload
    assert payload["groups"] == {"a": 3, "b": 3}
    assert payload["provenance"]["flags"]["seed"] == 7


def test_test_add_one_and_exhaustive(capsys, diagram_set):
    root = diagram_set[0]
    payload = json.loads(run(capsys, "test", root, "--reps", 500, "--seed", 1, "--json", "--add-one")[1])
    assert payload["p_value_reported"] == (payload["count"] + 1) / 501
    payload = json.loads(run(capsys, "test", root, "--exhaustive", "--json")[1])
    assert payload["n_replicates"] == 20 and payload["method"] == "exhaustive"
    code, _, err = run(capsys, "test", root, "--exhaustive", "--max-relabelings", 10)
    assert code == 2 and "randomization_test" in err


def test_test_logs_drawn_seed(capsys, caplog, diagram_set):
    code, out, _ = run(capsys, "test", diagram_set[0], "--reps", 10)
    assert code == 0
    seed = int(dict(line.split() for line in out.strip().splitlines())["seed"])
    assert str(seed) in caplog.text


def test_simulate(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "simulate", "--preset", "fig5", "--scale", 0.04, "--seed", 3, "--reps", 20, "-o", out)
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["param", "run", "p_value"]
    assert len(rows) == 1 + 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--preset", "fig5", "--scale", "2", "-o", str(out)])
    assert exc.value.code == 1


def test_thread_cap_keeps_results(tmp_path, diagram_set):
    root = diagram_set[0]
    cmd = [sys.executable, "-m", "tda_nhst", "test", str(root), "--reps", "9000", "--seed", "5", "--json"]
    outs = []
    for threads in ("1", "2", "0"):
        res = subprocess.run(cmd, capture_output=True, text=True, env={"TDA_NHST_THREADS": threads, "PATH": ""}, check=False)
        assert res.returncode == 0, res.stderr
        outs.append(res.stdout)
    assert outs[0] == outs[1] == outs[2]
    bad = subprocess.run(cmd, capture_output=True, text=True, env={"TDA_NHST_THREADS": "-1"}, check=False)
    assert bad.returncode == 2
