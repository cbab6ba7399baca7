import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import gaussian_mixture
from layered_coreset.cli import main


@pytest.fixture
def pts(tmp_path):
    path = tmp_path / "pts.csv"
    np.savetxt(path, gaussian_mixture(300, 5, seed=4), delimiter=",")
    return str(path)


def run(*args):
    return main([str(a) for a in args])


def test_build_writes_outputs(pts, tmp_path):
    out = tmp_path / "out"
    rc = run("build", "--points", pts, "--k", 5, "--z", 1, "--epsilon", 0.1, "--d-vc", 3, "--seed", 7,
             "--out-dir", out, "--dump-partition")
    assert rc == 0
    meta = json.loads((out / "meta.json").read_text())
    rows = list(csv.reader(open(out / "coreset.csv")))
    assert rows[0] == ["point_index", "weight", "group_tag"]
    assert meta["coreset_size"] == len(rows) - 1
    for key in ("m", "groups", "n", "k", "z", "epsilon", "d_vc", "seed", "c0", "config"):
        assert key in meta
    assert meta["config"]["seed"] == 7 and meta["config"]["command"] == "build"
    part = list(csv.reader(open(out / "partition.csv")))
    assert part[0] == ["point_index", "cluster", "group_tag", "j", "b", "ell"]
    assert len(part) == 301


def test_build_is_byte_identical(pts, tmp_path):
    for name in ("a", "b"):
        assert run("build", "--points", pts, "--k", 5, "--seed", 7, "--d-vc", 3, "--out-dir", tmp_path / name) == 0
    for f in ("coreset.csv", "meta.json"):
        a = (tmp_path / "a" / f).read_bytes()
        b = (tmp_path / "b" / f).read_bytes()
        if f == "meta.json":
            a, b = json.loads(a), json.loads(b)
            a["config"].pop("out_dir"), b["config"].pop("out_dir")
        assert a == b


def test_threads_do_not_change_output(pts, tmp_path):
    run("build", "--points", pts, "--k", 5, "--seed", 1, "--out-dir", tmp_path / "one", "--threads", 1)
    run("build", "--points", pts, "--k", 5, "--seed", 1, "--out-dir", tmp_path / "four", "--threads", 4)
    assert (tmp_path / "one" / "coreset.csv").read_bytes() == (tmp_path / "four" / "coreset.csv").read_bytes()


def test_malformed_row(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0\n1,oops\n")
    assert run("build", "--points", bad, "--k", 2) == 2
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "bad.csv:2" in err


@pytest.mark.parametrize("flags", [["--epsilon", "0.5"], ["--z", "3"], ["--k", "0"]])
def test_validation(pts, flags, capsys):
    assert run("build", "--points", pts, *flags) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_needs_one_input(pts, tmp_path):
    assert run("build", "--k", 2) == 2
    assert run("build", "--points", pts, "--matrix", pts) == 2
    assert run("build", "--input", pts) == 2
    assert run("build", "--input", pts, "--format", "points", "--k", 2, "--out-dir", tmp_path) == 0


def test_evaluate_full_set_is_exact(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    np.savetxt(pts, np.random.default_rng(0).normal(size=(8, 2)), delimiter=",")
    cs = tmp_path / "c.csv"
    cs.write_text("point_index,weight,group_tag\n" + "".join(f"{i},1.0,all\n" for i in range(8)))
    rep = tmp_path / "r.json"
    assert run("evaluate", "--points", pts, "--coreset", cs, "--k", 2, "--z", 1,
               "--family", "exhaustive", "--out", rep, "--errors-csv", tmp_path / "e.csv") == 0
    data = json.loads(rep.read_text())
    assert data["summary"]["max"] == 0.0
    assert data["summary"]["solutions"] == 28
    assert len(data["errors"]) == 28
    assert len((tmp_path / "e.csv").read_text().splitlines()) == 29


def test_evaluate_errors(pts, tmp_path):
    assert run("evaluate", "--points", pts, "--coreset", tmp_path / "nope.csv", "--k", 2) == 2
    cs = tmp_path / "c.csv"
    cs.write_text("point_index,weight,group_tag\n999,1.0,x\n")
    assert run("evaluate", "--points", pts, "--coreset", cs, "--k", 2) == 2


def test_evaluate_meta_cross_check(pts, tmp_path):
    out = tmp_path / "o"
    run("build", "--points", pts, "--k", 5, "--out-dir", out)
    assert run("evaluate", "--points", pts, "--coreset", out / "coreset.csv", "--out", tmp_path / "r.json") == 0
    meta = json.loads((out / "meta.json").read_text())
    meta["coreset_size"] += 1
    (out / "meta.json").write_text(json.dumps(meta))
    assert run("evaluate", "--points", pts, "--coreset", out / "coreset.csv") == 2


def test_evaluate_report_reproducible(pts, tmp_path):
    out = tmp_path / "o"
    run("build", "--points", pts, "--k", 5, "--out-dir", out)
    blobs = []
    for _ in range(2):
        run("evaluate", "--points", pts, "--coreset", out / "coreset.csv", "--family", "perturbed",
            "--count", 20, "--out", tmp_path / "r.json")
        blobs.append((tmp_path / "r.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_bench_rows(pts, tmp_path):
    out = tmp_path / "b.csv"
    assert run("bench", "--points", pts, "--k", 5, "--methods", "lgs,uniform,sensitivity",
               "--sizes", "100,200,400", "--seeds", "0,1", "--count", 10, "--out", out) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 3 * 3 * 2
    assert {r["method"] for r in rows} == {"lgs", "uniform", "sensitivity"}
    assert {r["target_size"] for r in rows} == {"100", "200", "400"}
    assert run("bench", "--points", pts, "--methods", "magic") == 2
    assert run("bench", "--points", pts, "--sizes", "a,b") == 2


def test_vc_estimate(tmp_path, capsys):
    tri = tmp_path / "t.csv"
    tri.write_text("0,0\n4,0.3\n1.7,3.9\n")
    assert run("vc-estimate", "--points", tri) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["d_hat"] == 3 and out["exhaustive"] is True
    one = tmp_path / "one.csv"
    one.write_text("2,2\n")
    assert run("vc-estimate", "--points", one, "--out", tmp_path / "v.json") == 0
    assert json.loads((tmp_path / "v.json").read_text())["d_hat"] == 1
    dup = tmp_path / "dup.csv"
    dup.write_text("1,1\n1,1\n1,1\n")
    run("vc-estimate", "--points", dup, "--out", tmp_path / "d.json")
    assert json.loads((tmp_path / "d.json").read_text())["d_hat"] == 1


def test_vc_estimate_too_large(pts):
    assert run("vc-estimate", "--points", pts) == 2


def test_matrix_and_graph_inputs(tmp_path):
    m = tmp_path / "m.csv"
    m.write_text("0,1,4\n1,0,3\n4,3,0\n")
    assert run("build", "--matrix", m, "--k", 1, "--out-dir", tmp_path / "m") == 0
    g = tmp_path / "g.txt"
    g.write_text("0 1 1\n1 2 1\n2 3 1\n")
    assert run("build", "--graph", g, "--k", 2, "--out-dir", tmp_path / "g") == 0
    c = tmp_path / "c.txt"
    c.write_text("0,0;1,0\n0,1;1,1\n5,5;6,6;7,7\n")
    assert run("build", "--curves", c, "--k", 2, "--out-dir", tmp_path / "c") == 0
    assert run("vc-estimate", "--sets", c, "--out", tmp_path / "v.json") == 0


def test_module_entry_point(pts, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "layered_coreset", "build", "--points", pts, "--k", "3",
                           "--out-dir", str(tmp_path)], capture_output=True, text=True,
                          env={**os.environ, "LAYERED_CORESET_THREADS": "2"})
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "coreset.csv").exists()
