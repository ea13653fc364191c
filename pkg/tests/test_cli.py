import json
import math

import numpy as np
import pytest

from steindecomp import cli
from steindecomp.linalg import NotPositiveDefiniteError

RATE = ["rate", "--graph", "m=2,d=2", "--pi", "0.5,0.5", "--sweep", "16,32,64",
        "--samples", "20000", "--seed", "4"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_report(capsys):
    code, out, _ = run(capsys, "bound", "--graph", "n=100,m=2,d=2", "--pi", "0.5,0.5")
    assert code == 0
    fields = dict(line.split(None, 1) for line in out.splitlines())
    assert float(fields["L"]) == pytest.approx(2 * math.sqrt(2))
    assert float(fields["prop1"]) == pytest.approx(21.526948230495092)
    assert fields["consistency_d_le"].strip() == "True"
    assert "(c_d unspecified)" in out


def test_bound_json_with_cd(capsys):
    code, out, _ = run(capsys, "bound", "--graph", "n=64,m=2,d=2", "--pi", "0.3,0.7",
                       "--cd", "2", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["rr96"] > 0 and rep["n1"] == 3


def test_bound_generic_model(tmp_path, capsys):
    path = tmp_path / "model.txt"
    path.write_text("0: 0,1\n1: 1,2\n2: 2,3\n3: 3,0\n")
    code, out, _ = run(capsys, "bound", "--model", str(path), "--graph", "d=2", "--beta", "0.5",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0 and (rep["n1"], rep["n2"], rep["n3"]) == (3, 4, 4)


@pytest.mark.parametrize("argv,needle", [
    (["bound", "--graph", "n=100,m=2,d=2"], "pi"),
    (["bound", "--graph", "n=100,m=2,d=2", "--pi", "0.5,0.5", "--C", "0"], "C"),
    (["simulate", "--graph", "n=4,m=2", "--pi", "0.5,0.5", "--samples", "0"], "samples"),
    (["rate", "--graph", "m=2", "--pi", "0.5,0.5", "--sweep", "16,32"], "sweep"),
    (["bound", "--graph", "n=5,m=3,d=2", "--pi", "0.5,0.5"], "regular"),
    (["frobnicate"], "invalid choice"),
    (["bound", "--graph", "q=3"], "--graph"),
])
def test_usage_errors(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert needle in err


def test_singular_covariance_exit_code(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise NotPositiveDefiniteError("singular", -1e-17)

    monkeypatch.setattr(cli, "standardize", boom)
    code, _, err = run(capsys, "simulate", "--graph", "n=4,m=2", "--pi", "0.5,0.5", "--samples", "10")
    assert code == 1 and "eigenvalue" in err


def test_simulate_summary_c4(capsys):
    code, out, _ = run(capsys, "simulate", "--graph", "n=4,m=2", "--pi", "0.5,0.5",
                       "--samples", "100000", "--summary")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    for stat, i, j, emp, se, exact in rows:
        assert abs(float(emp) - float(exact)) < 4 * float(se)
    cov = {(int(i), int(j)): float(exact) for stat, i, j, _, _, exact in rows if stat == "cov"}
    assert cov[(0, 0)] == 1.25 and cov[(0, 1)] == -0.75


def test_simulate_rows_are_standardized(capsys):
    code, out, _ = run(capsys, "simulate", "--graph", "n=4,m=2", "--pi", "0.5,0.5", "--samples", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "z1,z2" and len(lines) == 6


def test_rate_output(capsys):
    code, out, _ = run(capsys, *RATE)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,d,m,seed,samples,dc_lower,ci,bound_thm1,bound_prop1,ratio"
    rows = [line.split(",") for line in lines[1:4]]
    for row in rows:
        dc, thm, ratio = float(row[5]), float(row[7]), float(row[9])
        assert ratio == dc / thm and math.isfinite(ratio) and ratio > 0
    assert lines[4].startswith("# slope=")


@pytest.mark.parametrize("workers", ["1", "4"])
def test_rate_worker_independent(capsys, workers):
    _, base, _ = run(capsys, *RATE)
    _, other, _ = run(capsys, *RATE, "--workers", workers)
    assert base == other


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "exp.cfg"
    path.write_text("n = 8\nm = 2\npi = 0.5,0.5\nsamples = 7\nseed = 1\n")
    code, out, _ = run(capsys, "simulate", "--config", str(path), "--samples", "3", "--dump-config")
    assert code == 0 and "samples = 3\n" in out and "n = 8\n" in out
    dumped = tmp_path / "dumped.cfg"
    dumped.write_text(out)
    _, a, _ = run(capsys, "simulate", "--config", str(dumped))
    _, b, _ = run(capsys, "simulate", "--config", str(path), "--samples", "3")
    assert a == b and len(a.splitlines()) == 4


def test_out_file(tmp_path, capsys):
    target = tmp_path / "rate.csv"
    code, out, _ = run(capsys, *RATE, "--out", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("n,d,m")


def test_distance_from_points(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    z = np.random.default_rng(0).standard_normal((2000, 2))
    pts.write_text("z1,z2\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in z))
    code, out, _ = run(capsys, "distance", "--input", str(pts), "--format", "json")
    est = json.loads(out)
    assert code == 0 and est["dc_lower"] <= est["ci_halfwidth"] and "lower bound" in est["note"]


def test_distance_family_file(tmp_path, capsys):
    fam = tmp_path / "fam.txt"
    fam.write_text("halfspace 1.0,0.0 0.0\nball 0.0,0.0 1.0\n")
    code, out, _ = run(capsys, "distance", "--graph", "n=4,m=2", "--pi", "0.5,0.5",
                       "--samples", "1000", "--family", str(fam), "--format", "json")
    assert code == 0 and json.loads(out)["family_size"] == 2


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick")
    assert code == 0
    assert out.count("pass") == 5
