"""Acceptance criteria, each at its stated tolerance, one pass/fail line apiece.

The lines are collected into an "acceptance criteria" section of the pytest
terminal summary (and printed directly under ``pytest -s``).
"""

import math
import time

import numpy as np
import pytest

from steindecomp import checks, cli
from steindecomp.decomposition import structure_params
from steindecomp.distance import kolmogorov_1d, rate_fit
from steindecomp.graphmodel import (ColoringModel, circulant_graph, covariance_matrix,
                                    dependency_model, exact_moments, mean_vector)

SWEEP = ["rate", "--graph", "m=2,d=2", "--pi", "0.5,0.5", "--sweep", "16,32,64,128,256",
         "--samples", "200000", "--seed", "0"]


@pytest.fixture(scope="module")
def sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("rate") / "rate.csv"
    start = time.perf_counter()
    assert cli.main(SWEEP + ["--out", str(out)]) == 0
    elapsed = time.perf_counter() - start
    lines = out.read_text().splitlines()
    rows = [[float(v) for v in line.split(",")] for line in lines[1:] if not line.startswith("#")]
    return np.array(rows), elapsed


def test_01_moment_oracle(report):
    graphs = {"C4": circulant_graph(4, 2), "circ(6,3)": circulant_graph(6, 3),
              "circ(8,2)": circulant_graph(8, 2), "matching(8,1)": circulant_graph(8, 1)}
    pis = [(0.5, 0.5), (0.3, 0.7), (1 / 3, 1 / 3, 1 / 3)]
    start = time.perf_counter()
    worst = 0.0
    for graph in graphs.values():
        for pi in pis:
            model = ColoringModel(graph, pi)
            lam, sig = exact_moments(model)
            worst = max(worst, np.max(np.abs(lam - mean_vector(model))),
                        np.max(np.abs(sig - covariance_matrix(model))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 120
    report("1 moment-formula oracle", ok, f"max error {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_02_neighborhood_bounds(report):
    start = time.perf_counter()
    cases = bad = 0
    for n in range(8, 25):
        for m in range(1, 7):
            if (n * m) % 2:
                continue  # no m-regular graph on n vertices
            p = structure_params(dependency_model(ColoringModel(circulant_graph(n, m), (0.5, 0.5))))
            cases += 1
            bad += not (p.n1 <= 2 * m and p.n2 <= 3 * m and p.n3 <= 4 * m)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    report("2 neighborhood bounds", ok, f"{cases} graphs, {bad} violations, {elapsed:.1f}s")
    assert ok


def test_03_rate_reproduction(report, sweep):
    rows, elapsed = sweep
    fit = rate_fit(zip(rows[:, 0], rows[:, 5]))
    ok = -0.65 <= fit.slope <= -0.35 and elapsed < 600
    report("3 rate reproduction", ok, f"slope {fit.slope:.3f}, r2 {fit.r2:.3f}, {elapsed:.1f}s")
    assert ok


def test_04_bound_dominance_trend(report, sweep):
    rows, _ = sweep
    ratio = rows[:, 9]
    spread = ratio.max() / ratio.min()
    ok = bool(np.all(ratio > 0)) and spread < 3
    report("4 bound dominance trend", ok, f"max/min ratio {spread:.3f}")
    assert ok


def test_05_binomial_oracle(report):
    # exact half-line distance of (S_4 - 2) by enumerating the 5 support points
    support = np.arange(5) - 2.0
    weights = np.array([math.comb(4, k) for k in range(5)]) / 16.0
    exact = 0.0
    cdf = 0.0
    for x, w in zip(support, weights):
        phi = 0.5 * math.erfc(-x / math.sqrt(2))
        exact = max(exact, abs(cdf - phi), abs(cdf + w - phi))
        cdf += w
    got = kolmogorov_1d([1.0], support, weights)
    ok = exact == 0.1875 and abs(got - exact) <= 1e-12
    report("5 binomial oracle", ok, f"kolmogorov_1d {got!r}")
    assert ok


def test_06_gaussian_shell_bound(report):
    res = checks.check_shell()
    report("6 gaussian shell bound", res.passed,
           f"{res.trials} shells, {len(res.failures)} violations, worst margin {res.worst:.4f}")
    assert res.passed


def test_07_smoothing_properties(report):
    res = checks.check_smoothing(trials=10_000)
    report("7 smoothing-function properties", res.passed,
           f"{res.trials} triples, {len(res.failures)} violations")
    assert res.passed


def test_08_smoothing_inequality(report):
    res = checks.check_lemma4(epsilons=(0.05, 0.1, 0.2))
    report("8 smoothing inequality on C4", res.passed, res.detail)
    assert res.passed


def test_09_hermite_inequality(report):
    res = checks.check_lemma5(trials=100)
    report("9 hermite inequality", res.passed, f"{res.trials} trials, {len(res.failures)} failures")
    assert res.passed


def test_10_stein_residual(report):
    start = time.perf_counter()
    res = checks.check_stein(checks.stein_grid(), tol=1e-3)
    elapsed = time.perf_counter() - start
    ok = res.passed and res.trials == 20 and elapsed < 300
    report("10 stein residual", ok, f"max |residual| {res.worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_11_determinism(report, tmp_path):
    commands = {
        "simulate": ["simulate", "--graph", "n=12,m=3", "--pi", "0.2,0.3,0.5",
                     "--samples", "30000", "--seed", "17"],
        "rate": ["rate", "--graph", "m=2,d=2", "--pi", "0.5,0.5", "--sweep", "16,32,64",
                 "--samples", "30000", "--seed", "17"],
    }
    same = True
    for name, argv in commands.items():
        outputs = []
        for workers in (1, 4, 8):
            path = tmp_path / f"{name}-{workers}.csv"
            assert cli.main(argv + ["--workers", str(workers), "--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        same &= all(o == outputs[0] for o in outputs)
    report("11 determinism across workers", same, "simulate and rate at workers 1, 4, 8")
    assert same
