"""The verification suite behind ``steindecomp verify``.

Every check returns a ``CheckResult`` with the worst observed magnitude
against its allowance, so failures report how far off they were.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from . import rng as rngmod
from .distance import SetFamily, default_family, estimate_dc, smoothed_distance
from .geometry import Ball, Box, HalfSpace, boundary_shell_prob, fd_gradient
from .graphmodel import ColoringModel, circulant_graph, sample_standardized
from .steincheck import QuadratureSpec, f_value, lemma5_check, stein_residual

SLACK = 0.01  # relative slack on the finite-difference derivative bounds


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    worst: float  # largest observed (value - allowance), or residual size
    detail: str = ""
    failures: list = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# smoothing function


def _random_set(gen: np.random.Generator, d: int):
    kind = gen.integers(3)
    if kind == 0:
        u = gen.standard_normal(d)
        return HalfSpace(u / np.linalg.norm(u), float(gen.normal()))
    if kind == 1:
        return Ball(gen.normal(size=d), float(gen.uniform(0.0, 2.0)))
    corners = np.sort(gen.normal(size=(2, d)), axis=0)
    return Box(corners[0], corners[1])


def _inside_point(A, w):
    """A point of A near w (nearest point for half-spaces and balls, clamp for boxes)."""
    if isinstance(A, HalfSpace):
        u = np.asarray(A.u)
        return w - max(float(u @ w) - A.a, 0.0) * u
    if isinstance(A, Ball):
        c = np.asarray(A.center)
        off = w - c
        r = np.linalg.norm(off)
        return w if r <= A.radius else c + off * (A.radius / r)
    return np.clip(w, A.lo, A.hi)


def check_smoothing(trials: int = 10_000, seed: int = 0) -> CheckResult:
    """Values of h_{A,eps} on A, outside A^eps and in between, plus both derivative bounds.

    For each random (A, eps, w): h(p) = 1 at a point p of A; h = 0 when
    dist(w, A) >= eps; 0 <= h <= 1; |grad h(w)| <= 2/eps; and
    |grad h(v) - grad h(w)| <= 8 |v - w| / eps^2 for a nearby v, gradients by
    central differences with 1% slack.
    """
    gen = rngmod.stream(seed, "check-smoothing")
    worst = -math.inf
    failures = []
    for t in range(trials):
        d = int(gen.integers(1, 5))
        A = _random_set(gen, d)
        eps = float(gen.uniform(0.1, 2.0))
        w = gen.normal(scale=2.0, size=d)
        step = gen.standard_normal(d)
        v = w + step / np.linalg.norm(step) * eps * gen.uniform(0.2, 1.5)

        def h(x, A=A, eps=eps):
            return geometry.smoothed_indicator(A, eps, x)

        hw = float(h(w))
        p = _inside_point(A, w)
        dist = geometry.dist_to_set(A, w)
        bad = []
        if geometry.contains(A, p) and float(h(p)) != 1.0:
            bad.append(("on A", float(h(p))))
        if dist >= eps and hw != 0.0:
            bad.append(("outside A^eps", hw))
        if not 0.0 <= hw <= 1.0:
            bad.append(("range", hw))
        gw = fd_gradient(h, w)
        gv = fd_gradient(h, v)
        excess_grad = np.linalg.norm(gw) - 2.0 / eps * (1 + SLACK)
        lip = 8.0 * np.linalg.norm(v - w) / eps ** 2
        excess_lip = np.linalg.norm(gv - gw) - lip * (1 + SLACK)
        if excess_grad > 0:
            bad.append(("gradient", excess_grad))
        if excess_lip > 0:
            bad.append(("gradient Lipschitz", excess_lip))
        worst = max(worst, excess_grad, excess_lip)
        if bad:
            failures.append((t, bad))
    kinds = sorted({k for _, b in failures for k, _ in b})
    return CheckResult("smoothing properties", not failures, trials, worst,
                       f"{len(failures)} violating triples {kinds}" if failures else "", failures)


# ---------------------------------------------------------------------------
# Gaussian shell


def check_shell(dims=(1, 2, 4, 8, 16, 32), epsilons=(0.01, 0.05, 0.1, 0.5),
                offsets: int = 1000, radii: int = 100, seed: int = 0) -> CheckResult:
    """Outer and inner Gaussian shells of half-spaces and centered balls are <= 4 d^{1/4} eps."""
    gen = rngmod.stream(seed, "check-shell")
    a_values = gen.uniform(-4.0, 4.0, size=offsets)
    worst = -math.inf
    failures = []
    count = 0
    for d in dims:
        u = np.zeros(d)
        u[0] = 1.0
        r_values = np.linspace(0.0, 2.0 * math.sqrt(d) + 3.0, radii)
        sets = [HalfSpace(u, a) for a in a_values] + [Ball(np.zeros(d), r) for r in r_values]
        for eps in epsilons:
            limit = 4.0 * d ** 0.25 * eps
            for A in sets:
                for inner in (False, True):
                    p = boundary_shell_prob(A, eps, inner=inner)
                    count += 1
                    excess = p.value - limit
                    worst = max(worst, excess)
                    if excess > 0 or p.method != "exact":
                        failures.append((d, eps, inner, geometry.format_set(A), p.value))
    return CheckResult("gaussian shell bound", not failures, count, worst,
                       f"{len(failures)} violations" if failures else "", failures)


# ---------------------------------------------------------------------------
# smoothing inequality on the 4-cycle


def c4_model(pi=(0.5, 0.5)) -> ColoringModel:
    return ColoringModel(circulant_graph(4, 2), tuple(pi))


def lemma4_family(d: int, seed: int) -> SetFamily:
    """Default family plus axis half-spaces at the offsets where the discrete law jumps."""
    offsets = np.linspace(-2.0, 2.0, 17)
    extra = []
    for i in range(d):
        for sign in (1.0, -1.0):
            u = np.zeros(d)
            u[i] = sign
            extra += [HalfSpace(u, float(a)) for a in offsets]
    return default_family(d, seed) + SetFamily(extra, {"kind": "axis-offsets", "count": len(extra)})


def check_lemma4(epsilons=(0.05, 0.1, 0.2), samples: int = 100_000, seed: int = 0,
                 workers: int = 1) -> CheckResult:
    """dc_lower <= 4 d^{1/4} eps + smoothed distance + 3 (combined slack) on the 4-cycle."""
    model = c4_model()
    x = sample_standardized(model, samples, seed, workers)
    family = lemma4_family(model.d, seed)
    est = estimate_dc(x, family, seed=seed)
    worst = -math.inf
    failures = []
    rows = []
    for eps in epsilons:
        sm = smoothed_distance(x, family, eps, include_shrunk=True)
        slack = 3.0 * (est.ci_halfwidth + sm.ci_halfwidth + sm.gaussian_error)
        rhs = 4.0 * model.d ** 0.25 * eps + sm.value + slack
        excess = est.dc_lower - rhs
        worst = max(worst, excess)
        rows.append(f"eps={eps:g}: dc={est.dc_lower:.4f} <= {rhs:.4f}")
        if excess > 0:
            failures.append((eps, est.dc_lower, rhs))
    return CheckResult("smoothing inequality (C4)", not failures, len(epsilons), worst,
                       "; ".join(rows), failures)


# ---------------------------------------------------------------------------
# Hermite inequality


def check_lemma5(trials: int = 100, samples: int = 50_000, seed: int = 0,
                 ks=(1, 2, 3), dims=(1, 2, 3, 4)) -> CheckResult:
    """lhs <= k! sum a^2 + 3 se for random maps; equality cases within 5 se.

    Within one (k, d) every trial reuses the same normal draws, so the
    trials differ only in the coefficient map.
    """
    gen = rngmod.stream(seed, "check-lemma5")
    quad = QuadratureSpec(scheme="mc", samples=samples, seed=seed)
    worst = -math.inf
    failures = []
    count = 0
    for k in ks:
        for d in dims:
            for t in range(trials):
                a = gen.standard_normal((d,) * k)
                res = lemma5_check(a, quad)
                count += 1
                worst = max(worst, (res.lhs - res.rhs) / max(res.stderr, 1e-300))
                if not res.passed:
                    failures.append((k, d, t, res))
    for k in (1, 2):
        res = lemma5_check(np.ones((1,) * k), quad)
        count += 1
        if abs(res.lhs - res.rhs) > 5.0 * res.stderr:
            failures.append((k, 1, "equality", res))
    return CheckResult("hermite inequality", not failures, count, worst,
                       f"max (lhs-rhs)/se = {worst:.3g}", failures)


# ---------------------------------------------------------------------------
# Stein equation


def stein_grid() -> list:
    """20 (A, eps, w) configurations in d = 1 and d = 2."""
    rot = np.array([math.cos(0.7), math.sin(0.7)])
    grid = [
        (HalfSpace([1.0], 0.0), 0.5, [0.3]),
        (HalfSpace([1.0], 0.0), 0.25, [-1.2]),
        (HalfSpace([1.0], 0.5), 1.0, [0.9]),
        (HalfSpace([-1.0], 0.3), 0.5, [1.5]),
        (HalfSpace([1.0], 1.0), 0.1, [-2.0]),
        (Ball([0.0], 1.0), 0.5, [0.2]),
        (Ball([0.5], 0.75), 0.25, [1.1]),
        (Ball([0.0], 1.5), 1.0, [-1.8]),
        (Box([-1.0], [0.5]), 0.5, [0.6]),
        (Box([0.0], [2.0]), 0.2, [-0.05]),
        (HalfSpace([1.0, 0.0], 0.0), 0.5, [0.3, -0.4]),
        (HalfSpace(rot, 0.2), 0.5, [0.1, 0.5]),
        (HalfSpace(-rot, -0.5), 0.25, [-0.8, 0.3]),
        (HalfSpace([0.0, 1.0], 1.0), 1.0, [0.7, 1.4]),
        (Ball([0.0, 0.0], 1.0), 0.5, [0.4, 0.1]),
        (Ball([0.0, 0.0], 1.0), 0.25, [0.9, 0.3]),
        (Ball([0.5, -0.5], 1.5), 0.5, [-0.3, 0.2]),
        (Ball([0.0, 0.0], 0.5), 1.0, [1.0, -1.0]),
        (Ball([1.0, 0.0], 2.0), 0.1, [0.9, 0.1]),  # deep inside
        (HalfSpace([1.0, 0.0], 3.0), 0.1, [-1.0, 0.0]),  # deep inside
    ]
    return [(A, eps, np.asarray(w, dtype=float)) for A, eps, w in grid]


def check_stein(grid=None, tol: float = 1e-3, node_tol: float = 1e-4) -> CheckResult:
    """|Laplacian f - w . grad f - (h(w) - E h(Z))| < tol, and f stable under node doubling."""
    grid = stein_grid() if grid is None else grid
    worst = 0.0
    failures = []
    for idx, (A, eps, w) in enumerate(grid):
        res = stein_residual(A, eps, w)
        fv = f_value(A, eps, w)
        worst = max(worst, abs(res.residual))
        if not abs(res.residual) < tol or not fv.error < node_tol:
            failures.append((idx, geometry.format_set(A), eps, w.tolist(), res.residual, fv.error))
    return CheckResult("stein residual", not failures, len(grid), worst,
                       f"max |residual| = {worst:.3g}", failures)


# ---------------------------------------------------------------------------


def run_all(quick: bool = False, seed: int = 0, workers: int = 1) -> list:
    if quick:
        grid = stein_grid()
        return [
            check_smoothing(trials=1000, seed=seed),
            check_shell(offsets=100, radii=20, seed=seed),
            check_lemma4(samples=20_000, seed=seed, workers=workers),
            check_lemma5(trials=10, samples=20_000, seed=seed),
            check_stein(grid[::4]),
        ]
    return [
        check_smoothing(seed=seed),
        check_shell(seed=seed),
        check_lemma4(seed=seed, workers=workers),
        check_lemma5(seed=seed),
        check_stein(),
    ]


def format_table(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  status  trials  worst        detail"]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{r.name.ljust(width)}  {status:6}  {r.trials:6d}  {r.worst:<11.4g}  {r.detail}")
    return "\n".join(lines) + "\n"
