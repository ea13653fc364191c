"""Finite-family estimates of the convex-set distance to the standard Gaussian.

The supremum over all convex sets cannot be computed, so everything here is a
lower bound: the largest gap |P_hat(W in A) - P(Z in A)| over an explicit
family. For half-spaces the offset can be swept exactly (a one-dimensional
Kolmogorov distance along the normal), which keeps the bound valid while
covering every parallel translate.

Confidence half-widths are simultaneous over the family: Hoeffding per set
(DKW-Massart per swept direction) with a Bonferroni union bound,

    sqrt(log(2 |F| / delta) / (2 k)),   k = sample count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import rng as rngmod
from .gaussint import expect_h
from .geometry import (Ball, Box, ConvexSet, HalfSpace, format_set, gaussian_prob,
                       parse_set, smoothed_indicator)
from .special import norm_cdf

DELTA = 0.01
MC_PRECISION = 1e-3


@dataclass(frozen=True)
class SetFamily:
    sets: tuple
    provenance: dict = field(default_factory=lambda: {"kind": "literal"})

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise ValueError("set family is empty")
        dims = {A.dim for A in sets}
        if len(dims) != 1:
            raise ValueError(f"family mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "sets", sets)

    @property
    def dim(self) -> int:
        return self.sets[0].dim

    def __len__(self) -> int:
        return len(self.sets)

    def __add__(self, other: "SetFamily") -> "SetFamily":
        return SetFamily(self.sets + other.sets,
                         {"kind": "union", "parts": [self.provenance, other.provenance]})


def random_halfspaces(d: int, count: int, seed: int) -> SetFamily:
    gen = rngmod.stream(seed, "family-halfspaces")
    u = gen.standard_normal((count, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    a = gen.standard_normal(count)
    sets = [HalfSpace(ui, ai) for ui, ai in zip(u, a)]
    return SetFamily(sets, {"kind": "random-halfspaces", "count": count, "seed": seed})


def centered_balls(d: int, count: int) -> SetFamily:
    """Balls at radii splitting the Gaussian mass into ``count + 1`` equal parts."""
    probs = (np.arange(count) + 1.0) / (count + 1.0)
    radii = np.sqrt(stats.chi2.ppf(probs, d))
    sets = [Ball(np.zeros(d), r) for r in radii]
    return SetFamily(sets, {"kind": "centered-balls", "count": count})


def random_boxes(d: int, count: int, seed: int) -> SetFamily:
    gen = rngmod.stream(seed, "family-boxes")
    corners = np.sort(gen.normal(scale=1.5, size=(count, 2, d)), axis=1)
    sets = [Box(c[0], c[1]) for c in corners]
    return SetFamily(sets, {"kind": "boxes", "count": count, "seed": seed})


def axis_projections(d: int) -> SetFamily:
    """The 2d coordinate half-spaces {+-x_i <= 0} through the origin."""
    sets = []
    for i in range(d):
        for sign in (1.0, -1.0):
            u = np.zeros(d)
            u[i] = sign
            sets.append(HalfSpace(u, 0.0))
    return SetFamily(sets, {"kind": "axis-projections", "count": 2 * d})


def default_family(d: int, seed: int) -> SetFamily:
    return axis_projections(d) + random_halfspaces(d, 64, seed) + centered_balls(d, 8)


def family_from_spec(spec: str, d: int, seed: int) -> SetFamily:
    """``default`` or ``kind:count[+kind:count...]``, e.g. ``axis-projections+centered-balls:8``."""
    parts = []
    for token in spec.split("+"):
        kind, _, count = token.strip().partition(":")
        if kind == "default":
            parts.append(default_family(d, seed))
        elif kind == "axis-projections":
            parts.append(axis_projections(d))
        elif kind == "random-halfspaces":
            parts.append(random_halfspaces(d, int(count or 64), seed))
        elif kind == "centered-balls":
            parts.append(centered_balls(d, int(count or 8)))
        elif kind == "boxes":
            parts.append(random_boxes(d, int(count or 16), seed))
        else:
            raise ValueError(f"unknown family kind {kind!r}")
    fam = parts[0]
    for p in parts[1:]:
        fam = fam + p
    return fam


def read_family(text: str) -> SetFamily:
    sets = [parse_set(line) for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]
    return SetFamily(sets, {"kind": "literal"})


def write_family(family: SetFamily) -> str:
    return "".join(format_set(A) + "\n" for A in family.sets)


@dataclass
class DistanceEstimate:
    dc_lower: float
    argmax_set: int
    ci_halfwidth: float
    samples: int
    seed: int | None = None
    offset: float | None = None  # swept half-space offset attaining the max
    gaps: np.ndarray | None = field(default=None, repr=False)
    warnings: list = field(default_factory=list)


def simultaneous_ci(family_size: int, samples: int, delta: float = DELTA) -> float:
    return math.sqrt(math.log(2.0 * family_size / delta) / (2.0 * samples))


def _weights(samples: np.ndarray, weights):
    if weights is None:
        return None
    w = np.asarray(weights, dtype=float)
    if w.shape != (samples.shape[0],) or np.any(w < 0):
        raise ValueError("weights must be nonnegative, one per sample")
    return w / w.sum()


def kolmogorov_offset(direction, samples, weights=None) -> tuple[float, float]:
    """(sup gap, offset) over all half-lines along ``direction``.

    Both closed {x <= t} and open {x < t} half-lines are covered by comparing
    Phi(t) with the empirical CDF and its left limit at every sample value.
    """
    u = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    u = u / norm
    x = np.asarray(samples, dtype=float).reshape(-1, u.size)
    proj = x @ u
    w = _weights(x, weights)
    order = np.argsort(proj, kind="stable")
    proj = proj[order]
    cum = np.cumsum(w[order]) if w is not None else np.arange(1, proj.size + 1) / proj.size
    vals = np.unique(proj)
    last = np.searchsorted(proj, vals, side="right") - 1  # last occurrence of each value
    F = cum[last]
    F[-1] = 1.0
    F_left = np.concatenate([[0.0], F[:-1]])
    phi = norm_cdf(vals)
    gap = np.maximum(np.abs(F - phi), np.abs(F_left - phi))
    i = int(np.argmax(gap))
    return float(gap[i]), float(vals[i])


def kolmogorov_1d(direction, samples, weights=None) -> float:
    return kolmogorov_offset(direction, samples, weights)[0]


def estimate_dc(samples, family: SetFamily, *, weights=None, delta: float = DELTA,
                sweep_offsets: bool = False, seed: int | None = None) -> DistanceEstimate:
    """Lower estimate of the convex-set distance over ``family``.

    With ``sweep_offsets`` every half-space in the family also contributes the
    exact supremum over its parallel translates.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1 and family.dim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] != family.dim:
        raise ValueError(f"samples of shape {x.shape} do not match family dimension {family.dim}")
    if x.shape[0] < 1:
        raise ValueError("no samples")
    w = _weights(x, weights)
    gaps = np.empty(len(family))
    offsets: list[float | None] = [None] * len(family)
    notes = []
    for idx, A in enumerate(family.sets):
        inside = A.dist(x) <= 0.0
        p_hat = float(inside.mean()) if w is None else float(w @ inside)
        gp = gaussian_prob(A)
        if gp.method == "mc" and gp.stderr > MC_PRECISION:
            notes.append(f"set {idx}: Monte Carlo Gaussian probability, stderr {gp.stderr:.2e}")
        gaps[idx] = abs(p_hat - gp.value)
        if sweep_offsets and isinstance(A, HalfSpace):
            g, off = kolmogorov_offset(A.u, x, w)
            if g > gaps[idx]:
                gaps[idx], offsets[idx] = g, off
    best = int(np.argmax(gaps))  # first maximum: lowest index wins ties
    for note in notes:
        warnings.warn(note)
    return DistanceEstimate(
        dc_lower=float(min(max(gaps[best], 0.0), 1.0)),
        argmax_set=best,
        ci_halfwidth=simultaneous_ci(len(family), x.shape[0], delta),
        samples=x.shape[0],
        seed=seed,
        offset=offsets[best],
        gaps=gaps,
        warnings=notes,
    )


@dataclass
class SmoothedEstimate:
    value: float
    argmax_set: int
    ci_halfwidth: float
    gaussian_error: float
    methods: tuple


def smoothed_distance(samples, family: SetFamily, eps: float, *, weights=None,
                      include_shrunk: bool = True, delta: float = DELTA) -> SmoothedEstimate:
    """max over the family of |mean h_{A,eps}(W) - E h_{A,eps}(Z)|.

    ``include_shrunk`` adds the inner sets A^{-eps}; the smoothing inequality
    needs them to control P(W in A) from below.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1 and family.dim == 1:
        x = x[:, None]
    w = _weights(x, weights)
    sets = list(family.sets)
    if include_shrunk:
        sets += [A.shrink(eps) for A in family.sets]
    gaps = np.empty(len(sets))
    methods = []
    gerr = 0.0
    for idx, A in enumerate(sets):
        h = smoothed_indicator(A, eps, x)
        emp = float(h.mean()) if w is None else float(w @ h)
        ez = expect_h(A, eps)
        methods.append(ez.method)
        gerr = max(gerr, 3.0 * ez.stderr)
        gaps[idx] = abs(emp - ez.value)
    best = int(np.argmax(gaps))
    return SmoothedEstimate(float(gaps[best]), best,
                            simultaneous_ci(len(sets), x.shape[0], delta), gerr, tuple(methods))


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r2: float


def rate_fit(points) -> RateFit:
    """Least-squares fit of log(dc) on log(n)."""
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise ValueError("rate fit needs at least 3 points")
    n, v = np.array(pts).T
    if np.any(n <= 0) or np.any(v <= 0):
        raise ValueError("rate fit needs positive n and distances")
    res = stats.linregress(np.log(n), np.log(v))
    return RateFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2))
