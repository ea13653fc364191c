"""Convex test sets, the smoothing function psi, and Gaussian set probabilities.

Points may be a single vector of shape ``(d,)`` or a batch ``(k, d)``; every
set method broadcasts over the leading axis.

The smoothed indicator is ``h(w) = psi(dist(w, A) / eps)`` with the C^1
piecewise quadratic

    psi(x) = 1            x < 0
             1 - 2 x^2    0 <= x < 1/2
             2 (1 - x)^2  1/2 <= x < 1
             0            x >= 1
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import stats

from . import rng as rngmod
from .special import chi2_cdf, norm_cdf

FAR = sys.float_info.max  # distance sentinel for the empty set


class UnsupportedSetOperation(ValueError):
    pass


class GaussianProb(NamedTuple):
    value: float
    method: str  # "exact" | "series" | "mc"
    stderr: float = 0.0


def _as_vec(x) -> tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(x, dtype=float).reshape(-1))


def _points(w, dim: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape[-1:] != (dim,):
        raise ValueError(f"dimension mismatch: point has shape {w.shape}, set has d={dim}")
    return w


@dataclass(frozen=True)
class HalfSpace:
    """{x : u.x <= a} for a unit normal u."""

    u: tuple
    a: float

    def __post_init__(self):
        object.__setattr__(self, "u", _as_vec(self.u))
        object.__setattr__(self, "a", float(self.a))
        if abs(np.linalg.norm(self.u) - 1.0) > 1e-12:
            raise ValueError("half-space normal must be a unit vector")

    @classmethod
    def from_normal(cls, v, a: float) -> "HalfSpace":
        """Build from an arbitrary nonzero normal, rescaling the offset to match."""
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("zero normal vector")
        return cls(v / norm, a / norm)

    @property
    def dim(self) -> int:
        return len(self.u)

    def dist(self, w):
        w = _points(w, self.dim)
        return np.maximum(w @ np.asarray(self.u) - self.a, 0.0)

    def enlarge(self, eps: float) -> "HalfSpace":
        return HalfSpace(self.u, self.a + eps)

    def shrink(self, eps: float) -> "HalfSpace":
        return HalfSpace(self.u, self.a - eps)

    def gaussian_prob(self) -> GaussianProb:
        return GaussianProb(norm_cdf(self.a), "exact")


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vec(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius >= 0.0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def centered(self) -> bool:
        return not any(self.center)

    def dist(self, w):
        w = _points(w, self.dim)
        return np.maximum(np.linalg.norm(w - np.asarray(self.center), axis=-1) - self.radius, 0.0)

    def enlarge(self, eps: float) -> "Ball":
        return Ball(self.center, self.radius + eps)

    def shrink(self, eps: float):
        if self.radius - eps < 0.0:
            return EmptySet(self.dim)
        return Ball(self.center, self.radius - eps)

    def gaussian_prob(self) -> GaussianProb:
        r2 = self.radius ** 2
        if self.centered:
            return GaussianProb(chi2_cdf(r2, self.dim), "exact")
        nc = float(np.dot(self.center, self.center))
        return GaussianProb(float(stats.ncx2.cdf(r2, self.dim, nc)), "series")


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_vec(self.lo))
        object.__setattr__(self, "hi", _as_vec(self.hi))
        if len(self.lo) != len(self.hi):
            raise ValueError("box corners differ in dimension")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box requires lo <= hi in every coordinate")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def dist(self, w):
        w = _points(w, self.dim)
        excess = np.maximum(np.maximum(np.asarray(self.lo) - w, w - np.asarray(self.hi)), 0.0)
        return np.linalg.norm(excess, axis=-1)

    def enlarge(self, eps: float):
        raise UnsupportedSetOperation(
            "unsupported exact enlargement: the eps-enlargement of a box has rounded corners")

    def shrink(self, eps: float):
        lo = np.asarray(self.lo) + eps
        hi = np.asarray(self.hi) - eps
        if np.any(lo > hi):
            return EmptySet(self.dim)
        return Box(lo, hi)

    def gaussian_prob(self) -> GaussianProb:
        p = np.prod(norm_cdf(np.asarray(self.hi)) - norm_cdf(np.asarray(self.lo)))
        return GaussianProb(float(p), "exact")


@dataclass(frozen=True)
class EmptySet:
    dim: int

    def dist(self, w):
        w = _points(w, self.dim)
        return np.full(w.shape[:-1], FAR) if w.ndim > 1 else FAR

    def enlarge(self, eps: float) -> "EmptySet":
        return self

    def shrink(self, eps: float) -> "EmptySet":
        return self

    def gaussian_prob(self) -> GaussianProb:
        return GaussianProb(0.0, "exact")


ConvexSet = Union[HalfSpace, Ball, Box, EmptySet]


def contains(A: ConvexSet, w):
    """Closed-set membership; boundary points are inside."""
    if isinstance(A, EmptySet):
        w = _points(w, A.dim)
        return np.zeros(w.shape[:-1], dtype=bool) if w.ndim > 1 else False
    out = A.dist(w) <= 0.0
    return out if np.ndim(out) else bool(out)


def dist_to_set(A: ConvexSet, w):
    out = A.dist(w)
    return out if np.ndim(out) else float(out)


def psi(x):
    x = np.clip(np.asarray(x, dtype=float), -1.0, 2.0)  # constant outside [0, 1]
    out = np.where(x < 0.0, 1.0,
          np.where(x < 0.5, 1.0 - 2.0 * x * x,
          np.where(x < 1.0, 2.0 * (1.0 - x) ** 2, 0.0)))
    return out if out.ndim else float(out)


def psi_prime(x):
    x = np.clip(np.asarray(x, dtype=float), -1.0, 2.0)
    out = np.where(x < 0.0, 0.0,
          np.where(x < 0.5, -4.0 * x,
          np.where(x < 1.0, -4.0 * (1.0 - x), 0.0)))
    return out if out.ndim else float(out)


def smoothed_indicator(A: ConvexSet, eps: float, w):
    """h_{A,eps}(w) = psi(dist(w, A) / eps)."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    with np.errstate(over="ignore"):
        x = np.asarray(A.dist(w), dtype=float) / eps
    return psi(x)


def enlarge(A: ConvexSet, eps: float) -> ConvexSet:
    return A.enlarge(eps)


def shrink(A: ConvexSet, eps: float) -> ConvexSet:
    return A.shrink(eps)


def gaussian_prob(A: ConvexSet) -> GaussianProb:
    return A.gaussian_prob()


def mc_prob(indicator, dim: int, samples: int = 200_000, seed: int = 0) -> GaussianProb:
    """Monte Carlo P(Z in S) for a vectorized indicator of S."""
    z = rngmod.stream(seed, "geometry-mc").standard_normal((samples, dim))
    hits = np.asarray(indicator(z), dtype=float)
    p = float(hits.mean())
    return GaussianProb(p, "mc", float(np.sqrt(max(p * (1.0 - p), 0.0) / samples)))


def boundary_shell_prob(A: ConvexSet, eps: float, inner: bool = False,
                        samples: int = 200_000, seed: int = 0) -> GaussianProb:
    """P(Z in A^eps minus A), or P(Z in A minus A^-eps) when ``inner``.

    Exact for half-spaces, boxes (inner shell only) and centered balls; the
    series path covers off-center balls and the outer shell of a box falls
    back to Monte Carlo.
    """
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if eps == 0.0 or isinstance(A, EmptySet):
        return GaussianProb(0.0, "exact")
    if isinstance(A, HalfSpace):
        if inner:
            return GaussianProb(norm_cdf(A.a) - norm_cdf(A.a - eps), "exact")
        return GaussianProb(norm_cdf(A.a + eps) - norm_cdf(A.a), "exact")
    if isinstance(A, Ball):
        if A.centered:
            r = A.radius
            if inner:
                lo = max(r - eps, 0.0)
                return GaussianProb(chi2_cdf(r * r, A.dim) - chi2_cdf(lo * lo, A.dim), "exact")
            return GaussianProb(chi2_cdf((r + eps) ** 2, A.dim) - chi2_cdf(r * r, A.dim), "exact")
        big, small = (A, A.shrink(eps)) if inner else (A.enlarge(eps), A)
        p = big.gaussian_prob().value - small.gaussian_prob().value
        return GaussianProb(max(p, 0.0), "series")
    if isinstance(A, Box):
        if inner:
            p = A.gaussian_prob().value - A.shrink(eps).gaussian_prob().value
            return GaussianProb(p, "exact")

        def in_shell(z):
            dist = A.dist(z)
            return (dist > 0.0) & (dist <= eps)

        return mc_prob(in_shell, A.dim, samples, seed)
    raise TypeError(f"unsupported set type {type(A).__name__}")


def fd_gradient(func, w, step: float | None = None) -> np.ndarray:
    """Central-difference gradient of a scalar function at a single point."""
    w = np.asarray(w, dtype=float)
    if step is None:
        step = 1e-5 * max(1.0, float(np.linalg.norm(w)))
    pts = w + step * np.concatenate([np.eye(w.size), -np.eye(w.size)])
    vals = np.asarray(func(pts), dtype=float)
    return (vals[: w.size] - vals[w.size:]) / (2.0 * step)


def parse_set(line: str) -> ConvexSet:
    """Parse ``halfspace u1,..,ud a`` / ``ball c1,..,cd r`` / ``box lo.. hi..``."""
    parts = line.split()
    if not parts:
        raise ValueError("empty set description")
    kind = parts[0].lower()

    def vec(s):
        return [float(x) for x in s.split(",")]

    try:
        if kind == "halfspace" and len(parts) == 3:
            u = vec(parts[1])
            if abs(np.linalg.norm(u) - 1.0) <= 1e-12:  # keep exact values from format_set
                return HalfSpace(u, float(parts[2]))
            return HalfSpace.from_normal(u, float(parts[2]))
        if kind == "ball" and len(parts) == 3:
            return Ball(vec(parts[1]), float(parts[2]))
        if kind == "box" and len(parts) == 3:
            return Box(vec(parts[1]), vec(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad set line {line!r}: {exc}") from None
    raise ValueError(f"bad set line {line!r}")


def format_set(A: ConvexSet) -> str:
    def vec(v):
        return ",".join(repr(float(x)) for x in v)

    if isinstance(A, HalfSpace):
        return f"halfspace {vec(A.u)} {A.a!r}"
    if isinstance(A, Ball):
        return f"ball {vec(A.center)} {A.radius!r}"
    if isinstance(A, Box):
        return f"box {vec(A.lo)} {vec(A.hi)}"
    raise TypeError(f"cannot serialize {type(A).__name__}")
