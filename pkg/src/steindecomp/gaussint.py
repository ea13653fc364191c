"""Gaussian expectations of smoothed indicators, E h_{A,eps}(mu + s Z).

Half-spaces and balls reduce to one dimension. For a half-space the
statistic u.x - a is normal and the piecewise-quadratic psi integrates in
closed form against it. For a ball the radius |x - c| follows a noncentral
chi law; integrating by parts against psi gives

    E psi((T - r)/eps) = int_0^1 F_T(r + eps t) k(t) dt,   k = -psi'

whose tent-shaped weight k is handled by composite Gauss-Legendre on
panels no wider than the spread of T. Planar boxes use nested composite
Gauss-Legendre split along the kinks of h; boxes in d >= 3 fall back to
Monte Carlo.

Node layouts depend only on (eps, s), never on the location mu, so the
results are smooth functions of mu and tolerate finite differencing.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy import stats

from . import rng as rngmod
from .geometry import Ball, Box, ConvexSet, EmptySet, HalfSpace, psi, smoothed_indicator
from .special import chi2_cdf, norm_cdf, norm_pdf

GL_PER_PANEL = 12
MAX_PANELS = 400
MC_SAMPLES = 400_000

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_PER_PANEL)


class Expectation(NamedTuple):
    value: float
    method: str  # "exact" | "quadrature" | "mc"
    stderr: float = 0.0


def _interval_moments(mu, sig, lo, hi):
    """P, E[X; lo<=X<hi], E[X^2; lo<=X<hi] for X ~ N(mu, sig^2), sig > 0."""
    a = (lo - mu) / sig
    b = (hi - mu) / sig
    pa, pb = norm_pdf(a), norm_pdf(b)
    P = norm_cdf(b) - norm_cdf(a)
    apa = np.where(np.isfinite(a), a * pa, 0.0)
    bpb = np.where(np.isfinite(b), b * pb, 0.0)
    m1 = mu * P + sig * (pa - pb)
    m2 = mu * mu * P + 2 * mu * sig * (pa - pb) + sig * sig * (P + apa - bpb)
    return P, m1, m2


def expect_psi_normal(mu, sig):
    """E psi(X) for X ~ N(mu, sig^2), elementwise; sig may be 0."""
    mu, sig = np.broadcast_arrays(np.asarray(mu, float), np.asarray(sig, float))
    out = np.empty(mu.shape)
    zero = sig <= 0
    if np.any(zero):
        out[zero] = psi(mu[zero])
    pos = ~zero
    if np.any(pos):
        m, s = mu[pos], sig[pos]
        below = norm_cdf((0.0 - m) / s)
        P1, a1, b1 = _interval_moments(m, s, 0.0, 0.5)
        P2, a2, b2 = _interval_moments(m, s, 0.5, 1.0)
        # 1 - 2x^2 on [0, 1/2);  2(1 - x)^2 = 2 - 4x + 2x^2 on [1/2, 1)
        out[pos] = below + (P1 - 2 * b1) + (2 * P2 - 4 * a2 + 2 * b2)
    return out


def _radial_cdf(t, dim, nc, s):
    """P(|m + s Z| <= t) with |m|^2 = nc * s^2."""
    x = (t / s) ** 2
    if np.all(nc == 0):
        return chi2_cdf(x, dim)
    return stats.ncx2.cdf(x, dim, np.maximum(nc, 1e-300))


def _panel_nodes(width: float, spread: float):
    """Tent-weighted Gauss-Legendre nodes on [0, 1], panels at most ``spread`` wide."""
    per_half = int(np.clip(np.ceil(0.5 / max(spread, 1e-12)), 1, MAX_PANELS // 2))
    edges = np.concatenate([np.linspace(0.0, 0.5, per_half + 1),
                            np.linspace(0.5, 1.0, per_half + 1)[1:]])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    t = (lo[:, None] + half[:, None] * (_GL_X[None, :] + 1.0)).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    k = np.where(t < 0.5, 4.0 * t, 4.0 * (1.0 - t))
    return t, w * k


def _ball_expect(A: Ball, eps: float, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
    out = np.empty(len(scale))
    c = np.asarray(A.center)
    for idx, (m, s) in enumerate(zip(mean, scale)):
        off = np.linalg.norm(m - c)
        if s <= 0:
            out[idx] = float(smoothed_indicator(A, eps, m))
            continue
        t, w = _panel_nodes(eps, 0.5 * s / eps)
        nc = (off / s) ** 2
        F = _radial_cdf(A.radius + eps * t, A.dim, nc, s)
        out[idx] = float(np.dot(w, F))
    return out


def _panels(lo: float, hi: float, breaks, max_width: float):
    """Gauss-Legendre nodes/weights on [lo, hi] split at ``breaks`` and refined to ``max_width``."""
    cuts = np.unique(np.clip(np.concatenate([[lo, hi], np.asarray(breaks, float)]), lo, hi))
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        k = int(min(np.ceil((b - a) / max_width), 64))
        sub = np.linspace(a, b, k + 1)
        half = 0.5 * np.diff(sub)
        xs.append((sub[:-1, None] + half[:, None] * (_GL_X[None, :] + 1.0)).ravel())
        ws.append((half[:, None] * _GL_W[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _box_expect_2d(A: Box, eps: float, mean, scale) -> np.ndarray:
    """Nested composite Gauss-Legendre over the plane, split along the kinks of h."""
    lo, hi = np.asarray(A.lo), np.asarray(A.hi)
    out = np.empty(len(scale))
    for idx, (m, s) in enumerate(zip(mean, scale)):
        if s <= 0:
            out[idx] = float(smoothed_indicator(A, eps, m))
            continue
        reach = 9.0 * s
        width = 0.5 * min(s, eps)
        x_breaks = [lo[0] - eps, lo[0] - 0.5 * eps, lo[0], hi[0], hi[0] + 0.5 * eps, hi[0] + eps]
        xs, wx = _panels(m[0] - reach, m[0] + reach, x_breaks, width)
        dens_x = wx * norm_pdf((xs - m[0]) / s) / s
        dx = np.maximum(np.maximum(lo[0] - xs, xs - hi[0]), 0.0)
        total = 0.0
        for x_dx, x_w in zip(dx, dens_x):
            y_breaks = [lo[1], hi[1]]
            for c in (0.5 * eps, eps):
                if c > x_dx:
                    off = np.sqrt(c * c - x_dx * x_dx)
                    y_breaks += [lo[1] - off, hi[1] + off]
            ys, wy = _panels(m[1] - reach, m[1] + reach, y_breaks, width)
            dy = np.maximum(np.maximum(lo[1] - ys, ys - hi[1]), 0.0)
            h = psi(np.sqrt(x_dx * x_dx + dy * dy) / eps)
            total += x_w * float(np.dot(wy * norm_pdf((ys - m[1]) / s) / s, h))
        out[idx] = total
    return out


def expect_h(A: ConvexSet, eps: float, mean=None, scale=1.0, *, seed: int = 0,
             mc_samples: int = MC_SAMPLES) -> Expectation:
    """E h_{A,eps}(mean + scale Z) for a single location."""
    mean = np.zeros(A.dim) if mean is None else np.asarray(mean, float)
    vals, method, se = expect_h_batch(A, eps, mean[None, :], np.array([float(scale)]),
                                      seed=seed, mc_samples=mc_samples)
    return Expectation(float(vals[0]), method, float(se[0]))


def expect_h_batch(A: ConvexSet, eps: float, mean, scale, *, seed: int = 0,
                   mc_samples: int = MC_SAMPLES):
    """Vectorized over locations: ``mean`` is (k, d), ``scale`` is (k,).

    Returns ``(values, method, stderr)``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    mean = np.atleast_2d(np.asarray(mean, float))
    scale = np.broadcast_to(np.asarray(scale, float), (mean.shape[0],))
    if mean.shape[1] != A.dim:
        raise ValueError(f"dimension mismatch: locations have d={mean.shape[1]}, set has d={A.dim}")
    zeros = np.zeros(len(scale))
    if isinstance(A, EmptySet):
        return zeros, "exact", zeros
    if isinstance(A, HalfSpace):
        mu = (mean @ np.asarray(A.u) - A.a) / eps
        return expect_psi_normal(mu, scale / eps), "exact", zeros
    if isinstance(A, Ball):
        return _ball_expect(A, eps, mean, scale), "quadrature", zeros
    if isinstance(A, Box) and A.dim == 1:
        as_ball = Ball([0.5 * (A.lo[0] + A.hi[0])], 0.5 * (A.hi[0] - A.lo[0]))
        return _ball_expect(as_ball, eps, mean, scale), "quadrature", zeros
    if isinstance(A, Box) and A.dim == 2:
        return _box_expect_2d(A, eps, mean, scale), "quadrature", zeros
    z = rngmod.stream(seed, "gaussint-mc").standard_normal((mc_samples, A.dim))
    vals = np.empty(len(scale))
    ses = np.empty(len(scale))
    for idx, (m, s) in enumerate(zip(mean, scale)):
        h = smoothed_indicator(A, eps, m + s * z)
        vals[idx] = h.mean()
        ses[idx] = h.std(ddof=1) / np.sqrt(mc_samples)
    return vals, "mc", ses
