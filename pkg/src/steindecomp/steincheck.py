"""Numerical checks of the smoothed Stein solution and the Hermite inequality.

For a test function h = h_{A,eps} the Stein equation

    Laplacian f(w) - w . grad f(w) = h(w) - E h(Z)

is solved by f(w) = int_0^1 g(w, tau) dtau with

    g(w, tau) = -1/(2(1-tau)) * E[h(sqrt(1-tau) w + sqrt(tau) Z) - E h(Z)].

The tau integral has an integrable (1-tau)^{-1/2} singularity at tau = 1.
Substituting v = sqrt(1 - tau) turns it into

    f(w) = -int_0^1 (G(v w, sqrt(1 - v^2)) - E h(Z)) / v dv,   G(m, s) = E h(m + s Z),

with a bounded integrand, integrated by Gauss-Legendre (nodes never touch
the endpoints). ``stein_residual`` differentiates f numerically and reports
how far the equation is from holding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import rng as rngmod
from .gaussint import expect_h_batch
from .geometry import ConvexSet, smoothed_indicator

FD_STEP_1 = 1e-4
FD_STEP_2 = 1e-3
TAU_NODES = 128
STEP_CONSISTENCY = 1e-4


@dataclass(frozen=True)
class QuadratureSpec:
    """How Gaussian integrals over z are evaluated.

    ``reduced``: one-dimensional reduction per set type (closed form for
    half-spaces, radial quadrature for balls); works in any dimension.
    ``gauss-hermite``: tensor product rule with ``nodes`` per axis, d <= 3.
    ``mc``: ``samples`` seeded normal draws, the same draws for every call.
    """

    scheme: str = "reduced"
    nodes: int = 48
    samples: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("reduced", "gauss-hermite", "mc"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.scheme == "gauss-hermite" and self.nodes < 8:
            raise ValueError("gauss-hermite needs at least 8 nodes per axis")
        if self.scheme == "mc" and self.samples < 1:
            raise ValueError("mc needs at least one sample")


def _tensor_gh(d: int, nodes: int):
    if d > 3:
        raise ValueError("tensor Gauss-Hermite is limited to d <= 3")
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / w.sum()
    grids = np.meshgrid(*([x] * d), indexing="ij")
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    z = np.stack([g.ravel() for g in grids], axis=-1)
    wz = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return z, wz


def gaussian_smooth(A: ConvexSet, eps: float, mean, scale, quad: QuadratureSpec) -> np.ndarray:
    """G(mean_i, scale_i) = E h(mean_i + scale_i Z) for each row."""
    mean = np.atleast_2d(np.asarray(mean, dtype=float))
    scale = np.broadcast_to(np.asarray(scale, dtype=float), (mean.shape[0],))
    if quad.scheme == "reduced":
        return expect_h_batch(A, eps, mean, scale, seed=quad.seed)[0]
    if quad.scheme == "gauss-hermite":
        z, wz = _tensor_gh(A.dim, quad.nodes)
    else:
        z = rngmod.stream(quad.seed, "steincheck-mc").standard_normal((quad.samples, A.dim))
        wz = np.full(quad.samples, 1.0 / quad.samples)
    return np.array([wz @ smoothed_indicator(A, eps, m + s * z) for m, s in zip(mean, scale)])


def gaussian_mean_h(A: ConvexSet, eps: float, quad: QuadratureSpec) -> float:
    return float(gaussian_smooth(A, eps, np.zeros((1, A.dim)), 1.0, quad)[0])


def g_value(A: ConvexSet, eps: float, w, tau: float, quad: QuadratureSpec = QuadratureSpec()) -> float:
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie strictly inside (0, 1), got {tau}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    w = np.asarray(w, dtype=float)
    G = gaussian_smooth(A, eps, math.sqrt(1.0 - tau) * w[None, :], math.sqrt(tau), quad)[0]
    return -(G - gaussian_mean_h(A, eps, quad)) / (2.0 * (1.0 - tau))


class FValue(NamedTuple):
    value: float
    error: float  # |rule(n) - rule(n/2)|


def _v_rule(nodes: int):
    x, wt = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * wt


def _f_raw(A, eps, w, quad, nodes, eh) -> float:
    v, wt = _v_rule(nodes)
    G = gaussian_smooth(A, eps, v[:, None] * w[None, :], np.sqrt(1.0 - v * v), quad)
    return float(-np.sum(wt * (G - eh) / v))


def f_value(A: ConvexSet, eps: float, w, quad: QuadratureSpec = QuadratureSpec(),
            tau_nodes: int = TAU_NODES) -> FValue:
    """f(w) with an error estimate from the half-size rule."""
    w = np.asarray(w, dtype=float)
    if w.shape != (A.dim,):
        raise ValueError(f"point has shape {w.shape}, set has d={A.dim}")
    eh = gaussian_mean_h(A, eps, quad)
    full = _f_raw(A, eps, w, quad, tau_nodes, eh)
    half = _f_raw(A, eps, w, quad, max(tau_nodes // 2, 2), eh)
    return FValue(full, abs(full - half))


class SteinResidual(NamedTuple):
    residual: float
    lhs: float  # Laplacian f - w . grad f
    rhs: float  # h(w) - E h(Z)


class StepSizeError(RuntimeError):
    pass


def stein_residual(A: ConvexSet, eps: float, w, quad: QuadratureSpec = QuadratureSpec(),
                   tau_nodes: int = TAU_NODES, steps: tuple = (FD_STEP_1, FD_STEP_2),
                   check_steps: bool = False) -> SteinResidual:
    """Deviation of (Laplacian f - w . grad f) from h(w) - E h(Z) at ``w``.

    Gradient by central differences with ``steps[0]``, Laplacian by second
    differences with ``steps[1]``. ``check_steps`` repeats the Laplacian at
    half the step and raises when the two differ by more than
    ``STEP_CONSISTENCY``; below a usable step, rounding noise in f divided by
    step^2 makes the two disagree.
    """
    w = np.asarray(w, dtype=float)
    d = w.size
    if d not in (1, 2):
        raise ValueError("Stein residual checks are supported for d in {1, 2}")
    h1, h2 = steps
    eh = gaussian_mean_h(A, eps, quad)

    def f(x):
        return _f_raw(A, eps, x, quad, tau_nodes, eh)

    f0 = f(w)
    grad = np.empty(d)

    def laplacian(step):
        total = 0.0
        for r in range(d):
            e = np.zeros(d)
            e[r] = step
            total += (f(w + e) - 2.0 * f0 + f(w - e)) / step ** 2
        return total

    for r in range(d):
        e = np.zeros(d)
        e[r] = h1
        grad[r] = (f(w + e) - f(w - e)) / (2.0 * h1)
    lap = laplacian(h2)
    if check_steps:
        lap_half = laplacian(0.5 * h2)
        if abs(lap_half - lap) > STEP_CONSISTENCY:
            raise StepSizeError(
                f"second-difference step {h2:g} is unstable: Laplacian {lap:.6g} vs "
                f"{lap_half:.6g} at half step")
    lhs = lap - float(w @ grad)
    rhs = float(smoothed_indicator(A, eps, w)) - eh
    return SteinResidual(lhs - rhs, lhs, rhs)


# ---------------------------------------------------------------------------
# Hermite-polynomial inequality


def hermite_combination(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """sum_i a(i_1..i_k) phi_{i_1..i_k}(z) / phi(z) for each row of z, k = a.ndim <= 3.

    phi_i/phi = -z_i;  phi_ij/phi = z_i z_j - delta_ij;
    phi_ijk/phi = -z_i z_j z_k + delta_ij z_k + delta_ik z_j + delta_jk z_i.
    """
    a = np.asarray(a, dtype=float)
    k = a.ndim
    if k == 1:
        return -z @ a
    if k == 2:
        return np.einsum("si,ij,sj->s", z, a, z) - np.trace(a)
    if k == 3:
        cubic = np.einsum("si,sj,sk,ijk->s", z, z, z, a, optimize=True)
        lin = (np.einsum("iik->k", a) + np.einsum("iji->j", a) + np.einsum("ijj->i", a))
        return -cubic + z @ lin
    raise ValueError("only k in {1, 2, 3} is supported")


class Lemma5Result(NamedTuple):
    lhs: float
    rhs: float
    stderr: float
    passed: bool


def lemma5_check(a, quad: QuadratureSpec = QuadratureSpec(scheme="mc")) -> Lemma5Result:
    """Compare E[(sum a phi_i../phi)^2] with k! sum a^2 for a map a on {1..d}^k.

    The tensor Gauss-Hermite rule is exact here (polynomial degree <= 6 per
    axis) and reports zero standard error; Monte Carlo passes when
    lhs <= rhs + 3 se.
    """
    a = np.asarray(a, dtype=float)
    k, d = a.ndim, a.shape[0]
    if k not in (1, 2, 3) or any(s != d for s in a.shape):
        raise ValueError("a must be a k-way array on {1..d}^k with k in {1, 2, 3}")
    if not 1 <= d <= 4:
        raise ValueError("lemma5_check supports d <= 4")
    rhs = math.factorial(k) * float(np.sum(a * a))
    if quad.scheme == "mc":
        z = rngmod.stream(quad.seed, "lemma5").standard_normal((quad.samples, d))
        y2 = hermite_combination(a, z) ** 2
        lhs = float(y2.mean())
        se = float(y2.std(ddof=1) / math.sqrt(quad.samples))
    else:
        x, wx = np.polynomial.hermite_e.hermegauss(max(quad.nodes, 4) if quad.scheme == "gauss-hermite" else 8)
        wx = wx / wx.sum()
        grids = np.meshgrid(*([x] * d), indexing="ij")
        wgrids = np.meshgrid(*([wx] * d), indexing="ij")
        z = np.stack([g.ravel() for g in grids], axis=-1)
        wz = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
        lhs = float(wz @ hermite_combination(a, z) ** 2)
        se = 0.0
    passed = lhs <= rhs + 3.0 * se + 1e-12 * max(1.0, rhs)
    return Lemma5Result(lhs, rhs, se, passed)
