"""Small dense symmetric-matrix algebra.

Matrices are plain float ndarrays. ``as_symmetric`` validates and stores the
upper triangle canonically so ``M[i, j] == M[j, i]`` holds bit-for-bit.
Intended for d up to a few dozen; nothing here is tuned for large d.
"""

from __future__ import annotations

import csv
import io
from typing import NamedTuple

import numpy as np

MAX_SWEEPS = 100
OFFDIAG_RTOL = 1e-13


class NotPositiveDefiniteError(ValueError):
    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def as_symmetric(m, atol: float = 1e-12) -> np.ndarray:
    """Return a canonical symmetric copy of ``m``; raise if it is not symmetric."""
    a = np.array(m, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > atol * scale:
        raise ValueError("matrix is not symmetric")
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


def sym_eigen(m) -> SpectralDecomposition:
    """Eigen-decomposition by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm drops below
    ``1e-13 * ||M||_F``; eigenvalues come back in nondecreasing order.
    """
    a = as_symmetric(m)
    d = a.shape[0]
    v = np.eye(d)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return SpectralDecomposition(np.zeros(d), v)
    target = OFFDIAG_RTOL * norm

    def offdiag(x):
        return np.linalg.norm(x - np.diag(np.diag(x)))

    for _ in range(MAX_SWEEPS):
        if offdiag(a) < target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/cols p, q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        res = offdiag(a)
        if res >= target:
            raise ConvergenceError(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps "
                f"(off-diagonal residual {res:.3e})", res)

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def default_tol(m: np.ndarray) -> float:
    d = m.shape[0]
    return 1e-12 * abs(float(np.trace(m))) / d


def _function_of(m, fn, tol):
    a = as_symmetric(m)
    if tol is None:
        tol = default_tol(a)
    dec = sym_eigen(a)
    lo = dec.eigenvalues[0]
    if lo <= tol:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (smallest eigenvalue {lo:.6g})", float(lo))
    q = dec.eigenvectors
    out = (q * fn(dec.eigenvalues)) @ q.T
    return as_symmetric(0.5 * (out + out.T))


def inv_sqrt(m, tol: float | None = None) -> np.ndarray:
    """Symmetric positive-definite R with R M R = I."""
    return _function_of(m, lambda w: 1.0 / np.sqrt(w), tol)


def sqrt_psd(m, tol: float | None = None) -> np.ndarray:
    return _function_of(m, np.sqrt, tol)


def operator_norm(m) -> float:
    """Spectral norm of a symmetric matrix: max |eigenvalue|."""
    w = sym_eigen(m).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))


def cholesky(m) -> np.ndarray:
    """Lower-triangular L with L L^T = M (Cholesky-Banachiewicz)."""
    a = as_symmetric(m)
    d = a.shape[0]
    low = np.zeros_like(a)
    for i in range(d):
        for j in range(i + 1):
            s = a[i, j] - low[i, :j] @ low[j, :j]
            if i == j:
                if s <= 0.0:
                    raise NotPositiveDefiniteError(
                        f"matrix is not positive definite (pivot {s:.6g} at row {i})", float(s))
                low[i, i] = np.sqrt(s)
            else:
                low[i, j] = s / low[j, j]
    return low


def to_csv(m) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(m, dtype=float):
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def from_csv(text: str) -> np.ndarray:
    rows = [[float(x) for x in row] for row in csv.reader(io.StringIO(text)) if row]
    return np.array(rows, dtype=float)
