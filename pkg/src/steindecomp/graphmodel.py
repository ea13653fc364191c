"""Monochromatic edge counts of a randomly vertex-colored regular graph.

Every vertex of an m-regular graph on n vertices independently receives color
c with probability pi_c. W_c counts the edges whose two endpoints both have
color c. The mean and covariance have closed forms,

    E W_c          = N pi_c^2
    Var W_c        = N pi_c^2 (1 - pi_c^2) + 2 N (m - 1) (pi_c^3 - pi_c^4)
    Cov(W_c, W_e)  = -N (2m - 1) pi_c^2 pi_e^2         (c != e)

with N = nm/2 edges, and ``exact_moments`` recomputes both by enumerating
every coloring.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .bound import _check_pi, color_constant
from .decomposition import DependencyModel
from .linalg import inv_sqrt

ENUMERATION_BUDGET = 2**22
BLOCK = 8192  # samples per RNG substream; fixed so output ignores worker count


class EnumerationBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RegularGraph:
    n_vertices: int
    degree: int
    edges: tuple  # ((u, v), ...) with u < v

    def __post_init__(self):
        n, m = self.n_vertices, self.degree
        edges = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        if len(set(edges)) != len(edges):
            raise ValueError("graph has duplicate edges")
        deg = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            deg[u] += 1
            deg[v] += 1
        if any(x != m for x in deg):
            raise ValueError(f"graph is not {m}-regular (degrees {sorted(set(deg))})")
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def circulant_graph(n: int, m: int) -> RegularGraph:
    """m-regular circulant on 0..n-1: offsets 1..m//2, plus n/2 when m is odd."""
    if n < 2 or not 1 <= m < n:
        raise ValueError(f"need 2 <= n and 1 <= m < n (got n={n}, m={m})")
    if (n * m) % 2:
        raise ValueError(f"no such regular graph: n*m = {n * m} is odd")
    edges = set()
    for v in range(n):
        for k in range(1, m // 2 + 1):
            edges.add(tuple(sorted((v, (v + k) % n))))
        if m % 2:
            edges.add(tuple(sorted((v, (v + n // 2) % n))))
    return RegularGraph(n, m, tuple(edges))


def read_edge_list(text: str) -> RegularGraph:
    """Parse ``u v`` lines (0-based) and validate regularity."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if not edges:
        raise ValueError("edge list is empty")
    n = max(max(e) for e in edges) + 1
    deg = np.bincount(np.array(edges).ravel(), minlength=n)
    return RegularGraph(n, int(deg[0]), tuple(edges))


@dataclass(frozen=True)
class ColoringModel:
    graph: RegularGraph
    pi: tuple

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(float(p) for p in _check_pi(self.pi)))

    @property
    def d(self) -> int:
        return len(self.pi)

    @property
    def N(self) -> int:
        return self.graph.n_edges


def mean_vector(model: ColoringModel) -> np.ndarray:
    return model.N * np.asarray(model.pi) ** 2


def covariance_matrix(model: ColoringModel) -> np.ndarray:
    pi = np.asarray(model.pi)
    N, m = model.N, model.graph.degree
    p2 = pi ** 2
    cov = -N * (2 * m - 1) * np.outer(p2, p2)
    np.fill_diagonal(cov, N * p2 * (1 - p2) + 2 * N * (m - 1) * (pi ** 3 - pi ** 4))
    return cov


def counts(colors: np.ndarray, edges, d: int) -> np.ndarray:
    """Monochromatic edge counts per color for a batch of colorings (k, n)."""
    e = np.asarray(edges)
    cu = colors[:, e[:, 0]]
    same = cu == colors[:, e[:, 1]]
    out = np.empty((colors.shape[0], d), dtype=np.int64)
    for c in range(d):
        out[:, c] = np.count_nonzero(same & (cu == c), axis=1)
    return out


def exact_moments(model: ColoringModel, budget: int = ENUMERATION_BUDGET):
    """(mean, covariance) of W by summing over all d^n colorings."""
    n, d = model.graph.n_vertices, model.d
    total = d ** n
    if total > budget:
        raise EnumerationBudgetExceeded(
            f"{d}^{n} = {total} colorings exceed the enumeration budget {budget}")
    logpi = np.log(np.asarray(model.pi))
    s0 = 0.0
    s1 = np.zeros(d)
    s2 = np.zeros((d, d))
    # chunk over the leading vertices to bound memory
    head = max(0, n - 16)
    tail_cols = np.array(list(itertools.product(range(d), repeat=n - head)), dtype=np.int64)
    for prefix in itertools.product(range(d), repeat=head):
        colors = np.hstack([np.tile(np.array(prefix, dtype=np.int64), (len(tail_cols), 1)),
                            tail_cols])
        w = np.exp(logpi[colors].sum(axis=1))
        W = counts(colors, model.graph.edges, d).astype(float)
        s0 += w.sum()
        s1 += w @ W
        s2 += (W * w[:, None]).T @ W
    mean = s1 / s0
    cov = s2 / s0 - np.outer(mean, mean)
    return mean, 0.5 * (cov + cov.T)


def _sample_block(model: ColoringModel, seed: int, block: int, size: int) -> np.ndarray:
    gen = rngmod.stream(seed, "graph-coloring", block)
    colors = gen.choice(model.d, size=(size, model.graph.n_vertices), p=np.asarray(model.pi))
    return counts(colors, model.graph.edges, model.d)


def sample_counts(model: ColoringModel, count: int, seed: int, workers: int = 1) -> np.ndarray:
    """``count`` independent draws of W as an int array (count, d).

    Block b always uses substream (seed, "graph-coloring", b), so the result
    is identical for any number of workers.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    sizes = [min(BLOCK, count - s) for s in range(0, count, BLOCK)]
    if workers <= 1 or len(sizes) == 1:
        parts = [_sample_block(model, seed, b, sz) for b, sz in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda args: _sample_block(model, seed, *args),
                                  enumerate(sizes)))
    return np.vstack(parts)


def sample_W(model: ColoringModel, gen: np.random.Generator) -> np.ndarray:
    """One draw of W from an explicit generator."""
    colors = gen.choice(model.d, size=(1, model.graph.n_vertices), p=np.asarray(model.pi))
    return counts(colors, model.graph.edges, model.d)[0]


def standardize(model: ColoringModel, W) -> np.ndarray:
    """Rows Sigma^{-1/2} (W - lambda)."""
    root = inv_sqrt(covariance_matrix(model))
    return (np.asarray(W, dtype=float) - mean_vector(model)) @ root


def sample_standardized(model: ColoringModel, count: int, seed: int,
                        workers: int = 1) -> np.ndarray:
    root = inv_sqrt(covariance_matrix(model))
    W = sample_counts(model, count, seed, workers)
    return (W - mean_vector(model)) @ root


def xi_envelope(model: ColoringModel) -> float:
    """2 d^{1/2} N^{-1/2} L, the bound on each standardized edge summand."""
    return 2.0 * math.sqrt(model.d) * color_constant(model.pi) / math.sqrt(model.N)


def realizable_xi_norms(model: ColoringModel) -> np.ndarray:
    """|Sigma^{-1/2}(x - pi^2)| for x in {0, e_1, ..., e_d}, the only values an edge takes."""
    p2 = np.asarray(model.pi) ** 2
    patterns = np.vstack([np.zeros(model.d), np.eye(model.d)])
    root = inv_sqrt(covariance_matrix(model))
    return np.linalg.norm((patterns - p2) @ root, axis=1)


def dependency_model(model: ColoringModel) -> DependencyModel:
    """One summand per edge, sourced by its two endpoint colors; beta = xi_envelope."""
    return DependencyModel(tuple(frozenset(e) for e in model.graph.edges),
                           model.d, xi_envelope(model))
