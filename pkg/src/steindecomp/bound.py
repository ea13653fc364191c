"""Error-bound functionals for the convex-set distance.

The universal constants are unknown, so every functional takes its constant
as a parameter (default 1). What carries meaning is the dependence on
(d, n, beta, n1, n2, n3), e.g. rates checked through log-log slopes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .decomposition import StructureParams
from .linalg import inv_sqrt, operator_norm


def _positive(**kwargs) -> None:
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class BoundInputs:
    d: int
    n: int
    params: StructureParams
    C: float = 1.0

    def __post_init__(self):
        p = self.params
        _positive(d=self.d, n=self.n, beta=p.beta, n1=p.n1, n2=p.n2, n3=p.n3, C=self.C)


def theorem1_functional(inp: BoundInputs) -> float:
    """C d^{1/4} n beta^3 n1 (n2 + n3/d)."""
    p = inp.params
    return inp.C * inp.d ** 0.25 * inp.n * p.beta ** 3 * p.n1 * (p.n2 + p.n3 / inp.d)


def remark1_bound(inp: BoundInputs, sigma) -> float:
    """Theorem functional for Cov(W) = sigma, scaled by ||sigma^{-1/2}||^3."""
    scale = operator_norm(inv_sqrt(sigma))
    return theorem1_functional(inp) * scale ** 3


def iid_reference(d: int, n: int, third_moment: float, C: float = 1.0) -> float:
    """C E|X_1|^3 d^{1/4} n^{-1/2} for standardized i.i.d. sums."""
    _positive(d=d, n=n, third_moment=third_moment, C=C)
    return C * third_moment * d ** 0.25 / math.sqrt(n)


def consistency_check(inp: BoundInputs) -> bool:
    """d <= n beta^2 n1, which Cov(W) = I forces under the boundedness conditions."""
    p = inp.params
    return inp.d <= inp.n * p.beta ** 2 * p.n1 * (1 + 1e-12)


def _check_pi(pi) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size < 2:
        raise ValueError("pi must be a probability vector with at least 2 entries")
    if np.any(~(pi > 0)) or np.any(~(pi < 1)):
        raise ValueError("every pi_i must lie strictly inside (0, 1)")
    if abs(pi.sum() - 1.0) > 1e-12:
        raise ValueError(f"pi must sum to 1 (got {pi.sum()!r})")
    return pi


def color_constant(pi) -> float:
    """L = [min_i pi_i^2 (1 - pi_i)]^{-1/2}."""
    pi = _check_pi(pi)
    return float(np.min(pi ** 2 * (1.0 - pi)) ** -0.5)


def _check_graph(n: int, m: int, d: int, pi) -> np.ndarray:
    if n < 2 or m < 1 or d < 2:
        raise ValueError("need n >= 2, m >= 1, d >= 2")
    if (n * m) % 2:
        raise ValueError(f"no regular graph with n={n}, m={m} (n*m odd)")
    pi = _check_pi(pi)
    if pi.size != d:
        raise ValueError(f"pi has {pi.size} entries but d={d}")
    return pi


def proposition1_bound(n: int, m: int, d: int, pi, C: float = 1.0) -> tuple[float, float]:
    """Return (L, C d^{7/4} m^{3/2} L^3 n^{-1/2}) for the graph-coloring counts."""
    _check_graph(n, m, d, pi)
    _positive(C=C)
    L = color_constant(pi)
    return L, C * d ** 1.75 * m ** 1.5 * L ** 3 / math.sqrt(n)


def rr96_comparison(n: int, m: int, d: int, pi, c_d: float) -> float:
    """c_d m^{3/2} L^3 (|log L| + log n) n^{-1/2}; c_d has no known value."""
    _check_graph(n, m, d, pi)
    _positive(c_d=c_d)
    L = color_constant(pi)
    return c_d * m ** 1.5 * L ** 3 * (abs(math.log(L)) + math.log(n)) / math.sqrt(n)


def prop1_over_rr96(n: int, d: int, pi) -> float:
    """prop1/rr96 with C = c_d = 1, i.e. d^{7/4} / (|log L| + log n)."""
    L = color_constant(pi)
    return d ** 1.75 / (abs(math.log(L)) + math.log(n))


@dataclass
class BoundReport:
    inputs: BoundInputs
    theorem1: float
    consistency_d_le: bool
    remark1: float | None = None
    iid_ref: float | None = None
    L: float | None = None
    prop1: float | None = None
    rr96: float | None = None
    prop1_over_rr96: float | None = None  # with C = c_d = 1

    def to_dict(self) -> dict:
        out = asdict(self)
        inp = out.pop("inputs")
        out = {"d": inp["d"], "n": inp["n"], **inp["params"], "C": inp["C"], **out}
        return out

    def to_text(self) -> str:
        rows = []
        for key, value in self.to_dict().items():
            if value is None:
                if key == "rr96":
                    value = "(c_d unspecified)"
                else:
                    continue
            elif isinstance(value, float):
                value = f"{value:.17g}"
            rows.append((key, str(value)))
        if self.rr96 is None and self.prop1_over_rr96 is not None:
            rows.append(("prop1/rr96", f"(C/c_d) * {self.prop1_over_rr96:.17g}"))
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def bound_report(inp: BoundInputs, sigma=None, third_moment: float | None = None,
                 graph: tuple | None = None, c_d: float | None = None) -> BoundReport:
    """Evaluate every applicable functional.

    ``graph`` is ``(n_vertices, m, pi)`` for the coloring model; the
    comparison bound is only evaluated when ``c_d`` is given.
    """
    rep = BoundReport(inputs=inp, theorem1=theorem1_functional(inp),
                      consistency_d_le=consistency_check(inp))
    if sigma is not None:
        rep.remark1 = remark1_bound(inp, sigma)
    if third_moment is not None:
        rep.iid_ref = iid_reference(inp.d, inp.n, third_moment, inp.C)
    if graph is not None:
        n_vertices, m, pi = graph
        rep.L, rep.prop1 = proposition1_bound(n_vertices, m, inp.d, pi, inp.C)
        rep.prop1_over_rr96 = prop1_over_rr96(n_vertices, inp.d, pi)
        if c_d is not None:
            rep.rr96 = rr96_comparison(n_vertices, m, inp.d, pi, c_d)
    return rep
