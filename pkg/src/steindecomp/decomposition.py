"""Dependency neighborhoods derived from independent randomness sources.

Each summand X_i is a function of a finite set of atoms S_i; atoms are
mutually independent. Summands built from disjoint atom sets are therefore
independent, which gives a constructive choice of the nested neighborhoods

    N_i   = {j : S_j meets S_i}
    N_ij  = N_i  + {l : S_l meets S_i | S_j}
    N_ijk = N_ij + {l : S_l meets S_i | S_j | S_k}

such that W - X_{N_i} is independent of X_i, W - X_{N_ij} of {X_i, X_j} and
W - X_{N_ijk} of {X_i, X_j, X_k}. Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_TUPLE_BUDGET = 10**8


class TupleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StructureParams:
    n1: int
    n2: int
    n3: int
    beta: float


@dataclass(frozen=True)
class DependencyModel:
    sources: tuple  # tuple of frozensets of atom indices, one per summand
    d: int
    beta: float
    _by_atom: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sources = tuple(frozenset(int(a) for a in s) for s in self.sources)
        if not sources:
            raise ValueError("model needs at least one summand")
        for i, s in enumerate(sources):
            if not s:
                raise ValueError(f"summand {i} has no randomness sources")
            if min(s) < 0:
                raise ValueError(f"summand {i} has a negative atom index")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        by_atom: dict[int, set[int]] = {}
        for i, s in enumerate(sources):
            for a in s:
                by_atom.setdefault(a, set()).add(i)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "_by_atom", {a: frozenset(v) for a, v in by_atom.items()})

    @property
    def n(self) -> int:
        return len(self.sources)

    def touching(self, atoms: Iterable[int]) -> frozenset:
        """Summands whose sources meet ``atoms``."""
        out: set[int] = set()
        for a in atoms:
            out |= self._by_atom.get(a, frozenset())
        return frozenset(out)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"summand index {i} out of range [0, {self.n})")


class ContractViolation(ValueError):
    pass


def neighborhood(model: DependencyModel, i: int) -> frozenset:
    model._check(i)
    return model.touching(model.sources[i])


def neighborhood2(model: DependencyModel, i: int, j: int) -> frozenset:
    model._check(j)
    ni = neighborhood(model, i)
    if j not in ni:
        raise ContractViolation(f"N_ij requires j in N_i; got i={i}, j={j}")
    return ni | model.touching(model.sources[i] | model.sources[j])


def neighborhood3(model: DependencyModel, i: int, j: int, k: int) -> frozenset:
    model._check(k)
    nij = neighborhood2(model, i, j)
    if k not in nij:
        raise ContractViolation(f"N_ijk requires k in N_ij; got i={i}, j={j}, k={k}")
    atoms = model.sources[i] | model.sources[j] | model.sources[k]
    return nij | model.touching(atoms)


def _tuple_count(model: DependencyModel) -> int:
    total = 0
    for i in range(model.n):
        for j in neighborhood(model, i):
            total += len(neighborhood2(model, i, j))
    return total


def structure_params(model: DependencyModel,
                     tuple_budget: int = DEFAULT_TUPLE_BUDGET) -> StructureParams:
    """Largest |N_i|, |N_ij|, |N_ijk| over admissible index tuples only.

    Pairs range over j in N_i and triples over k in N_ij, which is what the
    independence conditions quantify over.
    """
    count = _tuple_count(model)
    if count > tuple_budget:
        raise TupleBudgetExceeded(
            f"{count} admissible triples exceed the tuple budget {tuple_budget}")
    n1 = n2 = n3 = 0
    for i in range(model.n):
        si = model.sources[i]
        ni = model.touching(si)
        n1 = max(n1, len(ni))
        for j in ni:
            sij = si | model.sources[j]
            nij = ni | model.touching(sij)
            n2 = max(n2, len(nij))
            for k in nij:
                nijk = nij | model.touching(sij | model.sources[k])
                n3 = max(n3, len(nijk))
    return StructureParams(n1, n2, n3, model.beta)


@dataclass
class StructureReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_structure(model: DependencyModel, neighborhoods=None) -> StructureReport:
    """Check nesting i in N_i <= N_ij <= N_ijk and source-disjointness of complements.

    ``neighborhoods`` optionally supplies ``(n1_fn, n2_fn, n3_fn)`` to audit
    hand-built sets instead of the source-closure ones.
    """
    n1_fn, n2_fn, n3_fn = neighborhoods or (
        lambda i: neighborhood(model, i),
        lambda i, j: neighborhood2(model, i, j),
        lambda i, j, k: neighborhood3(model, i, j, k),
    )
    report = StructureReport()
    everyone = frozenset(range(model.n))

    def atoms_of(idx: Iterable[int]) -> frozenset:
        out: set[int] = set()
        for x in idx:
            out |= model.sources[x]
        return frozenset(out)

    def check_disjoint(tag, tup, nb, members):
        cond = atoms_of(members)
        rest = atoms_of(everyone - nb)
        if cond & rest:
            report.violations.append((tag, tup, "complement shares sources with conditioning set"))

    for i in range(model.n):
        ni = frozenset(n1_fn(i))
        report.checked += 1
        if i not in ni:
            report.violations.append(("N_i", (i,), "i not in N_i"))
        check_disjoint("N_i", (i,), ni, (i,))
        for j in ni:
            nij = frozenset(n2_fn(i, j))
            report.checked += 1
            if not ni <= nij:
                report.violations.append(("N_ij", (i, j), "N_i not contained in N_ij"))
            check_disjoint("N_ij", (i, j), nij, (i, j))
            for k in nij:
                nijk = frozenset(n3_fn(i, j, k))
                report.checked += 1
                if not nij <= nijk:
                    report.violations.append(("N_ijk", (i, j, k), "N_ij not contained in N_ijk"))
                check_disjoint("N_ijk", (i, j, k), nijk, (i, j, k))
    return report


def model_from_sources(sources: Sequence[Iterable[int]], d: int, beta: float) -> DependencyModel:
    return DependencyModel(tuple(frozenset(s) for s in sources), d, beta)


def parse_model_file(text: str, d: int, beta: float) -> DependencyModel:
    """Read lines ``i: a1,a2,...``; summands must be numbered 0..n-1."""
    entries: dict[int, frozenset] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, tail = line.split(":", 1)
            i = int(head)
            atoms = frozenset(int(a) for a in tail.split(",") if a.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'i: a1,a2,...', got {raw!r}") from None
        if i in entries:
            raise ValueError(f"line {lineno}: summand {i} listed twice")
        entries[i] = atoms
    if sorted(entries) != list(range(len(entries))):
        raise ValueError("summand indices must be exactly 0..n-1")
    return DependencyModel(tuple(entries[i] for i in range(len(entries))), d, beta)


def format_model_file(model: DependencyModel) -> str:
    return "".join(f"{i}: {','.join(str(a) for a in sorted(s))}\n"
                   for i, s in enumerate(model.sources))
