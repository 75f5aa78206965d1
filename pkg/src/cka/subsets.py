"""Hereditary and saturated vertex sets, Ω-sets and breaking vertices."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import networkx as nx

from .errors import InvariantViolation, PreconditionError
from .graph import Graph, check_cap, is_omega


@dataclass(frozen=True)
class HerSatSet:
    vertices: frozenset[str]
    is_trivial: bool

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices


@dataclass(frozen=True)
class BadVertexSet:
    """The ω-emitters outside ``base`` with finitely many (>= 1) edges leaving it."""

    base: HerSatSet
    vertices: frozenset[str]
    escape_counts: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class IdealSpec:
    """Names the gauge-invariant ideal generated by ``X`` and the vertices ``B``."""

    X: frozenset[str]
    B: frozenset[str] = frozenset()
    origin: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SubsetCheck:
    hereditary: bool
    saturated: bool

    def __bool__(self):
        return self.hereditary and self.saturated


def _is_finite_emitter(g: Graph, v: str) -> bool:
    d = g.out_degree(v)
    return d != 0 and not is_omega(d)


def check_subset(g: Graph, S: Iterable[str]) -> SubsetCheck:
    S = g.require(S)
    hereditary = all(w in S for v in S for w in g.successors[v])
    saturated = not any(
        v not in S and _is_finite_emitter(g, v) and all(w in S for w in g.successors[v])
        for v in g.vertices
    )
    return SubsetCheck(hereditary, saturated)


def _hersat(g: Graph, S: frozenset[str]) -> HerSatSet:
    return HerSatSet(S, not S or len(S) == len(g.vertices))


def hersat_closure(g: Graph, S: Iterable[str]) -> HerSatSet:
    """Smallest hereditary and saturated set containing ``S``."""
    closed = set(g.require(S))
    for v in list(closed):
        closed |= g.reach[v]
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v not in closed and _is_finite_emitter(g, v) and all(w in closed for w in g.successors[v]):
                closed |= g.reach[v]
                changed = True
    return _hersat(g, frozenset(closed))


def subset_sort_key(g: Graph, S: Iterable[str]):
    idx = sorted(g.index[v] for v in S)
    return (len(idx), idx)


def enumerate_hersat(g: Graph, cap: int | None = None) -> list[HerSatSet]:
    """Every hereditary and saturated subset, ∅ and E^0 included.

    Walks the condensation DAG sinks-first so that each component is included
    only after all its successors; saturation of an excluded component is
    decided at that moment because its targets are already fixed.
    """
    check_cap(g, cap, "hereditary-saturated enumeration")
    cond = nx.condensation(g.digraph)
    order = list(reversed(list(nx.topological_sort(cond))))
    members = [frozenset(cond.nodes[c]["members"]) for c in order]
    succ = [frozenset(w for v in m for w in g.successors[v]) - m for m in members]
    # vertices of a component that would force its inclusion if all outside targets are in
    forcing = []
    for m in members:
        fv = [
            frozenset(g.successors[v])
            for v in m
            if _is_finite_emitter(g, v) and not any(w in m for w in g.successors[v])
        ]
        forcing.append(fv)

    out: list[frozenset[str]] = []

    def rec(i: int, current: frozenset[str]):
        if i == len(members):
            out.append(current)
            return
        if succ[i] <= current:
            rec(i + 1, current | members[i])
        if not any(t <= current for t in forcing[i]):
            rec(i + 1, current)

    rec(0, frozenset())
    out.sort(key=lambda s: subset_sort_key(g, s))
    return [_hersat(g, s) for s in out]


def omega(g: Graph, S: Iterable[str]) -> frozenset[str]:
    """Vertices outside ``S`` from which no path reaches ``S``.

    The result is always hereditary.  It is also saturated when ``S`` is a
    maximal tail or a single infinite emitter, the two cases ideals are built
    from; in general it need not be (``a -> b`` with ``S = {a}``).
    """
    S = g.require(S)
    result = frozenset(w for w in g.vertices if w not in S and not (g.reach[w] & S))
    if not check_subset(g, result).hereditary:
        raise InvariantViolation(f"Ω({sorted(S)}) is not hereditary")
    return result


def edges_into_count(g: Graph, v: str, targets: frozenset[str]):
    """Number of edge instances from ``v`` ending in ``targets`` (ω-absorbing)."""
    return sum((b.mult for b in g.out_bundles[v] if b.target in targets), 0)


def x_fin_inf(g: Graph, X: Iterable[str]) -> BadVertexSet:
    X = g.require(X)
    if not check_subset(g, X):
        raise PreconditionError(f"{sorted(X)} is not hereditary and saturated")
    outside = frozenset(g.vertices) - X
    counts = {}
    for v in g.vertices:
        if v in X or not is_omega(g.out_degree(v)):
            continue
        n = edges_into_count(g, v, outside)
        if n != 0 and not is_omega(n):
            counts[v] = n
    return BadVertexSet(_hersat(g, X), frozenset(counts), counts)


def breaking_vertices(g: Graph) -> frozenset[str]:
    result = set()
    for v in g.vertices:
        if not is_omega(g.out_degree(v)):
            continue
        keep = frozenset(g.vertices) - omega(g, {v})
        n = edges_into_count(g, v, keep)
        if n != 0 and not is_omega(n):
            result.add(v)
    return frozenset(result)
