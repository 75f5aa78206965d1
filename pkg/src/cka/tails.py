"""Maximal tails and their gamma/tau classification."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import InvariantViolation, PreconditionError
from .graph import Cycle, Graph, check_cap, is_omega, loop_exits, make_cycle
from .subsets import check_subset, enumerate_hersat, subset_sort_key

GAMMA = "gamma"
TAU = "tau"


@dataclass(frozen=True)
class TailCheck:
    mt1: bool
    mt2: bool
    mt3: bool
    mt1_violation: tuple | None = None  # (v, w): v >= w in M but v outside M
    mt2_violation: str | None = None  # finite emitter with no edge into M
    mt3_violation: tuple | None = None  # (v, w) with no common descendant in M

    def __bool__(self):
        return self.mt1 and self.mt2 and self.mt3


@dataclass(frozen=True)
class MaximalTail:
    vertices: frozenset[str]
    cls: str
    witness: Cycle | None = None


def is_maximal_tail(g: Graph, M: Iterable[str]) -> TailCheck:
    M = g.require(M)
    if not M:
        raise PreconditionError("a maximal tail is nonempty")
    mt1_v = next(
        ((v, w) for v in g.vertices if v not in M for w in g.sort_vertices(M) if w in g.reach[v]),
        None,
    )
    mt2_v = None
    for v in g.sort_vertices(M):
        d = g.out_degree(v)
        if d != 0 and not is_omega(d) and not any(w in M for w in g.successors[v]):
            mt2_v = v
            break
    mt3_v = None
    ordered = g.sort_vertices(M)
    for i, v in enumerate(ordered):
        for w in ordered[i + 1 :]:
            if not (g.reach[v] & g.reach[w] & M):
                mt3_v = (v, w)
                break
        if mt3_v:
            break
    return TailCheck(mt1_v is None, mt2_v is None, mt3_v is None, mt1_v, mt2_v, mt3_v)


def exitless_cycle(g: Graph, M: frozenset[str]) -> Cycle | None:
    """A loop inside ``M`` with no exit into ``M``, or None.

    Such a loop only visits vertices emitting exactly one edge instance into
    ``M``; following that unique edge is a functional walk, so any loop it
    closes is the witness.
    """
    nxt = {}
    for v in g.sort_vertices(M):
        into = [b for b in g.out_bundles[v] if b.target in M]
        if len(into) == 1 and into[0].mult == 1:
            nxt[v] = into[0]
    done: set[str] = set()
    for start in nxt:
        path: list[str] = []
        pos: dict[str, int] = {}
        v = start
        while v in nxt and v not in done and v not in pos:
            pos[v] = len(path)
            path.append(v)
            v = nxt[v].target
        if v in pos:
            loop = path[pos[v] :]
            return make_cycle(g, [f"{nxt[u].id}#0" for u in loop])
        done.update(path)
    return None


def classify_tail(g: Graph, M: Iterable[str]) -> MaximalTail:
    M = g.require(M)
    if not is_maximal_tail(g, M):
        raise PreconditionError(f"{sorted(M)} is not a maximal tail")
    return _classify(g, M)


def _classify(g: Graph, M: frozenset[str]) -> MaximalTail:
    witness = exitless_cycle(g, M)
    if witness is not None:
        if loop_exits(g, witness, M):
            raise InvariantViolation("tau witness has an exit into its tail")
        return MaximalTail(M, TAU, witness)
    return MaximalTail(M, GAMMA, None)


def maximal_tails(g: Graph, cap: int | None = None, cross_check: bool = False) -> list[MaximalTail]:
    """All maximal tails, classified, from complements of hereditary saturated sets.

    With ``cross_check`` the result is compared with a direct filter of every
    nonempty subset through the three axioms.
    """
    check_cap(g, cap, "maximal-tail enumeration")
    everything = frozenset(g.vertices)
    tails = []
    for H in enumerate_hersat(g, cap=cap):
        M = everything - H.vertices
        if not M:
            continue
        if is_maximal_tail(g, M):
            tails.append(M)
    for M in tails:
        if not check_subset(g, everything - M):
            raise InvariantViolation(f"complement of tail {sorted(M)} is not hereditary and saturated")
    if cross_check:
        from itertools import combinations

        direct = {
            frozenset(c)
            for k in range(1, len(g.vertices) + 1)
            for c in combinations(g.vertices, k)
            if is_maximal_tail(g, c)
        }
        if direct != set(tails):
            raise InvariantViolation("maximal tail fast path disagrees with the axiom filter")
    tails.sort(key=lambda s: subset_sort_key(g, s))
    return [_classify(g, M) for M in tails]
