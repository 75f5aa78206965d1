"""Decision procedures: isolated loops, type I, purely infinite simple quotients, stable rank."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvariantViolation, PreconditionError
from .graph import (
    Cycle,
    Graph,
    check_cap,
    make_cycle,
    restrict,
    shortest_path,
    strongly_connected_components,
    vertex_simple_cycles,
)
from .subsets import hersat_closure
from .tails import GAMMA, MaximalTail, maximal_tails

INFINITY = math.inf


def _cycle_through(g: Graph, iid: str, within: frozenset[str]) -> Cycle:
    b, _ = g.edge(iid)
    back = shortest_path(g, b.target, b.source, within)
    if back is None:
        raise InvariantViolation(f"edge {iid} does not return to its source inside its component")
    return make_cycle(g, [iid] + [f"{bid}#0" for bid in back])


def _internal_instances(g: Graph, v: str, comp: frozenset[str], limit: int = 2) -> list[str]:
    out = []
    for b in g.out_bundles[v]:
        if b.target in comp:
            out.extend(b.instance_ids(omega_cap=2))
    return out[:limit]


def _cyclic_components(g: Graph):
    for comp in strongly_connected_components(g):
        if comp.has_internal_edge:
            yield frozenset(comp.vertices), comp.vertices


@dataclass(frozen=True)
class ExitCheck:
    ok: bool
    vertex: str | None = None
    cycle: Cycle | None = None

    def __bool__(self):
        return self.ok


def no_loop_has_exit(g: Graph) -> ExitCheck:
    """True iff every vertex lying on a loop emits exactly one edge."""
    for comp, ordered in _cyclic_components(g):
        for v in ordered:
            if g.out_degree(v) != 1:
                e = _internal_instances(g, v, comp, 1)[0]
                return ExitCheck(False, v, _cycle_through(g, e, comp))
    return ExitCheck(True)


@dataclass(frozen=True)
class IsolationCheck:
    ok: bool
    vertex: str | None = None
    cycles: tuple[Cycle, Cycle] | None = None

    def __bool__(self):
        return self.ok


def properly_infinite_witnesses(g: Graph) -> list[tuple[str, Cycle, Cycle]]:
    """Vertices carrying two loops with distinct first edges, with the two loops."""
    out = []
    for comp, ordered in _cyclic_components(g):
        for v in ordered:
            inst = _internal_instances(g, v, comp)
            if len(inst) >= 2:
                out.append((v, _cycle_through(g, inst[0], comp), _cycle_through(g, inst[1], comp)))
    out.sort(key=lambda t: g.index[t[0]])
    return out


def has_isolated_loops(g: Graph) -> IsolationCheck:
    """Any two loops through a common vertex use the same edge there.

    Equivalently each strongly connected component with an internal edge is a
    single simple cycle: no vertex emits two edge instances back into its own
    component.
    """
    for comp, ordered in _cyclic_components(g):
        for v in ordered:
            inst = _internal_instances(g, v, comp)
            if len(inst) >= 2:
                return IsolationCheck(False, v, (_cycle_through(g, inst[0], comp), _cycle_through(g, inst[1], comp)))
    return IsolationCheck(True)


@dataclass(frozen=True)
class TailRecord:
    tail: frozenset[str]
    clause: str | None  # "i", "ii" or None
    witness_vertex: str | None


@dataclass(frozen=True)
class TypeIReport:
    verdict: bool
    records: tuple[TailRecord, ...]
    note: str = (
        "clause (ii) needs infinitely many distinct vertices and never holds on finite vertex sets"
    )


def is_type_I(g: Graph, cap: int | None = None) -> TypeIReport:
    records = []
    for t in maximal_tails(g, cap=cap):
        if t.cls != GAMMA:
            continue
        w = next(
            (v for v in g.sort_vertices(t.vertices) if not any(x in t.vertices for x in g.successors[v])),
            None,
        )
        records.append(TailRecord(t.vertices, "i" if w else None, w))
    return TypeIReport(all(r.clause for r in records), tuple(records))


@dataclass(frozen=True)
class TailFlags:
    unital: bool
    has_loop: bool
    simple: bool


def _restriction_simple(h: Graph) -> bool:
    # a nonempty hereditary saturated set contains the closure of each member
    everything = frozenset(h.vertices)
    return all(hersat_closure(h, {v}).vertices == everything for v in h.vertices)


def tail_algebra_flags(g: Graph, M: MaximalTail) -> TailFlags:
    if M.cls != GAMMA:
        raise PreconditionError("the simplicity criterion applies to gamma tails only")
    h = restrict(g, M.vertices)
    has_loop = any(c.has_internal_edge for c in strongly_connected_components(h))
    return TailFlags(True, has_loop, _restriction_simple(h))


def pi_simple_unital_quotient(g: Graph, cap: int | None = None) -> MaximalTail | None:
    """A gamma tail whose restriction has a loop and no nontrivial hereditary saturated set."""
    for t in maximal_tails(g, cap=cap):
        if t.cls != GAMMA:
            continue
        flags = tail_algebra_flags(g, t)
        if flags.has_loop and flags.simple:
            return t
    return None


@dataclass(frozen=True)
class StableRankVerdict:
    value: object  # 1, 2 or math.inf
    statement: str
    exit_witness: ExitCheck | None = None
    pi_tail: MaximalTail | None = None

    @property
    def label(self) -> str:
        return "infinity" if self.value == INFINITY else str(self.value)


def stable_rank(g: Graph, cap: int | None = None) -> StableRankVerdict:
    check_cap(g, cap, "stable rank")
    exits = no_loop_has_exit(g)
    pi = pi_simple_unital_quotient(g, cap=cap)
    if exits and pi is not None:
        raise InvariantViolation("stable rank one and infinite stable rank tests both fired")
    if exits:
        return StableRankVerdict(1, "no cycle vertex has out-degree other than 1")
    if pi is not None:
        return StableRankVerdict(
            INFINITY, "a gamma tail yields a unital purely infinite simple quotient", exits, pi
        )
    return StableRankVerdict(
        2, "some loop has an exit and no gamma tail gives a purely infinite simple quotient", exits
    )


@dataclass(frozen=True)
class LoopPoset:
    cycles: tuple[Cycle, ...]
    geq: frozenset[tuple[int, int]]
    maximal: tuple[int, ...] = field(default=())

    def ge(self, a: int, b: int) -> bool:
        return (a, b) in self.geq


def loop_poset(g: Graph) -> LoopPoset:
    """Distinct cycles ordered by reachability; requires isolated loops."""
    if not has_isolated_loops(g):
        raise PreconditionError("loop order is only a partial order when loops are isolated")
    cycles = tuple(vertex_simple_cycles(g))
    n = len(cycles)
    rel = set()
    for i, a in enumerate(cycles):
        reach = set().union(*(g.reach[v] for v in a.vertices))
        for j, b in enumerate(cycles):
            if reach & set(b.vertices):
                rel.add((i, j))
    for i in range(n):
        if (i, i) not in rel:
            raise InvariantViolation("loop order is not reflexive")
        for j in range(n):
            if i != j and (i, j) in rel and (j, i) in rel:
                raise InvariantViolation("loop order is not antisymmetric")
            for k in range(n):
                if (i, j) in rel and (j, k) in rel and (i, k) not in rel:
                    raise InvariantViolation("loop order is not transitive")
    maximal = tuple(i for i in range(n) if not any((j, i) in rel for j in range(n) if j != i))
    return LoopPoset(cycles, frozenset(rel), maximal)


__all__ = [
    "INFINITY",
    "ExitCheck",
    "IsolationCheck",
    "LoopPoset",
    "StableRankVerdict",
    "TailFlags",
    "TailRecord",
    "TypeIReport",
    "has_isolated_loops",
    "is_type_I",
    "loop_poset",
    "no_loop_has_exit",
    "pi_simple_unital_quotient",
    "properly_infinite_witnesses",
    "stable_rank",
    "tail_algebra_flags",
]
