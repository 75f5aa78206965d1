"""Brute-force recomputations of the fast analyses, for small graphs.

Every oracle works from the bundle list alone with its own reachability
(Floyd-Warshall) and its own definitions, so it shares no code path with the
implementation it audits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..classify import has_isolated_loops
from ..constructions import f_paths
from ..errors import CapExceededError, PreconditionError
from ..graph import OMEGA, Graph, is_omega, vertex_simple_cycles
from ..subsets import enumerate_hersat, x_fin_inf
from ..tails import GAMMA, TAU, maximal_tails

ORACLE_CAP = 8


def closure(g: Graph) -> dict[str, set[str]]:
    """Reflexive-transitive closure by Floyd-Warshall."""
    r = {v: {v} for v in g.vertices}
    for b in g.bundles:
        r[b.source].add(b.target)
    for k in g.vertices:
        for i in g.vertices:
            if k in r[i]:
                r[i] |= r[k]
    return r


def _degree(g: Graph, v: str):
    d = 0
    for b in g.bundles:
        if b.source == v:
            d = OMEGA if is_omega(b.mult) or is_omega(d) else d + b.mult
    return d


def _subsets(g: Graph):
    for k in range(len(g.vertices) + 1):
        for c in itertools.combinations(g.vertices, k):
            yield frozenset(c)


def brute_hersat(g: Graph) -> set[frozenset[str]]:
    out = set()
    for S in _subsets(g):
        if any(b.source in S and b.target not in S for b in g.bundles):
            continue
        unsat = False
        for v in g.vertices:
            d = _degree(g, v)
            if v in S or d == 0 or is_omega(d):
                continue
            if all(b.target in S for b in g.bundles if b.source == v):
                unsat = True
                break
        if not unsat:
            out.add(S)
    return out


def brute_cycles(g: Graph) -> set[tuple[str, ...]]:
    """Every vertex-simple cycle as a canonical edge-instance tuple.

    Vertex sequences are all permutations starting at their least id; ω
    bundles contribute instances #0 and #1.
    """
    out = set()
    verts = sorted(g.vertices)
    for k in range(1, len(verts) + 1):
        for seq in itertools.permutations(verts, k):
            if seq[0] != min(seq):
                continue
            steps = []
            for i in range(k):
                u, w = seq[i], seq[(i + 1) % k]
                ids = []
                for b in g.bundles:
                    if b.source == u and b.target == w:
                        n = 2 if is_omega(b.mult) else b.mult
                        ids.extend(f"{b.id}#{j}" for j in range(n))
                steps.append(ids)
            out.update(itertools.product(*steps))
    return out


def _src(g: Graph, iid: str) -> str:
    return g.bundle_by_id[iid.rsplit("#", 1)[0]].source


def brute_isolated(g: Graph, cycles: set[tuple[str, ...]]) -> bool:
    for a, b in itertools.combinations(cycles, 2):
        at_a = {_src(g, e): e for e in a}
        for e in b:
            v = _src(g, e)
            if v in at_a and at_a[v] != e:
                return False
    return True


def _has_exit(g: Graph, cyc: tuple[str, ...], M: frozenset[str]) -> bool:
    for own in cyc:
        v = _src(g, own)
        for b in g.bundles:
            if b.source != v or b.target not in M:
                continue
            n = 2 if is_omega(b.mult) else b.mult
            if any(f"{b.id}#{j}" != own for j in range(n)):
                return True
    return False


def brute_tails(g: Graph, cycles: set[tuple[str, ...]]) -> dict[frozenset[str], str]:
    r = closure(g)
    out = {}
    for M in _subsets(g):
        if not M:
            continue
        if any(v not in M and r[v] & M for v in g.vertices):
            continue
        ok = True
        for v in M:
            d = _degree(g, v)
            if d != 0 and not is_omega(d) and not any(b.target in M for b in g.bundles if b.source == v):
                ok = False
        if not ok or any(not (r[v] & r[w] & M) for v in M for w in M):
            continue
        inside = [c for c in cycles if all(_src(g, e) in M for e in c)]
        out[M] = TAU if any(not _has_exit(g, c, M) for c in inside) else GAMMA
    return out


def brute_f_counts(g: Graph, X: frozenset[str], B: frozenset[str], depth: int) -> dict[int, object]:
    """Number of F-path instances of each length 1..depth, by dynamic programming."""
    XB = X | B
    counts = {}
    # frontier[(start, v)] = number of partial paths from start currently at v (v outside X ∪ B)
    frontier = {(s, s): 1 for s in g.vertices if s not in X}
    for length in range(1, depth + 1):
        total = 0
        nxt: dict[tuple[str, str], object] = {}
        for (s, v), n in frontier.items():
            for b in g.bundles:
                if b.source != v:
                    continue
                m = n * b.mult
                if b.target in XB:
                    if not (length == 1 and s in B and b.target in X):
                        total = total + m
                else:
                    key = (s, b.target)
                    nxt[key] = nxt.get(key, 0) + m
        counts[length] = total
        frontier = nxt
    return counts


def brute_f_infinite(g: Graph, X: frozenset[str], B: frozenset[str]) -> bool:
    """F is infinite iff some count is ω or a path longer than |U| + 1 exists."""
    U = len(g.vertices) - len(X | B)
    counts = brute_f_counts(g, X, B, U + 2)
    return any(is_omega(c) for c in counts.values()) or counts[U + 2] != 0


@dataclass(frozen=True)
class OracleReport:
    graph: str
    diffs: dict = field(default_factory=dict)  # check name -> list of discrepancies

    @property
    def ok(self) -> bool:
        return not any(self.diffs.values())


def _fmt(s) -> str:
    return "{" + ",".join(sorted(s)) + "}"


def oracle_suite(g: Graph) -> OracleReport:
    """Diff the fast hersat, tail, cycle, isolation and F-path analyses against brute force."""
    if len(g.vertices) > ORACLE_CAP:
        raise CapExceededError(f"oracle suite handles at most {ORACLE_CAP} vertices")
    if any(not is_omega(b.mult) and b.mult > 2 for b in g.bundles):
        raise PreconditionError("cycle oracle needs finite multiplicities <= 2")
    diffs: dict[str, list[str]] = {}

    r = closure(g)
    diffs["reach"] = [v for v in g.vertices if r[v] != set(g.reach[v])]

    fast_h = {H.vertices for H in enumerate_hersat(g)}
    slow_h = brute_hersat(g)
    diffs["hersat"] = [f"fast only {_fmt(s)}" for s in fast_h - slow_h] + [
        f"oracle only {_fmt(s)}" for s in slow_h - fast_h
    ]

    fast_c = {c.edges for c in vertex_simple_cycles(g)}
    slow_c = brute_cycles(g)
    diffs["cycles"] = [f"fast only {c}" for c in fast_c - slow_c] + [f"oracle only {c}" for c in slow_c - fast_c]

    fast_i = bool(has_isolated_loops(g))
    slow_i = brute_isolated(g, slow_c)
    diffs["isolated"] = [] if fast_i == slow_i else [f"fast {fast_i}, oracle {slow_i}"]

    fast_t = {t.vertices: t.cls for t in maximal_tails(g)}
    slow_t = brute_tails(g, slow_c)
    diffs["tails"] = [
        f"{_fmt(M)}: fast {fast_t.get(M)}, oracle {slow_t.get(M)}"
        for M in fast_t.keys() | slow_t.keys()
        if fast_t.get(M) != slow_t.get(M)
    ]

    fdiff = []
    for X in slow_h:
        if not X or len(X) == len(g.vertices):
            continue
        bad = g.sort_vertices(x_fin_inf(g, X).vertices)
        for k in range(len(bad) + 1):
            for B in map(frozenset, itertools.combinations(bad, k)):
                fr = f_paths(g, X, B, depth=3)
                if fr.is_finite == brute_f_infinite(g, X, B):
                    fdiff.append(f"X={_fmt(X)} B={_fmt(B)}: finiteness differs")
                by_len: dict[int, object] = {}
                for fam in fr.families:
                    n = len(fam.bundles)
                    by_len[n] = by_len.get(n, 0) + fam.count
                want = brute_f_counts(g, X, B, 3)
                if any(by_len.get(n, 0) != want[n] for n in want):
                    fdiff.append(f"X={_fmt(X)} B={_fmt(B)}: family counts differ")
    diffs["f_paths"] = fdiff
    return OracleReport(g.name, {k: sorted(v) for k, v in diffs.items()})
