"""Graph-to-graph constructions: finite approximations, ideal graphs, quotients.

Derived graphs get fresh, grammar-valid ids; ``provenance`` maps each new
vertex and bundle id back to where it came from.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field

from .errors import InvariantViolation, PreconditionError
from .graph import (
    OMEGA,
    Bundle,
    Graph,
    Namer,
    is_omega,
    split_instance,
    strongly_connected_components,
)
from .subsets import (
    IdealSpec,
    breaking_vertices,
    check_subset,
    enumerate_hersat,
    hersat_closure,
    omega,
    x_fin_inf,
)
from .tails import GAMMA, maximal_tails

DEFAULT_DEPTH = 6
DEFAULT_OMEGA_CAP = 3
IDEAL_CAP = 16


@dataclass(frozen=True)
class ConstructionResult:
    graph: Graph
    truncated: bool
    provenance: dict = field(compare=False)
    labels: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class PathFamily:
    """Paths sharing one bundle sequence; ``count`` parallel instances."""

    bundles: tuple[str, ...]
    source: str
    target: str
    count: object

    def label(self) -> str:
        return "(" + ",".join(self.bundles) + ")"


@dataclass(frozen=True)
class FResult:
    families: tuple[PathFamily, ...]
    is_finite: bool
    depth_used: int
    reason: str = ""


# -- finite approximation ----------------------------------------------------


def _expand_edges(g: Graph, G1: Iterable[str]) -> list[str]:
    out = []
    for item in G1:
        if "#" in item:
            g.edge(item)
            out.append(item)
            continue
        b = g.bundle_by_id.get(item)
        if b is None:
            raise PreconditionError(f"unknown edge {item!r}")
        if is_omega(b.mult):
            raise PreconditionError(f"bundle {item!r} is infinite; select instances such as {item}#0")
        out.extend(b.instance_ids())
    return sorted(set(out), key=g.instance_key)


def build_subgraph(g: Graph, G0: Iterable[str], G1: Iterable[str]) -> ConstructionResult:
    """The finite graph E_G generated by vertices ``G0`` and edge instances ``G1``.

    Bare bundle ids in ``G1`` stand for all instances of a finite bundle.
    """
    G0 = g.require(G0)
    edges = _expand_edges(g, G1)
    chosen = set(edges)
    for iid in edges:
        if g.edge(iid)[0].target not in G0:
            raise PreconditionError(f"range of {iid} is not in G0")

    def emits_outside(v):
        for b in g.out_bundles[v]:
            if is_omega(b.mult) or any(i not in chosen for i in b.instance_ids()):
                return True
        return False

    vpart = [v for v in g.vertices if v in G0 and (g.out_degree(v) == 0 or emits_outside(v))]
    namer = Namer(set(vpart))
    vid = {}
    prov: dict[str, dict] = {v: {"kind": "vertex", "of": v} for v in vpart}
    labels = {}
    for iid in edges:
        vid[iid] = namer.fresh(iid.replace("#", "_"))
        prov[vid[iid]] = {"kind": "edge_vertex", "of": iid}
        labels[vid[iid]] = iid
    for v in vpart:
        vid[v] = v

    bundles = []
    new_vertices = edges + vpart
    for e in edges:
        r = g.edge(e)[0].target
        for f in new_vertices:
            s = f if "#" not in f else g.edge(f)[0].source
            if s == r:
                bid = namer.fresh(f"{vid[e]}__{vid[f]}")
                bundles.append(Bundle(bid, vid[e], vid[f], 1))
                prov[bid] = {"kind": "pair", "of": [e, f]}
    graph = Graph(f"{g.name}_G", tuple(vid[x] for x in new_vertices), tuple(bundles))
    for v in vpart:
        if graph.out_degree(v) != 0:
            raise InvariantViolation(f"vertex {v} of the G0-part is not a sink")
    return ConstructionResult(graph, False, prov, labels)


# -- paths into X ∪ B -----------------------------------------------------------


def _validate_xb(g: Graph, X, B, allow_empty=False):
    X = g.require(X)
    B = g.require(B)
    if not X and not allow_empty:
        raise PreconditionError("X must be nonempty")
    if not check_subset(g, X):
        raise PreconditionError(f"{sorted(X)} is not hereditary and saturated")
    bad = x_fin_inf(g, X).vertices
    if not B <= bad:
        raise PreconditionError(f"B must lie in X^fin_inf = {sorted(bad)}")
    return X, B


def _u_reaches(g: Graph, U: frozenset[str], T: frozenset[str]) -> frozenset[str]:
    """Vertices of U with a path through U ending by one edge in T."""
    good = {v for v in U if any(w in T for w in g.successors[v])}
    changed = True
    while changed:
        changed = False
        for v in U:
            if v not in good and any(w in good for w in g.successors[v]):
                good.add(v)
                changed = True
    return frozenset(good)


def f_infinite(g: Graph, X, B, targets=None) -> tuple[bool, str]:
    """Exact test whether infinitely many F-paths end in ``targets`` (default X ∪ B)."""
    XB = X | B
    T = XB if targets is None else frozenset(targets)
    U = frozenset(g.vertices) - XB
    good = _u_reaches(g, U, T)
    sub = Graph(g.name, g.vertices, tuple(b for b in g.bundles if b.source in U and b.target in U))
    for comp in strongly_connected_components(sub):
        if comp.has_internal_edge and comp.vertices[0] in good:
            return True, f"cycle through {comp.vertices[0]} outside X∪B reaches the targets"
    for b in g.bundles:
        if not is_omega(b.mult):
            continue
        # B-vertices send their infinite bundles into X, where no F-path continues
        if b.source in U and (b.target in T or b.target in good):
            return True, f"infinite bundle {b.id} lies on paths into the targets"
    return False, "no cycle outside X∪B feeds the targets and no infinite bundle is used"


def _families(g: Graph, X, B, depth: int) -> list[PathFamily]:
    XB = X | B
    fams = []

    def walk(start, v, seq, count):
        for b in g.out_bundles[v]:
            c = count * b.mult
            nseq = seq + (b.id,)
            if b.target in XB:
                if not (len(nseq) == 1 and start in B and b.target in X):
                    fams.append(PathFamily(nseq, start, b.target, c))
            elif len(nseq) < depth:
                walk(start, b.target, nseq, c)

    for s in g.vertices:
        if s not in X:
            walk(s, s, (), 1)
    fams.sort(key=lambda f: (len(f.bundles), g.index[f.source], [g.bundle_index[b] for b in f.bundles]))
    return fams


def f_paths(g: Graph, X, B=(), depth: int = DEFAULT_DEPTH) -> FResult:
    """Families of paths from outside X ending in X ∪ B, up to ``depth`` edges.

    Single edges from B into X are excluded.  Finiteness of the whole
    collection is decided exactly and does not depend on ``depth``.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    X, B = _validate_xb(g, X, B)
    infinite, reason = f_infinite(g, X, B)
    return FResult(tuple(_families(g, X, B, depth)), not infinite, depth, reason)


def _family_instances(g: Graph, fam: PathFamily, omega_cap: int):
    lists = [g.bundle_by_id[b].instance_ids(omega_cap=omega_cap) for b in fam.bundles]
    combos = itertools.product(*lists)
    if is_omega(fam.count):
        combos = itertools.islice(combos, omega_cap)
    return list(combos)


def _path_label(g: Graph, inst: tuple[str, ...]) -> str:
    parts = []
    for iid in inst:
        bid, _k = split_instance(iid)
        parts.append(bid if g.bundle_by_id[bid].mult == 1 else iid)
    return "(" + ",".join(parts) + ")"


def build_ideal_graph(
    g: Graph, X, B=(), depth: int = DEFAULT_DEPTH, omega_cap: int = DEFAULT_OMEGA_CAP
) -> ConstructionResult:
    """The graph whose algebra is the gauge-invariant ideal named by (X, B).

    A finite F-path collection is materialized in full; an infinite one is
    cut at ``depth`` edges and ``omega_cap`` instances per infinite family,
    and the result is flagged truncated.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    X, B = _validate_xb(g, X, B)
    infinite, _ = f_infinite(g, X, B)
    U = frozenset(g.vertices) - X - B
    fams = _families(g, X, B, depth if infinite else len(U) + 1)

    base = [v for v in g.vertices if v in X or v in B]
    namer = Namer(set(base) | {b.id for b in g.bundles})
    prov: dict[str, dict] = {v: {"kind": "vertex", "of": v} for v in base}
    labels: dict[str, str] = {}
    bundles = []
    for b in g.bundles:
        if b.source in X or (b.source in B and b.target in X):
            bundles.append(b)
            prov[b.id] = {"kind": "edge", "of": b.id}
    fverts = []
    for fam in fams:
        for inst in _family_instances(g, fam, omega_cap):
            lab = _path_label(g, inst)
            vid = namer.fresh("F_" + "_".join(lab.strip("()").split(",")))
            fverts.append(vid)
            labels[vid] = lab
            prov[vid] = {"kind": "path", "of": list(inst)}
            eid = namer.fresh(f"bar_{vid}")
            bundles.append(Bundle(eid, vid, fam.target, 1))
            prov[eid] = {"kind": "path_edge", "of": list(inst)}
    graph = Graph(f"{g.name}_ideal", tuple(base + fverts), tuple(bundles))
    result = ConstructionResult(graph, infinite, prov, labels)
    check_ideal_graph(g, X, B, result)
    return result


def check_ideal_graph(g: Graph, X, B, result: ConstructionResult) -> None:
    """Structural laws of an ideal graph; raises InvariantViolation."""
    h = result.graph
    for v in B:
        bs = h.out_bundles[v]
        if any(b.target not in X for b in bs) or not is_omega(h.out_degree(v)):
            raise InvariantViolation(f"B-vertex {v} must emit infinitely many edges into X only")
    for v in h.vertices:
        if result.provenance[v]["kind"] == "path":
            bs = h.out_bundles[v]
            if len(bs) != 1 or bs[0].mult != 1 or bs[0].target not in (X | B):
                raise InvariantViolation(f"F-vertex {v} must emit exactly one edge into X ∪ B")
    for comp in strongly_connected_components(h):
        if comp.has_internal_edge and not set(comp.vertices) <= X:
            raise InvariantViolation(f"ideal-graph loop through {comp.vertices} leaves X")


# -- quotients -----------------------------------------------------------------


def build_quotient_graph(g: Graph, spec: IdealSpec) -> ConstructionResult:
    """Graph of the quotient by the ideal (X, B): drop X, add sinks β(v)."""
    X, B = _validate_xb(g, spec.X, spec.B, allow_empty=True)
    if len(X) == len(g.vertices):
        raise PreconditionError("quotient by the whole vertex set is zero and has no graph")
    extra = [v for v in g.vertices if v in x_fin_inf(g, X).vertices and v not in B]
    keep = [v for v in g.vertices if v not in X]
    namer = Namer(set(g.vertices) | {b.id for b in g.bundles})
    prov: dict[str, dict] = {v: {"kind": "vertex", "of": v} for v in keep}
    labels = {}
    beta = {}
    for v in extra:
        beta[v] = namer.fresh(f"beta_{v}")
        prov[beta[v]] = {"kind": "beta", "of": v}
        labels[beta[v]] = f"β({v})"
    bundles = []
    for b in g.bundles:
        if b.target in X:
            continue
        bundles.append(b)
        prov[b.id] = {"kind": "edge", "of": b.id}
    for b in g.bundles:
        if b.target in beta:
            cid = namer.fresh(f"{b.id}_beta")
            bundles.append(Bundle(cid, b.source, beta[b.target], b.mult))
            prov[cid] = {"kind": "beta_copy", "of": b.id, "sink": beta[b.target]}
    graph = Graph(f"{g.name}_quotient" if X else g.name, tuple(keep + [beta[v] for v in extra]), tuple(bundles))
    for s in beta.values():
        if graph.out_degree(s) != 0:
            raise InvariantViolation(f"{s} must be a sink")
    return ConstructionResult(graph, False, prov, labels)


# -- the stable-ideal decomposition -------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    X0: frozenset[str]
    X: frozenset[str]
    ideal: ConstructionResult | None
    quotient: ConstructionResult | None  # None when X is every vertex
    hypothesis_violated: bool | None  # None: not checked (graph above the cap)
    pi_tail: object = None


def two_return_vertices(g: Graph) -> dict[str, tuple[str, str]]:
    """Vertices v with two distinct edge instances e, f out of v whose ranges reach back to v."""
    found = {}
    for v in g.vertices:
        back = []
        for b in g.out_bundles[v]:
            if v in g.reach[b.target]:
                back.extend(b.instance_ids(omega_cap=2))
            if len(back) >= 2:
                found[v] = (back[0], back[1])
                break
    return found


def stable_ideal_decomposition(
    g: Graph, depth: int = DEFAULT_DEPTH, omega_cap: int = DEFAULT_OMEGA_CAP, cap: int | None = None
) -> Decomposition:
    from .classify import has_isolated_loops, pi_simple_unital_quotient
    from .graph import max_vertices

    X0 = frozenset(two_return_vertices(g))
    X = hersat_closure(g, X0).vertices
    violated = None
    pi_tail = None
    if len(g.vertices) <= (max_vertices() if cap is None else cap):
        pi_tail = pi_simple_unital_quotient(g, cap=cap)
        violated = pi_tail is not None
    ideal = build_ideal_graph(g, X, (), depth, omega_cap) if X else None
    quotient = build_quotient_graph(g, IdealSpec(X, frozenset())) if len(X) < len(g.vertices) else None
    if quotient is not None and not has_isolated_loops(quotient.graph):
        raise InvariantViolation("quotient of the stable-ideal decomposition has non-isolated loops")
    return Decomposition(X0, X, ideal, quotient, violated, pi_tail)


# -- gauge-invariant ideals ----------------------------------------------------


def enumerate_gauge_ideals(g: Graph, cap: int = IDEAL_CAP) -> list[IdealSpec]:
    out = []
    for H in enumerate_hersat(g, cap=cap):
        bad = g.sort_vertices(x_fin_inf(g, H.vertices).vertices)
        for k in range(len(bad) + 1):
            for B in itertools.combinations(bad, k):
                out.append(IdealSpec(H.vertices, frozenset(B)))
    return out


def gauge_primitive_ideals(g: Graph, cap: int = IDEAL_CAP) -> list[IdealSpec]:
    """Primitive gauge-invariant ideals: one per gamma tail, one per breaking vertex."""
    out = []
    for t in maximal_tails(g, cap=cap):
        if t.cls != GAMMA:
            continue
        om = omega(g, t.vertices)
        tag = "tail:" + ",".join(g.sort_vertices(t.vertices))
        out.append(IdealSpec(om, x_fin_inf(g, om).vertices, tag))
    for v in g.sort_vertices(breaking_vertices(g)):
        om = omega(g, {v})
        out.append(IdealSpec(om, x_fin_inf(g, om).vertices - {v}, f"breaking:{v}"))
    return out


__all__ = [
    "OMEGA",
    "ConstructionResult",
    "Decomposition",
    "FResult",
    "PathFamily",
    "build_ideal_graph",
    "build_quotient_graph",
    "build_subgraph",
    "enumerate_gauge_ideals",
    "f_infinite",
    "f_paths",
    "gauge_primitive_ideals",
    "stable_ideal_decomposition",
    "two_return_vertices",
]
