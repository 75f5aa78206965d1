"""Bounded graph traces by exact rational feasibility, and ideal stability checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .constructions import (
    DEFAULT_DEPTH,
    DEFAULT_OMEGA_CAP,
    Decomposition,
    f_infinite,
    stable_ideal_decomposition,
    two_return_vertices,
)
from .errors import PreconditionError
from .graph import (
    Cycle,
    Graph,
    is_omega,
    restrict,
    strongly_connected_components,
    vertex_simple_cycles,
)
from .subsets import hersat_closure


@dataclass(frozen=True)
class Constraint:
    label: str
    coeffs: dict  # vertex -> int coefficient
    sense: str  # "=" or "<="
    rhs: int


def trace_system(g: Graph) -> list[Constraint]:
    """Linear constraints on nonnegative ψ: vertices -> Q encoding a nonzero bounded trace.

    Finite emitters get the equality ψ(v) = Σ ψ(r(e)); an infinite emitter
    forces ψ = 0 on every target of an infinite bundle and gets the inequality
    ψ(v) >= Σ over its finite bundles.  The last row normalizes Σ ψ = 1.
    """
    rows = []
    for v in g.vertices:
        d = g.out_degree(v)
        if d == 0:
            continue
        if not is_omega(d):
            coeffs = {v: 1}
            for b in g.out_bundles[v]:
                coeffs[b.target] = coeffs.get(b.target, 0) - b.mult
            rows.append(Constraint(f"GT1[{v}]", coeffs, "=", 0))
            continue
        zeroed = []
        coeffs = {v: -1}
        for b in g.out_bundles[v]:
            if is_omega(b.mult):
                if b.target not in zeroed:
                    zeroed.append(b.target)
            else:
                coeffs[b.target] = coeffs.get(b.target, 0) + b.mult
        for w in zeroed:
            rows.append(Constraint(f"INF[{v}->{w}]", {w: 1}, "=", 0))
        rows.append(Constraint(f"GT2[{v}]", coeffs, "<=", 0))
    rows.append(Constraint("NORM", {v: 1 for v in g.vertices}, "=", 1))
    return rows


def _matrices(g: Graph, rows: list[Constraint]):
    eq = [r for r in rows if r.sense == "="]
    ub = [r for r in rows if r.sense == "<="]

    def dense(r):
        return [r.coeffs.get(v, 0) for v in g.vertices]

    return eq, ub, [dense(r) for r in eq], [r.rhs for r in eq], [dense(r) for r in ub], [r.rhs for r in ub]


@dataclass(frozen=True)
class TraceOutcome:
    witness: dict | None = None  # vertex -> Fraction
    certificate: dict | None = None  # constraint label -> Fraction multiplier

    @property
    def feasible(self) -> bool:
        return self.witness is not None


def bounded_graph_trace(g: Graph) -> TraceOutcome:
    rows = trace_system(g)
    eq, ub, A_eq, b_eq, A_ub, b_ub = _matrices(g, rows)
    res = lp.solve(A_eq, b_eq, A_ub, b_ub, len(g.vertices))
    if res.feasible:
        return TraceOutcome(witness=dict(zip(g.vertices, res.x)))
    cert = {r.label: y for r, y in zip(eq, res.y_eq)}
    cert.update({r.label: y for r, y in zip(ub, res.y_ub)})
    return TraceOutcome(certificate=cert)


def validate_witness(g: Graph, psi: dict) -> bool:
    """Check a trace directly against the graph, independently of the LP encoding."""
    psi = {v: Fraction(psi.get(v, 0)) for v in g.vertices}
    if any(x < 0 for x in psi.values()) or sum(psi.values()) != 1:
        return False
    for v in g.vertices:
        d = g.out_degree(v)
        if d == 0:
            continue
        finite_sum = sum((b.mult * psi[b.target] for b in g.out_bundles[v] if not is_omega(b.mult)), Fraction(0))
        if is_omega(d):
            if any(psi[b.target] != 0 for b in g.out_bundles[v] if is_omega(b.mult)):
                return False
            if psi[v] < finite_sum:
                return False
        elif psi[v] != finite_sum:
            return False
    return True


def validate_certificate(g: Graph, certificate: dict) -> bool:
    """Re-derive the constraint rows from ``g`` and check the Farkas combination exactly."""
    rows = trace_system(g)
    if set(certificate) - {r.label for r in rows}:
        return False
    eq, ub, A_eq, b_eq, A_ub, b_ub = _matrices(g, rows)
    y_eq = [Fraction(certificate.get(r.label, 0)) for r in eq]
    y_ub = [Fraction(certificate.get(r.label, 0)) for r in ub]
    return lp.check_certificate(A_eq, b_eq, A_ub, b_ub, y_eq, y_ub, len(g.vertices))


@dataclass(frozen=True)
class LoopConnectors:
    cycle: Cycle
    infinite: bool
    reason: str


@dataclass(frozen=True)
class StabilityReport:
    loops: tuple[LoopConnectors, ...]
    trace_free: bool
    reasoning: tuple[str, ...] = field(default=())
    preview_certificate: bool | None = None

    @property
    def loops_ok(self) -> bool:
        return all(lc.infinite for lc in self.loops)

    @property
    def stable(self) -> bool:
        return self.loops_ok and self.trace_free


def _x_cycles(g: Graph, X: frozenset[str]) -> list[Cycle]:
    # ideal-graph loops are exactly the loops of g inside X
    return vertex_simple_cycles(restrict(g, X))


def verify_stable_ideal(
    g: Graph,
    depth: int = DEFAULT_DEPTH,
    decomposition: Decomposition | None = None,
    omega_cap: int = DEFAULT_OMEGA_CAP,
) -> StabilityReport:
    """Check the two stability conditions for the ideal of the stable-ideal decomposition.

    Loops of the ideal graph live in X.  A loop has infinitely many connecting
    vertices iff infinitely many F-paths end at X-vertices reaching it.  No
    nonzero bounded trace exists because ψ vanishes on every two-return vertex
    and the hereditary saturated closure of those vertices is the whole ideal
    graph; the finite preview is also checked by the exact LP.
    """
    dec = decomposition or stable_ideal_decomposition(g, depth, omega_cap)
    X = dec.X
    if not X or dec.ideal is None:
        raise PreconditionError("decomposition has empty X; there is no ideal to verify")
    B = frozenset()
    loops = []
    for c in _x_cycles(g, X):
        T = frozenset(x for x in X if g.reach[x] & set(c.vertices))
        inf, reason = f_infinite(g, X, B, T)
        loops.append(LoopConnectors(c, inf, reason))
    reasoning = []
    pairs = two_return_vertices(g)
    for v in sorted(dec.X0, key=g.index.__getitem__):
        e, f = pairs[v]
        reasoning.append(f"{v}: edges {e} and {f} both return to {v}, so ψ({v}) >= 2ψ({v}) and ψ({v}) = 0")
    h = dec.ideal.graph
    closure = hersat_closure(h, dec.X0).vertices
    covers = closure == frozenset(h.vertices)
    reasoning.append(
        "closure of the two-return vertices in the ideal graph "
        + ("is every vertex" if covers else f"misses {sorted(set(h.vertices) - closure)}")
    )
    reasoning.append("every path vertex emits exactly one edge into X, so the closure absorbs all of them")
    preview = bounded_graph_trace(h)
    if not preview.feasible:
        reasoning.append("the finite preview admits no normalized trace (exact certificate)")
    return StabilityReport(
        tuple(loops),
        covers and bool(dec.X0),
        tuple(reasoning),
        preview_certificate=(not preview.feasible and validate_certificate(h, preview.certificate)),
    )


@dataclass(frozen=True)
class FiniteStability:
    stable: bool
    reason: str

    def __bool__(self):
        return self.stable


def is_stable_finite(g: Graph) -> FiniteStability:
    """Stability test for finite-vertex graphs; reports the failing condition.

    A loop in a finite graph has only finitely many connecting vertices, and an
    acyclic finite graph always carries a bounded trace, so the answer is
    always negative here; the value lies in the reason.
    """
    for comp in strongly_connected_components(g):
        if comp.has_internal_edge:
            return FiniteStability(False, f"cycle through {comp.vertices[0]} has finitely many connecting vertices")
    tr = bounded_graph_trace(g)
    if tr.feasible:
        return FiniteStability(False, "a nonzero bounded graph trace exists")
    return FiniteStability(True, "no loops and no nonzero bounded graph trace")
