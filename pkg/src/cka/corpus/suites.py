"""Cross-checks between the decision procedures and the constructions.

Each check is an implication that must hold on every input graph; a failing
check names the graph and what went wrong.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..classify import (
    has_isolated_loops,
    is_type_I,
    no_loop_has_exit,
    pi_simple_unital_quotient,
    stable_rank,
)
from ..constructions import build_subgraph, stable_ideal_decomposition
from ..errors import InvariantViolation
from ..graph import Graph, is_omega, strongly_connected_components
from ..traces import bounded_graph_trace, validate_certificate, validate_witness

CHECKS = ("trichotomy", "no_exit_isolated", "isolated_consequences", "quotient_isolated",
          "ideal_loops_in_X", "subgraph_isolated", "trace_audit")


@dataclass(frozen=True)
class ConsistencyReport:
    graph: str
    results: dict = field(default_factory=dict)  # check -> (passed, detail)

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.results.values())

    def failures(self) -> list[str]:
        return [f"{self.graph}: {k}: {d}" for k, (p, d) in self.results.items() if not p]


def random_selection(g: Graph, rng: random.Random) -> tuple[set[str], set[str]]:
    """A random finite (G0, G1) with r(G1) inside G0; ω bundles offer instances #0 and #1."""
    pool = [iid for b in g.bundles for iid in b.instance_ids(omega_cap=2 if is_omega(b.mult) else None)]
    G1 = {iid for iid in pool if rng.randrange(2)}
    G0 = {g.edge(iid)[0].target for iid in G1}
    G0 |= {v for v in g.vertices if rng.randrange(3) == 0}
    if not G0 and not G1:
        G0 = {g.vertices[0]}
    return G0, G1


def consistency_suite(g: Graph, seed: int = 0, subgraph_samples: int = 2) -> ConsistencyReport:
    res: dict[str, tuple[bool, str]] = {}
    exits = no_loop_has_exit(g)
    isolated = has_isolated_loops(g)
    pi = pi_simple_unital_quotient(g)

    try:
        verdict = stable_rank(g).label
        res["trichotomy"] = (not (exits and pi is not None), f"stable rank {verdict}")
    except InvariantViolation as exc:
        res["trichotomy"] = (False, str(exc))

    res["no_exit_isolated"] = (not exits or bool(isolated), "no exits but loops are not isolated")

    if isolated:
        t1 = is_type_I(g).verdict
        res["isolated_consequences"] = (t1 and pi is None, f"type I {t1}, pi quotient {pi is not None}")
    else:
        res["isolated_consequences"] = (True, "loops not isolated; nothing to check")

    try:
        dec = stable_ideal_decomposition(g)
        q_ok = dec.quotient is None or bool(has_isolated_loops(dec.quotient.graph))
        res["quotient_isolated"] = (q_ok, f"X0={sorted(dec.X0)} X={sorted(dec.X)}")
        if dec.ideal is not None:
            h = dec.ideal.graph
            bad = [
                c.vertices
                for c in strongly_connected_components(h)
                if c.has_internal_edge and not set(c.vertices) <= dec.X
            ]
            res["ideal_loops_in_X"] = (not bad, f"loops outside X: {bad}" if bad else "all loops in X")
        else:
            res["ideal_loops_in_X"] = (True, "X empty; no ideal graph")
    except InvariantViolation as exc:
        res["quotient_isolated"] = (False, str(exc))
        res["ideal_loops_in_X"] = (False, "decomposition failed")

    if isolated:
        rng = random.Random(seed)
        fails = []
        for _ in range(subgraph_samples):
            G0, G1 = random_selection(g, rng)
            sub = build_subgraph(g, G0, G1).graph
            if not has_isolated_loops(sub):
                fails.append(f"G0={sorted(G0)} G1={sorted(G1)}")
        res["subgraph_isolated"] = (not fails, "; ".join(fails) or f"{subgraph_samples} samples")
    else:
        res["subgraph_isolated"] = (True, "loops not isolated; nothing to check")

    tr = bounded_graph_trace(g)
    if tr.feasible:
        res["trace_audit"] = (validate_witness(g, tr.witness), "witness")
    else:
        res["trace_audit"] = (validate_certificate(g, tr.certificate), "certificate")
    return ConsistencyReport(g.name, res)
