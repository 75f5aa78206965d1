from fractions import Fraction

import pytest
from conftest import graphs
from hypothesis import given

from cka.constructions import stable_ideal_decomposition
from cka.errors import PreconditionError
from cka.graph import is_omega, parse_graph
from cka.traces import (
    bounded_graph_trace,
    is_stable_finite,
    trace_system,
    validate_certificate,
    validate_witness,
    verify_stable_ideal,
)


def test_two_loops_have_no_trace(fx):
    tr = bounded_graph_trace(fx("o2"))
    assert not tr.feasible
    assert validate_certificate(fx("o2"), tr.certificate)


def test_single_loop_trace(fx):
    tr = bounded_graph_trace(fx("loop"))
    assert tr.witness == {"v": 1}


def test_edge_trace(fx):
    tr = bounded_graph_trace(fx("ab"))
    assert tr.witness == {"a": Fraction(1, 2), "b": Fraction(1, 2)}
    assert validate_witness(fx("ab"), tr.witness)


def test_system_rows(fx):
    rows = {r.label: r for r in trace_system(fx("ex33"))}
    assert rows["GT1[x1]"].coeffs == {"x1": 0, "x2": -1}
    assert rows["INF[b3->x3]"].coeffs == {"x3": 1}
    assert rows["GT2[b3]"].coeffs == {"b3": -1, "b2": 1} and rows["GT2[b3]"].sense == "<="
    assert rows["NORM"].rhs == 1 and "GT1[x3]" in rows


def test_validate_rejects_bad_input(fx):
    assert not validate_witness(fx("ab"), {"a": 1, "b": 0})
    assert not validate_witness(fx("ab"), {"a": Fraction(1, 4), "b": Fraction(1, 4)})
    assert not validate_certificate(fx("o2"), {"NORM": 1})
    assert not validate_certificate(fx("o2"), {"BOGUS": 1})


def test_witness_rejects_mass_on_infinite_targets(fx):
    g = fx("ex33")
    psi = {v: Fraction(1, 6) for v in g.vertices}
    assert not validate_witness(g, psi)


@given(graphs(max_vertices=6, max_mult=3))
def test_outcome_always_revalidates(g):
    tr = bounded_graph_trace(g)
    if tr.feasible:
        assert validate_witness(g, tr.witness)
        # rescaling and renormalizing gives the same function back
        doubled = {v: 2 * x for v, x in tr.witness.items()}
        total = sum(doubled.values())
        assert validate_witness(g, {v: x / total for v, x in doubled.items()})
        for b in g.bundles:
            if is_omega(b.mult):
                assert tr.witness[b.target] == 0
    else:
        assert validate_certificate(g, tr.certificate)


@given(graphs(max_vertices=7, max_mult=3, acyclic=True))
def test_acyclic_graphs_have_traces(g):
    tr = bounded_graph_trace(g)
    assert tr.feasible and validate_witness(g, tr.witness)


def test_stable_ideal_of_infinite_bundle_graph(fx):
    rep = verify_stable_ideal(fx("ex33"))
    assert rep.stable and rep.loops_ok and rep.trace_free
    assert {lc.cycle.edges for lc in rep.loops} == {("l1#0",), ("p#0", "q#0"), ("l3#0",)}
    assert rep.preview_certificate
    assert any("x1" in line for line in rep.reasoning)


def test_stable_ideal_fails_honestly(fx):
    rep = verify_stable_ideal(fx("o2sink"))
    assert not rep.loops_ok and not rep.stable


def test_stable_ideal_needs_nonempty_X(fx):
    with pytest.raises(PreconditionError):
        verify_stable_ideal(fx("loop"))


@given(graphs(max_vertices=6))
def test_symbolic_argument_matches_lp(g):
    d = stable_ideal_decomposition(g)
    if d.X:
        rep = verify_stable_ideal(g, decomposition=d)
        if rep.trace_free:
            assert rep.preview_certificate


def test_finite_stability(fx):
    r = is_stable_finite(fx("loop"))
    assert not r and "cycle" in r.reason
    r = is_stable_finite(fx("ab"))
    assert not r and "trace" in r.reason
    assert "cycle" in is_stable_finite(fx("o2")).reason


@given(graphs(max_vertices=6))
def test_finite_graphs_never_stable(g):
    assert not is_stable_finite(g)


def test_infinite_emitter_inequality():
    g = parse_graph("graph g\nvertex v\nvertex w\nvertex s\nedge a v w xinf\nedge b v s")
    tr = bounded_graph_trace(g)
    assert tr.feasible and tr.witness["w"] == 0 and tr.witness["v"] >= tr.witness["s"]
