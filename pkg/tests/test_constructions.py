import random

import pytest
from conftest import graphs
from hypothesis import given
from hypothesis import strategies as st

from cka.classify import has_isolated_loops
from cka.constructions import (
    build_ideal_graph,
    build_quotient_graph,
    build_subgraph,
    enumerate_gauge_ideals,
    f_paths,
    gauge_primitive_ideals,
    stable_ideal_decomposition,
)
from cka.corpus.oracles import brute_f_infinite
from cka.corpus.suites import random_selection
from cka.errors import PreconditionError
from cka.graph import OMEGA, parse_graph, strongly_connected_components
from cka.subsets import IdealSpec, enumerate_hersat, x_fin_inf

X = {"x1", "x2", "x3"}


def _edges(res):
    return {(b.source, b.target) for b in res.graph.bundles}


def test_subgraph_examples(fx):
    r = build_subgraph(fx("o2"), {"v"}, {"a#0"})
    assert set(r.graph.vertices) == {"a_0", "v"}
    assert _edges(r) == {("a_0", "a_0"), ("a_0", "v")}
    assert r.provenance["a_0"] == {"kind": "edge_vertex", "of": "a#0"}
    r = build_subgraph(fx("ab"), {"a", "b"}, {"e#0"})
    assert set(r.graph.vertices) == {"e_0", "b"} and _edges(r) == {("e_0", "b")}
    r = build_subgraph(fx("loop"), {"v"}, {"a#0"})
    assert r.graph.vertices == ("a_0",) and _edges(r) == {("a_0", "a_0")}


def test_subgraph_errors(fx):
    with pytest.raises(PreconditionError):
        build_subgraph(fx("ab"), {"a"}, {"e#0"})
    with pytest.raises(PreconditionError):
        build_subgraph(fx("ex12"), X | {"b"}, {"i"})
    r = build_subgraph(fx("ex12"), X | {"b"}, {"i#0", "i#7"})
    assert "b" in r.graph.vertices


@given(graphs(max_vertices=6), st.integers(0, 2**32))
def test_subgraph_sink_law_and_isolation(g, seed):
    G0, G1 = random_selection(g, random.Random(seed))
    r = build_subgraph(g, G0, G1)
    for v, p in r.provenance.items():
        if p["kind"] == "vertex":
            assert r.graph.out_degree(v) == 0
    if has_isolated_loops(g):
        assert has_isolated_loops(r.graph)


def _fams(fr):
    return {(f.label(), f.count) for f in fr.families}


def test_f_paths_breaking_edge(fx):
    fr = f_paths(fx("ex12"), X, {"b"}, depth=3)
    want = {"(f)", "(e,f)", "(g)", "(e,g)", "(h)", "(d,h)", "(d,d,h)"}
    assert _fams(fr) == {(w, 1) for w in want}
    assert not fr.is_finite


def test_f_paths_infinite_bundle(fx):
    fr = f_paths(fx("ex33"), X, (), depth=1)
    assert ("(v3)", OMEGA) in _fams(fr) and not fr.is_finite


def test_f_paths_two_loops_and_sink(fx):
    fr = f_paths(fx("o2sink"), {"s"}, (), depth=2)
    assert _fams(fr) == {("(c)", 1), ("(a,c)", 1), ("(b,c)", 1)}
    assert not fr.is_finite


def test_f_paths_errors(fx):
    with pytest.raises(PreconditionError):
        f_paths(fx("ex33"), {"x2", "x3"})
    with pytest.raises(PreconditionError):
        f_paths(fx("ex33"), X, {"b1"})
    with pytest.raises(PreconditionError):
        f_paths(fx("ex33"), X, depth=0)
    with pytest.raises(PreconditionError):
        f_paths(fx("ex33"), set())


@given(graphs(max_vertices=6, max_mult=2))
def test_f_finiteness_matches_path_counting(g):
    for h in enumerate_hersat(g):
        if h.is_trivial:
            continue
        bad = x_fin_inf(g, h.vertices).vertices
        for B in (frozenset(), bad):
            assert f_paths(g, h.vertices, B, 2).is_finite != brute_f_infinite(g, h.vertices, B)


def test_ideal_graph_breaking_edge(fx):
    r = build_ideal_graph(fx("ex12"), X, {"b"}, depth=3)
    g = r.graph
    assert r.truncated
    assert {"t1", "t2", "t3"} <= {b.id for b in g.bundles}
    assert [(b.target, b.mult) for b in g.out_bundles["b"]] == [("x1", OMEGA)]
    targets = {r.labels[v]: g.out_bundles[v][0].target for v in r.labels}
    assert targets == {
        "(f)": "b", "(e,f)": "b",
        "(g)": "x2", "(e,g)": "x2",
        "(h)": "x3", "(d,h)": "x3", "(d,d,h)": "x3",
    }
    assert all(len(g.out_bundles[v]) == 1 for v in r.labels)


def test_ideal_graph_infinite_bundle(fx):
    r = build_ideal_graph(fx("ex33"), X, (), depth=2, omega_cap=3)
    g = r.graph
    fv = {r.labels[v]: v for v in r.labels}
    assert g.out_bundles[fv["(v1)"]][0].target == "x1"
    assert sum(lab.startswith("(v3#") for lab in fv) == 3


def test_ideal_graph_whole_vertex_set():
    g = parse_graph("graph g\nvertex v\nvertex w\nedge a v w\nedge b w w")
    r = build_ideal_graph(g, g.vertices)
    assert not r.truncated
    assert r.graph.vertices == g.vertices and r.graph.bundles == g.bundles


@given(graphs(max_vertices=6))
def test_ideal_graph_loops_stay_in_X(g):
    for h in enumerate_hersat(g):
        if not h.vertices:
            continue
        B = x_fin_inf(g, h.vertices).vertices
        r = build_ideal_graph(g, h.vertices, B, depth=3, omega_cap=2)
        for c in strongly_connected_components(r.graph):
            if c.has_internal_edge:
                assert set(c.vertices) <= h.vertices
        assert r.truncated == (not f_paths(g, h.vertices, B, 1).is_finite)
        assert set(r.provenance) == set(r.graph.vertices) | {b.id for b in r.graph.bundles}


def test_quotient_examples(fx):
    r = build_quotient_graph(fx("ex33"), IdealSpec(frozenset(X)))
    g = r.graph
    assert len(g.vertices) == 4 and r.labels == {"beta_b3": "β(b3)"}
    assert {(b.id, b.source, b.target) for b in g.bundles} == {
        ("c1", "b1", "b2"), ("c2", "b2", "b3"), ("c3", "b3", "b2"), ("c2_beta", "b2", "beta_b3"),
    }
    assert g.out_degree("beta_b3") == 0
    ex12 = fx("ex12")
    assert build_quotient_graph(ex12, IdealSpec(frozenset())).graph == ex12
    r = build_quotient_graph(ex12, IdealSpec(frozenset(X), frozenset({"b"})))
    assert set(r.graph.vertices) == {"b", "u", "w"}
    assert {b.id for b in r.graph.bundles} == {"e", "f", "d"}


def test_quotient_errors(fx):
    with pytest.raises(PreconditionError):
        build_quotient_graph(fx("ex33"), IdealSpec(frozenset({"x2", "x3"})))
    with pytest.raises(PreconditionError):
        build_quotient_graph(fx("o2"), IdealSpec(frozenset({"v"})))


def test_decomposition(fx):
    d = stable_ideal_decomposition(fx("ex33"))
    assert d.X0 == {"x1"} and d.X == X and d.hypothesis_violated is False
    d = stable_ideal_decomposition(fx("o2"))
    assert d.X0 == d.X == {"v"} and d.hypothesis_violated and d.quotient is None
    d = stable_ideal_decomposition(fx("loop"))
    assert d.X0 == d.X == frozenset() and d.ideal is None and d.quotient.graph == fx("loop")


def test_omega_bundle_puts_source_in_X0():
    g = parse_graph("graph g\nvertex v\nvertex w\nedge a v w xinf\nedge b w v")
    assert stable_ideal_decomposition(g).X0 == {"v"}


@given(graphs(max_vertices=7))
def test_decomposition_quotient_isolated(g):
    d = stable_ideal_decomposition(g)
    if d.quotient is not None:
        assert has_isolated_loops(d.quotient.graph)


def _pairs(specs):
    return [(set(s.X), set(s.B)) for s in specs]


def test_gauge_ideals(fx):
    assert _pairs(enumerate_gauge_ideals(fx("o2"))) == [(set(), set()), ({"v"}, set())]
    assert _pairs(enumerate_gauge_ideals(fx("loop"))) == [(set(), set()), ({"v"}, set())]
    ex12 = _pairs(enumerate_gauge_ideals(fx("ex12")))
    assert (X, set()) in ex12 and (X, {"b"}) in ex12


def test_primitive_gauge_ideals(fx):
    specs = gauge_primitive_ideals(fx("o2"))
    assert _pairs(specs) == [(set(), set())] and specs[0].origin == "tail:v"
    assert gauge_primitive_ideals(fx("loop")) == []
    ex12 = gauge_primitive_ideals(fx("ex12"))
    brk = [s for s in ex12 if s.origin == "breaking:b"]
    assert _pairs(brk) == [({"x1", "x2", "x3", "w"}, set())]
