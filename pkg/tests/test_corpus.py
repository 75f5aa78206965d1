from fractions import Fraction
from pathlib import Path

import pytest

from cka.constructions import (
    build_ideal_graph,
    build_quotient_graph,
    f_paths,
    stable_ideal_decomposition,
)
from cka.corpus import (
    FIXTURES,
    GeneratorParams,
    consistency_suite,
    fixture_path,
    load_fixture,
    oracle_suite,
    random_graph,
)
from cka.corpus.suites import CHECKS
from cka.errors import CapExceededError, PreconditionError
from cka.graph import Graph, parse_graph, serialize_graph
from cka.subsets import IdealSpec

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_roundtrip(name):
    g = load_fixture(name)
    assert g.name == name
    assert parse_graph(serialize_graph(g)) == g


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture_path("nope")


def test_breaking_edge_fixture_reproduces_listing():
    g = load_fixture("ex12")
    X = {"x1", "x2", "x3"}
    fams = {f.label() for f in f_paths(g, X, {"b"}, 3).families}
    assert fams == {"(f)", "(e,f)", "(g)", "(e,g)", "(h)", "(d,h)", "(d,d,h)"}
    r = build_ideal_graph(g, X, {"b"}, 3)
    assert len(r.labels) == 7


def test_infinite_bundle_fixture_reproduces_decomposition():
    g = load_fixture("ex33")
    d = stable_ideal_decomposition(g)
    assert (d.X0, d.X) == ({"x1"}, {"x1", "x2", "x3"})
    q = build_quotient_graph(g, IdealSpec(d.X)).graph
    assert len(q.vertices) == 4 and len(q.bundles) == 4


def test_generator_trivial():
    g = random_graph(GeneratorParams(1, 1, Fraction(0)))
    assert g.vertices == ("v0",) and g.bundles == ()


def test_generator_deterministic():
    p = GeneratorParams(7, 5, Fraction(1, 2), Fraction(1, 5), 3)
    assert serialize_graph(random_graph(p)) == serialize_graph(random_graph(p))


def test_generator_golden():
    g = random_graph(GeneratorParams(42, 6, Fraction(1, 2)))
    assert serialize_graph(g) == (GOLDEN / "random_42.gph").read_text()


def test_generator_acyclic():
    for seed in range(20):
        g = random_graph(GeneratorParams(seed, 6, Fraction(1, 2), acyclic=True))
        assert all(g.index[b.source] < g.index[b.target] for b in g.bundles)


def test_generator_rejects_bad_params():
    with pytest.raises(PreconditionError):
        GeneratorParams(0, 0)
    with pytest.raises(PreconditionError):
        GeneratorParams(0, 3, Fraction(3, 2))
    with pytest.raises(PreconditionError):
        GeneratorParams(0, 3, max_mult=0)


def test_generator_negative_seed():
    assert random_graph(GeneratorParams(-5, 2)).name == "random_m5"


@pytest.mark.parametrize("name", ["ex33", "ex12", "o2", "loop", "ab", "o2sink", "exitcycle"])
def test_oracle_suite_empty_diff(name):
    rep = oracle_suite(load_fixture(name))
    assert rep.ok, rep.diffs


def test_oracle_suite_caps():
    with pytest.raises(CapExceededError):
        oracle_suite(Graph("g", tuple(f"v{i}" for i in range(9))))
    with pytest.raises(PreconditionError):
        oracle_suite(parse_graph("graph g\nvertex v\nedge a v v x3"))


@pytest.mark.parametrize("name", FIXTURES)
def test_consistency_suite(name):
    rep = consistency_suite(load_fixture(name))
    assert set(rep.results) == set(CHECKS)
    assert rep.ok, rep.failures()
