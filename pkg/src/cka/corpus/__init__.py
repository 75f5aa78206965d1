"""Fixture graphs, a seeded random-graph generator, brute-force oracles and suites."""

from .fixtures import FIXTURES, fixture_path, load_fixture
from .generator import GeneratorParams, random_graph
from .oracles import OracleReport, oracle_suite
from .suites import ConsistencyReport, consistency_suite

__all__ = [
    "FIXTURES",
    "ConsistencyReport",
    "GeneratorParams",
    "OracleReport",
    "consistency_suite",
    "fixture_path",
    "load_fixture",
    "oracle_suite",
    "random_graph",
]
