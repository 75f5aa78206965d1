"""Combinatorial analysis of directed graphs and the invariants of their graph algebras.

Graphs may carry bundles of infinitely many parallel edges.  The package
decides stable rank (1, 2 or infinite), type I, isolated loops and purely
infinite simple quotients from the graph alone, enumerates hereditary
saturated sets and maximal tails, builds ideal and quotient graphs, and
searches for bounded graph traces with exact rational arithmetic.
"""

from .classify import (
    INFINITY,
    has_isolated_loops,
    is_type_I,
    loop_poset,
    no_loop_has_exit,
    pi_simple_unital_quotient,
    properly_infinite_witnesses,
    stable_rank,
    tail_algebra_flags,
)
from .constructions import (
    build_ideal_graph,
    build_quotient_graph,
    build_subgraph,
    enumerate_gauge_ideals,
    f_paths,
    gauge_primitive_ideals,
    stable_ideal_decomposition,
)
from .errors import (
    CapExceededError,
    CkaError,
    CycleLimitExceeded,
    GraphFormatError,
    InvariantViolation,
    PreconditionError,
    UnknownVertexError,
)
from .graph import (
    OMEGA,
    Bundle,
    Cycle,
    Graph,
    loop_exits,
    out_profile,
    parse_graph,
    reaches,
    serialize_graph,
    strongly_connected_components,
    vertex_simple_cycles,
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
from .tails import classify_tail, is_maximal_tail, maximal_tails
from .traces import (
    bounded_graph_trace,
    is_stable_finite,
    trace_system,
    validate_certificate,
    validate_witness,
    verify_stable_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "OMEGA",
    "Bundle",
    "CapExceededError",
    "CkaError",
    "Cycle",
    "CycleLimitExceeded",
    "Graph",
    "GraphFormatError",
    "IdealSpec",
    "InvariantViolation",
    "PreconditionError",
    "UnknownVertexError",
    "__version__",
    "bounded_graph_trace",
    "breaking_vertices",
    "build_ideal_graph",
    "build_quotient_graph",
    "build_subgraph",
    "check_subset",
    "classify_tail",
    "enumerate_gauge_ideals",
    "enumerate_hersat",
    "f_paths",
    "gauge_primitive_ideals",
    "has_isolated_loops",
    "hersat_closure",
    "is_maximal_tail",
    "is_stable_finite",
    "is_type_I",
    "loop_exits",
    "loop_poset",
    "maximal_tails",
    "no_loop_has_exit",
    "omega",
    "out_profile",
    "parse_graph",
    "pi_simple_unital_quotient",
    "properly_infinite_witnesses",
    "reaches",
    "serialize_graph",
    "stable_ideal_decomposition",
    "stable_rank",
    "strongly_connected_components",
    "tail_algebra_flags",
    "trace_system",
    "validate_certificate",
    "validate_witness",
    "verify_stable_ideal",
    "vertex_simple_cycles",
    "x_fin_inf",
]
