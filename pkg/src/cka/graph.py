"""Directed graphs with finite vertex sets and possibly infinite edge bundles.

A bundle ``e`` of multiplicity ``m`` stands for the ``m`` parallel edge
instances ``e#0 … e#(m-1)``.  Multiplicity ``OMEGA`` denotes countably many
parallel edges; such bundles are never expanded in full, callers ask for as
many instances as they need.
"""

from __future__ import annotations

import functools
import itertools
import os
import re
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from .errors import (
    CapExceededError,
    CycleLimitExceeded,
    GraphFormatError,
    PreconditionError,
    UnknownVertexError,
)

ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")
DEFAULT_MAX_VERTICES = 20
DEFAULT_CYCLE_LIMIT = 10**6


@functools.total_ordering
class Omega:
    """The symbolic infinite multiplicity; larger than every integer and absorbing."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OMEGA"

    def __str__(self):
        return "ω"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("cka.OMEGA")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            return 0
        return self

    __rmul__ = __mul__

    def __reduce__(self):
        return (Omega, ())


OMEGA = Omega()


def is_omega(m) -> bool:
    return m is OMEGA


def max_vertices() -> int:
    """Vertex cap for exponential enumerations (``CKA_MAX_VERTICES`` overrides)."""
    raw = os.environ.get("CKA_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


def check_cap(g: Graph, cap: int | None = None, what: str = "enumeration") -> None:
    cap = max_vertices() if cap is None else cap
    if len(g.vertices) > cap:
        raise CapExceededError(
            f"{what} needs at most {cap} vertices, graph {g.name!r} has {len(g.vertices)}"
        )


@dataclass(frozen=True)
class Bundle:
    id: str
    source: str
    target: str
    mult: object = 1  # positive int or OMEGA

    def instance_ids(self, omega_cap: int | None = None) -> list[str]:
        """Instance ids; ω bundles expose only the first ``omega_cap`` of them."""
        if not is_omega(self.mult):
            return [f"{self.id}#{k}" for k in range(self.mult)]
        if omega_cap is None:
            raise PreconditionError(f"bundle {self.id} has infinite multiplicity; pass omega_cap")
        return [f"{self.id}#{k}" for k in range(omega_cap)]


def split_instance(iid: str) -> tuple[str, int]:
    bid, sep, k = iid.rpartition("#")
    if not sep or not k.isdigit():
        raise PreconditionError(f"not an edge instance id: {iid!r}")
    return bid, int(k)


@dataclass(frozen=True)
class Graph:
    name: str
    vertices: tuple[str, ...]
    bundles: tuple[Bundle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "bundles", tuple(self.bundles))
        if not ID_RE.match(self.name):
            raise GraphFormatError(f"invalid graph name {self.name!r}")
        if not self.vertices:
            raise GraphFormatError("graph has no vertices")
        seen = set()
        for v in self.vertices:
            if not ID_RE.match(v):
                raise GraphFormatError(f"invalid vertex id {v!r}")
            if v in seen:
                raise GraphFormatError(f"duplicate vertex {v!r}")
            seen.add(v)
        bseen = set()
        for b in self.bundles:
            if not ID_RE.match(b.id):
                raise GraphFormatError(f"invalid bundle id {b.id!r}")
            if b.id in bseen:
                raise GraphFormatError(f"duplicate bundle {b.id!r}")
            bseen.add(b.id)
            for end in (b.source, b.target):
                if end not in seen:
                    raise GraphFormatError(f"bundle {b.id!r} uses undeclared vertex {end!r}")
            if not is_omega(b.mult) and (not isinstance(b.mult, int) or b.mult < 1):
                raise GraphFormatError(f"bundle {b.id!r} has invalid multiplicity {b.mult!r}")

    # -- indexes -----------------------------------------------------------

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def bundle_index(self) -> dict[str, int]:
        return {b.id: i for i, b in enumerate(self.bundles)}

    @cached_property
    def bundle_by_id(self) -> dict[str, Bundle]:
        return {b.id: b for b in self.bundles}

    @cached_property
    def out_bundles(self) -> dict[str, tuple[Bundle, ...]]:
        out = {v: [] for v in self.vertices}
        for b in self.bundles:
            out[b.source].append(b)
        return {v: tuple(bs) for v, bs in out.items()}

    @cached_property
    def in_bundles(self) -> dict[str, tuple[Bundle, ...]]:
        inn = {v: [] for v in self.vertices}
        for b in self.bundles:
            inn[b.target].append(b)
        return {v: tuple(bs) for v, bs in inn.items()}

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        return {
            v: tuple(dict.fromkeys(b.target for b in bs)) for v, bs in self.out_bundles.items()
        }

    @cached_property
    def reach(self) -> dict[str, frozenset[str]]:
        """Reflexive-transitive forward closure of every vertex."""
        result = {}
        for v in self.vertices:
            seen = {v}
            queue = deque([v])
            while queue:
                u = queue.popleft()
                for w in self.successors[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            result[v] = frozenset(seen)
        return result

    @cached_property
    def digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(self.vertices)
        dg.add_edges_from((b.source, b.target) for b in self.bundles)
        return dg

    # -- helpers -----------------------------------------------------------

    def require(self, vertices: Iterable[str]) -> frozenset[str]:
        """Return ``vertices`` as a frozenset after checking membership."""
        s = frozenset([vertices] if isinstance(vertices, str) else vertices)
        for v in s:
            if v not in self.index:
                raise UnknownVertexError(f"unknown vertex {v!r} in graph {self.name!r}")
        return s

    def sort_vertices(self, vertices: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(vertices, key=self.index.__getitem__))

    def out_degree(self, v: str):
        return sum((b.mult for b in self.out_bundles[v]), 0)

    def edge(self, iid: str) -> tuple[Bundle, int]:
        bid, k = split_instance(iid)
        b = self.bundle_by_id.get(bid)
        if b is None:
            raise PreconditionError(f"unknown bundle {bid!r}")
        if not is_omega(b.mult) and k >= b.mult:
            raise PreconditionError(f"bundle {bid!r} has no instance {k}")
        return b, k

    def instance_key(self, iid: str) -> tuple[int, int]:
        bid, k = split_instance(iid)
        return self.bundle_index[bid], k


# -- parsing and serialization ----------------------------------------------


def _parse_mult(tok: str, line: int, col: int):
    if tok == "xinf":
        return OMEGA
    if len(tok) > 1 and tok[0] == "x" and tok[1:].isdigit():
        n = int(tok[1:])
        if n == 0:
            raise GraphFormatError("multiplicity 0 is not allowed", line, col)
        return n
    raise GraphFormatError(f"bad multiplicity {tok!r}, expected x<N> or xinf", line, col)


def parse_graph(text: str) -> Graph:
    """Parse the line-based graph format.

    >>> parse_graph("graph g\\nvertex v\\nedge a v v").bundles
    (Bundle(id='a', source='v', target='v', mult=1),)
    """
    name = None
    vertices: list[str] = []
    vseen: dict[str, int] = {}
    bundles: list[Bundle] = []
    bseen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]
        if not toks:
            continue
        kw, kcol = toks[0]
        # identifiers sit in positions 1-3; an edge's optional 4th token is a multiplicity
        for tok, col in toks[1:4]:
            if kw in ("graph", "vertex", "edge") and not ID_RE.match(tok):
                raise GraphFormatError(f"invalid identifier {tok!r}", lineno, col)
        if kw == "graph":
            if name is not None:
                raise GraphFormatError("duplicate graph header", lineno, kcol)
            if len(toks) != 2:
                raise GraphFormatError("expected: graph <name>", lineno, kcol)
            name = toks[1][0]
            continue
        if name is None:
            raise GraphFormatError("file must start with 'graph <name>'", lineno, kcol)
        if kw == "vertex":
            if len(toks) != 2:
                raise GraphFormatError("expected: vertex <id>", lineno, kcol)
            v, col = toks[1]
            if v in vseen:
                raise GraphFormatError(f"duplicate vertex {v!r}", lineno, col)
            vseen[v] = lineno
            vertices.append(v)
        elif kw == "edge":
            if len(toks) not in (4, 5):
                raise GraphFormatError("expected: edge <id> <src> <dst> [x<N>|xinf]", lineno, kcol)
            (bid, bcol), (src, scol), (dst, dcol) = toks[1:4]
            if bid in bseen:
                raise GraphFormatError(f"duplicate edge {bid!r}", lineno, bcol)
            for v, col in ((src, scol), (dst, dcol)):
                if v not in vseen:
                    raise GraphFormatError(f"undeclared vertex {v!r}", lineno, col)
            mult = _parse_mult(toks[4][0], lineno, toks[4][1]) if len(toks) == 5 else 1
            bseen.add(bid)
            bundles.append(Bundle(bid, src, dst, mult))
        else:
            raise GraphFormatError(f"unknown keyword {kw!r}", lineno, kcol)
    if name is None:
        raise GraphFormatError("missing 'graph <name>' header")
    if not vertices:
        raise GraphFormatError("graph declares no vertices")
    return Graph(name, tuple(vertices), tuple(bundles))


def _mult_token(m) -> str:
    if is_omega(m):
        return " xinf"
    return "" if m == 1 else f" x{m}"


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_graph(g: Graph, format: str = "canonical", labels: dict[str, str] | None = None) -> str:
    """Render ``g`` as canonical graph text or Graphviz DOT.

    ``labels`` optionally overrides DOT vertex labels (used for derived graphs).
    """
    if format == "canonical":
        lines = [f"graph {g.name}"]
        lines += [f"vertex {v}" for v in g.vertices]
        lines += [f"edge {b.id} {b.source} {b.target}{_mult_token(b.mult)}" for b in g.bundles]
        return "\n".join(lines) + "\n"
    if format == "dot":
        labels = labels or {}
        lines = [f"digraph {_dot_quote(g.name)} {{"]
        for v in g.vertices:
            lines.append(f"  {_dot_quote(v)} [label={_dot_quote(labels.get(v, v))}];")
        for b in g.bundles:
            if is_omega(b.mult):
                lab = f"{b.id} (∞)"
            elif b.mult == 1:
                lab = b.id
            else:
                lab = f"{b.id} (×{b.mult})"
            lines.append(f"  {_dot_quote(b.source)} -> {_dot_quote(b.target)} [label={_dot_quote(lab)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


# -- elementary queries ------------------------------------------------------


@dataclass(frozen=True)
class OutProfile:
    vertex: str
    degree: object
    is_sink: bool
    is_infinite_emitter: bool


def out_profile(g: Graph, v: str) -> OutProfile:
    g.require(v)
    d = g.out_degree(v)
    return OutProfile(v, d, d == 0, is_omega(d))


def reaches(g: Graph, v: str, w: str) -> bool:
    """True iff a path of length >= 0 leads from ``v`` to ``w``."""
    g.require((v, w))
    return w in g.reach[v]


@dataclass(frozen=True)
class SCC:
    vertices: tuple[str, ...]
    has_internal_edge: bool


def strongly_connected_components(g: Graph) -> list[SCC]:
    """SCC partition, each component sorted and the list ordered by declaration order."""
    comps = [g.sort_vertices(c) for c in nx.strongly_connected_components(g.digraph)]
    comps.sort(key=lambda c: g.index[c[0]])
    result = []
    for c in comps:
        members = set(c)
        internal = any(b.target in members for v in c for b in g.out_bundles[v])
        result.append(SCC(c, internal))
    return result


@dataclass(frozen=True)
class Cycle:
    """A vertex-simple loop, rotated so its least vertex id comes first."""

    edges: tuple[str, ...]
    vertices: tuple[str, ...]
    omega_parallel: bool = False

    def edge_at(self, v: str) -> str:
        return self.edges[self.vertices.index(v)]

    def __len__(self):
        return len(self.edges)

    def label(self) -> str:
        return "(" + ",".join(self.edges) + ")"


def make_cycle(g: Graph, edges: Iterable[str]) -> Cycle:
    """Validate a closed vertex-simple path and return it in canonical rotation."""
    edges = list(edges)
    if not edges:
        raise PreconditionError("a cycle needs at least one edge")
    ends = [g.edge(e)[0] for e in edges]
    for i, b in enumerate(ends):
        nxt = ends[(i + 1) % len(ends)]
        if b.target != nxt.source:
            raise PreconditionError(f"edges {edges[i]} and {edges[(i + 1) % len(edges)]} do not compose")
    verts = [b.source for b in ends]
    if len(set(verts)) != len(verts):
        raise PreconditionError("cycle is not vertex-simple")
    start = verts.index(min(verts))
    edges = edges[start:] + edges[:start]
    verts = verts[start:] + verts[:start]
    return Cycle(tuple(edges), tuple(verts), any(is_omega(b.mult) for b in ends))


def cycle_sort_key(g: Graph, c: Cycle):
    return (len(c), tuple(g.index[v] for v in c.vertices), tuple(g.instance_key(e) for e in c.edges))


def _step_choices(g: Graph, u: str, w: str) -> list[str]:
    out = []
    for b in g.out_bundles[u]:
        if b.target == w:
            out.extend(b.instance_ids(omega_cap=2))
    return out


def vertex_simple_cycles(g: Graph, limit: int = DEFAULT_CYCLE_LIMIT) -> list[Cycle]:
    """All distinct vertex-simple loops of ``g`` in canonical form.

    Parallel instances give distinct cycles; an ω bundle contributes its first
    two instances only and the resulting cycles are flagged ``omega_parallel``.
    Raises CycleLimitExceeded rather than truncating.
    """
    found = []
    for vc in nx.simple_cycles(g.digraph):
        choices = [_step_choices(g, vc[i], vc[(i + 1) % len(vc)]) for i in range(len(vc))]
        n = 1
        for ch in choices:
            n *= len(ch)
        if len(found) + n > limit:
            raise CycleLimitExceeded(f"graph {g.name!r} has more than {limit} vertex-simple cycles")
        for combo in itertools.product(*choices):
            found.append(make_cycle(g, combo))
    found.sort(key=lambda c: cycle_sort_key(g, c))
    return found


def loop_exits(g: Graph, c: Cycle, M: Iterable[str]) -> list[str]:
    """Edge instances leaving a vertex of ``c`` into ``M`` other than the cycle's own edge.

    An ω bundle is reported by one representative instance.
    """
    M = g.require(M)
    c = make_cycle(g, c.edges)
    exits = []
    for v, own in zip(c.vertices, c.edges):
        for b in g.out_bundles[v]:
            if b.target not in M:
                continue
            if is_omega(b.mult):
                exits.append(next(i for i in b.instance_ids(omega_cap=2) if i != own))
            else:
                exits.extend(i for i in b.instance_ids() if i != own)
    return exits


def restrict(g: Graph, vertices: Iterable[str], name: str | None = None) -> Graph:
    """Subgraph on ``vertices`` keeping the bundles with both endpoints inside."""
    keep = g.require(vertices)
    if not keep:
        raise PreconditionError("cannot restrict to an empty vertex set")
    return Graph(
        name or f"{g.name}_restricted",
        tuple(v for v in g.vertices if v in keep),
        tuple(b for b in g.bundles if b.source in keep and b.target in keep),
    )


def shortest_path(g: Graph, src: str, dst: str, within: frozenset[str] | None = None) -> list[str] | None:
    """Bundle ids of a shortest path (BFS) from ``src`` to ``dst``; [] when equal."""
    if src == dst:
        return []
    prev: dict[str, Bundle] = {}
    queue = deque([src])
    seen = {src}
    while queue:
        u = queue.popleft()
        for b in g.out_bundles[u]:
            w = b.target
            if w in seen or (within is not None and w not in within):
                continue
            prev[w] = b
            if w == dst:
                path = []
                while w != src:
                    path.append(prev[w])
                    w = prev[w].source
                return [b.id for b in reversed(path)]
            seen.add(w)
            queue.append(w)
    return None


@dataclass
class Namer:
    """Deterministic fresh identifiers that respect the id grammar."""

    taken: set[str] = field(default_factory=set)

    def fresh(self, base: str) -> str:
        base = re.sub(r"[^A-Za-z0-9_]", "_", base) or "x"
        name, n = base, 1
        while name in self.taken:
            name = f"{base}_{n}"
            n += 1
        self.taken.add(name)
        return name


def iter_instances(g: Graph, v: str, cap: int = 2) -> Iterator[tuple[str, Bundle]]:
    for b in g.out_bundles[v]:
        for iid in b.instance_ids(omega_cap=cap):
            yield iid, b
