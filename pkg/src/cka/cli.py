"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 analysis cap exceeded,
3 internal invariant violation (a bug).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classify import (
    has_isolated_loops,
    is_type_I,
    no_loop_has_exit,
    pi_simple_unital_quotient,
    stable_rank,
    tail_algebra_flags,
)
from .constructions import (
    DEFAULT_DEPTH,
    DEFAULT_OMEGA_CAP,
    build_ideal_graph,
    build_quotient_graph,
    build_subgraph,
    stable_ideal_decomposition,
)
from .corpus.generator import GeneratorParams, random_graph
from .corpus.oracles import ORACLE_CAP, oracle_suite
from .corpus.suites import consistency_suite
from .errors import CapExceededError, CkaError, InvariantViolation
from .graph import (
    Cycle,
    Graph,
    is_omega,
    loop_exits,
    make_cycle,
    max_vertices,
    parse_graph,
    serialize_graph,
)
from .subsets import (
    IdealSpec,
    breaking_vertices,
    check_subset,
    enumerate_hersat,
    hersat_closure,
    omega,
)
from .tails import TAU, is_maximal_tail, maximal_tails
from .traces import (
    bounded_graph_trace,
    validate_certificate,
    validate_witness,
    verify_stable_ideal,
)

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_BUG = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- evidence helpers ------------------------------------------------------------


def _vs(g: Graph, S) -> list[str]:
    return list(g.sort_vertices(S))


def _cyc(c: Cycle | None):
    if c is None:
        return None
    return {"edges": list(c.edges), "vertices": list(c.vertices), "omega_parallel": c.omega_parallel}


def _ids(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _frac(x: Fraction) -> str:
    return str(Fraction(x))


# -- analyses: each returns (verdict, evidence, human lines) ------------------------


def do_stable_rank(g: Graph):
    v = stable_rank(g)
    ev = {"statement": v.statement}
    if v.exit_witness is not None and not v.exit_witness.ok:
        ev["exit_vertex"] = v.exit_witness.vertex
        ev["exit_cycle"] = _cyc(v.exit_witness.cycle)
    ev["pi_tail"] = _vs(g, v.pi_tail.vertices) if v.pi_tail else None
    return v.label, ev, [f"stable rank: {'∞' if v.label == 'infinity' else v.label}"]


def do_type_i(g: Graph):
    rep = is_type_I(g)
    recs = [{"tail": _vs(g, r.tail), "clause": r.clause, "witness_vertex": r.witness_vertex} for r in rep.records]
    lines = [f"type I: {'yes' if rep.verdict else 'no'}"]
    for r in recs:
        how = f"clause ({r['clause']}) at {r['witness_vertex']}" if r["clause"] else "no clause holds"
        lines.append(f"  gamma tail {{{','.join(r['tail'])}}}: {how}")
    return rep.verdict, {"gamma_tails": recs, "note": rep.note}, lines


def do_isolated(g: Graph):
    chk = has_isolated_loops(g)
    ev = {"vertex": chk.vertex, "cycles": [_cyc(c) for c in chk.cycles] if chk.cycles else None}
    lines = [f"isolated loops: {'yes' if chk.ok else 'no'}"]
    if not chk.ok:
        a, b = chk.cycles
        lines.append(f"  loops {a.label()} and {b.label()} leave {chk.vertex} by different edges")
    return chk.ok, ev, lines


def do_pi_quotient(g: Graph):
    t = pi_simple_unital_quotient(g)
    if t is None:
        return None, {"tail": None}, ["purely infinite simple unital quotient: none"]
    tail = _vs(g, t.vertices)
    return tail, {"tail": tail}, [f"purely infinite simple unital quotient: from tail {{{','.join(tail)}}}"]


def do_tails(g: Graph):
    ts = maximal_tails(g)
    recs = [{"vertices": _vs(g, t.vertices), "class": t.cls, "witness": _cyc(t.witness)} for t in ts]
    lines = [f"maximal tails: {len(ts)}"]
    for t in ts:
        extra = f" witness {t.witness.label()}" if t.witness else ""
        lines.append(f"  {{{','.join(_vs(g, t.vertices))}}}: {t.cls}{extra}")
    return len(ts), {"tails": recs}, lines


def do_hersat(g: Graph):
    hs = enumerate_hersat(g)
    sets = [_vs(g, h.vertices) for h in hs]
    lines = [f"hereditary saturated sets: {len(hs)}"] + ["  {" + ",".join(s) + "}" for s in sets]
    return len(hs), {"sets": sets}, lines


def do_breaking(g: Graph):
    bv = _vs(g, breaking_vertices(g))
    ev = {"omega": {v: _vs(g, omega(g, {v})) for v in bv}}
    return bv, ev, ["breaking vertices: {" + ",".join(bv) + "}"]


def do_trace(g: Graph):
    tr = bounded_graph_trace(g)
    if tr.feasible:
        psi = {v: _frac(tr.witness[v]) for v in g.vertices}
        lines = ["bounded graph trace: exists"] + [f"  ψ({v}) = {psi[v]}" for v in g.vertices]
        return "witness", {"psi": psi}, lines
    cert = {k: _frac(y) for k, y in tr.certificate.items() if y != 0}
    lines = ["bounded graph trace: none (infeasibility certificate)"] + [
        f"  {k}: {y}" for k, y in sorted(cert.items())
    ]
    return "infeasible", {"certificate": cert}, lines


def _construction(res, g: Graph):
    return {
        "graph": serialize_graph(res.graph),
        "truncated": res.truncated,
        "provenance": res.provenance,
        "labels": res.labels,
    }


def do_decompose(g: Graph, depth: int = DEFAULT_DEPTH, omega_cap: int = DEFAULT_OMEGA_CAP):
    dec = stable_ideal_decomposition(g, depth, omega_cap)
    ev = {
        "X0": _vs(g, dec.X0),
        "X": _vs(g, dec.X),
        "hypothesis_violated": dec.hypothesis_violated,
        "ideal": _construction(dec.ideal, g) if dec.ideal else None,
        "quotient": _construction(dec.quotient, g) if dec.quotient else None,
        "stability": None,
    }
    lines = [f"X0 = {{{','.join(ev['X0'])}}}", f"X = {{{','.join(ev['X'])}}}"]
    if dec.hypothesis_violated:
        lines.append("warning: the graph has a purely infinite simple unital quotient")
    if dec.X:
        rep = verify_stable_ideal(g, depth, dec, omega_cap)
        ev["stability"] = {
            "stable": rep.stable,
            "trace_free": rep.trace_free,
            "loops": [{"cycle": _cyc(lc.cycle), "infinite": lc.infinite, "reason": lc.reason} for lc in rep.loops],
            "reasoning": list(rep.reasoning),
            "preview_certificate": rep.preview_certificate,
        }
        lines.append(f"ideal stable: {'yes' if rep.stable else 'no'}")
    if dec.quotient is not None:
        q = dec.quotient.graph
        lines.append(f"quotient: {len(q.vertices)} vertices, {len(q.bundles)} bundles")
        lines += ["  " + ln for ln in serialize_graph(q).splitlines()]
    else:
        lines.append("quotient: zero (X is every vertex)")
    verdict = {"X0": ev["X0"], "X": ev["X"]}
    return verdict, ev, lines


ANALYSES = {
    "stable-rank": do_stable_rank,
    "type-i": do_type_i,
    "isolated": do_isolated,
    "tails": do_tails,
    "hersat": do_hersat,
    "pi-quotient": do_pi_quotient,
    "trace": do_trace,
    "decompose": do_decompose,
}
SINGLE = {**ANALYSES, "breaking": do_breaking}


# -- self audit -----------------------------------------------------------------------


def audit(g: Graph, evidence: dict) -> list[str]:
    """Re-check each piece of ``analyze`` evidence with independent library calls."""
    problems = []
    sr = evidence["stable-rank"]
    if sr["verdict"] == "1" and not no_loop_has_exit(g):
        problems.append("stable-rank: verdict 1 but a loop has an exit")
    if "exit_cycle" in sr["evidence"]:
        c = make_cycle(g, sr["evidence"]["exit_cycle"]["edges"])
        if g.out_degree(sr["evidence"]["exit_vertex"]) == 1 or not loop_exits(g, c, g.vertices):
            problems.append("stable-rank: exit witness has no exit")
    if sr["evidence"]["pi_tail"] is not None:
        t = next(t for t in maximal_tails(g) if t.vertices == frozenset(sr["evidence"]["pi_tail"]))
        f = tail_algebra_flags(g, t)
        if not (f.has_loop and f.simple):
            problems.append("stable-rank: pi tail does not give a simple quotient with a loop")

    iso = evidence["isolated"]
    if not iso["verdict"]:
        a, b = (make_cycle(g, c["edges"]) for c in iso["evidence"]["cycles"])
        v = iso["evidence"]["vertex"]
        if v not in a.vertices or v not in b.vertices or a.edge_at(v) == b.edge_at(v):
            problems.append("isolated: witness loops do not branch at the reported vertex")

    for rec in evidence["tails"]["evidence"]["tails"]:
        M = frozenset(rec["vertices"])
        if not is_maximal_tail(g, M):
            problems.append(f"tails: {rec['vertices']} fails the tail axioms")
        if rec["class"] == TAU and loop_exits(g, make_cycle(g, rec["witness"]["edges"]), M):
            problems.append(f"tails: tau witness for {rec['vertices']} has an exit")

    for S in evidence["hersat"]["evidence"]["sets"]:
        if not check_subset(g, S):
            problems.append(f"hersat: {S} is not hereditary and saturated")

    for rec in evidence["type-i"]["evidence"]["gamma_tails"]:
        w = rec["witness_vertex"]
        if w is not None and any(x in rec["tail"] for x in g.successors[w]):
            problems.append(f"type-i: {w} emits into its tail")

    tr = evidence["trace"]
    if tr["verdict"] == "witness":
        psi = {v: Fraction(x) for v, x in tr["evidence"]["psi"].items()}
        if not validate_witness(g, psi):
            problems.append("trace: witness fails GT1/GT2")
    elif not validate_certificate(g, {k: Fraction(y) for k, y in tr["evidence"]["certificate"].items()}):
        problems.append("trace: certificate does not prove infeasibility")

    dec = evidence["decompose"]["evidence"]
    X = frozenset(dec["X"])
    if hersat_closure(g, dec["X0"]).vertices != X:
        problems.append("decompose: X is not the closure of X0")
    if dec["quotient"] is not None and not has_isolated_loops(parse_graph(dec["quotient"]["graph"])):
        problems.append("decompose: quotient has non-isolated loops")
    return problems


# -- report plumbing -------------------------------------------------------------------


def _load(path: str) -> tuple[Graph, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path}: not UTF-8") from exc
    return parse_graph(text), data


def _report(command: str, data: bytes, verdict, evidence, limits) -> dict:
    return {
        "tool": "cka",
        "version": __version__,
        "input_digest": "sha256:" + hashlib.sha256(data).hexdigest(),
        "command": command,
        "verdict": verdict,
        "evidence": evidence,
        "limits": limits,
    }


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)


def _limits(g: Graph, **extra) -> dict:
    return {"max_vertices": max_vertices(), "vertices": len(g.vertices), **extra}


def _check_size(g: Graph):
    if len(g.vertices) > max_vertices():
        raise CapExceededError(f"graph has {len(g.vertices)} vertices; the cap is {max_vertices()} (CKA_MAX_VERTICES)")


def cmd_analysis(args, out) -> int:
    g, data = _load(args.file)
    _check_size(g)
    verdict, ev, lines = SINGLE[args.command](g)
    if args.json:
        out.write(_dump(_report(args.command, data, verdict, ev, _limits(g))) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    g, data = _load(args.file)
    _check_size(g)
    verdict, ev, lines = do_decompose(g, args.depth, args.omega_cap)
    lim = _limits(g, depth=args.depth, omega_cap=args.omega_cap)
    if args.json:
        out.write(_dump(_report("decompose", data, verdict, ev, lim)) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_analyze(args, out) -> int:
    g, data = _load(args.file)
    _check_size(g)
    evidence = {}
    lines = [f"graph {g.name}: {len(g.vertices)} vertices, {len(g.bundles)} bundles"]
    for name, fn in ANALYSES.items():
        verdict, ev, human = fn(g)
        evidence[name] = {"verdict": verdict, "evidence": ev}
        lines += human
    verdict = {k: v["verdict"] for k, v in evidence.items()}
    report = _report("analyze", data, verdict, evidence, _limits(g, depth=DEFAULT_DEPTH, omega_cap=DEFAULT_OMEGA_CAP))
    status = EXIT_OK
    if args.verify:
        problems = audit(g, json.loads(_dump(evidence)))
        report["audit"] = {"passed": not problems, "problems": problems}
        lines.append("self-audit: " + ("passed" if not problems else "FAILED"))
        lines += ["  " + p for p in problems]
        if problems:
            status = EXIT_BUG
    out.write((_dump(report) if args.json else "\n".join(lines)) + "\n")
    return status


def _emit_construction(args, out, command, g, data, res, lim) -> int:
    if args.json:
        out.write(_dump(_report(command, data, serialize_graph(res.graph), _construction(res, g), lim)) + "\n")
        return EXIT_OK
    if args.format == "dot":
        out.write(serialize_graph(res.graph, "dot", labels=res.labels))
        return EXIT_OK
    out.write(serialize_graph(res.graph))
    out.write(f"# truncated: {'yes' if res.truncated else 'no'}\n")
    for k in sorted(res.provenance):
        p = res.provenance[k]
        out.write(f"# {k} <- {p['kind']} {json.dumps(p['of'], ensure_ascii=False)}\n")
    return EXIT_OK


def cmd_construct(args, out) -> int:
    g, data = _load(args.file)
    if args.kind == "eg":
        res = build_subgraph(g, _ids(args.v), _ids(args.e))
        lim = _limits(g)
    elif args.kind == "ideal-graph":
        res = build_ideal_graph(g, _ids(args.x), _ids(args.b), args.depth, args.omega_cap)
        lim = _limits(g, depth=args.depth, omega_cap=args.omega_cap)
    else:
        res = build_quotient_graph(g, IdealSpec(frozenset(_ids(args.x)), frozenset(_ids(args.b))))
        lim = _limits(g)
    return _emit_construction(args, out, f"construct {args.kind}", g, data, res, lim)


def cmd_omega(args, out) -> int:
    g, data = _load(args.file)
    om = _vs(g, omega(g, _ids(args.s)))
    if args.json:
        out.write(_dump(_report("omega", data, om, {"S": _vs(g, g.require(_ids(args.s)))}, _limits(g))) + "\n")
    else:
        out.write("Ω = {" + ",".join(om) + "}\n")
    return EXIT_OK


def cmd_dot(args, out) -> int:
    g, _ = _load(args.file)
    out.write(serialize_graph(g, "dot"))
    return EXIT_OK


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def cmd_random(args, out) -> int:
    params = GeneratorParams(args.seed, args.vertices, args.density, args.inf_prob, args.max_mult, args.acyclic)
    out.write(serialize_graph(random_graph(params)))
    return EXIT_OK


def _check_one(path: str) -> dict:
    g, data = _load(path)
    _check_size(g)
    entry = {"file": path, "input_digest": "sha256:" + hashlib.sha256(data).hexdigest()}
    small = len(g.vertices) <= ORACLE_CAP and all(is_omega(b.mult) or b.mult <= 2 for b in g.bundles)
    if small:
        orc = oracle_suite(g)
        entry["oracle"] = {"passed": orc.ok, "diffs": orc.diffs}
    else:
        entry["oracle"] = {"passed": True, "skipped": "graph too large for brute force"}
    con = consistency_suite(g)
    entry["consistency"] = {k: {"passed": p, "detail": d} for k, (p, d) in con.results.items()}
    entry["passed"] = entry["oracle"]["passed"] and con.ok
    return entry


def cmd_check(args, out) -> int:
    with ThreadPoolExecutor() as pool:
        entries = list(pool.map(_check_one, args.files))  # map keeps input order
    ok = all(e["passed"] for e in entries)
    if args.json:
        out.write(_dump({"tool": "cka", "version": __version__, "command": "check", "results": entries}) + "\n")
    else:
        for e in entries:
            out.write(f"{e['file']}: {'pass' if e['passed'] else 'FAIL'}\n")
            if not e["oracle"]["passed"]:
                for k, d in e["oracle"]["diffs"].items():
                    for line in d:
                        out.write(f"  oracle {k}: {line}\n")
            for k, c in e["consistency"].items():
                if not c["passed"]:
                    out.write(f"  {k}: {c['detail']}\n")
    return EXIT_OK if ok else EXIT_BUG


# -- argument grammar ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cka", description="Analyze directed graphs and their graph algebras.")
    p.add_argument("--version", action="version", version=f"cka {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    a = sub.add_parser("analyze", help="run every analysis and collect one report")
    a.add_argument("file")
    a.add_argument("--json", action="store_true")
    a.add_argument("--verify", action="store_true", help="re-check all evidence through the library")
    a.set_defaults(run=cmd_analyze)

    helps = {
        "stable-rank": "stable rank: 1, 2 or infinity",
        "type-i": "type I test over the gamma tails",
        "isolated": "whether loops are isolated",
        "pi-quotient": "a purely infinite simple unital quotient, if any",
        "tails": "maximal tails with gamma/tau classes",
        "hersat": "hereditary saturated vertex sets",
        "breaking": "breaking vertices",
        "trace": "bounded graph trace or infeasibility certificate",
    }
    for name, h in helps.items():
        s = sub.add_parser(name, help=h)
        s.add_argument("file")
        s.add_argument("--json", action="store_true")
        s.set_defaults(run=cmd_analysis)

    o = sub.add_parser("omega", help="vertices that cannot reach a given set")
    o.add_argument("file")
    o.add_argument("--s", required=True, metavar="IDS")
    o.add_argument("--json", action="store_true")
    o.set_defaults(run=cmd_omega)

    c = sub.add_parser("construct", help="derived graphs")
    csub = c.add_subparsers(dest="kind", required=True, metavar="KIND")
    for kind, h in (("eg", "finite subgraph approximation"), ("ideal-graph", "graph of a gauge-invariant ideal"),
                    ("quotient", "graph of the quotient by an ideal")):
        k = csub.add_parser(kind, help=h)
        k.add_argument("file")
        if kind == "eg":
            k.add_argument("--v", default="", metavar="IDS", help="vertex ids")
            k.add_argument("--e", default="", metavar="IDS", help="edge instance ids (id#k) or finite bundle ids")
        else:
            k.add_argument("--x", required=True, metavar="IDS")
            k.add_argument("--b", default="", metavar="IDS")
        if kind == "ideal-graph":
            k.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
            k.add_argument("--omega-cap", type=int, default=DEFAULT_OMEGA_CAP)
        k.add_argument("--format", choices=("canonical", "dot"), default="canonical")
        k.add_argument("--json", action="store_true")
        k.set_defaults(run=cmd_construct)

    d = sub.add_parser("decompose", help="stable ideal and quotient with isolated loops")
    d.add_argument("file")
    d.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    d.add_argument("--omega-cap", type=int, default=DEFAULT_OMEGA_CAP)
    d.add_argument("--json", action="store_true")
    d.set_defaults(run=cmd_decompose)

    t = sub.add_parser("dot", help="Graphviz rendering")
    t.add_argument("file")
    t.set_defaults(run=cmd_dot)

    r = sub.add_parser("random", help="seeded random graph")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--vertices", type=int, required=True)
    r.add_argument("--density", type=_fraction, default=Fraction(1, 3))
    r.add_argument("--inf-prob", type=_fraction, default=Fraction(0))
    r.add_argument("--max-mult", type=int, default=1)
    r.add_argument("--acyclic", action="store_true")
    r.set_defaults(run=cmd_random)

    k = sub.add_parser("check", help="oracle and consistency suites")
    k.add_argument("files", nargs="+", metavar="FILE")
    k.add_argument("--json", action="store_true")
    k.set_defaults(run=cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for flag in ("depth", "omega_cap"):
        if getattr(args, flag, 1) < 1:
            print(f"cka: error: --{flag.replace('_', '-')} must be >= 1", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.run(args, sys.stdout)
    except InvariantViolation as exc:
        print(f"cka: internal error: {exc}", file=sys.stderr)
        return EXIT_BUG
    except CapExceededError as exc:
        print(f"cka: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, CkaError) as exc:
        print(f"cka: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
