"""Command-line interface: ``gstwalk <verb> --graph <dsl|@file> ...``.

Every verb writes one JSON report to stdout (or ``--out``) and a short
human summary to stderr. Exit codes: 0 ok, 1 negative verdict for
``check``/``certify`` (and a failed ``golden`` run), 2 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .dsl import ExactTime, load_graph, parse_graph_dsl, parse_permutations, parse_time, parse_vertex_list
from .graphs import Graph, bipartition, is_connected, recognize_srg
from .gst import DEFAULT_ZERO_TOL, VertexSet, equal_card_structure, has_gst
from .spectral import decompose, default_eigen_tol, transition, verify_spectrum

logger = logging.getLogger("gstwalk")

SCHEMA_VERSION = "1.0"
VERBS = ("spectrum", "evolve", "check", "scan", "poset", "topology", "orbits", "certify", "golden")
BRUTE_FORCE_AUT_MAX_N = 8


class UsageError(ValueError):
    pass


# --------------------------------------------------------------- JSON


def to_jsonable(obj):
    """Reduce report payloads to plain JSON; NaN and infinities become null."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, VertexSet):
        return obj.vertices()
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


# ------------------------------------------------------------- helpers


def _graph_summary(x: Graph, source: str, spec) -> dict:
    out = {
        "source": source,
        "n": x.n,
        "num_edges": x.num_edges,
        "edges": [list(e) for e in x.edges()],
        "connected": is_connected(x),
    }
    if spec is not None:
        out["spectrum"] = {
            "eigenvalues": spec.eigenvalues,
            "multiplicities": list(spec.multiplicities),
        }
    return out


def _vertex_set(n: int, text: str | None, flag: str) -> VertexSet:
    if text is None:
        raise UsageError(f"{flag} is required for this verb")
    verts = parse_vertex_list(text)
    bad = [v for v in verts if not 1 <= v <= n]
    if bad:
        raise UsageError(f"{flag}: vertices {bad} outside 1..{n}")
    return VertexSet.of(n, verts)


def _float_time(args) -> float:
    if args.time is None:
        raise UsageError("--time is required for this verb")
    t = parse_time(args.time)
    return t.value if isinstance(t, ExactTime) else t


def _time_echo(t) -> dict:
    if isinstance(t, ExactTime):
        return {"exact": f"2pi*{t.p}/{t.q}", "value": t.value}
    return {"value": t}


# -------------------------------------------------------------- verbs


def cmd_spectrum(args, x, spec, warnings) -> tuple[dict, int]:
    diag = verify_spectrum(spec)
    srg = recognize_srg(x)
    parts = bipartition(x) if is_connected(x) else None
    result = {
        "eigenvalues": spec.eigenvalues,
        "multiplicities": list(spec.multiplicities),
        "diagnostics": diag.__dict__,
        "srg": list(srg.as_tuple()) if srg else None,
        "bipartition": [sorted(parts[0]), sorted(parts[1])] if parts else None,
    }
    if srg is not None:
        from .scan import srg_times

        try:
            result["srg_candidates"] = [c.to_dict() for c in srg_times(srg)]
        except ValueError as exc:
            warnings.append(f"srg candidate times unavailable: {exc}")
    if parts is not None:
        from .scan import bipartite_times

        result["bipartite_candidates"] = [c.to_dict() for c in bipartite_times(spec)]
    return result, 0


def cmd_evolve(args, x, spec, warnings) -> tuple[dict, int]:
    t = _float_time(args)
    tm = transition(spec, t)
    return {
        "time": _time_echo(parse_time(args.time)),
        "entries": [[complex(v) for v in row] for row in tm.entries],
        "unitarity_error": tm.unitarity_error(),
        "symmetry_error": tm.symmetry_error(),
    }, 0


def cmd_check(args, x, spec, warnings) -> tuple[dict, int]:
    s = _vertex_set(x.n, args.source, "--source")
    t_set = _vertex_set(x.n, args.target, "--target")
    t = _float_time(args)
    rep = has_gst(spec, s, t_set, t, args.zero_tol)
    if rep.borderline:
        warnings.append(f"{len(rep.borderline)} support entries lie in the borderline band (zero_tol, 10*zero_tol)")
    result = {"gst": rep.to_dict(), "time": _time_echo(parse_time(args.time))}
    if rep.holds and len(s) == len(t_set):
        result["equal_card_structure"] = equal_card_structure(spec, s, t_set, t, args.zero_tol).to_dict()
    return result, 0 if rep.holds else 1


def cmd_scan(args, x, spec, warnings) -> tuple[dict, int]:
    from .scan import entry_zero_scan, monogamy_audit

    if args.t_from is None or args.t_to is None:
        raise UsageError("scan needs --from and --to")
    lo = parse_time(args.t_from)
    hi = parse_time(args.t_to)
    lo = lo.value if isinstance(lo, ExactTime) else lo
    hi = hi.value if isinstance(hi, ExactTime) else hi
    res = entry_zero_scan(spec, (lo, hi), args.step, args.zero_tol)
    warnings.extend(res.warnings)
    if not is_connected(x):
        warnings.append("graph is disconnected: isolation checks were skipped")
    return {"scan": res.to_dict(), "monogamy": monogamy_audit(res)}, 0


def cmd_poset(args, x, spec, warnings) -> tuple[dict, int]:
    from .poset import ST_POSET_MAX_N, maximal_pairs, periodic_sets, st_poset

    t = _float_time(args)
    mp = maximal_pairs(spec, t, args.zero_tol)
    result = {
        "maximal_pairs": mp.to_dict(),
        "tight_components": [[s.vertices(), mp.forward(s).vertices()] for s in mp.tight_components()],
        "periodic_sets": [s.vertices() for s in periodic_sets(spec, t, zero_tol=args.zero_tol)],
    }
    if x.n <= ST_POSET_MAX_N:
        result["st_poset"] = st_poset(spec, t, args.zero_tol).to_dict()
    else:
        warnings.append(f"full state transfer poset omitted for n > {ST_POSET_MAX_N}")
    return result, 0


def cmd_topology(args, x, spec, warnings) -> tuple[dict, int]:
    from .poset import closed_vs_bijective_report, topology_at, verify_topology_axioms

    t = _float_time(args)
    topo = topology_at(spec, t, zero_tol=args.zero_tol)
    return {
        "topology": topo.to_dict(),
        "axioms_hold": verify_topology_axioms(topo),
        "closed_vs_bijective": closed_vs_bijective_report(spec, t, zero_tol=args.zero_tol),
    }, 0


def _group_for(args, x: Graph):
    from .symmetry import (
        Permutation,
        all_permutations,
        family_generators,
        group_closure,
        is_automorphism,
    )

    if args.group:
        if not args.group.startswith("@"):
            raise UsageError("--group expects @path to a permutation file")
        gens = [Permutation(p) for p in parse_permutations(Path(args.group[1:]).read_text())]
        return group_closure(gens, n=x.n), "file"
    if not args.graph.startswith("@"):
        spec = parse_graph_dsl(args.graph)
        try:
            gens = family_generators(spec.family, *spec.params)
            return group_closure(gens, n=x.n), f"family:{spec.family}"
        except ValueError:
            pass
    if x.n > BRUTE_FORCE_AUT_MAX_N:
        raise UsageError(
            f"no built-in generators for this graph and n > {BRUTE_FORCE_AUT_MAX_N}; pass --group @file"
        )
    gens = [p for p in all_permutations(x.n) if is_automorphism(x, p)]
    return group_closure(gens, n=x.n), "brute_force"


def cmd_orbits(args, x, spec, warnings) -> tuple[dict, int]:
    from .symmetry import gst_symmetry_check, is_automorphism, orbit_of_set, setwise_stabilizer

    group, origin = _group_for(args, x)
    bad = [g.images for g in group.generators if not is_automorphism(x, g)]
    if bad:
        raise UsageError(f"generators are not automorphisms: {bad}")
    result: dict = {"group_order": group.order, "group_origin": origin}
    if args.source is not None:
        s = _vertex_set(x.n, args.source, "--source")
        result["orbit"] = [o.vertices() for o in orbit_of_set(s, group)]
        result["stabilizer_order"] = setwise_stabilizer(s, group).order
        if args.target is not None and args.time is not None:
            t_set = _vertex_set(x.n, args.target, "--target")
            rep = gst_symmetry_check(spec, x, s, t_set, _float_time(args), group, args.zero_tol)
            result["symmetry"] = rep.to_dict()
    else:
        seen, orbits = set(), []
        for v in x.vertices:
            if v not in seen:
                orb = sorted({g(v) for g in group.elements})
                seen.update(orb)
                orbits.append(orb)
        result["vertex_orbits"] = orbits
    return result, 0


def cmd_certify(args, x, spec, warnings) -> tuple[dict, int]:
    from .exact import certify_gst

    if args.time is None:
        raise UsageError("--time is required for this verb")
    t = parse_time(args.time)
    if not isinstance(t, ExactTime):
        raise UsageError("certify needs an exact time of the form 2pi:p/q")
    s = _vertex_set(x.n, args.source, "--source")
    t_set = _vertex_set(x.n, args.target, "--target")
    cert = certify_gst(x, s, t_set, t.p, t.q)
    numeric = has_gst(spec, s, t_set, t.value, args.zero_tol)
    return {"certificate": cert.to_dict(), "numeric_residual": numeric.residual}, 0 if cert.holds else 1


def cmd_golden(args, warnings) -> tuple[dict, int]:
    from .golden import run_golden

    results = run_golden()
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    return {
        "criteria": [r.to_dict() for r in results],
        "passed": sum(r.passed for r in results),
        "total": len(results),
    }, 0 if passed else 1


HANDLERS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "check": cmd_check,
    "scan": cmd_scan,
    "poset": cmd_poset,
    "topology": cmd_topology,
    "orbits": cmd_orbits,
    "certify": cmd_certify,
}


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gstwalk", description="Group state transfer in continuous quantum walks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--graph", help="graph DSL string, or @path to an edge-list file")
    p.add_argument("--source", help="source vertex set, e.g. 1,2")
    p.add_argument("--target", help="target vertex set, e.g. 3,4")
    p.add_argument("--time", help="time: 1.25, pi/2, 2pi/3, pi/sqrt(2) or exact 2pi:p/q")
    p.add_argument("--from", dest="t_from", help="scan interval start")
    p.add_argument("--to", dest="t_to", help="scan interval end")
    p.add_argument("--step", type=float, default=1e-3, help="scan grid step (default 1e-3)")
    p.add_argument("--eigen-tol", type=float, default=None, help="eigenvalue clustering tolerance")
    p.add_argument("--zero-tol", type=float, default=DEFAULT_ZERO_TOL, help="support threshold on |U(t)| entries")
    p.add_argument("--out", "--report", dest="out", help="write the JSON report here instead of stdout")
    p.add_argument("--group", help="@path to a file of generating permutations (one image array per line)")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    return p


def _echo(args, argv) -> dict:
    return {
        "verb": args.verb,
        "argv": list(argv),
        "graph": args.graph,
        "source": args.source,
        "target": args.target,
        "time": args.time,
        "from": args.t_from,
        "to": args.t_to,
        "step": args.step,
        "group": args.group,
    }


def run(argv: list[str]) -> tuple[dict, int]:
    """Parse ``argv``, dispatch, and return ``(report, exit_code)``."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "command": _echo(args, argv),
        "graph": None,
        "tolerances": {"eigen_tol": args.eigen_tol, "zero_tol": args.zero_tol},
        "results": None,
        "warnings": [],
        "error": None,
    }
    warnings: list[str] = report["warnings"]
    try:
        if args.verb == "golden":
            if args.graph:
                raise UsageError("golden takes no --graph")
            report["results"], code = cmd_golden(args, warnings)
        else:
            if not args.graph:
                raise UsageError(f"{args.verb} needs exactly one graph source via --graph")
            x = load_graph(args.graph)
            eigen_tol = args.eigen_tol if args.eigen_tol is not None else default_eigen_tol(x)
            report["tolerances"]["eigen_tol"] = eigen_tol
            spec = decompose(x, eigen_tol)
            report["graph"] = _graph_summary(x, args.graph, spec)
            report["results"], code = HANDLERS[args.verb](args, x, spec, warnings)
    except Exception as exc:  # every failure is reported in JSON with exit code 2
        logger.debug("command failed", exc_info=True)
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = 2
    return report, code


def _summary(report: dict, code: int) -> str:
    verb = report["command"]["verb"]
    if report["error"]:
        return f"gstwalk {verb}: error: {report['error']['type']}: {report['error']['message']}"
    res = report["results"] or {}
    if verb == "check":
        g = res["gst"]
        return f"gstwalk check: GST {'holds' if g['holds'] else 'fails'} (residual {g['residual']:.3e})"
    if verb == "certify":
        return f"gstwalk certify: {res['certificate']['verdict']}"
    if verb == "scan":
        s = res["scan"]
        return f"gstwalk scan: {len(s['hits'])} zero hits, {len(s['events'])} events"
    if verb == "golden":
        return f"gstwalk golden: {res['passed']}/{res['total']} criteria pass"
    return f"gstwalk {verb}: ok"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report, code = run(argv)
    text = dumps(report)
    target = _out_path(argv)
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)
    print(_summary(report, code), file=sys.stderr)
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return code


def _out_path(argv: list[str]) -> str | None:
    try:
        return build_parser().parse_args(argv).out
    except SystemExit:
        return None


if __name__ == "__main__":
    sys.exit(main())
