"""Acceptance fixtures: each criterion is a function returning a CriterionResult.

``run_golden()`` evaluates all of them; the ``golden`` CLI verb and
``tests/test_acceptance.py`` are thin wrappers around it.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import graphs as G
from .exact import certify_gst
from .gst import (
    VertexSet,
    closure,
    equal_card_structure,
    forward_set,
    has_gst,
    inverse_set,
)
from .poset import maximal_pairs, st_poset, topology_at, verify_topology_axioms
from .scan import (
    ScanResult,
    bipartite_times,
    conference_sweep,
    entry_zero_scan,
    join_times,
    monogamy_audit,
)
from .spectral import Spectrum, decompose, transition, verify_spectrum

logger = logging.getLogger(__name__)

__all__ = ["CRITERIA", "CriterionResult", "run_golden"]

SEED = 20240601
SCAN_STEP = 1e-3
TWO_PI = 2 * math.pi

# GST pairs drawn in the K2 state transfer poset figure at pi/2
K2_FIGURE_PAIRS = {
    ((), (1, 2)), ((), (1,)), ((), (2,)), ((), ()),
    ((1,), (1, 2)), ((1,), (2,)),
    ((2,), (1, 2)), ((2,), (1,)),
    ((1, 2), (1, 2)),
}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.name} ({self.seconds:.2f}s)"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }


class _Context:
    """Shared state across criteria: spectra, scans and bijective witnesses."""

    def __init__(self):
        self.spectra: dict[str, Spectrum] = {}
        self.scans: dict[tuple, ScanResult] = {}
        self.witnesses: list[tuple[str, list[int], list[int], float]] = []

    def spectrum(self, key: str, graph: Callable[[], G.Graph]) -> Spectrum:
        if key not in self.spectra:
            self.spectra[key] = decompose(graph())
        return self.spectra[key]

    def scan(self, key: str, graph: Callable[[], G.Graph], interval) -> ScanResult:
        k = (key, tuple(interval))
        if k not in self.scans:
            self.scans[k] = entry_zero_scan(self.spectrum(key, graph), interval, SCAN_STEP)
        return self.scans[k]


def _antipode(d: int, v: int) -> int:
    return ((v - 1) ^ (2**d - 1)) + 1


def _set_key(vs) -> tuple[int, ...]:
    return tuple(sorted(vs))


# ---------------------------------------------------------------- criteria


def crit_k2(ctx: _Context) -> tuple[bool, dict]:
    spec = ctx.spectrum("K2", lambda: G.complete(2))
    u = transition(spec, math.pi / 2).entries
    amp_transfer = abs(u[1, 0])
    amp_stay = abs(u[0, 0])
    entries_ok = abs(amp_transfer - 1) <= 1e-12 and amp_stay <= 1e-12
    poset = st_poset(spec, math.pi / 2)
    found = {(_set_key(s), _set_key(t)) for s, t in poset.as_sets()}
    ctx.witnesses.append(("complete:2", [1], [2], math.pi / 2))
    return entries_ok and found == K2_FIGURE_PAIRS, {
        "abs_U21": amp_transfer,
        "abs_U11": amp_stay,
        "poset_pairs": sorted([list(s), list(t)] for s, t in found),
        "missing": sorted([list(s), list(t)] for s, t in K2_FIGURE_PAIRS - found),
        "extra": sorted([list(s), list(t)] for s, t in found - K2_FIGURE_PAIRS),
    }


def crit_hypercubes(ctx: _Context) -> tuple[bool, dict]:
    rng = np.random.default_rng(SEED)
    ok = True
    details: dict = {"antipodal_max_residual": {}, "bipartite_odd": {}}
    for d in range(2, 7):
        spec = ctx.spectrum(f"Q{d}", lambda d=d: G.hypercube(d))
        n = 2**d
        worst = 0.0
        for _ in range(20):
            size = int(rng.integers(1, n + 1))
            s = sorted(int(v) + 1 for v in rng.choice(n, size=size, replace=False))
            t = sorted(_antipode(d, v) for v in s)
            rep = has_gst(spec, s, t, math.pi / 2)
            worst = max(worst, rep.residual)
            ok &= rep.holds and rep.residual < 1e-9
            ctx.witnesses.append((f"hypercube:{d}", s, t, math.pi / 2))
        details["antipodal_max_residual"][d] = worst
        if d % 2:
            x = G.hypercube(d)
            v0, v1 = G.bipartition(x)
            rep = has_gst(spec, sorted(v0), sorted(v1), math.pi / 2)
            cands = [c for c in bipartite_times(spec) if c.case == "b"]
            predicted = bool(cands) and abs(cands[0].time - math.pi / 2) < 1e-12
            ok &= rep.holds and rep.residual < 1e-9 and predicted
            details["bipartite_odd"][d] = {"residual": rep.residual, "case_b_predicts_pi_2": predicted}
            ctx.witnesses.append((f"hypercube:{d}", sorted(v0), sorted(v1), math.pi / 2))
    x3 = G.hypercube(3)
    v0, v1 = G.bipartition(x3)
    cert = certify_gst(x3, sorted(v0), sorted(v1), 1, 4)
    details["exact_certificate_Q3"] = cert.verdict
    return ok and cert.holds, details


def crit_double_star(ctx: _Context) -> tuple[bool, dict]:
    ok = True
    res = {}
    for k in range(1, 9):
        spec = ctx.spectrum(f"DS{k}", lambda k=k: G.double_star(k))
        tau = TWO_PI / math.sqrt(4 * k + 1)
        rep = has_gst(spec, [1, 2], [1, 2], tau)
        res[k] = rep.residual
        ok &= rep.holds and rep.residual < 1e-8
        ctx.witnesses.append((f"doublestar:{k}", [1, 2], [1, 2], tau))
    cert = certify_gst(G.double_star(2), [1, 2], [1, 2], 1, 3)
    return ok and cert.holds, {"residuals": res, "exact_certificate_k2": cert.verdict}


def crit_equal_card(ctx: _Context) -> tuple[bool, dict]:
    if not ctx.witnesses:
        for fn in (crit_k2, crit_hypercubes, crit_double_star):
            fn(ctx)
    from .dsl import load_graph

    ok = True
    worst = 0.0
    failures = []
    cache: dict[str, Spectrum] = {}
    for dsl, s, t, tau in ctx.witnesses:
        if dsl not in cache:
            cache[dsl] = decompose(load_graph(dsl))
        rep = equal_card_structure(cache[dsl], s, t, tau)
        res = max(rep.max_residual, rep.block_unitarity_error)
        worst = max(worst, res)
        if not (rep.all_hold and res < 1e-8):
            ok = False
            failures.append({"graph": dsl, "source": s, "target": t, "time": tau})
    return ok, {"witnesses": len(ctx.witnesses), "max_residual": worst, "failures": failures}


def crit_mckay(ctx: _Context) -> tuple[bool, dict]:
    spec = ctx.spectrum("mckay", G.mckay)
    result = ctx.scan("mckay", G.mckay, (0.0, 30.0))
    s = VertexSet.of(8, [3, 6])
    best = (None, None)
    candidates = sorted({h.time for h in result.hits} | set(result.event_times()))
    for t in candidates:
        r = has_gst(spec, s, s, t).residual
        if best[0] is None or r < best[0]:
            best = (r, t)
    witnesses = [
        t for t in candidates
        if t > 0 and has_gst(spec, s, s, t).residual < 1e-8
        and any(abs(h.time - t) <= 1e-6 for h in result.hits)  # hits passed isolation
    ]
    # dense residual profile, independent of the scan's hit list
    grid = np.linspace(0.5, 30.0, 59001)
    phases = np.exp(1j * np.outer(grid, spec.eigenvalues))
    block = np.einsum("gr,rba->gba", phases, spec.projectors[:, :, [2, 5]])
    outside = [0, 1, 3, 4, 6, 7]
    profile = np.abs(block[:, outside, :]).max(axis=(1, 2))
    i = int(profile.argmin())
    return bool(witnesses), {
        "scan_hits": len(result.hits),
        "scan_events": len(result.events),
        "witness_times": witnesses,
        "best_scan_candidate": {"time": best[1], "residual": best[0]},
        "dense_profile_min": {"time": float(grid[i]), "residual": float(profile[i])},
    }


def _no_events_inside(result: ScanResult, hi: float) -> list[float]:
    return [t for t in result.event_times() if t < hi - 1e-6]


def crit_srg(ctx: _Context) -> tuple[bool, dict]:
    details: dict = {}
    x = G.complete_multipartite([2, 2, 2])
    spec = ctx.spectrum("K222", lambda: x)
    worst = 0.0
    ok = True
    for b in x.vertices:
        target = [b] + [v for v in x.vertices if v != b and not x.adjacent(b, v)]
        rep = has_gst(spec, [b], target, math.pi)
        worst = max(worst, rep.residual)
        ok &= rep.holds and rep.residual < 1e-9
    details["K222_max_residual"] = worst
    interval = (1e-3, TWO_PI)
    for key, make in (("petersen", G.petersen), ("paley13", lambda: G.paley(13))):
        res = ctx.scan(key, make, interval)
        inside = _no_events_inside(res, TWO_PI)
        ok &= not inside
        details[key] = {
            "events_inside": inside,
            "endpoint_events": [t for t in res.event_times() if t not in inside],
            "grid_caveat": (
                f"grid step {SCAN_STEP}: zeros narrower than the grid resolution "
                "can be missed, so this is evidence and not proof"
            ),
            "warnings": res.warnings,
        }
    sweep = conference_sweep(5, 1, 10**5)
    ok &= not sweep.solutions
    details["C5_conference_sweep"] = sweep.to_dict()
    return ok, details


def crit_products_joins(ctx: _Context) -> tuple[bool, dict]:
    details: dict = {}
    ok = True
    # K2 x K2 at pi/2: product of the K2 PST witnesses, vertex (a,b) -> 2(a-1)+b
    k22 = ctx.spectrum("K2xK2", lambda: G.cartesian_product(G.complete(2), G.complete(2)))
    rep = has_gst(k22, [1], [4], math.pi / 2)
    details["K2xK2"] = rep.residual
    ok &= rep.holds and rep.residual < 1e-8
    # doublestar(2) x K2: 2pi is a common time (3 double star periods, K2 identity)
    x = G.cartesian_product(G.double_star(2), G.complete(2))
    ds = ctx.spectrum("DS2xK2", lambda: x)

    def prod(s1, s2):
        return [2 * (a - 1) + b for a in s1 for b in s2]

    rep = has_gst(ds, prod([1, 2], [1]), prod([1, 2], [1]), TWO_PI)
    # the S x V(Y) form holds at the double star period itself
    rep2 = has_gst(ds, prod([1, 2], [1, 2]), prod([1, 2], [1, 2]), TWO_PI / 3)
    details["DS2xK2"] = {"common_time_2pi": rep.residual, "S_x_VY_at_2pi_3": rep2.residual}
    ok &= rep.holds and rep2.holds and max(rep.residual, rep2.residual) < 1e-8
    joins = {
        "K3": (0, 1, 1, 2, lambda: G.join(G.complete(1), G.complete(2))),
        "C4": (0, 2, 0, 2, lambda: G.join(G.from_edges(2, []), G.from_edges(2, []))),
        "W5": (0, 1, 2, 4, lambda: G.join(G.complete(1), G.cycle(4))),
    }
    warnings = set()
    for name, (k1, m1, k2, m2, make) in joins.items():
        spec = ctx.spectrum(name, make)
        worst = 0.0
        for cand in join_times(k1, m1, k2, m2):
            warnings.add(cand.info["warning"])
            for s, t in cand.pairs:
                worst = max(worst, has_gst(spec, s, t, cand.time).residual)
        details[name] = {"D": (k1 - k2) ** 2 + 4 * m1 * m2, "max_residual": worst}
        ok &= worst < 1e-9
    details["warnings"] = sorted(warnings)
    return ok and bool(warnings), details


_SPECIAL_TIMES = {
    "K2": (lambda: G.complete(2), (math.pi / 2, math.pi)),
    "Q2": (lambda: G.hypercube(2), (math.pi / 2, math.pi)),
    "Q3": (lambda: G.hypercube(3), (math.pi / 2, math.pi)),
    "DS2": (lambda: G.double_star(2), (TWO_PI / 3, 2 * TWO_PI / 3)),
    "P3": (lambda: G.path(3), (math.pi / math.sqrt(2), math.sqrt(2) * math.pi)),
}
GENERIC_TIMES = (0.37, 1.13, 2.29, 3.71, 5.27)


def crit_topology(ctx: _Context) -> tuple[bool, dict]:
    ok = True
    details: dict = {}
    for key, (make, special) in _SPECIAL_TIMES.items():
        spec = ctx.spectrum(key, make)
        row = {}
        for t in special:
            topo = topology_at(spec, t)
            good = verify_topology_axioms(topo)
            ok &= good
            row[f"{t:.6f}"] = {"axioms": good, "closed_sets": len(topo.closed_masks)}
        for t in GENERIC_TIMES:
            topo = topology_at(spec, t)
            good = verify_topology_axioms(topo) and topo.is_indiscrete()
            ok &= good
            row[f"{t:.6f}"] = {"axioms": verify_topology_axioms(topo), "indiscrete": topo.is_indiscrete()}
        details[key] = row
    q2 = topology_at(ctx.spectrum("Q2", _SPECIAL_TIMES["Q2"][0]), math.pi / 2)
    details["Q2_pi_2_discrete"] = q2.is_discrete()
    return ok and q2.is_discrete() and q2.n == 4, details


_AUDIT_GRAPHS = {
    "K2": lambda: G.complete(2),
    "Q2": lambda: G.hypercube(2),
    "Q3": lambda: G.hypercube(3),
    "Q4": lambda: G.hypercube(4),
    "DS1": lambda: G.double_star(1),
    "DS2": lambda: G.double_star(2),
    "DS3": lambda: G.double_star(3),
    "DS8": lambda: G.double_star(8),
    "K222": lambda: G.complete_multipartite([2, 2, 2]),
    "petersen": G.petersen,
    "paley13": lambda: G.paley(13),
    "K2xK2": lambda: G.cartesian_product(G.complete(2), G.complete(2)),
    "DS2xK2": lambda: G.cartesian_product(G.double_star(2), G.complete(2)),
    "K3": lambda: G.complete(3),
    "C4": lambda: G.cycle(4),
    "W5": lambda: G.join(G.complete(1), G.cycle(4)),
}


def crit_monogamy(ctx: _Context) -> tuple[bool, dict]:
    ctx.scan("mckay", G.mckay, (0.0, 30.0))
    for key, make in _AUDIT_GRAPHS.items():
        ctx.scan(key, make, (1e-3, TWO_PI))
    total = 0
    audits = {}
    for (key, interval), res in sorted(ctx.scans.items()):
        audit = monogamy_audit(res)
        total += len(audit["violations"])
        audits[f"{key}{list(interval)}"] = {
            "events": len(res.events),
            "sources": audit["sources"],
            "violations": audit["violations"],
        }
    return total == 0, {"scans": len(ctx.scans), "violations": total, "audits": audits}


# ------------------------------------------------------- property suites

PROPERTY_CASES = 10_000


def _random_graph(rng: np.random.Generator) -> G.Graph:
    n = int(rng.integers(2, 11))
    p = float(rng.uniform(0.2, 0.9))
    upper = np.triu(rng.random((n, n)) < p, 1)
    return G.Graph((upper | upper.T).astype(int))


_SPECIAL_POOL = (
    (lambda: G.complete(2), (math.pi / 2,)),
    (lambda: G.hypercube(2), (math.pi / 2, math.pi)),
    (lambda: G.hypercube(3), (math.pi / 2, math.pi)),
    (lambda: G.double_star(2), (TWO_PI / 3,)),
    (lambda: G.double_star(3), (TWO_PI / math.sqrt(13),)),
    (lambda: G.path(3), (math.pi / math.sqrt(2),)),
    (lambda: G.cycle(4), (math.pi / 2,)),
    (lambda: G.complete_multipartite([2, 2, 2]), (math.pi,)),
    (lambda: G.complete(3), (TWO_PI / 3,)),
    (lambda: G.cartesian_product(G.complete(2), G.path(3)), (math.pi / math.sqrt(2),)),
)


def _rand_set(rng, n) -> VertexSet:
    return VertexSet(n, int(rng.integers(0, 1 << n)))


def _property_case(rng, spec: Spectrum, t: float, t2: float) -> list[str]:
    """Run every suite once; return names of suites that failed."""
    n = spec.n
    fails = []
    s1, s2, t1 = _rand_set(rng, n), _rand_set(rng, n), _rand_set(rng, n)
    u = transition(spec, t).entries
    mp = maximal_pairs(spec, t)

    # basic GST laws: singletons, shrink/grow, meet/join, composition, complements, reversal
    ok = True
    rep = has_gst(spec, s1, t1, t)
    ok &= rep.holds == all(has_gst(spec, [a], t1, t).holds for a in s1)
    if rep.holds:
        sub = VertexSet(n, s1.mask & int(rng.integers(0, 1 << n)))
        sup = t1 | _rand_set(rng, n)
        ok &= has_gst(spec, sub, sup, t).holds
    f1, f2 = forward_set(spec, s1, t), forward_set(spec, s2, t)
    ok &= has_gst(spec, s1 & s2, f1 & f2, t).holds and has_gst(spec, s1 | s2, f1 | f2, t).holds
    mid = forward_set(spec, s1, t)
    end = forward_set(spec, mid, t2)
    ok &= has_gst(spec, s1, end, t + t2).holds
    ok &= has_gst(spec, t1.complement(), s1.complement(), t).holds == rep.holds
    back = has_gst(spec, s1, t1, -t)
    ok &= back.holds == rep.holds and abs(back.residual - rep.residual) <= 1e-12
    if not ok:
        fails.append("gst_laws")

    # forward, inverse and closure laws
    i1, i2 = inverse_set(spec, s1, t), inverse_set(spec, s2, t)
    sub = VertexSet(n, s1.mask & s2.mask)
    ok = forward_set(spec, sub, t).issubset(f1) and inverse_set(spec, sub, t).issubset(i1)
    ok &= forward_set(spec, s1 & s2, t).issubset(f1 & f2)
    ok &= forward_set(spec, s1 | s2, t) == f1 | f2
    ok &= inverse_set(spec, s1 & s2, t) == i1 & i2
    ok &= (i1 | i2).issubset(inverse_set(spec, s1 | s2, t))
    c1, c2 = closure(spec, s1, t), closure(spec, s2, t)
    ok &= s1.issubset(c1)
    ok &= closure(spec, s1 & s2, t).issubset(c1 & c2)
    ok &= (c1 | c2).issubset(closure(spec, s1 | s2, t))
    ok &= closure(spec, c1, t) == c1
    if not ok:
        fails.append("set_map_laws")

    if len(f1) < len(s1):
        fails.append("cardinality")

    if mp.forward(s1) != f1 or mp.forward(s1 | s2) != f1 | f2:
        fails.append("union_additivity")

    us = transition(spec, t2).entries
    ust = transition(spec, t + t2).entries
    if np.abs(ust - us @ u).max() > 1e-9 * n:
        fails.append("group_law")
    return fails


def crit_properties(ctx: _Context, cases: int = PROPERTY_CASES) -> tuple[bool, dict]:
    rng = np.random.default_rng(SEED)
    suites = (
        "gst_laws",
        "set_map_laws",
        "cardinality",
        "union_additivity",
        "group_law",
        "spectral_invariants",
    )
    failures = {k: 0 for k in suites}
    special = [(decompose(make()), times) for make, times in _SPECIAL_POOL]
    done = 0
    graphs = 0
    while done < cases:
        if graphs % 2 == 0:
            spec, times = special[(graphs // 2) % len(special)]
            pick = lambda: float(rng.choice(times)) * float(rng.choice([1, -1, 2]))
        else:
            spec = decompose(_random_graph(rng))
            pick = lambda: float(rng.uniform(-10, 10))
        graphs += 1
        if not verify_spectrum(spec).ok(1e-9):
            failures["spectral_invariants"] += 1
        for _ in range(min(25, cases - done)):
            for name in _property_case(rng, spec, pick(), pick()):
                failures[name] += 1
            done += 1
    return not any(failures.values()), {"cases": done, "graphs": graphs, "failures": failures}


CRITERIA: tuple[tuple[int, str, Callable[[_Context], tuple[bool, dict]]], ...] = (
    (1, "K2 perfect state transfer and poset", crit_k2),
    (2, "hypercube antipodal and bipartite GST", crit_hypercubes),
    (3, "symmetric double star periodicity", crit_double_star),
    (4, "equal-cardinality block structure", crit_equal_card),
    (5, "McKay graph (S,S)-GST by scan", crit_mckay),
    (6, "strongly regular graph behaviour", crit_srg),
    (7, "Cartesian products and joins", crit_products_joins),
    (8, "t-closed topology", crit_topology),
    (9, "monogamy audit over scans", crit_monogamy),
    (10, "randomized property suites", crit_properties),
)


def run_golden(only: list[int] | None = None) -> list[CriterionResult]:
    ctx = _Context()
    out = []
    for number, name, fn in CRITERIA:
        if only and number not in only:
            continue
        start = time.perf_counter()
        try:
            passed, details = fn(ctx)
        except Exception as exc:  # a crash is a failed criterion, reported with its cause
            logger.exception("criterion %d raised", number)
            passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
        out.append(CriterionResult(number, name, bool(passed), details, time.perf_counter() - start))
    return out
