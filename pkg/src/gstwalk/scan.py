"""Locating times of nontrivial group state transfer.

Every entry of U(t) is a finite exponential sum
``f(t) = sum_r (E_r)_{b,a} exp(i theta_r t)``. Zeros are found by sampling
``|f|^2`` on a grid, bracketing grid minima and refining them by
golden-section search. Closed-form candidate times for known families are
emitted separately and always checked numerically before being reported.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import Graph, SrgParams, bipartition, double_star, is_connected
from .gst import DEFAULT_ZERO_TOL, VertexSet, gst_from_transition, image_masks
from .poset import MaximalPairMap
from .spectral import Spectrum, srg_eigen, transition

logger = logging.getLogger(__name__)

__all__ = [
    "Candidate",
    "ConferenceSweep",
    "ScanEvent",
    "ScanResult",
    "ZeroHit",
    "bipartite_times",
    "double_star_time",
    "entry_zero_scan",
    "isolation_check",
    "join_times",
    "monogamy_audit",
    "srg_times",
    "validate_candidate",
    "worker_count",
]

TIME_TOL = 1e-12
EVENT_GAP = 1e-6
IDENTITY_TIME = 1e-9  # hits this close to t=0 are U(0)=I, not transfer
ORIGIN_SAMPLES = 64
INV_PHI = (math.sqrt(5) - 1) / 2
JOIN_WARNING = (
    "join transfer time: the radicand k1+k2 +/- sqrt((k1-k2)^2+4m1m2) fails numerical "
    "validation (e.g. K1+K2 = K3); candidates use the eigenvalue gap sqrt((k1-k2)^2+4m1m2)"
)


def worker_count() -> int:
    env = os.environ.get("GSTWALK_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True)
class ZeroHit:
    row: int  # 1-indexed b
    col: int  # 1-indexed a
    time: float
    refined_residual: float
    order: int = 1  # order of the zero as seen by derivative test
    width: float = 0.0  # half-width of the window where |U_{row,col}| <= zero_tol

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "col": self.col,
            "time": self.time,
            "refined_residual": self.refined_residual,
            "order": self.order,
            "width": self.width,
        }


@dataclass
class ScanEvent:
    time: float
    pairs: list[tuple[VertexSet, VertexSet]]  # bijective (S, F(S)) with S a minimal tight set
    zero_entries: int

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "zero_entries": self.zero_entries,
            "bijective_pairs": [[s.vertices(), t.vertices()] for s, t in self.pairs],
        }


@dataclass
class ScanResult:
    interval: tuple[float, float]
    grid_step: float
    zero_tol: float
    hits: list[ZeroHit]
    events: list[ScanEvent]
    warnings: list[str] = field(default_factory=list)
    rejected: list[ZeroHit] = field(default_factory=list)  # below tol but not isolated

    @property
    def gst_events(self) -> list[tuple[float, list[tuple[VertexSet, VertexSet]]]]:
        return [(e.time, e.pairs) for e in self.events]

    def event_times(self) -> list[float]:
        return [e.time for e in self.events]

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "grid_step": self.grid_step,
            "zero_tol": self.zero_tol,
            "hits": [h.to_dict() for h in self.hits],
            "events": [e.to_dict() for e in self.events],
            "warnings": list(self.warnings),
            "rejected": [h.to_dict() for h in self.rejected],
        }


# ------------------------------------------------------------ entry functions


def _eval(coeffs: np.ndarray, theta: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Row-wise ``sum_r coeffs[k, r] exp(i theta_r t[k])``."""
    return np.einsum("kr,kr->k", coeffs, np.exp(1j * np.outer(t, theta)))


def _golden_batch(coeffs, theta, lo, hi, tol=TIME_TOL):
    """Minimise ``|f_k|^2`` on ``[lo_k, hi_k]`` for all k at once."""
    a = lo.astype(float)
    b = hi.astype(float)

    def sq(x):
        return np.abs(_eval(coeffs, theta, x)) ** 2

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = sq(c), sq(d)
    width = float((b - a).max(initial=0.0))
    iters = int(math.ceil(math.log(max(width, tol) / tol) / -math.log(INV_PHI))) + 1
    for _ in range(iters):
        left = fc < fd
        b, a = np.where(left, d, b), np.where(left, a, c)
        c_new = np.where(left, b - INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + INV_PHI * (b - a))
        f_new = sq(np.where(left, c_new, d_new))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_new, d_new
    t = np.where(fc < fd, c, d)
    # the minimum may sit on the bracket boundary (interval endpoints)
    for edge in (lo.astype(float), hi.astype(float)):
        t = np.where(sq(edge) < sq(t), edge, t)
    return t, np.abs(_eval(coeffs, theta, t))


def _zero_order(coeffs: np.ndarray, theta: np.ndarray, t: float, zero_tol: float) -> int:
    """Lowest k >= 1 with a non-negligible k-th derivative of f at t; 0 if none."""
    phase = coeffs * np.exp(1j * theta * t)
    for k in range(1, len(theta) + 1):
        terms = phase * (1j * theta) ** k
        scale = np.abs(terms).sum()
        if scale > 0 and abs(terms.sum()) > max(zero_tol, 1e-9 * scale):
            return k
    return 0


def isolation_check(
    spec: Spectrum,
    hit: ZeroHit,
    delta: float = 1e-4,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> bool:
    """Whether the zero of entry ``(row, col)`` at ``hit.time`` is isolated.

    The entry is sampled at ``time +/- delta_j`` with five geometrically
    spaced offsets from 1e-6 to ``delta``. A zero of order k > 1 can stay
    below ``zero_tol`` at the smallest offsets, so in that case a nonzero
    derivative of order at most d+1 (which forces isolation of an analytic
    exponential sum) is accepted instead.
    """
    if spec.adjacency is None or not is_connected(Graph(spec.adjacency.astype(int))):
        raise ValueError("isolation_check requires a connected graph")
    c = spec.entry_coefficients(hit.row, hit.col)
    offsets = np.geomspace(1e-6, delta, 5)
    ts = np.concatenate([hit.time - offsets, hit.time + offsets])
    vals = np.abs(np.exp(1j * np.outer(ts, spec.eigenvalues)) @ c)
    if np.all(vals > zero_tol):
        return True
    return _zero_order(c, spec.eigenvalues, hit.time, zero_tol) > 0


def _attached_to_origin(coeffs: np.ndarray, theta: np.ndarray, t: float, zero_tol: float) -> bool:
    """Whether the entry stays below zero_tol on all of [0, t].

    Such a hit is the zero of U(0) = I seen through a flat Taylor tail,
    not a separate transfer time.
    """
    if abs(t) <= IDENTITY_TIME:
        return True
    ts = np.concatenate([np.linspace(0.0, t, ORIGIN_SAMPLES), t * np.geomspace(1e-6, 1.0, 16)])
    vals = np.abs(np.exp(1j * np.outer(ts, theta)) @ coeffs)
    return bool(vals.max() <= zero_tol)


def _flat_halfwidth(coeffs: np.ndarray, theta: np.ndarray, t: float, zero_tol: float) -> float:
    """Largest offset o (on a log grid) with |f| <= zero_tol on both sides up to o."""
    offsets = np.geomspace(1e-12, 1e-1, 67)
    ts = np.concatenate([t - offsets, t + offsets])
    vals = np.abs(np.exp(1j * np.outer(ts, theta)) @ coeffs).reshape(2, -1).max(axis=0)
    above = np.flatnonzero(vals > zero_tol)
    if above.size == 0:
        return float(offsets[-1])
    return float(offsets[above[0] - 1]) if above[0] > 0 else 0.0


def _grid(interval, grid_step):
    t0, t1 = map(float, interval)
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
        raise ValueError("scan interval must be finite with t0 < t1")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    count = int(math.ceil((t1 - t0) / grid_step - 1e-9))
    return np.linspace(t0, t1, count + 1)


def _scan_chunk(spec, pairs, grid, zero_tol):
    theta = spec.eigenvalues
    coeffs = np.array([spec.projectors[:, b, a] for b, a in pairs])  # (P, d+1)
    step = grid[1] - grid[0]
    lipschitz = np.abs(coeffs * theta).sum(axis=1)
    vals = np.exp(1j * np.outer(grid, theta)) @ coeffs.T  # (N, P)
    g = np.abs(vals)
    n = len(grid)
    cand_k, cand_i = [], []
    for k in range(len(pairs)):
        col = g[:, k]
        left = np.r_[np.inf, col[:-1]]
        right = np.r_[col[1:], np.inf]
        mins = np.flatnonzero((col <= left) & (col < right))
        # a zero within half a grid step of a grid point keeps |f| below this bound there
        mins = mins[col[mins] <= 10 * zero_tol + lipschitz[k] * step]
        cand_k.extend([k] * len(mins))
        cand_i.extend(mins.tolist())
    if not cand_k:
        return []
    cand_k = np.array(cand_k)
    cand_i = np.array(cand_i)
    lo = grid[np.maximum(cand_i - 1, 0)]
    hi = grid[np.minimum(cand_i + 1, n - 1)]
    t, res = _golden_batch(coeffs[cand_k], theta, lo, hi)
    out = []
    for k, ti, r in zip(cand_k, t, res):
        b, a = pairs[k]
        out.append((b, a, float(ti), float(r)))
    return out


def entry_zero_scan(
    spec: Spectrum,
    interval: tuple[float, float],
    grid_step: float = 1e-3,
    zero_tol: float = DEFAULT_ZERO_TOL,
    workers: int | None = None,
) -> ScanResult:
    grid = _grid(interval, grid_step)
    step = float(grid[1] - grid[0])
    warnings = []
    spread = float(spec.eigenvalues.max() - spec.eigenvalues.min())
    if spread * step > 0.5:
        msg = f"grid step {step:.3g} is coarse for spectral spread {spread:.3g}; zeros may be missed"
        logger.warning(msg)
        warnings.append(msg)

    n = spec.n
    pairs = [
        (b, a)
        for a in range(n)
        for b in range(a + 1)
        if np.abs(spec.projectors[:, b, a]).max() > 1e-12
    ]
    budget = max(1, int(4e6 // len(grid)))
    chunks = [pairs[i : i + budget] for i in range(0, len(pairs), budget)]
    workers = workers or worker_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ch: _scan_chunk(spec, ch, grid, zero_tol), chunks))
    else:
        parts = [_scan_chunk(spec, ch, grid, zero_tol) for ch in chunks]

    connected = spec.adjacency is not None and is_connected(Graph(spec.adjacency.astype(int)))
    hits, rejected = [], []
    for b, a, t, r in sorted(h for part in parts for h in part):
        coeffs = spec.projectors[:, b, a]
        if r > zero_tol or _attached_to_origin(coeffs, spec.eigenvalues, t, zero_tol):
            continue
        order = _zero_order(coeffs, spec.eigenvalues, t, zero_tol)
        mirrored = [(b, a)] if a == b else [(b, a), (a, b)]
        width = _flat_halfwidth(coeffs, spec.eigenvalues, t, zero_tol)
        for row, col in mirrored:
            hit = ZeroHit(row + 1, col + 1, t, r, order, width)
            if connected and not isolation_check(spec, hit, zero_tol=zero_tol):
                rejected.append(hit)
            else:
                hits.append(hit)
    hits.sort(key=lambda h: (h.time, h.row, h.col))
    events = _events(spec, hits, zero_tol)
    return ScanResult((float(grid[0]), float(grid[-1])), step, zero_tol, hits, events, warnings, rejected)


def _events(spec: Spectrum, hits: list[ZeroHit], zero_tol: float) -> list[ScanEvent]:
    # hits whose below-tolerance windows overlap (or nearly touch) form one event
    clusters: list[list[ZeroHit]] = []
    reach = -math.inf
    for h in sorted(hits, key=lambda h: h.time - h.width):
        if clusters and h.time - h.width <= reach + EVENT_GAP:
            clusters[-1].append(h)
        else:
            clusters.append([h])
            reach = -math.inf
        reach = max(reach, h.time + h.width)
    events = []
    for cl in clusters:
        # the sharpest zero pins the time; flat higher-order zeros only bracket it
        best = min(cl, key=lambda h: (h.width, h.refined_residual))
        t = best.time
        u = transition(spec, t).entries
        mp = MaximalPairMap(t, spec.n, tuple(image_masks(u, zero_tol)))
        pairs = []
        for s in mp.tight_components():
            if not s.is_full():
                pairs.append((s, mp.forward(s)))
        events.append(ScanEvent(t, pairs, len({(h.row, h.col) for h in cl})))
    return events


def monogamy_audit(result: ScanResult, spec: Spectrum | None = None) -> dict:
    """Sources of bijective events with more than one partner other than themselves."""
    partners: dict[VertexSet, set[VertexSet]] = {}
    for ev in result.events:
        for s, t in ev.pairs:
            partners.setdefault(s, set()).add(t)
    violations = []
    for s, targets in partners.items():
        others = {t for t in targets if t != s}
        if len(others) > 1:
            violations.append(
                {"source": s.vertices(), "targets": sorted(t.vertices() for t in others)}
            )
    return {
        "sources": len(partners),
        "partners": {
            str(s): sorted(t.vertices() for t in targets)
            for s, targets in sorted(partners.items(), key=lambda kv: kv[0].mask)
        },
        "violations": violations,
    }


# ------------------------------------------------------- closed-form times


@dataclass
class Candidate:
    case: str
    time: float
    pairs: list[tuple[VertexSet, VertexSet]] = field(default_factory=list)
    rule: str = ""  # target rule when pairs depend on a concrete graph
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "time": self.time,
            "rule": self.rule,
            "pairs": [[s.vertices(), t.vertices()] for s, t in self.pairs],
            "info": self.info,
        }


def _rational_scaling(theta: np.ndarray, bound: int, tol: float = 1e-9):
    """Smallest alpha > 0 with all ``alpha*theta`` integers, or None."""
    pos = theta[theta > 1e-9]
    if pos.size == 0:
        return None
    base = float(pos.min())
    fracs = []
    for x in theta / base:
        fr = Fraction(float(x)).limit_denominator(bound)
        if abs(float(fr) - x) > tol:
            return None
        fracs.append(fr)
    lcm = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * lcm) for f in fracs]
    g = math.gcd(*ints)
    return lcm / (g * base), [k // g for k in ints]


def bipartite_times(
    spec: Spectrum, denominator_bound: int = 64, multiples: int = 2
) -> list[Candidate]:
    x = Graph(spec.adjacency.astype(int))
    parts = bipartition(x)
    if parts is None:
        raise ValueError("bipartite_times requires a bipartite graph")
    found = _rational_scaling(spec.eigenvalues, denominator_bound)
    if found is None:
        return []
    alpha0, ints = found
    v0 = VertexSet.of(x.n, parts[0])
    v1 = VertexSet.of(x.n, parts[1])
    out = []
    all_odd = all(k % 2 for k in ints)
    for j in range(1, multiples + 1):
        alpha = alpha0 * j
        if all_odd and j % 2:
            out.append(
                Candidate("b", math.pi * alpha / 2, [(v0, v1), (v1, v0)], info={"alpha": alpha})
            )
        out.append(Candidate("a", math.pi * alpha, [(v0, v0), (v1, v1)], info={"alpha": alpha}))
    return sorted(out, key=lambda c: (c.time, c.case))


def join_times(k1: int, m1: int, k2: int, m2: int, count: int = 3) -> list[Candidate]:
    gap_sq = (k1 - k2) ** 2 + 4 * m1 * m2
    n = m1 + m2
    v1 = VertexSet.of(n, range(1, m1 + 1))
    v2 = VertexSet.of(n, range(m1 + 1, n + 1))
    rejected = [k1 + k2 + s * math.sqrt(gap_sq) for s in (1, -1)]
    out = []
    for ell in range(1, count + 1):
        out.append(
            Candidate(
                "join",
                2 * ell * math.pi / math.sqrt(gap_sq),
                [(v1, v1), (v2, v2)],
                info={"ell": ell, "D": gap_sq, "rejected_radicands": rejected, "warning": JOIN_WARNING},
            )
        )
    return out


def double_star_time(k: int) -> tuple[Graph, float, VertexSet]:
    if k < 1:
        raise ValueError("double star needs k >= 1")
    x = double_star(k)
    return x, 2 * math.pi / math.sqrt(4 * k + 1), VertexSet.of(x.n, (1, 2))


@dataclass
class ConferenceSweep:
    bound: int
    tolerance: float
    solutions: list[int]
    closest_b: int
    closest_deviation: float

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "tolerance": self.tolerance,
            "solutions": self.solutions,
            "closest_B": self.closest_b,
            "closest_deviation": self.closest_deviation,
            "verdict": "solutions found" if self.solutions else "no solution up to bound",
        }


def conference_sweep(nu: int, m: int, bound: int = 10**5, tol: float = 1e-9) -> ConferenceSweep:
    b = np.arange(1, bound + 1)
    dev = np.abs(np.cos(np.pi * b / math.sqrt(nu)) + 1 / (4 * m))
    sols = b[dev <= tol].tolist()
    i = int(dev.argmin())
    return ConferenceSweep(bound, tol, sols, int(b[i]), float(dev[i]))


def srg_times(params: SrgParams, conference_bound: int = 10**5) -> list[Candidate]:
    nu, k, lam, mu = params.as_tuple()
    theta1, theta2, f, g = srg_eigen(params)
    out = []
    conference = (nu, k, lam, mu) == (nu, 2 * mu, mu - 1, mu) and nu == 4 * mu + 1
    integral = all(abs(x - round(x)) < 1e-9 for x in (theta1, theta2))
    if integral:
        d = math.gcd(k, abs(round(theta1)), abs(round(theta2)))
        if d >= 2:
            for ell in range(1, d):
                out.append(Candidate("a", 2 * ell * math.pi / d, rule="identity", info={"D": d, "ell": ell}))
    m = nu - k
    if m >= 1 and lam == nu - 2 * m and mu == nu - m and nu % m == 0 and nu // m > 2:
        for ell in range(1, m):
            out.append(
                Candidate(
                    "b",
                    2 * math.pi * ell / m,
                    rule="non_neighbours",
                    info={"m": m, "ell": ell, "maximal": ell % 2 == 1},
                )
            )
    if nu == 2 * k and lam == 0 and mu == k:
        for dd in (x for x in range(1, k + 1) if k % x == 0):
            out.append(Candidate("c", math.pi / dd, rule="bipartition", info={"D": dd}))
    if conference:
        sweep = conference_sweep(nu, mu, conference_bound)
        for bb in sweep.solutions:
            out.append(Candidate("d", 2 * math.pi * bb / nu, rule="conference", info={"B": bb}))
        out.append(Candidate("d-sweep", math.nan, rule="none", info=sweep.to_dict()))
    return sorted(out, key=lambda c: (c.case, c.time))


def srg_candidate_pairs(x: Graph, cand: Candidate) -> list[tuple[VertexSet, VertexSet]]:
    n = x.n
    if cand.rule == "identity":
        return [(VertexSet.of(n, [b]), VertexSet.of(n, [b])) for b in x.vertices]
    if cand.rule == "non_neighbours":
        return [
            (VertexSet.of(n, [b]), VertexSet.of(n, [b]) | VertexSet.of(n, [v for v in x.vertices if not x.adjacent(b, v)]))
            for b in x.vertices
        ]
    if cand.rule == "bipartition":
        v0, v1 = bipartition(x)
        s0, s1 = VertexSet.of(n, v0), VertexSet.of(n, v1)
        return [(s0, s0), (s1, s1)]
    return list(cand.pairs)


def validate_candidate(
    spec: Spectrum, cand: Candidate, pairs=None, zero_tol: float = DEFAULT_ZERO_TOL
) -> float:
    """Largest GST residual of the candidate's pairs at its time."""
    pairs = cand.pairs if pairs is None else pairs
    tm = transition(spec, cand.time)
    return max((gst_from_transition(tm, s, t, zero_tol).residual for s, t in pairs), default=0.0)
