"""Group state transfer between vertex subsets.

A pair (S, T) has GST at time t when every column of U(t) indexed by S is
supported inside T. Support is decided by a single absolute threshold
``zero_tol`` on entry moduli.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .spectral import Spectrum, TransitionMatrix, transition

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_ZERO_TOL",
    "FLAGS",
    "GSTReport",
    "StructureReport",
    "VertexSet",
    "classify",
    "closure",
    "complement_transfer",
    "equal_card_structure",
    "forward_set",
    "has_gst",
    "image_masks",
    "inverse_set",
    "parallel_check",
]

DEFAULT_ZERO_TOL = 1e-9
BORDERLINE_FACTOR = 10.0
FLAGS = (
    "trivial",
    "maximal",
    "bijective",
    "periodic",
    "pst",
    "fractional_revival",
    "proper_fractional_revival",
)


@dataclass(frozen=True, order=True)
class VertexSet:
    """A subset of ``{1..universe}`` stored as a bit mask (bit ``v-1`` for vertex ``v``)."""

    universe: int
    mask: int = 0

    def __post_init__(self):
        # numpy integers would leak into the mask arithmetic
        object.__setattr__(self, "universe", int(self.universe))
        object.__setattr__(self, "mask", int(self.mask))
        if self.universe < 0:
            raise ValueError("universe must be nonnegative")
        if self.mask < 0 or self.mask >> self.universe:
            raise ValueError(f"mask {self.mask:#x} has bits outside 1..{self.universe}")

    @classmethod
    def of(cls, universe: int, vertices: Iterable[int]) -> "VertexSet":
        mask = 0
        for v in vertices:
            v = int(v)
            if not 1 <= v <= universe:
                raise ValueError(f"vertex {v} outside 1..{universe}")
            mask |= 1 << (v - 1)
        return cls(universe, mask)

    @classmethod
    def full(cls, universe: int) -> "VertexSet":
        return cls(universe, (1 << universe) - 1)

    @classmethod
    def empty(cls, universe: int) -> "VertexSet":
        return cls(universe, 0)

    def vertices(self) -> list[int]:
        return [v + 1 for v in range(self.universe) if self.mask >> v & 1]

    def indices(self) -> list[int]:
        """0-based positions, for indexing numpy arrays."""
        return [v for v in range(self.universe) if self.mask >> v & 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices())

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, v: int) -> bool:
        return 1 <= v <= self.universe and bool(self.mask >> (v - 1) & 1)

    def _check(self, other: "VertexSet"):
        if other.universe != self.universe:
            raise ValueError("vertex sets over different universes")

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.universe, self.mask | other.mask)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.universe, self.mask & other.mask)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check(other)
        return VertexSet(self.universe, self.mask & ~other.mask)

    def complement(self) -> "VertexSet":
        return VertexSet(self.universe, ((1 << self.universe) - 1) & ~self.mask)

    def issubset(self, other: "VertexSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def is_full(self) -> bool:
        return self.mask == (1 << self.universe) - 1

    def __bool__(self) -> bool:
        return self.mask != 0

    def __str__(self):
        return "{" + ",".join(map(str, self.vertices())) + "}"


def _as_set(spec_or_n, s) -> VertexSet:
    n = spec_or_n if isinstance(spec_or_n, int) else spec_or_n.n
    if isinstance(s, VertexSet):
        if s.universe != n:
            raise ValueError(f"vertex set over {s.universe} vertices, graph has {n}")
        return s
    return VertexSet.of(n, s)


def image_masks(u: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL) -> list[int]:
    """Bit mask of the support of every column of ``u``."""
    support = np.abs(u) > zero_tol
    weights = [1 << i for i in range(u.shape[0])]
    return [sum(w for w, hit in zip(weights, support[:, a]) if hit) for a in range(u.shape[1])]


def _column_support(u: np.ndarray, cols: list[int], zero_tol: float) -> int:
    if not cols:
        return 0
    rows = np.flatnonzero((np.abs(u[:, cols]) > zero_tol).any(axis=1))
    return sum(1 << int(r) for r in rows)


def forward_set(spec: Spectrum, s, t: float, zero_tol: float = DEFAULT_ZERO_TOL) -> VertexSet:
    s = _as_set(spec, s)
    u = transition(spec, t).entries
    return VertexSet(spec.n, _column_support(u, s.indices(), zero_tol))


def inverse_set(spec: Spectrum, s, t: float, zero_tol: float = DEFAULT_ZERO_TOL) -> VertexSet:
    """Vertices a with ``e_a`` in ``U(t)<S>``, i.e. column a of ``U(-t)`` supported in S."""
    s = _as_set(spec, s)
    u = transition(spec, -t).entries
    outside = np.array([a not in s for a in range(1, spec.n + 1)])
    if not outside.any():
        return VertexSet.full(spec.n)
    leak = (np.abs(u[outside, :]) > zero_tol).any(axis=0)
    return VertexSet.of(spec.n, [a + 1 for a in np.flatnonzero(~leak)])


def closure(spec: Spectrum, s, t: float, zero_tol: float = DEFAULT_ZERO_TOL) -> VertexSet:
    s = _as_set(spec, s)
    return inverse_set(spec, forward_set(spec, s, t, zero_tol), -t, zero_tol)


@dataclass
class GSTReport:
    source: VertexSet
    target: VertexSet
    time: float
    holds: bool
    residual: float
    forward_image: VertexSet
    classification: frozenset[str] = frozenset()
    borderline: list[tuple[int, int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "source": self.source.vertices(),
            "target": self.target.vertices(),
            "time": self.time,
            "holds": self.holds,
            "residual": self.residual,
            "classification": sorted(self.classification),
            "forward_image": self.forward_image.vertices(),
            "borderline": [[b, a, v] for b, a, v in self.borderline],
        }


def classify(
    source: VertexSet,
    target: VertexSet,
    image: VertexSet,
    u: np.ndarray | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> frozenset[str]:
    """Flags for a pair already known to have GST (``image`` inside ``target``)."""
    flags = set()
    if not source or target.is_full():
        flags.add("trivial")
    if target == image:
        flags.add("maximal")
    if len(source) == len(target):
        flags.add("bijective")
        if source == target:
            flags.add("periodic")
        elif len(source) == 1:
            flags.add("pst")
    if len(source) == 1 and len(target) == 2 and source.issubset(target):
        flags.add("fractional_revival")
        if u is not None:
            a = source.indices()[0]
            if all(abs(u[b, a]) > zero_tol for b in target.indices()):
                flags.add("proper_fractional_revival")
    return frozenset(flags)


def _gst_from_matrix(
    u: np.ndarray, s: VertexSet, t_set: VertexSet, time: float, zero_tol: float
) -> GSTReport:
    cols = s.indices()
    rows_out = t_set.complement().indices()
    image = VertexSet(s.universe, _column_support(u, cols, zero_tol))
    if cols and rows_out:
        block = np.abs(u[np.ix_(rows_out, cols)])
        residual = float(block.max())
    else:
        block = np.zeros((0, 0))
        residual = 0.0
    holds = image.issubset(t_set)
    borderline = []
    if block.size:
        hi = BORDERLINE_FACTOR * zero_tol
        for i, j in zip(*np.nonzero((block > zero_tol) & (block < hi))):
            borderline.append((rows_out[i] + 1, cols[j] + 1, float(block[i, j])))
    if borderline:
        logger.debug("borderline support entries near zero_tol: %s", borderline)
    flags = classify(s, t_set, image, u, zero_tol) if holds else frozenset()
    return GSTReport(s, t_set, float(time), holds, residual, image, flags, borderline)


def has_gst(
    spec: Spectrum, s, t_set, t: float, zero_tol: float = DEFAULT_ZERO_TOL
) -> GSTReport:
    s = _as_set(spec, s)
    t_set = _as_set(spec, t_set)
    u = transition(spec, t).entries
    return _gst_from_matrix(u, s, t_set, t, zero_tol)


def complement_transfer(
    spec: Spectrum, s, t_set, t: float, zero_tol: float = DEFAULT_ZERO_TOL
) -> GSTReport:
    """GST check on ``(V \\ T, V \\ S)``; equivalent to ``(S, T)`` by symmetry of U."""
    s = _as_set(spec, s)
    t_set = _as_set(spec, t_set)
    return has_gst(spec, t_set.complement(), s.complement(), t, zero_tol)


@dataclass
class StructureReport:
    source: VertexSet
    target: VertexSet
    time: float
    clauses: dict[str, GSTReport]
    block_unitarity_error: float

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.clauses.values())

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.clauses.values())

    def to_dict(self) -> dict:
        return {
            "source": self.source.vertices(),
            "target": self.target.vertices(),
            "time": self.time,
            "all_hold": self.all_hold,
            "block_unitarity_error": self.block_unitarity_error,
            "clauses": {k: v.to_dict() for k, v in self.clauses.items()},
        }


def equal_card_structure(
    spec: Spectrum, s, t_set, t: float, zero_tol: float = DEFAULT_ZERO_TOL
) -> StructureReport:
    """Check the six consequences of bijective (S, T)-GST at time t."""
    s = _as_set(spec, s)
    t_set = _as_set(spec, t_set)
    if len(s) != len(t_set):
        raise ValueError("equal_card_structure needs |S| = |T|")
    base = has_gst(spec, s, t_set, t, zero_tol)
    if not base.holds:
        raise ValueError(
            f"no ({s},{t_set})-GST at t={t}: residual {base.residual:.3e} > zero_tol"
        )
    inter = s & t_set
    rest = (s | t_set).complement()
    clauses = {
        "a_reverse": has_gst(spec, t_set, s, t, zero_tol),
        "b_disjoint_forward": has_gst(spec, s - inter, t_set - inter, t, zero_tol),
        "c_disjoint_reverse": has_gst(spec, t_set - inter, s - inter, t, zero_tol),
        "d_intersection_periodic": has_gst(spec, inter, inter, t, zero_tol),
        "e_source_periodic_2t": has_gst(spec, s, s, 2 * t, zero_tol),
        "e_target_periodic_2t": has_gst(spec, t_set, t_set, 2 * t, zero_tol),
        "f_remainder_periodic": has_gst(spec, rest, rest, t, zero_tol),
    }
    u = transition(spec, t).entries
    block = u[np.ix_(t_set.indices(), s.indices())]
    err = float(np.abs(block @ block.conj().T - np.eye(len(s))).max()) if len(s) else 0.0
    return StructureReport(s, t_set, float(t), clauses, err)


def _span_projector(cols: np.ndarray, tol: float) -> np.ndarray:
    if cols.shape[1] == 0:
        return np.zeros((cols.shape[0], cols.shape[0]))
    q, sv, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(sv > tol))
    q = q[:, :rank]
    return q @ q.conj().T


def parallel_check(spec: Spectrum, s, t_set, tol: float = 1e-8) -> list[bool]:
    """For each eigenvalue, whether ``span{E_r e_a : a in S}`` equals the span over T."""
    s = _as_set(spec, s)
    t_set = _as_set(spec, t_set)
    if len(s) != len(t_set):
        raise ValueError("parallel_check needs |S| = |T|")
    out = []
    for e in spec.projectors:
        ps = _span_projector(e[:, s.indices()], tol)
        pt = _span_projector(e[:, t_set.indices()], tol)
        out.append(bool(np.abs(ps - pt).max() <= tol))
    return out


def gst_from_transition(
    tm: TransitionMatrix, s: VertexSet, t_set: VertexSet, zero_tol: float = DEFAULT_ZERO_TOL
) -> GSTReport:
    """``has_gst`` on an already evaluated U(t)."""
    return _gst_from_matrix(tm.entries, s, t_set, tm.time, zero_tol)
