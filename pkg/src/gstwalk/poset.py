"""State-transfer posets, periodic subsets and the t-closed topology."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .gst import DEFAULT_ZERO_TOL, VertexSet, image_masks
from .spectral import Spectrum, transition

__all__ = [
    "MaximalPairMap",
    "STPoset",
    "SubsetCapError",
    "TopologyAtTime",
    "closed_vs_bijective_report",
    "maximal_pairs",
    "periodic_sets",
    "st_poset",
    "topology_at",
    "verify_topology_axioms",
]

ST_POSET_MAX_N = 5
DEFAULT_N_CAP = 16


class SubsetCapError(ValueError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class MaximalPairMap:
    time: float
    n: int
    singleton_images: tuple[int, ...]  # bit masks, index a-1 for vertex a

    def image_of(self, a: int) -> VertexSet:
        return VertexSet(self.n, self.singleton_images[a - 1])

    def forward(self, s: VertexSet) -> VertexSet:
        out = 0
        for i in s.indices():
            out |= self.singleton_images[i]
        return VertexSet(self.n, out)

    def closure(self, s: VertexSet) -> VertexSet:
        fs = self.forward(s).mask
        return VertexSet(
            self.n, sum(1 << i for i, img in enumerate(self.singleton_images) if img & ~fs == 0)
        )

    def is_maximal(self, s: VertexSet, t_set: VertexSet) -> bool:
        """Whether (S, T) is a maximal element of the state-transfer poset."""
        if self.forward(s) != t_set:
            return False
        # a strictly larger source with the same target exists iff closure grows
        return self.closure(s) == s

    def tight_components(self) -> list[VertexSet]:
        """Minimal nonempty sets S with ``|F(S)| = |S|`` containing each vertex.

        Uses a perfect matching of the column-row support graph: S is tight
        exactly when it is closed under ``a -> c`` whenever ``F({a})`` meets the
        row matched to c.
        """
        return _tight_closures(self.singleton_images, self.n)

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "singleton_images": {
                str(a + 1): VertexSet(self.n, m).vertices()
                for a, m in enumerate(self.singleton_images)
            },
        }


def _tight_closures(images: tuple[int, ...], n: int) -> list[VertexSet]:
    from scipy.sparse.csgraph import maximum_bipartite_matching

    rows, cols = [], []
    for a, img in enumerate(images):
        for b in range(n):
            if img >> b & 1:
                rows.append(a)
                cols.append(b)
    support = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(support, perm_type="column")
    if np.any(match < 0):
        raise ValueError("support graph of a unitary matrix must have a perfect matching")
    owner = np.empty(n, dtype=int)
    owner[match] = np.arange(n)  # row -> column matched to it
    succ = [[int(owner[b]) for b in range(n) if images[a] >> b & 1] for a in range(n)]
    seen = set()
    out = []
    for a in range(n):
        reach = {a}
        stack = [a]
        while stack:
            u = stack.pop()
            for c in succ[u]:
                if c not in reach:
                    reach.add(c)
                    stack.append(c)
        mask = sum(1 << c for c in reach)
        if mask not in seen:
            seen.add(mask)
            out.append(VertexSet(n, mask))
    return sorted(out, key=lambda v: v.mask)


def maximal_pairs(spec: Spectrum, t: float, zero_tol: float = DEFAULT_ZERO_TOL) -> MaximalPairMap:
    u = transition(spec, t).entries
    return MaximalPairMap(float(t), spec.n, tuple(image_masks(u, zero_tol)))


@dataclass(frozen=True)
class STPoset:
    time: float
    n: int
    pairs: tuple[tuple[int, int], ...]  # (source mask, target mask), numeric order

    @staticmethod
    def precedes(p: tuple[int, int], q: tuple[int, int]) -> bool:
        """``(S,T) <= (S',T')`` iff S is inside S' and T' inside T."""
        return p[0] & ~q[0] == 0 and q[1] & ~p[1] == 0

    def __contains__(self, pair) -> bool:
        return tuple(pair) in set(self.pairs)

    def maximal_elements(self) -> list[tuple[int, int]]:
        return [
            p for p in self.pairs if not any(q != p and self.precedes(p, q) for q in self.pairs)
        ]

    def as_sets(self) -> list[tuple[VertexSet, VertexSet]]:
        return [(VertexSet(self.n, s), VertexSet(self.n, t)) for s, t in self.pairs]

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "pairs": [[s.vertices(), t.vertices()] for s, t in self.as_sets()],
            "maximal": [
                [VertexSet(self.n, s).vertices(), VertexSet(self.n, t).vertices()]
                for s, t in self.maximal_elements()
            ],
        }


def st_poset(spec: Spectrum, t: float, zero_tol: float = DEFAULT_ZERO_TOL) -> STPoset:
    if spec.n > ST_POSET_MAX_N:
        raise SubsetCapError(
            f"st_poset enumerates 4^n pairs and is limited to n <= {ST_POSET_MAX_N}; "
            "use maximal_pairs for larger graphs"
        )
    mp = maximal_pairs(spec, t, zero_tol)
    pairs = []
    for s in range(1 << spec.n):
        fs = mp.forward(VertexSet(spec.n, s)).mask
        for tm in range(1 << spec.n):
            if fs & ~tm == 0:
                pairs.append((s, tm))
    return STPoset(float(t), spec.n, tuple(pairs))


def periodic_sets(
    spec: Spectrum, t: float, n_cap: int = DEFAULT_N_CAP, zero_tol: float = DEFAULT_ZERO_TOL
) -> list[VertexSet]:
    """All S with ``F(S,t) = S``: unions of strong components of ``a -> F({a},t)``."""
    mp = maximal_pairs(spec, t, zero_tol)
    return periodic_sets_from_images(mp, n_cap)


def periodic_sets_from_images(mp: MaximalPairMap, n_cap: int = DEFAULT_N_CAP) -> list[VertexSet]:
    n = mp.n
    rows, cols = [], []
    for a, img in enumerate(mp.singleton_images):
        for b in range(n):
            if img >> b & 1:
                rows.append(a)
                cols.append(b)
    g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, label = connected_components(g, directed=True, connection="strong")
    if ncomp > n_cap:
        raise SubsetCapError(f"{ncomp} classes give 2^{ncomp} periodic sets; raise n_cap")
    comp_masks = [sum(1 << int(v) for v in np.flatnonzero(label == c)) for c in range(ncomp)]
    # only classes closed under the relation qualify; U symmetric makes all of them closed
    closed = [
        m for m in comp_masks if all(mp.singleton_images[i] & ~m == 0 for i in range(n) if m >> i & 1)
    ]
    masks = set()
    for sel in range(1 << len(closed)):
        masks.add(sum(m for j, m in enumerate(closed) if sel >> j & 1))
    return [VertexSet(n, m) for m in sorted(masks)]


@dataclass(frozen=True)
class TopologyAtTime:
    time: float
    n: int
    closed_masks: tuple[int, ...]

    @property
    def open_masks(self) -> tuple[int, ...]:
        full = (1 << self.n) - 1
        return tuple(sorted(full & ~m for m in self.closed_masks))

    @property
    def closed_sets(self) -> list[VertexSet]:
        return [VertexSet(self.n, m) for m in self.closed_masks]

    @property
    def open_sets(self) -> list[VertexSet]:
        return [VertexSet(self.n, m) for m in self.open_masks]

    def is_indiscrete(self) -> bool:
        return set(self.closed_masks) == {0, (1 << self.n) - 1}

    def is_discrete(self) -> bool:
        return len(self.closed_masks) == 1 << self.n

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "closed_sets": [s.vertices() for s in self.closed_sets],
            "open_sets": [s.vertices() for s in self.open_sets],
            "discrete": self.is_discrete(),
            "indiscrete": self.is_indiscrete(),
        }


def _closed_masks(images: tuple[int, ...], n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    fwd = np.zeros_like(masks)
    for a in range(n):
        fwd |= np.where((masks >> a) & 1, images[a], 0)
    clo = np.zeros_like(masks)
    for a in range(n):
        clo |= np.where((images[a] & ~fwd) == 0, 1 << a, 0)
    return masks[clo == masks]


def topology_at(
    spec: Spectrum, t: float, n_cap: int = DEFAULT_N_CAP, zero_tol: float = DEFAULT_ZERO_TOL
) -> TopologyAtTime:
    """Closed sets of the t-closure.

    The axioms rest on exact supports of U(t). Near t = 0 an entry at graph
    distance k behaves like t^k/k!, so thresholding at zero_tol can keep the
    distance-1 entries while dropping farther ones, and the result need not
    be a topology (e.g. the 3-path at t = 1e-8).
    """
    if spec.n > n_cap:
        raise SubsetCapError(f"topology_at enumerates 2^n subsets; n={spec.n} exceeds n_cap={n_cap}")
    mp = maximal_pairs(spec, t, zero_tol)
    closed = _closed_masks(mp.singleton_images, spec.n)
    return TopologyAtTime(float(t), spec.n, tuple(int(m) for m in closed))


def verify_topology_axioms(topo: TopologyAtTime) -> bool:
    closed = np.array(sorted(set(topo.closed_masks)), dtype=np.int64)
    full = (1 << topo.n) - 1
    if closed.size == 0 or closed[0] != 0 or closed[-1] != full:
        return False
    for c in closed:
        if not np.isin(closed & c, closed).all() or not np.isin(closed | c, closed).all():
            return False
    return True


def closed_vs_bijective_report(
    spec: Spectrum, t: float, n_cap: int = DEFAULT_N_CAP, zero_tol: float = DEFAULT_ZERO_TOL
) -> dict:
    """t-closed sets S whose forward image is strictly larger than S."""
    topo = topology_at(spec, t, n_cap, zero_tol)
    mp = maximal_pairs(spec, t, zero_tol)
    offenders = []
    for m in topo.closed_masks:
        s = VertexSet(spec.n, m)
        img = mp.forward(s)
        if len(img) > len(s):
            offenders.append({"closed_set": s.vertices(), "forward_image": img.vertices()})
    return {
        "time": float(t),
        "closed_sets_checked": len(topo.closed_masks),
        "non_bijective_closed_sets": offenders,
    }
