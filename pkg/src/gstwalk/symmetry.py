"""Permutation groups acting on vertices, and the automorphism checks for GST."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph
from .gst import DEFAULT_ZERO_TOL, VertexSet, forward_set, has_gst, inverse_set
from .spectral import Spectrum, transition

__all__ = [
    "GroupOverflowError",
    "PermGroup",
    "Permutation",
    "family_generators",
    "group_closure",
    "gst_symmetry_check",
    "is_automorphism",
    "orbit_of_set",
    "setwise_stabilizer",
]

DEFAULT_GROUP_CAP = 10**5


class GroupOverflowError(RuntimeError):
    def __init__(self, cap: int, count: int):
        super().__init__(f"group exceeds cap {cap} (at least {count} elements found)")
        self.cap = cap
        self.count = count


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1..n}``; ``images[v-1]`` is the image of vertex v."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"{imgs} is not a permutation of 1..{len(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        imgs = list(range(1, n + 1))
        for cyc in cycles:
            for i, v in enumerate(cyc):
                imgs[v - 1] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(imgs))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, v: int) -> int:
        return self.images[v - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """``(p * q)(v) = p(q(v))``."""
        return Permutation(tuple(self.images[other.images[i] - 1] for i in range(self.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images):
            inv[v - 1] = i + 1
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def apply_set(self, s: VertexSet) -> VertexSet:
        return VertexSet.of(s.universe, (self(v) for v in s))

    def matrix(self) -> np.ndarray:
        """``P`` with ``P e_v = e_{sigma(v)}``."""
        p = np.zeros((self.n, self.n))
        p[np.array(self.images) - 1, np.arange(self.n)] = 1
        return p


@dataclass(frozen=True)
class PermGroup:
    generators: tuple[Permutation, ...]
    elements: tuple[Permutation, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def n(self) -> int:
        return self.elements[0].n


def group_closure(gens: Iterable[Permutation], cap: int = DEFAULT_GROUP_CAP, n: int | None = None) -> PermGroup:
    gens = tuple(gens)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not gens and n is None:
        raise ValueError("need at least one generator or an explicit degree n")
    degree = gens[0].n if gens else n
    if any(g.n != degree for g in gens):
        raise ValueError("generators act on different vertex counts")
    ident = Permutation.identity(degree)
    seen = {ident.images: ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = g * p
            if q.images not in seen:
                if len(seen) >= cap:
                    raise GroupOverflowError(cap, len(seen) + 1)
                seen[q.images] = q
                queue.append(q)
    # closure under composition of a finite set of permutations contains inverses
    return PermGroup(gens, tuple(seen.values()))


def is_automorphism(x: Graph, p: Permutation) -> bool:
    if p.n != x.n:
        raise ValueError(f"permutation on {p.n} points, graph has {x.n} vertices")
    idx = np.array(p.images) - 1
    a = x.adjacency
    return bool(np.array_equal(a[np.ix_(idx, idx)], a))


def orbit_of_set(s: VertexSet, group: PermGroup) -> list[VertexSet]:
    seen = {}
    for g in group.elements:
        img = g.apply_set(s)
        seen.setdefault(img.mask, img)
    return [seen[m] for m in sorted(seen)]


def setwise_stabilizer(s: VertexSet, group: PermGroup) -> PermGroup:
    elems = tuple(g for g in group.elements if g.apply_set(s) == s)
    return PermGroup(elems, elems)


def family_generators(family: str, *params: int) -> list[Permutation]:
    """Known automorphisms generating a subgroup of Aut for the named families."""
    if family == "hypercube":
        (d,) = params
        n = 2**d
        gens = []
        for i in range(d - 1):  # swap coordinates i and i+1
            imgs = []
            for v in range(n):
                bi = (v >> (d - 1 - i)) & 1
                bj = (v >> (d - 2 - i)) & 1
                w = v & ~((1 << (d - 1 - i)) | (1 << (d - 2 - i)))
                w |= (bj << (d - 1 - i)) | (bi << (d - 2 - i))
                imgs.append(w + 1)
            gens.append(Permutation(tuple(imgs)))
        for i in range(d):  # flip coordinate i
            gens.append(Permutation(tuple((v ^ (1 << i)) + 1 for v in range(n))))
        return gens
    if family == "cycle":
        (n,) = params
        rot = Permutation(tuple(v % n + 1 for v in range(1, n + 1)))
        refl = Permutation(tuple((1 - v) % n + 1 for v in range(1, n + 1)))
        return [rot, refl]
    if family == "path":
        (n,) = params
        return [Permutation(tuple(range(n, 0, -1)))]
    if family == "complete":
        (n,) = params
        if n == 1:
            return [Permutation.identity(1)]
        return [Permutation.from_cycles(n, (1, 2)), Permutation.from_cycles(n, tuple(range(1, n + 1)))]
    if family == "double_star":
        (k,) = params
        n = 2 * k + 2
        gens = [Permutation.from_cycles(n, (1, 2), *[(2 + i, k + 2 + i) for i in range(1, k + 1)])]
        if k >= 2:
            gens.append(Permutation.from_cycles(n, (3, 4)))
            gens.append(Permutation.from_cycles(n, tuple(range(3, k + 3))))
        return gens
    raise ValueError(f"no built-in automorphism generators for {family!r}")


@dataclass
class SymmetryReport:
    group_order: int
    image_pairs_hold: bool  # (S^g, T^g)-GST for every g
    intersection_target: list[int]
    intersection_holds: bool
    stabilizers_equal: bool | None  # only meaningful when |S| = |T|
    stab_in_inverse: bool
    stab_in_forward: bool
    orbit_sizes: dict[str, int]
    commutation_error: float

    @property
    def all_hold(self) -> bool:
        checks = [
            self.image_pairs_hold,
            self.intersection_holds,
            self.stab_in_inverse,
            self.stab_in_forward,
            self.orbit_sizes["source"] >= self.orbit_sizes["forward"],
            self.orbit_sizes["source"] >= self.orbit_sizes["inverse"],
        ]
        if self.stabilizers_equal is not None:
            checks.append(self.stabilizers_equal)
        return all(checks)

    def to_dict(self) -> dict:
        return {**self.__dict__, "all_hold": self.all_hold}


def gst_symmetry_check(
    spec: Spectrum,
    x: Graph,
    s: VertexSet,
    t_set: VertexSet,
    t: float,
    group: PermGroup,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> SymmetryReport:
    for g in group.generators:
        if not is_automorphism(x, g):
            raise ValueError(f"generator {g.images} is not an automorphism")
    base = has_gst(spec, s, t_set, t, zero_tol)
    if not base.holds:
        raise ValueError(f"no ({s},{t_set})-GST at t={t}")
    u = transition(spec, t).entries
    comm = max(float(np.abs(g.matrix() @ u - u @ g.matrix()).max()) for g in group.elements)
    image_ok = all(
        has_gst(spec, g.apply_set(s), g.apply_set(t_set), t, zero_tol).holds for g in group.elements
    )
    stab_s = setwise_stabilizer(s, group)
    meet = VertexSet.full(x.n)
    for g in stab_s.elements:
        meet = meet & g.apply_set(t_set)
    inter_ok = has_gst(spec, s, meet, t, zero_tol).holds
    stab_t = setwise_stabilizer(t_set, group)
    equal = None
    if len(s) == len(t_set):
        equal = {g.images for g in stab_s.elements} == {g.images for g in stab_t.elements}
    fwd = forward_set(spec, s, t, zero_tol)
    inv = inverse_set(spec, s, t, zero_tol)
    in_inv = all(g.apply_set(inv) == inv for g in stab_s.elements)
    in_fwd = all(g.apply_set(fwd) == fwd for g in stab_s.elements)
    sizes = {
        "source": len(orbit_of_set(s, group)),
        "forward": len(orbit_of_set(fwd, group)),
        "inverse": len(orbit_of_set(inv, group)),
    }
    return SymmetryReport(
        group.order, image_ok, meet.vertices(), inter_ok, equal, in_inv, in_fwd, sizes, comm
    )


def all_permutations(n: int) -> Iterable[Permutation]:
    for p in itertools.permutations(range(1, n + 1)):
        yield Permutation(p)
