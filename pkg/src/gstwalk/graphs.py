"""Simple undirected graphs, named families, and graph operations.

Vertices are 1-indexed everywhere in the public interface; the adjacency
matrix itself is an ordinary 0-indexed numpy array.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GeneratorSpec",
    "GraphParameterError",
    "SrgParams",
    "bipartition",
    "build",
    "cartesian_product",
    "complement",
    "complete",
    "complete_bipartite",
    "complete_multipartite",
    "cycle",
    "distances",
    "double_star",
    "from_edges",
    "hypercube",
    "is_connected",
    "join",
    "mckay",
    "paley",
    "path",
    "petersen",
    "recognize_srg",
]

FAMILIES = (
    "path",
    "cycle",
    "complete",
    "complete_bipartite",
    "complete_multipartite",
    "hypercube",
    "double_star",
    "mckay",
    "paley",
    "petersen",
    "edge_list",
)
OPERATIONS = ("product", "join", "complement")

MCKAY_EDGES = ((1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (6, 8), (7, 8))


class GraphParameterError(ValueError):
    """Raised when generator parameters violate a family constraint."""


@dataclass(frozen=True, eq=False)
class Graph:
    adjacency: np.ndarray
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=np.int8, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise GraphParameterError("adjacency must be a non-empty square matrix")
        if not np.array_equal(a, a.T):
            raise GraphParameterError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise GraphParameterError("adjacency must have zero diagonal")
        if not np.all((a == 0) | (a == 1)):
            raise GraphParameterError("adjacency entries must be 0 or 1")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != a.shape[0]:
                raise GraphParameterError("need one label per vertex")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted 1-indexed pairs ``(u, v)`` with ``u < v``."""
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(r) + 1, int(c) + 1) for r, c in zip(rows, cols)]

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(int)

    def neighbors(self, v: int) -> list[int]:
        return [int(u) + 1 for u in np.flatnonzero(self.adjacency[v - 1])]

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u - 1, v - 1])

    def float_matrix(self) -> np.ndarray:
        return self.adjacency.astype(float)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash(self.adjacency.tobytes())

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"<Graph{tag} n={self.n} m={self.num_edges}>"


@dataclass(frozen=True)
class SrgParams:
    nu: int
    kappa: int
    lam: int
    mu: int

    def __post_init__(self):
        if min(self.nu, self.kappa, self.lam, self.mu) < 0:
            raise GraphParameterError("srg parameters must be nonnegative")

    @property
    def feasible(self) -> bool:
        k, l, m = self.kappa, self.lam, self.mu
        return k * (k - l - 1) == (self.nu - k - 1) * m

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.nu, self.kappa, self.lam, self.mu)


@dataclass(frozen=True)
class GeneratorSpec:
    """A node of a graph-construction tree.

    Leaves name a family with integer parameters; inner nodes apply
    ``product``, ``join`` or ``complement`` to their children.
    """

    family: str
    params: tuple = ()
    children: tuple["GeneratorSpec", ...] = field(default=())


# ---------------------------------------------------------------- builders


def from_edges(n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
    if n < 1:
        raise GraphParameterError("vertex count must be positive")
    a = np.zeros((n, n), dtype=np.int8)
    for u, v in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphParameterError(f"edge ({u},{v}) outside vertex range 1..{n}")
        if u == v:
            raise GraphParameterError(f"loop at vertex {u} not allowed")
        a[u - 1, v - 1] = a[v - 1, u - 1] = 1
    return Graph(a, name=name)


def path(n: int) -> Graph:
    if n < 1:
        raise GraphParameterError("path needs n >= 1")
    return from_edges(n, [(i, i + 1) for i in range(1, n)], name=f"P{n}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphParameterError("cycle needs n >= 3")
    return from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)], name=f"C{n}")


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphParameterError("complete graph needs n >= 1")
    return Graph(np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8), name=f"K{n}")


def complete_multipartite(parts: Sequence[int]) -> Graph:
    if not parts or any(p < 1 for p in parts):
        raise GraphParameterError("every part size must be >= 1")
    block = np.repeat(np.arange(len(parts)), parts)
    a = (block[:, None] != block[None, :]).astype(np.int8)
    return Graph(a, name="K_{" + ",".join(map(str, parts)) + "}")


def complete_bipartite(m: int, n: int) -> Graph:
    return complete_multipartite([m, n])


def hypercube(d: int) -> Graph:
    """The d-cube; vertex ``i + 1`` is the bit string of ``i`` (first coordinate most significant)."""
    if d < 1:
        raise GraphParameterError("hypercube dimension must be >= 1")
    idx = np.arange(2**d)
    x = idx[:, None] ^ idx[None, :]
    a = ((x != 0) & ((x & (x - 1)) == 0)).astype(np.int8)
    return Graph(a, name=f"Q{d}")


def double_star(k: int) -> Graph:
    """Two adjacent centres 1, 2; leaves 3..k+2 on centre 1 and k+3..2k+2 on centre 2."""
    if k < 1:
        raise GraphParameterError("double star needs k >= 1")
    edges = [(1, 2)]
    edges += [(1, a) for a in range(3, k + 3)]
    edges += [(2, a) for a in range(k + 3, 2 * k + 3)]
    return from_edges(2 * k + 2, edges, name=f"S{k},{k}")


def mckay() -> Graph:
    return from_edges(8, MCKAY_EDGES, name="McKay")


def petersen() -> Graph:
    pairs = list(itertools.combinations(range(1, 6), 2))
    a = np.array([[int(not set(p) & set(q)) for q in pairs] for p in pairs], dtype=np.int8)
    labels = tuple(f"{i}{j}" for i, j in pairs)
    return Graph(a, labels=labels, name="Petersen")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def paley(p: int) -> Graph:
    if not _is_prime(p) or p % 4 != 1:
        raise GraphParameterError("paley order must be a prime congruent to 1 mod 4")
    residues = {(x * x) % p for x in range(1, p)}
    diff = (np.arange(p)[:, None] - np.arange(p)[None, :]) % p
    a = np.isin(diff, list(residues)).astype(np.int8)
    return Graph(a, labels=tuple(str(i) for i in range(p)), name=f"Paley({p})")


# --------------------------------------------------------------- operations


def cartesian_product(x: Graph, y: Graph) -> Graph:
    """X □ Y with vertex (a, b) at row-major position ``(a-1)*|Y| + b``."""
    a = np.kron(x.adjacency, np.eye(y.n, dtype=np.int8)) + np.kron(
        np.eye(x.n, dtype=np.int8), y.adjacency
    )
    labels = tuple(f"({i},{j})" for i in x.vertices for j in y.vertices)
    return Graph(a, labels=labels, name=f"{x.name or 'X'}□{y.name or 'Y'}")


def join(x: Graph, y: Graph) -> Graph:
    m1, m2 = x.n, y.n
    a = np.zeros((m1 + m2, m1 + m2), dtype=np.int8)
    a[:m1, :m1] = x.adjacency
    a[m1:, m1:] = y.adjacency
    a[:m1, m1:] = 1
    a[m1:, :m1] = 1
    return Graph(a, name=f"{x.name or 'X'}+{y.name or 'Y'}")


def complement(x: Graph) -> Graph:
    a = 1 - x.adjacency - np.eye(x.n, dtype=np.int8)
    return Graph(a, name=f"co-{x.name}" if x.name else "")


# ------------------------------------------------------------------ queries


def distances(x: Graph) -> np.ndarray:
    """All-pairs path distances by BFS; unreachable pairs get -1."""
    n = x.n
    dist = np.full((n, n), -1, dtype=int)
    nbrs = [np.flatnonzero(x.adjacency[i]) for i in range(n)]
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if dist[s, v] < 0:
                    dist[s, v] = dist[s, u] + 1
                    queue.append(v)
    return dist


def is_connected(x: Graph) -> bool:
    return bool(np.all(distances(x)[0] >= 0))


def bipartition(x: Graph) -> tuple[frozenset[int], frozenset[int]] | None:
    """Return ``(V0, V1)`` with vertex 1 in ``V0``, or ``None`` if X has an odd cycle."""
    if not is_connected(x):
        raise GraphParameterError("bipartition requires a connected graph")
    colour = [-1] * x.n
    colour[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(x.adjacency[u]):
            if colour[v] < 0:
                colour[v] = 1 - colour[u]
                queue.append(v)
            elif colour[v] == colour[u]:
                return None
    v0 = frozenset(i + 1 for i, c in enumerate(colour) if c == 0)
    v1 = frozenset(i + 1 for i, c in enumerate(colour) if c == 1)
    return v0, v1


def recognize_srg(x: Graph) -> SrgParams | None:
    """Strongly regular parameters of X, or ``None``.

    Complete and edgeless graphs are rejected since one of the two
    off-diagonal pair classes is empty and its count is undefined.
    """
    a = x.adjacency.astype(int)
    deg = a.sum(axis=1)
    if np.any(deg != deg[0]):
        return None
    common = a @ a
    off = ~np.eye(x.n, dtype=bool)
    adj_vals = common[(a == 1) & off]
    non_vals = common[(a == 0) & off]
    if adj_vals.size == 0 or non_vals.size == 0:
        return None
    if np.any(adj_vals != adj_vals[0]) or np.any(non_vals != non_vals[0]):
        return None
    return SrgParams(x.n, int(deg[0]), int(adj_vals[0]), int(non_vals[0]))


# -------------------------------------------------------------------- specs


def _int_params(spec: GeneratorSpec, count: int) -> tuple[int, ...]:
    if len(spec.params) != count:
        raise GraphParameterError(
            f"{spec.family} takes {count} parameter(s), got {len(spec.params)}"
        )
    return tuple(int(p) for p in spec.params)


def build(spec: GeneratorSpec) -> Graph:
    fam = spec.family
    if fam in OPERATIONS:
        arity = 1 if fam == "complement" else 2
        if len(spec.children) != arity:
            raise GraphParameterError(f"{fam} takes {arity} graph argument(s)")
        kids = [build(c) for c in spec.children]
        if fam == "product":
            return cartesian_product(*kids)
        if fam == "join":
            return join(*kids)
        return complement(kids[0])
    if spec.children:
        raise GraphParameterError(f"{fam} takes no graph arguments")
    if fam == "path":
        return path(*_int_params(spec, 1))
    if fam == "cycle":
        return cycle(*_int_params(spec, 1))
    if fam == "complete":
        return complete(*_int_params(spec, 1))
    if fam == "complete_bipartite":
        return complete_bipartite(*_int_params(spec, 2))
    if fam == "complete_multipartite":
        count, size = _int_params(spec, 2)
        if count < 1:
            raise GraphParameterError("complete_multipartite needs at least one part")
        return complete_multipartite([size] * count)
    if fam == "hypercube":
        return hypercube(*_int_params(spec, 1))
    if fam == "double_star":
        return double_star(*_int_params(spec, 1))
    if fam == "mckay":
        _int_params(spec, 0)
        return mckay()
    if fam == "petersen":
        _int_params(spec, 0)
        return petersen()
    if fam == "paley":
        return paley(*_int_params(spec, 1))
    if fam == "edge_list":
        if not spec.params:
            raise GraphParameterError("edge_list needs a vertex count")
        n, *edges = spec.params
        return from_edges(int(n), [tuple(e) for e in edges])
    raise GraphParameterError(f"unknown graph family {fam!r}")
