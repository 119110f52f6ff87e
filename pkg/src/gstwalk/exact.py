"""Exact GST certificates for integral spectra at times 2*pi*p/q.

With integer eigenvalues theta_r, ``exp(i theta_r 2 pi p/q)`` is the root of
unity ``zeta_q^(p theta_r mod q)``, so each entry of U(2 pi p/q) is an element
of Q(zeta_q) with rational coefficients. It vanishes exactly when its
coefficient polynomial is divisible by the q-th cyclotomic polynomial.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graphs import Graph
from .gst import VertexSet

__all__ = [
    "Certificate",
    "CyclotomicNumber",
    "NonIntegralSpectrumError",
    "certify_gst",
    "cyclotomic_polynomial",
    "entry_at_rational_time",
    "graph_hash",
    "is_zero",
    "rational_projectors",
]


class NonIntegralSpectrumError(ValueError):
    pass


# ------------------------------------------------------------- polynomials
# coefficient lists, lowest degree first


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _divmod(num: list, den: list) -> tuple[list, list]:
    num = [Fraction(c) for c in num]
    den = _trim([Fraction(c) for c in den])
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    num = _trim(num)
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(num) >= len(den):
        shift = len(num) - len(den)
        c = num[-1] / lead
        quot[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        num.pop()
        _trim(num)
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(q: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_q, lowest degree first."""
    if q < 1:
        raise ValueError("q must be positive")
    poly = [-1] + [0] * (q - 1) + [1]  # X^q - 1
    for d in range(1, q):
        if q % d == 0:
            poly, rem = _divmod(poly, list(cyclotomic_polynomial(d)))
            assert not rem
    return tuple(int(c) for c in poly)


@dataclass(frozen=True)
class CyclotomicNumber:
    """``sum_j coeffs[j] * zeta_q^j`` with rational coefficients."""

    order: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.order:
            raise ValueError("need exactly q coefficients")

    @classmethod
    def zero(cls, q: int) -> "CyclotomicNumber":
        return cls(q, (Fraction(0),) * q)

    def add_power(self, power: int, c: Fraction) -> "CyclotomicNumber":
        cs = list(self.coeffs)
        cs[power % self.order] += c
        return CyclotomicNumber(self.order, tuple(cs))

    def __add__(self, other: "CyclotomicNumber") -> "CyclotomicNumber":
        if other.order != self.order:
            raise ValueError("orders differ")
        return CyclotomicNumber(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def to_complex(self) -> complex:
        q = self.order
        return complex(sum(float(c) * np.exp(2j * np.pi * j / q) for j, c in enumerate(self.coeffs)))

    def to_dict(self) -> dict:
        return {"order": self.order, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}


def is_zero(x: CyclotomicNumber) -> bool:
    _, rem = _divmod(list(x.coeffs), list(cyclotomic_polynomial(x.order)))
    return not _trim(rem)


# --------------------------------------------------------------- matrices


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.dot(a, b)  # object dtype keeps Python ints/Fractions exact


def integer_eigenvalues(x: Graph) -> list[int]:
    w = np.linalg.eigvalsh(x.float_matrix())
    vals = []
    for lam in w:
        r = round(lam)
        if abs(lam - r) > 1e-6:
            raise NonIntegralSpectrumError(f"eigenvalue {lam:.12g} is not an integer")
        if r not in vals:
            vals.append(r)
    return sorted(vals, reverse=True)


def rational_projectors(x: Graph) -> list[tuple[int, np.ndarray]]:
    """Exact ``(theta_r, E_r)`` with E_r as an object array of Fractions."""
    thetas = integer_eigenvalues(x)
    n = x.n
    a = np.array(x.adjacency.tolist(), dtype=object)
    eye = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    prod = eye
    for th in thetas:
        prod = _int_matmul(prod, a - th * eye)
    if any(v != 0 for v in prod.flat):
        raise NonIntegralSpectrumError(
            f"candidate eigenvalues {thetas} do not annihilate the adjacency matrix"
        )
    out = []
    for r, th in enumerate(thetas):
        num = eye
        den = 1
        for s, other in enumerate(thetas):
            if s != r:
                num = _int_matmul(num, a - other * eye)
                den *= th - other
        e = np.array([[Fraction(v, den) for v in row] for row in num], dtype=object)
        out.append((th, e))
    return out


def entry_at_rational_time(
    projs: list[tuple[int, np.ndarray]], a: int, b: int, p: int, q: int
) -> CyclotomicNumber:
    """``U(2 pi p/q)_{b,a}`` in Q(zeta_q); vertices 1-indexed."""
    if q < 1:
        raise ValueError("q must be positive")
    g = math.gcd(p, q)
    p, q = p // g, q // g
    z = CyclotomicNumber.zero(q)
    for th, e in projs:
        c = e[b - 1, a - 1]
        if c:
            z = z.add_power((p * th) % q, c)
    return z


def graph_hash(x: Graph) -> str:
    text = f"n {x.n}\n" + "".join(f"{u} {v}\n" for u, v in x.edges())
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class Certificate:
    graph_hash: str
    source: VertexSet
    target: VertexSet
    p: int
    q: int
    verdict: str  # "certified-GST" | "certified-not-GST"
    zero_entries: list[tuple[int, int]]
    witness: tuple[int, int] | None = None
    witness_value: CyclotomicNumber | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "certified-GST"

    def to_dict(self) -> dict:
        return {
            "graph_hash": self.graph_hash,
            "source": self.source.vertices(),
            "target": self.target.vertices(),
            "p": self.p,
            "q": self.q,
            "verdict": self.verdict,
            "zero_entries": [list(e) for e in self.zero_entries],
            "witness": list(self.witness) if self.witness else None,
            "witness_value": self.witness_value.to_dict() if self.witness_value else None,
        }


def certify_gst(x: Graph, s, t_set, p: int, q: int, projs=None) -> Certificate:
    if q < 1:
        raise ValueError("q must be positive")
    s = s if isinstance(s, VertexSet) else VertexSet.of(x.n, s)
    t_set = t_set if isinstance(t_set, VertexSet) else VertexSet.of(x.n, t_set)
    g = math.gcd(p, q)
    p, q = p // g, q // g
    projs = rational_projectors(x) if projs is None else projs
    zeros = []
    for a in s:
        for b in t_set.complement():
            val = entry_at_rational_time(projs, a, b, p, q)
            if not is_zero(val):
                return Certificate(graph_hash(x), s, t_set, p, q, "certified-not-GST", zeros, (b, a), val)
            zeros.append((b, a))
    return Certificate(graph_hash(x), s, t_set, p, q, "certified-GST", zeros)


def check_exact_resolution(projs: list[tuple[int, np.ndarray]]) -> tuple[bool, bool]:
    """Exact ``sum E_r = I`` and ``E_r E_s = delta_rs E_r``."""
    n = projs[0][1].shape[0]
    total = sum(e for _, e in projs)
    ident = all(total[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))
    ortho = True
    for r, (_, er) in enumerate(projs):
        for s, (_, es) in enumerate(projs):
            prod = _int_matmul(er, es)
            want = er if r == s else None
            for i in range(n):
                for j in range(n):
                    if prod[i, j] != (want[i, j] if want is not None else 0):
                        ortho = False
    return ident, ortho
