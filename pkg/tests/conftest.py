"""Independent oracles shared by the test modules.

None of these use the package's spectral decomposition: the matrix
exponential is a scaled Taylor series, and set maps are computed straight
from the dense matrix by brute force.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from gstwalk import graphs as G


def taylor_expm(a: np.ndarray, t: float, terms: int = 60) -> np.ndarray:
    """exp(i t A) by scaling and squaring a truncated Taylor series."""
    m = 1j * t * np.asarray(a, dtype=float)
    norm = max(np.abs(m).sum(axis=1).max(), 1e-300)
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1)
    m = m / 2**squarings
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def support_images(u: np.ndarray, tol: float = 1e-9) -> list[frozenset[int]]:
    """1-indexed support of each column."""
    return [frozenset(int(b) + 1 for b in np.flatnonzero(np.abs(u[:, a]) > tol)) for a in range(len(u))]


def brute_forward(u: np.ndarray, s, tol: float = 1e-9) -> frozenset[int]:
    imgs = support_images(u, tol)
    out = set()
    for a in s:
        out |= imgs[a - 1]
    return frozenset(out)


def brute_gst(u: np.ndarray, s, t, tol: float = 1e-9) -> bool:
    n = len(u)
    rows = [b - 1 for b in range(1, n + 1) if b not in set(t)]
    cols = [a - 1 for a in s]
    if not rows or not cols:
        return True
    return bool(np.abs(u[np.ix_(rows, cols)]).max() <= tol)


def all_subsets(n: int):
    for r in range(n + 1):
        yield from (frozenset(c) for c in itertools.combinations(range(1, n + 1), r))


@pytest.fixture(scope="session")
def small_graphs() -> dict[str, G.Graph]:
    return {
        "K1": G.complete(1),
        "K2": G.complete(2),
        "K3": G.complete(3),
        "P3": G.path(3),
        "C4": G.cycle(4),
        "C5": G.cycle(5),
        "Q2": G.hypercube(2),
        "Q3": G.hypercube(3),
        "DS2": G.double_star(2),
        "K222": G.complete_multipartite([2, 2, 2]),
        "mckay": G.mckay(),
        "petersen": G.petersen(),
    }


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
