"""Spectral decomposition of the adjacency matrix and the walk operator U(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, SrgParams

__all__ = [
    "ClusterAmbiguityError",
    "Spectrum",
    "SpectrumDiagnostics",
    "TransitionMatrix",
    "decompose",
    "default_eigen_tol",
    "srg_eigen",
    "srg_h",
    "transition",
    "verify_spectrum",
]


class ClusterAmbiguityError(ValueError):
    """Eigenvalue grouping depends on the tolerance; try a different ``eigen_tol``."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # distinct, strictly descending
    projectors: np.ndarray  # shape (d+1, n, n)
    multiplicities: tuple[int, ...]
    eigen_tol: float
    adjacency: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.projectors.shape[1]

    @property
    def d(self) -> int:
        return len(self.eigenvalues) - 1

    def entry_coefficients(self, b: int, a: int) -> np.ndarray:
        """Coefficients ``(E_r)_{b,a}`` of the entry function, 1-indexed vertices."""
        return self.projectors[:, b - 1, a - 1]

    def eigenvalue_support(self, a: int, tol: float = 1e-10) -> list[int]:
        """Indices r with ``E_r e_a`` nonzero."""
        col = np.linalg.norm(self.projectors[:, :, a - 1], axis=1)
        return [r for r in range(len(self.eigenvalues)) if col[r] > tol]


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    time: float
    entries: np.ndarray

    def __getitem__(self, key):
        b, a = key
        return self.entries[b - 1, a - 1]

    def unitarity_error(self) -> float:
        u = self.entries
        return float(np.abs(u @ u.conj().T - np.eye(len(u))).max())

    def symmetry_error(self) -> float:
        return float(np.abs(self.entries - self.entries.T).max())


def default_eigen_tol(x: Graph) -> float:
    # max degree bounds the spectral radius
    rho = float(x.degrees().max()) if x.n > 1 else 0.0
    return 1e-8 * max(1.0, rho)


def decompose(x: Graph, eigen_tol: float | None = None) -> Spectrum:
    if eigen_tol is None:
        eigen_tol = default_eigen_tol(x)
    if eigen_tol <= 0:
        raise ValueError("eigen_tol must be positive")
    a = x.float_matrix()
    w, v = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]

    gaps = -np.diff(w)
    cuts = np.flatnonzero(gaps >= eigen_tol)
    for i in cuts:
        if gaps[i] < 2 * eigen_tol:
            raise ClusterAmbiguityError(
                f"gap {gaps[i]:.3e} between eigenvalues {w[i]:.12g} and {w[i + 1]:.12g} "
                f"is within a factor 2 of eigen_tol={eigen_tol:.1e}; choose a different tolerance"
            )
    bounds = [0, *(cuts + 1).tolist(), len(w)]
    values, projs, mults = [], [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if w[lo] - w[hi - 1] >= eigen_tol:
            raise ClusterAmbiguityError(
                f"eigenvalue cluster [{w[hi - 1]:.12g}, {w[lo]:.12g}] is chained wider than "
                f"eigen_tol={eigen_tol:.1e}; choose a different tolerance"
            )
        basis = v[:, lo:hi]
        values.append(float(w[lo:hi].mean()))
        projs.append(basis @ basis.T)
        mults.append(hi - lo)
    return Spectrum(
        eigenvalues=np.array(values),
        projectors=np.array(projs),
        multiplicities=tuple(mults),
        eigen_tol=eigen_tol,
        adjacency=a,
    )


def transition(spec: Spectrum, t: float) -> TransitionMatrix:
    phases = np.exp(1j * t * spec.eigenvalues)
    u = np.tensordot(phases, spec.projectors, axes=1)
    return TransitionMatrix(float(t), u)


@dataclass(frozen=True)
class SpectrumDiagnostics:
    resolution: float  # max |sum E_r - I|
    idempotence: float  # max |E_r E_s - delta_rs E_r|
    reconstruction: float  # max |A - sum theta_r E_r|; nan without adjacency
    descending: bool

    def ok(self, tol: float) -> bool:
        devs = [self.resolution, self.idempotence]
        if not math.isnan(self.reconstruction):
            devs.append(self.reconstruction)
        return self.descending and max(devs) <= tol


def verify_spectrum(spec: Spectrum) -> SpectrumDiagnostics:
    e = spec.projectors
    n = spec.n
    resolution = float(np.abs(e.sum(axis=0) - np.eye(n)).max())
    idem = 0.0
    for r in range(len(e)):
        for s in range(r, len(e)):
            target = e[r] if r == s else 0.0
            idem = max(idem, float(np.abs(e[r] @ e[s] - target).max()))
    if spec.adjacency is None:
        recon = math.nan
    else:
        recon = float(np.abs(spec.adjacency - np.tensordot(spec.eigenvalues, e, axes=1)).max())
    descending = bool(np.all(np.diff(spec.eigenvalues) < 0))
    return SpectrumDiagnostics(resolution, idem, recon, descending)


# ---------------------------------------------------------- strongly regular


def srg_eigen(params: SrgParams) -> tuple[float, float, float, float]:
    """``(theta1, theta2, f, g)`` for a connected non-complete srg."""
    nu, k, lam, mu = params.as_tuple()
    if not params.feasible:
        raise ValueError(f"infeasible srg parameters {params.as_tuple()}")
    if not 0 < k < nu - 1:
        raise ValueError("srg must be connected and non-complete (0 < kappa < nu-1)")
    disc = (mu - lam) ** 2 + 4 * (k - mu)
    root = math.sqrt(disc)
    theta1 = 0.5 * (lam - mu + root)
    theta2 = 0.5 * (lam - mu - root)
    skew = ((nu - 1) * (mu - lam) - 2 * k) / root
    f = 0.5 * (nu - 1 + skew)
    g = 0.5 * (nu - 1 - skew)
    conference = abs(f - g) < 1e-9
    if not conference and (abs(f - round(f)) > 1e-9 or abs(g - round(g)) > 1e-9):
        raise ValueError(f"srg parameters {params.as_tuple()} give non-integer multiplicities")
    return theta1, theta2, f, g


def srg_h(params: SrgParams, t: float) -> tuple[complex, complex, complex]:
    """The three distance-class amplitudes; ``U(t)_{a,b} = h_delta(t) / nu``."""
    nu, k, _, _ = params.as_tuple()
    theta1, theta2, f, g = srg_eigen(params)
    e0 = complex(math.cos(k * t), math.sin(k * t))
    e1 = complex(math.cos(theta1 * t), math.sin(theta1 * t))
    e2 = complex(math.cos(theta2 * t), math.sin(theta2 * t))
    h0 = e0 + f * e1 + g * e2
    h1 = e0 + (f * theta1 / k) * e1 + (g * theta2 / k) * e2
    denom = k + 1 - nu
    h2 = e0 + (f * (1 + theta1) / denom) * e1 + (g * (1 + theta2) / denom) * e2
    return h0, h1, h2
