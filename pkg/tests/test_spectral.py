import math

import numpy as np
import pytest
import scipy.linalg

from conftest import taylor_expm
from gstwalk import graphs as G
from gstwalk.graphs import SrgParams
from gstwalk.spectral import (
    ClusterAmbiguityError,
    Spectrum,
    decompose,
    srg_eigen,
    srg_h,
    transition,
    verify_spectrum,
)


class TestDecompose:
    def test_k2(self):
        spec = decompose(G.complete(2))
        assert np.allclose(spec.eigenvalues, [1, -1])
        assert np.allclose(spec.projectors[0], 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-14)
        assert np.allclose(spec.projectors[1], 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-14)

    def test_double_star_2(self):
        spec = decompose(G.double_star(2))
        assert np.allclose(spec.eigenvalues, [2, 1, 0, -1, -2], atol=1e-12)
        assert spec.multiplicities == (1, 1, 2, 1, 1)
        # largest eigenvalue equals (1 + sqrt(4k+1))/2 for k = 2
        assert spec.eigenvalues[0] == pytest.approx(0.5 * (1 + math.sqrt(9)))

    def test_k222(self):
        spec = decompose(G.complete_multipartite([2, 2, 2]))
        assert np.allclose(spec.eigenvalues, [4, 0, -2], atol=1e-12)
        assert spec.multiplicities == (1, 3, 2)

    @pytest.mark.parametrize("x", [G.hypercube(4), G.petersen(), G.mckay(), G.paley(13), G.double_star(5)])
    def test_invariants(self, x):
        diag = verify_spectrum(decompose(x))
        assert diag.ok(1e-10), diag

    def test_k2_exact_halves(self):
        diag = verify_spectrum(decompose(G.complete(2)))
        assert max(diag.resolution, diag.idempotence, diag.reconstruction) < 1e-15

    def test_injected_fault_is_detected(self):
        spec = decompose(G.hypercube(3))
        bad = spec.projectors.copy()
        bad[1, 0, 0] += 1e-3
        corrupted = Spectrum(spec.eigenvalues, bad, spec.multiplicities, spec.eigen_tol, spec.adjacency)
        diag = verify_spectrum(corrupted)
        assert max(diag.resolution, diag.idempotence, diag.reconstruction) > 1e-4

    def test_cluster_ambiguity(self):
        # eigenvalues 0, 1e-3, 2e-3: each gap is below 2*tol for tol = 1e-3
        a = np.diag([0.0, 1e-3, 2e-3])

        class Fake:
            adjacency = a
            n = 3

            def float_matrix(self):
                return a

        with pytest.raises(ClusterAmbiguityError):
            decompose(Fake(), eigen_tol=1.5e-3)

    def test_entry_coefficients_and_support(self):
        spec = decompose(G.path(3))
        c = spec.entry_coefficients(2, 2)
        assert np.allclose(c, [0.5, 0.0, 0.5], atol=1e-12)
        assert spec.eigenvalue_support(2) == [0, 2]


class TestTransition:
    def test_identity_at_zero(self):
        for x in (G.petersen(), G.mckay()):
            assert np.allclose(transition(decompose(x), 0.0).entries, np.eye(x.n), atol=1e-13)

    def test_k2_half_pi(self):
        u = transition(decompose(G.complete(2)), math.pi / 2).entries
        assert np.allclose(u, [[0, 1j], [1j, 0]], atol=1e-15)

    def test_p3_pst(self):
        u = transition(decompose(G.path(3)), math.pi / math.sqrt(2)).entries
        assert np.allclose(u, [[0, 0, -1], [0, -1, 0], [-1, 0, 0]], atol=1e-12)

    def test_one_indexed_access(self):
        tm = transition(decompose(G.complete(2)), math.pi / 2)
        assert tm[2, 1] == pytest.approx(1j)

    @pytest.mark.parametrize("x", [G.path(4), G.double_star(2), G.mckay(), G.cycle(7), G.hypercube(3)])
    @pytest.mark.parametrize("t", [-3.7, -1.0, 0.4, 2.5, 4.0])
    def test_matches_taylor_oracle(self, x, t):
        u = transition(decompose(x), t).entries
        assert np.abs(u - taylor_expm(x.adjacency, t)).max() < 1e-8

    def test_matches_scipy_expm_on_larger_graph(self):
        x = G.paley(13)
        u = transition(decompose(x), 7.3).entries
        assert np.abs(u - scipy.linalg.expm(7.3j * x.float_matrix())).max() < 1e-9

    def test_group_law_and_reversal(self):
        rng = np.random.default_rng(3)
        spec = decompose(G.mckay())
        for _ in range(20):
            s, t = rng.uniform(-10, 10, size=2)
            us, ut = transition(spec, s).entries, transition(spec, t).entries
            assert np.abs(transition(spec, s + t).entries - us @ ut).max() < 1e-9 * spec.n
            assert np.abs(transition(spec, -t).entries - ut.conj()).max() < 1e-12

    def test_unitary_and_symmetric(self):
        tm = transition(decompose(G.petersen()), 1.234)
        assert tm.unitarity_error() < 1e-12
        assert tm.symmetry_error() < 1e-12

    @pytest.mark.parametrize("x", [G.hypercube(3), G.path(5), G.double_star(3)])
    def test_bipartite_signed_projectors(self, x):
        spec = decompose(x)
        v0, _ = G.bipartition(x)
        sign = np.array([1 if v in v0 else -1 for v in x.vertices])
        flip = np.outer(sign, sign)
        for r, theta in enumerate(spec.eigenvalues):
            partner = int(np.argmin(np.abs(spec.eigenvalues + theta)))
            assert abs(spec.eigenvalues[partner] + theta) < 1e-8
            assert np.abs(spec.projectors[r] * flip - spec.projectors[partner]).max() < 1e-8


class TestSrg:
    def test_eigen_k222(self):
        th1, th2, f, g = srg_eigen(SrgParams(6, 4, 2, 4))
        assert (th1, th2, f, g) == pytest.approx((0, -2, 3, 2))

    def test_eigen_conference(self):
        th1, th2, f, g = srg_eigen(SrgParams(5, 2, 0, 1))
        assert f == pytest.approx(2) and g == pytest.approx(2)
        assert th1 == pytest.approx((-1 + math.sqrt(5)) / 2)

    def test_errors(self):
        with pytest.raises(ValueError):
            srg_eigen(SrgParams(6, 4, 2, 3))  # infeasible
        with pytest.raises(ValueError):
            srg_eigen(SrgParams(4, 3, 2, 0))  # complete graph

    @pytest.mark.parametrize("params", [(10, 3, 0, 1), (6, 4, 2, 4), (13, 6, 2, 3)])
    def test_h_at_zero(self, params):
        h0, h1, h2 = srg_h(SrgParams(*params), 0.0)
        assert h0 == pytest.approx(params[0])
        assert abs(h1) < 1e-12 and abs(h2) < 1e-12

    def test_h1_vanishes_for_k222_at_pi(self):
        _, h1, _ = srg_h(SrgParams(6, 4, 2, 4), math.pi)
        assert abs(h1) < 1e-10
        u = transition(decompose(G.complete_multipartite([2, 2, 2])), math.pi).entries
        x = G.complete_multipartite([2, 2, 2])
        adj = [(a, b) for a in x.vertices for b in x.vertices if x.adjacent(a, b)]
        assert max(abs(u[b - 1, a - 1]) for a, b in adj) < 1e-10

    @pytest.mark.parametrize("x", [G.petersen(), G.paley(13)])
    def test_h_matches_dense_by_distance(self, x):
        params = G.recognize_srg(x)
        spec = decompose(x)
        dist = G.distances(x)
        for t in np.linspace(-5, 9, 29):
            u = transition(spec, t).entries
            h = srg_h(params, t)
            assert np.abs(u - np.choose(dist, h) / params.nu).max() < 1e-9
