import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import taylor_expm
from gstwalk import graphs as G
from gstwalk.exact import (
    CyclotomicNumber,
    NonIntegralSpectrumError,
    certify_gst,
    check_exact_resolution,
    cyclotomic_polynomial,
    entry_at_rational_time,
    graph_hash,
    is_zero,
    rational_projectors,
)

PI = math.pi


class TestCyclotomic:
    @pytest.mark.parametrize("q", list(range(1, 31)) + [60, 105])
    def test_matches_sympy(self, q):
        z = sympy.Symbol("z")
        want = sympy.Poly(sympy.cyclotomic_poly(q, z), z).all_coeffs()[::-1]
        assert list(cyclotomic_polynomial(q)) == [int(c) for c in want]

    def test_invalid(self):
        with pytest.raises(ValueError):
            cyclotomic_polynomial(0)

    def test_zero_detection(self):
        # 1 + zeta_3 + zeta_3^2 = 0
        x = CyclotomicNumber(3, (Fraction(1), Fraction(1), Fraction(1)))
        assert is_zero(x)
        # zeta_4^0 + zeta_4^2 = 0, zeta_4^0 + zeta_4^1 != 0
        assert is_zero(CyclotomicNumber.zero(4).add_power(0, Fraction(1)).add_power(2, Fraction(1)))
        assert not is_zero(CyclotomicNumber.zero(4).add_power(0, Fraction(1)).add_power(1, Fraction(1)))
        # 1 + zeta_6^2 + zeta_6^4 = 0
        assert is_zero(CyclotomicNumber.zero(6).add_power(0, Fraction(1)).add_power(2, Fraction(1)).add_power(4, Fraction(1)))

    def test_to_complex_agrees_with_zero_test(self):
        rng = np.random.default_rng(9)
        for q in (5, 7, 12):
            for _ in range(30):
                cs = tuple(Fraction(int(c)) for c in rng.integers(-1, 2, size=q))
                x = CyclotomicNumber(q, cs)
                assert is_zero(x) == (abs(x.to_complex()) < 1e-12)

    def test_length_check(self):
        with pytest.raises(ValueError):
            CyclotomicNumber(3, (Fraction(1),))


class TestProjectors:
    def test_k2(self):
        projs = rational_projectors(G.complete(2))
        assert [th for th, _ in projs] == [1, -1]
        half = Fraction(1, 2)
        assert projs[0][1].tolist() == [[half, half], [half, half]]
        assert projs[1][1].tolist() == [[half, -half], [-half, half]]

    @pytest.mark.parametrize("x", [G.double_star(2), G.hypercube(3), G.complete_multipartite([2, 2, 2]), G.petersen()])
    def test_exact_resolution(self, x):
        projs = rational_projectors(x)
        assert check_exact_resolution(projs) == (True, True)
        recon = sum(th * e for th, e in projs)
        assert np.array_equal(np.array(recon, dtype=float), x.float_matrix())

    def test_non_integral(self):
        with pytest.raises(NonIntegralSpectrumError):
            rational_projectors(G.path(3))
        with pytest.raises(NonIntegralSpectrumError):
            rational_projectors(G.cycle(5))


class TestEntries:
    def test_k2_quarter_period(self):
        projs = rational_projectors(G.complete(2))
        # U(pi/2) = [[0, i], [i, 0]]
        assert is_zero(entry_at_rational_time(projs, 1, 1, 1, 4))
        v = entry_at_rational_time(projs, 1, 2, 1, 4)
        assert abs(v.to_complex() - 1j) < 1e-15

    @pytest.mark.parametrize("x", [G.double_star(2), G.hypercube(3)])
    def test_against_float_oracle(self, x):
        projs = rational_projectors(x)
        for p, q in ((1, 3), (1, 4), (2, 5), (3, 7)):
            u = taylor_expm(x.adjacency, 2 * PI * p / q)
            for a in x.vertices:
                for b in x.vertices:
                    v = entry_at_rational_time(projs, a, b, p, q).to_complex()
                    assert abs(v - u[b - 1, a - 1]) < 1e-9

    def test_reduces_fraction(self):
        projs = rational_projectors(G.complete(2))
        assert entry_at_rational_time(projs, 1, 2, 2, 8).order == 4


class TestCertify:
    def test_q3_antipodes(self):
        cert = certify_gst(G.hypercube(3), [1], [8], 1, 4)
        assert cert.holds and cert.verdict == "certified-GST"
        assert len(cert.zero_entries) == 7

    def test_double_star(self):
        cert = certify_gst(G.double_star(2), [1, 2], [1, 2], 1, 3)
        assert cert.holds

    def test_k2_not_periodic_at_quarter(self):
        cert = certify_gst(G.complete(2), [1], [1], 1, 4)
        assert not cert.holds and cert.witness == (2, 1)
        d = cert.to_dict()
        assert d["verdict"] == "certified-not-GST"
        assert d["witness_value"]["order"] == 4

    def test_hash_is_label_stable(self):
        assert graph_hash(G.hypercube(3)) == graph_hash(G.hypercube(3))
        assert graph_hash(G.hypercube(3)) != graph_hash(G.cycle(8))

    def test_non_integral(self):
        with pytest.raises(NonIntegralSpectrumError):
            certify_gst(G.path(3), [1], [3], 1, 4)
