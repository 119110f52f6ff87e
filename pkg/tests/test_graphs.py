import itertools

import numpy as np
import pytest

from gstwalk import graphs as G
from gstwalk.graphs import GeneratorSpec, GraphParameterError, SrgParams


def common_neighbour_counts(x):
    """Brute-force (lambda, mu) sets from the definition."""
    lam, mu = set(), set()
    for u, v in itertools.combinations(x.vertices, 2):
        c = len(set(x.neighbors(u)) & set(x.neighbors(v)))
        (lam if x.adjacent(u, v) else mu).add(c)
    return lam, mu


class TestGenerators:
    def test_hypercube_1_is_an_edge(self):
        assert G.hypercube(1) == G.complete(2)

    @pytest.mark.parametrize("d", range(1, 7))
    def test_hypercube_counts_and_hamming_adjacency(self, d):
        x = G.hypercube(d)
        assert x.n == 2**d
        assert x.num_edges == d * 2 ** (d - 1)
        for u, v in x.edges():
            assert bin((u - 1) ^ (v - 1)).count("1") == 1

    def test_double_star_2(self):
        x = G.double_star(2)
        assert x.n == 6
        assert sorted(x.degrees().tolist(), reverse=True) == [3, 3, 1, 1, 1, 1]
        assert x.adjacent(1, 2)
        assert x.neighbors(1) == [2, 3, 4]
        assert x.neighbors(2) == [1, 5, 6]

    def test_mckay_two_triangles_joined_by_a_path(self):
        x = G.mckay()
        assert (x.n, x.num_edges) == (8, 9)
        a = x.float_matrix()
        triangles = int(round(np.trace(a @ a @ a))) // 6
        assert triangles == 2
        assert G.is_connected(x)

    def test_petersen(self):
        x = G.petersen()
        assert (x.n, x.num_edges) == (10, 15)
        assert set(x.degrees().tolist()) == {3}

    def test_paley13(self):
        x = G.paley(13)
        assert set(x.degrees().tolist()) == {6}
        assert G.recognize_srg(x) == SrgParams(13, 6, 2, 3)

    @pytest.mark.parametrize(
        "call",
        [
            lambda: G.hypercube(0),
            lambda: G.paley(7),
            lambda: G.paley(9),
            lambda: G.double_star(0),
            lambda: G.cycle(2),
            lambda: G.complete(0),
        ],
    )
    def test_invalid_parameters_raise(self, call):
        with pytest.raises(GraphParameterError):
            call()

    def test_adjacency_validation(self):
        with pytest.raises(GraphParameterError):
            G.Graph(np.array([[0, 1], [0, 0]]))
        with pytest.raises(GraphParameterError):
            G.Graph(np.array([[1, 0], [0, 0]]))
        with pytest.raises(GraphParameterError):
            G.from_edges(3, [(1, 4)])

    def test_adjacency_is_read_only(self):
        x = G.path(3)
        with pytest.raises(ValueError):
            x.adjacency[0, 1] = 0


class TestOperations:
    def test_k2_product_k2_is_c4(self):
        x = G.cartesian_product(G.complete(2), G.complete(2))
        assert x.num_edges == 4 and set(x.degrees().tolist()) == {2}
        assert G.bipartition(x) is not None

    def test_ladder_edge_count(self):
        x = G.cartesian_product(G.complete(2), G.path(3))
        assert (x.n, x.num_edges) == (6, 2 * 2 + 3 * 1)

    def test_product_with_k1_is_identity(self):
        x = G.double_star(2)
        assert G.cartesian_product(x, G.complete(1)) == x

    def test_product_row_major_kronecker(self):
        x, y = G.path(3), G.cycle(4)
        p = G.cartesian_product(x, y)
        want = np.kron(x.adjacency, np.eye(4)) + np.kron(np.eye(3), y.adjacency)
        assert np.array_equal(p.adjacency, want)

    def test_product_degree_additivity(self):
        x, y = G.double_star(2), G.path(3)
        p = G.cartesian_product(x, y)
        for a in x.vertices:
            for b in y.vertices:
                v = (a - 1) * y.n + b
                assert p.degrees()[v - 1] == x.degrees()[a - 1] + y.degrees()[b - 1]

    def test_joins(self):
        assert G.join(G.complete(1), G.complete(2)) == G.complete(3)
        empty2 = G.from_edges(2, [])
        c4 = G.join(empty2, empty2)
        assert c4 == G.complete_bipartite(2, 2)
        wheel = G.join(G.complete(1), G.cycle(4))
        assert (wheel.n, wheel.num_edges) == (5, 0 + 4 + 1 * 4)

    def test_complements(self):
        three_k2 = G.from_edges(6, [(1, 2), (3, 4), (5, 6)])
        assert G.complement(three_k2) == G.complete_multipartite([2, 2, 2])
        assert G.complement(G.complete(4)).num_edges == 0

    def test_bipartitions(self):
        assert G.bipartition(G.complete(2)) == (frozenset({1}), frozenset({2}))
        v0, v1 = G.bipartition(G.hypercube(3))
        assert {bin(v - 1).count("1") % 2 for v in v0} == {0}
        assert len(v0) == len(v1) == 4
        assert G.bipartition(G.complete(3)) is None
        with pytest.raises(GraphParameterError):
            G.bipartition(G.from_edges(4, [(1, 2), (3, 4)]))

    @pytest.mark.parametrize("x", [G.hypercube(4), G.double_star(3), G.path(5), G.cycle(6)])
    def test_bipartition_has_no_internal_edges(self, x):
        parts = G.bipartition(x)
        if parts is None:
            return
        v0, v1 = parts
        assert v0 | v1 == set(x.vertices)
        for u, v in x.edges():
            assert (u in v0) != (v in v0)

    def test_distances(self):
        d = G.distances(G.path(4))
        assert d[0].tolist() == [0, 1, 2, 3]
        assert G.distances(G.from_edges(3, [(1, 2)]))[0, 2] == -1


class TestSrgRecognition:
    @pytest.mark.parametrize(
        "x, params",
        [
            (G.petersen(), (10, 3, 0, 1)),
            (G.complete_multipartite([2, 2, 2]), (6, 4, 2, 4)),
            (G.cycle(5), (5, 2, 0, 1)),
            (G.complete_bipartite(3, 3), (6, 3, 0, 3)),
        ],
    )
    def test_recognised(self, x, params):
        got = G.recognize_srg(x)
        assert got.as_tuple() == params
        assert got.feasible
        lam, mu = common_neighbour_counts(x)
        assert lam == {params[2]} and mu == {params[3]}

    def test_not_srg(self):
        assert G.recognize_srg(G.path(3)) is None
        assert G.recognize_srg(G.mckay()) is None


class TestBuild:
    def test_nested_spec(self):
        spec = GeneratorSpec(
            "product",
            (),
            (GeneratorSpec("hypercube", (2,)), GeneratorSpec("join", (), (GeneratorSpec("complete", (1,)), GeneratorSpec("cycle", (4,))))),
        )
        x = G.build(spec)
        assert x.n == 4 * 5
        assert x.num_edges == 5 * 4 + 4 * 8

    def test_arity_errors(self):
        with pytest.raises(GraphParameterError):
            G.build(GeneratorSpec("hypercube", (1, 2)))
        with pytest.raises(GraphParameterError):
            G.build(GeneratorSpec("join", (), (GeneratorSpec("complete", (1,)),)))
        with pytest.raises(GraphParameterError):
            G.build(GeneratorSpec("nonsense", (1,)))
