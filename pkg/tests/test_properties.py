import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_forward, taylor_expm
from gstwalk import graphs as G
from gstwalk.gst import VertexSet, closure, complement_transfer, forward_set, has_gst, inverse_set
from gstwalk.poset import topology_at, verify_topology_axioms
from gstwalk.spectral import decompose, transition, verify_spectrum


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return G.from_edges(n, [e for e, k in zip(pairs, keep) if k])


def subsets(n):
    return st.integers(0, (1 << n) - 1).map(lambda m: VertexSet(n, m))


times = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(graphs(), times)
def test_transition_matches_taylor(x, t):
    spec = decompose(x)
    assert verify_spectrum(spec).ok(1e-9)
    assert np.abs(transition(spec, t).entries - taylor_expm(x.adjacency, t)).max() < 1e-8


@settings(max_examples=60, deadline=None)
@given(graphs(), times, times)
def test_group_law(x, s, t):
    spec = decompose(x)
    lhs = transition(spec, s + t).entries
    rhs = transition(spec, s).entries @ transition(spec, t).entries
    assert np.abs(lhs - rhs).max() < 1e-9 * x.n


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_set_map_laws(data):
    x = data.draw(graphs())
    t = data.draw(times)
    spec = decompose(x)
    a = data.draw(subsets(x.n))
    b = data.draw(subsets(x.n))
    fa, fb = forward_set(spec, a, t), forward_set(spec, b, t)
    # additivity and monotonicity
    assert forward_set(spec, a | b, t) == fa | fb
    if a.issubset(b):
        assert fa.issubset(fb)
    # forward of a nonempty set is nonempty (unitary columns)
    assert bool(fa) == bool(a)
    # GST iff F(S) inside T iff S inside I(T, -t)
    assert has_gst(spec, a, b, t).holds == fa.issubset(b) == a.issubset(inverse_set(spec, b, -t))
    # closure is extensive and idempotent
    cl = closure(spec, a, t)
    assert a.issubset(cl) and closure(spec, cl, t) == cl
    # complement transfer
    if has_gst(spec, a, b, t).holds:
        assert complement_transfer(spec, a, b, t).holds


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6), times)
def test_forward_matches_dense_oracle(x, t):
    spec = decompose(x)
    u = taylor_expm(x.adjacency, t)
    for a in x.vertices:
        got = set(forward_set(spec, VertexSet.of(x.n, [a]), t))
        want = brute_forward(u, [a])
        # entries inside the borderline band may legitimately differ
        band = {b for b in x.vertices if 1e-10 < abs(u[b - 1, a - 1]) < 1e-8}
        assert got - band == set(want) - band


# entries at distance <= 4 are t^4/24 > zero_tol once |t| >= 0.1
away_from_origin = times.filter(lambda t: abs(t) >= 0.1)


@settings(max_examples=30, deadline=None)
@given(graphs(max_n=5), away_from_origin)
def test_topology_axioms(x, t):
    assert verify_topology_axioms(topology_at(decompose(x), t))


def test_thresholding_breaks_topology_near_origin():
    # the 3-path with centre 3: |U_31| ~ 1e-8 survives, |U_12| ~ 5e-17 does not
    x = G.from_edges(3, [(1, 3), (2, 3)])
    assert not verify_topology_axioms(topology_at(decompose(x), 1e-8))
    assert verify_topology_axioms(topology_at(decompose(x), 0.1))
