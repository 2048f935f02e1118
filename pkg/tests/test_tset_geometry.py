import random
from fractions import Fraction as Q
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rand_vec
from oracles import facets_meet
from polyiso import fixtures as fx
from polyiso.polyhedral_space import DimensionMismatch
from polyiso.rational import add, dot, scale
from polyiso.tset_geometry import (
    NotOnSphere,
    SameTSet,
    Verdict,
    discrepancy_matrix,
    discrepant,
    gamma,
    has_property_D,
    has_property_Dw,
    shares_facet,
    st_contains,
    stw_contains,
    trivially_intersecting,
    tset_contains,
    tsets,
)

FIXTURES = ["square", "hexagon", "octahedron", "cube_bipyramid", "diamond"]


def facet_id(E, normal):
    return E.normals.index(tuple(Q(x) for x in normal))


@pytest.mark.parametrize("name, count", [("square", 4), ("octahedron", 8), ("cube_bipyramid", 12), ("hexagon", 6)])
def test_tset_counts(name, count):
    assert len(tsets(fx.SPACES[name]())) == count


def test_tset_contains_examples():
    E = fx.square()
    R = tsets(E)[facet_id(E, (1, 0))]
    assert tset_contains(E, R, (2, 1))
    assert not tset_contains(E, R, (1, 2))
    assert all(tset_contains(E, t, (0, 0)) for t in tsets(E))
    with pytest.raises(DimensionMismatch):
        tset_contains(E, R, (1, 2, 3))


def test_gamma_examples():
    E = fx.square()
    assert list(gamma(E, tsets(E)[facet_id(E, (1, 0))]).functionals) == [(1, 0)]
    C = fx.cube_bipyramid()
    upper_y = tsets(C)[facet_id(C, (0, Q(1, 2), Q(1, 2)))]
    (w,) = gamma(C, upper_y).functionals
    # derived: the unique solution of w.v = 1 on the triangle's vertices
    tri = [(1, 1, 1), (-1, 1, 1), (0, 0, 2)]
    assert all(dot(w, v) == 1 for v in tri)
    assert w == (0, Q(1, 2), Q(1, 2))
    O = fx.octahedron()
    t = tsets(O)[facet_id(O, (1, 1, 1))]
    (w,) = gamma(O, t).functionals
    assert w == (1, 1, 1)


def test_trivially_intersecting_examples():
    E = fx.square()
    x1, xm, y1 = facet_id(E, (1, 0)), facet_id(E, (-1, 0)), facet_id(E, (0, 1))
    assert trivially_intersecting(E, x1, xm)
    assert not trivially_intersecting(E, x1, y1)
    with pytest.raises(SameTSet):
        trivially_intersecting(E, x1, x1)
    C = fx.cube_bipyramid()
    assert trivially_intersecting(C, facet_id(C, (0, Q(1, 2), Q(1, 2))), facet_id(C, (0, -1, 0)))


def test_discrepant_examples():
    E = fx.square()
    rep = discrepant(E, facet_id(E, (1, 0)), facet_id(E, (0, 1)))
    assert rep.verdict is Verdict.NOT_DISCREPANT
    assert set(rep.blocking_evidence) == {facet_id(E, (0, -1)), facet_id(E, (-1, 0))}

    H = fx.hexagon()
    for r in range(6):
        for s in range(r + 1, 6):
            rep = discrepant(H, r, s)
            if not trivially_intersecting(H, r, s):
                # adjacent edges: the witness is opposite to one of them
                assert rep.verdict is Verdict.VIA_WITNESS
                opp = {H.normals.index(tuple(-x for x in H.normals[k])) for k in (r, s)}
                assert rep.witness in opp

    C = fx.cube_bipyramid()
    rep = discrepant(C, facet_id(C, (0, Q(1, 2), Q(1, 2))), facet_id(C, (0, 1, 0)))
    assert rep.verdict is Verdict.VIA_WITNESS
    assert C.normals[rep.witness] == (0, Q(-1, 2), Q(-1, 2))


def test_property_examples():
    C = fx.cube_bipyramid()
    pd = has_property_D(C)
    assert not pd.holds
    r, s = pd.counterexample.pair
    # two adjacent vertical cube faces
    assert C.normals[r][2] == 0 and C.normals[s][2] == 0 and not trivially_intersecting(C, r, s)
    pdw = has_property_Dw(C)
    assert pdw.holds and C.normals[pdw.witness][2] > 0
    assert has_property_D(fx.hexagon()).holds
    assert not has_property_D(fx.square()).holds
    assert not has_property_Dw(fx.square()).holds
    assert not has_property_Dw(fx.octahedron()).holds


def test_dw_witness_is_lowest_id():
    C = fx.cube_bipyramid()
    w = has_property_Dw(C).witness
    for r0 in range(w):
        assert any(not discrepant(C, r0, r).discrepant for r in range(12) if r != r0)


@pytest.mark.parametrize("name", FIXTURES)
def test_trivial_intersection_matches_feasibility_oracle(name):
    E = fx.SPACES[name]()
    for r, s in combinations(range(len(E.facets)), 2):
        assert trivially_intersecting(E, r, s) == (not facets_meet(E, r, s))


@pytest.mark.parametrize("name", FIXTURES)
def test_discrepancy_by_brute_force(name):
    E = fx.SPACES[name]()
    verts = [set(f.vertex_ids) for f in E.facets]
    n = len(verts)
    for (r, s), rep in discrepancy_matrix(E).items():
        disjoint = not verts[r] & verts[s]
        via = [L for L in range(n) if L not in (r, s) and not verts[L] & (verts[r] | verts[s])]
        assert rep.discrepant == (disjoint or bool(via))


@pytest.mark.parametrize("name", FIXTURES)
def test_gamma_and_membership(name):
    E = fx.SPACES[name]()
    rng = random.Random(name)
    samples = list(E.vertices)
    samples += [tuple((a + b) / 2 for a, b in zip(u, v)) for u, v in combinations(E.vertices, 2)]
    samples += [rand_vec(rng, E.dim) for _ in range(1000)]
    for t in tsets(E):
        (a,) = gamma(E, t).functionals
        assert E.dual_norm(a) == 1
        for v in samples:
            assert tset_contains(E, t, v) == (dot(a, v) == E.norm(v))


@pytest.mark.parametrize("name", FIXTURES)
def test_tset_maximality(name):
    E = fx.SPACES[name]()
    for f in E.facets:
        for k, w in enumerate(E.vertices):
            if k in f.vertex_ids:
                continue
            assert any(E.norm(add(E.vertices[i], w)) < 2 for i in f.vertex_ids)


@pytest.mark.parametrize("name", FIXTURES)
def test_distinct_facets_distinct_gammas(name):
    E = fx.SPACES[name]()
    gs = [gamma(E, t).functionals[0] for t in tsets(E)]
    assert len(set(gs)) == len(gs)


@pytest.mark.parametrize("name", FIXTURES)
def test_meeting_facets_gamma_sum(name):
    E = fx.SPACES[name]()
    ts = tsets(E)
    for r, s in combinations(range(len(ts)), 2):
        if not trivially_intersecting(E, r, s):
            w = add(gamma(E, ts[r]).functionals[0], gamma(E, ts[s]).functionals[0])
            assert E.dual_norm(w) == 2


@pytest.mark.parametrize("name", FIXTURES)
def test_d_implies_dw(name):
    E = fx.SPACES[name]()
    if has_property_D(E).holds:
        assert has_property_Dw(E).holds


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from(FIXTURES),
    st.data(),
    st.fractions(min_value=Q(1, 50), max_value=100, max_denominator=50),
)
def test_cone_closure(name, data, t):
    E = fx.SPACES[name]()
    v = data.draw(st.tuples(*[st.fractions(-9, 9, max_denominator=6)] * E.dim))
    for R in tsets(E):
        assert tset_contains(E, R, scale(t, v)) == tset_contains(E, R, v)


def _sphere_point(E, rng):
    while True:
        v = rand_vec(rng, E.dim)
        n = E.norm(v)
        if n:
            return tuple(x / n for x in v)


@pytest.mark.parametrize("name", FIXTURES)
def test_star_two_way(name):
    E = fx.SPACES[name]()
    rng = random.Random(7)
    pool = [_sphere_point(E, rng) for _ in range(60)] + list(E.vertices)
    pairs = [(rng.choice(pool), rng.choice(pool)) for _ in range(1000)]
    for e, e2 in pairs:
        assert st_contains(E, e, e2) == shares_facet(E, e, e2)


def test_star_examples():
    E = fx.square()
    assert st_contains(E, (1, 0), (1, 1))
    assert not st_contains(E, (1, 0), (0, 1))
    assert st_contains(E, (1, Q(1, 3)), (1, Q(1, 3)))
    with pytest.raises(NotOnSphere):
        st_contains(E, (Q(1, 2), 0), (1, 0))
    assert stw_contains(E, (0, 0), (1, 0))
    assert stw_contains(E, (1, 0), (1, 0))
    assert not stw_contains(E, (1, 0), (-1, 1))
    with pytest.raises(NotOnSphere):
        stw_contains(E, (0, 0), (2, 0))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIXTURES), st.data())
def test_stw_growth(name, data):
    E = fx.SPACES[name]()
    u = data.draw(st.tuples(*[st.fractions(-6, 6, max_denominator=5)] * E.dim))
    e2 = E.vertices[data.draw(st.integers(0, len(E.vertices) - 1))]
    if stw_contains(E, u, e2):
        for r in (1, 2, 3):
            assert E.norm(add(u, scale(r, e2))) > E.norm(u)
