import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_SPACES, rand_vec
from oracles import GaugeOracle
from polyiso import fixtures as fx
from polyiso.polyhedral_space import (
    DimensionMismatch,
    NotFullDimensional,
    NotSymmetric,
    OriginNotInterior,
    RepresentationMismatch,
    build_space,
    dual_norm,
    facets_from_vertices,
    norm,
    sphere_membership,
    vertices_from_normals,
)
from polyiso.rational import add, neg, scale
from polyiso.vertex_enum import polytope_vertices

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def test_square_facets():
    E = fx.square()
    assert set(E.normals) == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    assert len(E.vertices) == 4


def test_cube_bipyramid_has_twelve_facets():
    E = fx.cube_bipyramid()
    assert len(E.facets) == 12
    assert (0, Q(1, 2), Q(1, 2)) in E.normals
    assert len(E.vertices) == 10


def test_not_symmetric_then_fixed():
    with pytest.raises(NotSymmetric) as exc:
        build_space(2, [(1, 0), (0, 1), (-1, 0)])
    assert exc.value.witness is not None
    E = build_space(2, [(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert len(E.facets) == 4


def test_degenerate_inputs():
    with pytest.raises(NotFullDimensional):
        build_space(2, [(1, 1), (-1, -1)])
    with pytest.raises(DimensionMismatch):
        build_space(2, [(1, 0, 0), (-1, 0, 0)])
    with pytest.raises(ValueError):
        build_space(2)
    # interior point listed as a vertex
    with pytest.raises(RepresentationMismatch):
        build_space(2, [(1, 1), (1, -1), (-1, 1), (-1, -1), (Q(1, 2), 0), (Q(-1, 2), 0)])


def test_origin_not_interior_from_normals():
    # a symmetric normal set can still fail to bound: only x-constraints
    with pytest.raises((OriginNotInterior, NotFullDimensional, RepresentationMismatch)):
        build_space(2, facet_normals=[(1, 0), (-1, 0)])


def test_facet_input_matches_vertex_input(any_space):
    E2 = build_space(any_space.dim, facet_normals=list(any_space.normals))
    assert set(E2.vertices) == set(any_space.vertices)
    assert E2.normals == any_space.normals


def test_redundant_normal_rejected():
    with pytest.raises(RepresentationMismatch):
        build_space(2, facet_normals=[(1, 0), (-1, 0), (0, 1), (0, -1), (Q(1, 2), Q(1, 2)), (Q(-1, 2), Q(-1, 2))])


@pytest.mark.parametrize(
    "space, v, expected",
    [
        ("square", (Q(1, 2), -1), 1),
        ("square", (0, 0), 0),
        ("cube_bipyramid", (0, 0, 2), 1),
        ("octahedron", (1, -2, 3), 6),
    ],
)
def test_norm_examples(space, v, expected):
    assert norm(fx.SPACES[space](), v) == expected


def test_dual_norm_examples():
    E = fx.square()
    assert dual_norm(E, (1, 0)) == 1
    assert dual_norm(E, (1, 1)) == max(sum(v) for v in E.vertices) == 2
    assert dual_norm(E, (0, 0)) == 0


def test_sphere_membership_examples():
    assert sphere_membership(fx.square(), (1, Q(1, 3)))
    assert not sphere_membership(fx.square(), (Q(1, 2), Q(1, 2)))
    C = fx.cube_bipyramid()
    assert sphere_membership(C, (Q(1, 2), Q(1, 2), Q(3, 2)))
    # derived: the triangle facet normal evaluates to exactly 1 there
    assert sum(a * x for a, x in zip((0, Q(1, 2), Q(1, 2)), (Q(1, 2), Q(1, 2), Q(3, 2)))) == 1


def test_dimension_mismatch():
    E = fx.square()
    with pytest.raises(DimensionMismatch):
        norm(E, (1, 2, 3))
    with pytest.raises(DimensionMismatch):
        dual_norm(E, (1,))


@pytest.mark.parametrize("name", ALL_SPACES)
def test_norm_matches_gauge_oracle(name):
    E = fx.SPACES[name]()
    oracle = GaugeOracle(E.vertices, E.dim)
    rng = random.Random(name)
    for _ in range(1000):
        v = rand_vec(rng, E.dim)
        assert norm(E, v) == oracle(v)


@pytest.mark.parametrize("name", ALL_SPACES)
def test_facet_normals_have_dual_norm_one(name):
    E = fx.SPACES[name]()
    for a in E.normals:
        assert dual_norm(E, a) == 1


@pytest.mark.parametrize("name", ALL_SPACES)
def test_roundtrip_vertices_to_facets(name):
    E = fx.SPACES[name]()
    F = build_space(E.dim, list(E.vertices))
    assert set(F.normals) == set(E.normals)
    assert {f.vertex_ids for f in F.facets} == {f.vertex_ids for f in E.facets}


@pytest.mark.parametrize("name", ALL_SPACES)
def test_double_description_agrees_with_exhaustive(name):
    E = fx.SPACES[name]()
    assert set(polytope_vertices(E.normals)) == set(vertices_from_normals(E.normals, E.dim))


@pytest.mark.parametrize("name", ALL_SPACES)
def test_facet_incidence_equalities(name):
    E = fx.SPACES[name]()
    for f in E.facets:
        for k, v in enumerate(E.vertices):
            val = sum(a * x for a, x in zip(f.normal, v))
            assert val <= 1
            assert (val == 1) == (k in f.vertex_ids)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ALL_SPACES[:5]), st.data())
def test_triangle_and_symmetry(name, data):
    E = fx.SPACES[name]()
    vecs = st.tuples(*[rationals] * E.dim)
    u, v = data.draw(vecs), data.draw(vecs)
    assert norm(E, add(u, v)) <= norm(E, u) + norm(E, v)
    assert norm(E, neg(u)) == norm(E, u)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ALL_SPACES), st.data(), st.fractions(min_value=0, max_value=20, max_denominator=9))
def test_positive_homogeneity(name, data, t):
    E = fx.SPACES[name]()
    v = data.draw(st.tuples(*[rationals] * E.dim))
    assert norm(E, scale(t, v)) == t * norm(E, v)
    assert (norm(E, v) == 0) == (not any(v))


def test_facets_from_vertices_sorted():
    E = fx.cube_bipyramid()
    fs = facets_from_vertices(list(E.vertices), 3)
    assert [f.normal for f in fs] == list(E.normals)
    assert fs[0].normal == (1, 0, 0)
