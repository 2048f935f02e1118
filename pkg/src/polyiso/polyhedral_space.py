"""Finite-dimensional real normed spaces with a rational polytope unit ball.

The ball is held in both vertex and facet form. Facet normals are scaled so
that the facet lies on ``{x : a.x = 1}``; the norm is then the gauge
``max_a a.x`` and the dual norm is ``max_v w.v`` over ball vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .rational import ONE, ZERO, Vector, dot, lex_key, neg, nullspace, rank, solve, vec


class DimensionMismatch(ValueError):
    pass


class SpaceError(ValueError):
    """Invalid ball description; ``witness`` is a point or covector showing why."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSymmetric(SpaceError):
    pass


class OriginNotInterior(SpaceError):
    pass


class NotFullDimensional(SpaceError):
    pass


class RepresentationMismatch(SpaceError):
    pass


@dataclass(frozen=True)
class Facet:
    normal: Vector
    vertex_ids: frozenset


@dataclass(frozen=True)
class Polytope:
    vertices: tuple
    facets: tuple

    @property
    def normals(self) -> tuple:
        return tuple(f.normal for f in self.facets)


@dataclass(frozen=True)
class NormedSpace:
    dim: int
    ball: Polytope

    @property
    def vertices(self) -> tuple:
        return self.ball.vertices

    @property
    def facets(self) -> tuple:
        return self.ball.facets

    @property
    def normals(self) -> tuple:
        return self.ball.normals

    def _check(self, v: Sequence) -> None:
        if len(v) != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {len(v)}")

    def norm(self, v: Sequence) -> Fraction:
        self._check(v)
        return max(dot(a, v) for a in self.normals)

    def dual_norm(self, w: Sequence) -> Fraction:
        self._check(w)
        return max(dot(w, v) for v in self.vertices)

    def on_sphere(self, v: Sequence) -> bool:
        return self.norm(v) == ONE

    def zero(self) -> Vector:
        return (ZERO,) * self.dim


def norm(space: NormedSpace, v: Sequence) -> Fraction:
    return space.norm(v)


def dual_norm(space: NormedSpace, w: Sequence) -> Fraction:
    return space.dual_norm(w)


def sphere_membership(space: NormedSpace, v: Sequence) -> bool:
    return space.on_sphere(v)


def facets_from_vertices(vertices: Sequence[Vector], dim: int) -> list[Facet]:
    """All facets ``{a.x = 1}`` of conv(vertices), by exhaustive subset search.

    Only hyperplanes off the origin are found, so callers must know the origin
    is interior. Cost is C(len(vertices), dim) small solves.
    """
    found: dict[Vector, Facet] = {}
    ones = (ONE,) * dim
    for combo in combinations(range(len(vertices)), dim):
        a = solve([vertices[i] for i in combo], ones)
        if a is None or a in found:
            continue
        incident = []
        ok = True
        for i, v in enumerate(vertices):
            s = dot(a, v)
            if s > ONE:
                ok = False
                break
            if s == ONE:
                incident.append(i)
        if ok:
            found[a] = Facet(a, frozenset(incident))
    return sorted(found.values(), key=lambda f: lex_key(f.normal))


def vertices_from_normals(normals: Sequence[Vector], dim: int) -> list[Vector]:
    """Vertices of ``{x : a.x <= 1}`` by exhaustive subset search."""
    found = set()
    ones = (ONE,) * dim
    for combo in combinations(range(len(normals)), dim):
        x = solve([normals[i] for i in combo], ones)
        if x is None or x in found:
            continue
        if all(dot(a, x) <= ONE for a in normals):
            found.add(x)
    return sorted(found, key=lex_key)


def _dedupe(points: Iterable[Vector]) -> list[Vector]:
    seen = set()
    out = []
    for p in points:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _check_dims(points: Sequence[Vector], dim: int, what: str) -> None:
    for p in points:
        if len(p) != dim:
            raise DimensionMismatch(f"{what} {p} has length {len(p)}, expected {dim}")


def _check_symmetric(points: Sequence[Vector], what: str) -> None:
    pool = set(points)
    for p in points:
        if neg(p) not in pool:
            raise NotSymmetric(f"{what} {p} has no antipode", witness=neg(p))


def _from_vertices(dim: int, vertices: list[Vector]) -> Polytope:
    if rank(vertices) < dim:
        w = nullspace(vertices, dim)[0]
        raise NotFullDimensional("vertices lie in a hyperplane through 0", witness=w)
    _check_symmetric(vertices, "vertex")
    facets = facets_from_vertices(vertices, dim)
    normals = [f.normal for f in facets]
    if not facets or rank(normals) < dim:
        raise OriginNotInterior("no bounding family of facets off the origin")
    back = set(vertices_from_normals(normals, dim))
    for v in vertices:
        if v not in back:
            raise RepresentationMismatch(f"{v} is not an extreme point", witness=v)
    for v in back:
        if v not in set(vertices):
            raise OriginNotInterior("facet description misses part of the hull", witness=v)
    return Polytope(tuple(vertices), tuple(facets))


def build_space(
    dim: int,
    vertices: Sequence[Sequence] | None = None,
    facet_normals: Sequence[Sequence] | None = None,
) -> NormedSpace:
    """Build and cross-validate a polyhedral normed space.

    Either representation may be omitted; the other is derived. When both
    are given they must describe the same polytope.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if vertices is None and facet_normals is None:
        raise ValueError("need vertices or facet normals")

    if vertices is not None:
        vs = _dedupe(vec(v) for v in vertices)
        _check_dims(vs, dim, "vertex")
        ball = _from_vertices(dim, vs)
        if facet_normals is not None:
            given = _dedupe(vec(a) for a in facet_normals)
            _check_dims(given, dim, "facet normal")
            derived = set(ball.normals)
            for a in given:
                if a not in derived:
                    bad = next((v for v in vs if dot(a, v) > ONE), None)
                    raise RepresentationMismatch(
                        f"normal {a} is not a facet of the vertex hull",
                        witness=bad if bad is not None else a,
                    )
            for a in ball.normals:
                if a not in set(given):
                    raise RepresentationMismatch(f"facet {a} missing from facet list", witness=a)
        return NormedSpace(dim, ball)

    normals = _dedupe(vec(a) for a in facet_normals)
    _check_dims(normals, dim, "facet normal")
    if any(not any(a) for a in normals):
        raise RepresentationMismatch("zero facet normal", witness=(ZERO,) * dim)
    _check_symmetric(normals, "facet normal")
    if rank(normals) < dim:
        w = nullspace(normals, dim)[0]
        raise NotFullDimensional("normals do not bound the ball", witness=w)
    vs = vertices_from_normals(normals, dim)
    ball = _from_vertices(dim, vs)
    derived = set(ball.normals)
    for a in normals:
        if a not in derived:
            raise RepresentationMismatch(f"normal {a} is redundant", witness=a)
    return NormedSpace(dim, ball)
