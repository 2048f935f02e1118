"""Canonical spaces and operators used by the tests and the CLI."""
from __future__ import annotations

import random
from itertools import product

from .function_space import FunctionSpace, PointSet
from .isometry_engine import BlockOperator, make_weighted_composition, random_weighted_composition
from .polyhedral_space import NormedSpace, build_space
from .rational import identity, mat
from .st_norm_layer import MaxNormSpec, path_metric


def square() -> NormedSpace:
    """l-infinity ball in the plane."""
    return build_space(2, [(1, 1), (1, -1), (-1, 1), (-1, -1)])


def diamond() -> NormedSpace:
    """l1 ball in the plane (linearly isometric to the square)."""
    return build_space(2, [(1, 0), (0, 1), (-1, 0), (0, -1)])


def hexagon() -> NormedSpace:
    """Affine image of the regular hexagon with rational vertices."""
    return build_space(2, [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)])


def octahedron() -> NormedSpace:
    """l1 ball in R^3."""
    return build_space(3, [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])


def cube_bipyramid() -> NormedSpace:
    """Cube [-1,1]^3 with pyramids on top and bottom, apexes at (0, 0, +-2).

    Twelve facets: four vertical cube faces and four triangles on each
    pyramid. Any apex height above 1 gives the same face lattice.
    """
    cube = [(x, y, z) for x, y, z in product((1, -1), repeat=3)]
    return build_space(3, cube + [(0, 0, 2), (0, 0, -2)])


def line() -> NormedSpace:
    return build_space(1, [(1,), (-1,)])


SPACES = {
    "square": square,
    "diamond": diamond,
    "hexagon": hexagon,
    "octahedron": octahedron,
    "cube_bipyramid": cube_bipyramid,
    "line": line,
}


def points(n: int) -> PointSet:
    return PointSet(tuple("abcdefghijklmnopqrstuvwxyz"[:n]))


def identity_op(space: NormedSpace | None = None, n: int = 2) -> BlockOperator:
    fs = FunctionSpace(points(n), space or square())
    return BlockOperator(fs, fs, identity(fs.dim))


def swap_op(space: NormedSpace | None = None) -> BlockOperator:
    E = space or square()
    fs = FunctionSpace(points(2), E)
    I = identity(E.dim)
    return make_weighted_composition(fs, fs, {"a": "b", "b": "a"}, {"a": I, "b": I})


def mixing_swap() -> BlockOperator:
    """On C({a,b}, square): exchange the second coordinates of f(a) and f(b).

    A coordinate permutation of R^4, hence a sup-norm isometry, but not a
    weighted composition.
    """
    fs = FunctionSpace(points(2), square())
    m = mat([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
    return BlockOperator(fs, fs, m)


def wc_random(seed: int = 0, space: NormedSpace | None = None, n: int = 3) -> BlockOperator:
    fs = FunctionSpace(points(n), space or cube_bipyramid())
    return random_weighted_composition(fs, fs, random.Random(seed))[2]


def metric_swap(n: int = 2, fiber=None) -> tuple[BlockOperator, MaxNormSpec, MaxNormSpec]:
    """Path-metric reversal with one isometric fiber for every point.

    Reversal preserves path distances and the fiber is constant in y, so both
    the sup part and the Lipschitz part of the max norm are preserved.
    """
    E = square()
    fs = FunctionSpace(points(n), E)
    labels = fs.points.labels
    V = mat(fiber) if fiber is not None else mat([[0, -1], [1, 0]])
    phi = {y: labels[n - 1 - k] for k, y in enumerate(labels)}
    T = make_weighted_composition(fs, fs, phi, {y: V for y in labels})
    spec = MaxNormSpec(fs, path_metric(fs.points))
    return T, spec, spec


def planted_zero_column() -> tuple[BlockOperator, MaxNormSpec, MaxNormSpec]:
    """Max-norm isometry on C({a,b}, square) with d(a,b) = 1 and T(v-hat)(a) = 0.

    Coordinatewise (f_a, f_b) -> (f_a - f_b, f_a). For each coordinate the
    max-norm ball is the hexagon {|s|, |t|, |s - t| <= 1}, whose six vertices
    this map permutes, so T is a max-norm isometry, yet it kills constants at a.
    """
    E = square()
    fs = FunctionSpace(points(2), E)
    m = mat([[1, 0, -1, 0], [0, 1, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
    spec = MaxNormSpec(fs, path_metric(fs.points))
    return BlockOperator(fs, fs, m), spec, spec
