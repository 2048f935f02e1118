"""Norms ``max(sup-norm, p)`` with a seminorm p vanishing on constants.

The seminorm here is the Lipschitz constant over a finite metric. This module
also holds the falsifier for property (St) and the pipeline that turns a
max-norm isometry into a weighted composition:

    max-norm isometry --(St) for T and T^-1--> sup-norm isometry --> decompose
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .function_space import FunctionElement, FunctionSpace, PointSet, sup_norm
from .isometry_engine import (
    BlockOperator,
    Decomposition,
    ShapeMismatch,
    decompose,
    verify_isometry,
)
from .rational import ONE, ZERO, Vector, dot, mat_vec, nullspace, sub
from .vertex_enum import polytope_vertices

log = logging.getLogger(__name__)

# above this many coordinates the max-norm ball is not materialized
MAX_EXACT_VARS = 12


class InvalidMetric(ValueError):
    pass


@dataclass(frozen=True)
class FiniteMetric:
    points: PointSet
    table: tuple  # table[i][j] = d(points[i], points[j])

    def __post_init__(self):
        n = len(self.points)
        t = self.table
        if len(t) != n or any(len(r) != n for r in t):
            raise InvalidMetric("distance table has the wrong shape")
        for i in range(n):
            if t[i][i] != 0:
                raise InvalidMetric(f"d({self.points.labels[i]!r}, itself) != 0")
            for j in range(n):
                if t[i][j] != t[j][i]:
                    raise InvalidMetric("distance table is not symmetric")
                if i != j and t[i][j] <= 0:
                    raise InvalidMetric("distinct points at distance <= 0")
                for k in range(n):
                    if t[i][j] > t[i][k] + t[k][j]:
                        raise InvalidMetric(
                            "triangle inequality fails at "
                            f"{self.points.labels[i]!r}, {self.points.labels[k]!r}, {self.points.labels[j]!r}"
                        )

    def d(self, x, y) -> Fraction:
        return self.table[self.points.index(x)][self.points.index(y)]

    @classmethod
    def from_pairs(cls, points: PointSet, pairs) -> "FiniteMetric":
        n = len(points)
        t = [[ZERO] * n for _ in range(n)]
        for x, y, d in pairs:
            i, j = points.index(x), points.index(y)
            t[i][j] = t[j][i] = Fraction(d)
        return cls(points, tuple(tuple(r) for r in t))


def path_metric(points: PointSet) -> FiniteMetric:
    """Points on a path with unit edges: d(x_i, x_j) = |i - j|."""
    n = len(points)
    return FiniteMetric(points, tuple(tuple(Fraction(abs(i - j)) for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class MaxNormSpec:
    """C(X, E) normed by max(sup, Lip); ``metric=None`` is the zero seminorm."""

    fspace: FunctionSpace
    metric: FiniteMetric | None = None

    def __post_init__(self):
        if self.metric is not None and self.metric.points != self.fspace.points:
            raise InvalidMetric("metric points differ from the function space points")

    def seminorm(self, f: FunctionElement) -> Fraction:
        if self.metric is None:
            return ZERO
        return lipschitz_seminorm(self.metric, f)

    def norm(self, f: FunctionElement) -> Fraction:
        return max(sup_norm(f), self.seminorm(f))


def lipschitz_seminorm(metric: FiniteMetric, f: FunctionElement) -> Fraction:
    E = f.fspace.space
    best = ZERO
    for (i, u), (j, v) in combinations(enumerate(f.values), 2):
        q = E.norm(sub(u, v)) / metric.table[i][j]
        if q > best:
            best = q
    return best


def max_norm(spec: MaxNormSpec, f: FunctionElement) -> Fraction:
    return spec.norm(f)


def ball_halfspaces(spec: MaxNormSpec) -> list[Vector]:
    """Rows r with ball = {z : r.z <= 1} on stacked coordinates."""
    fs = spec.fspace
    E = fs.space
    e, n = E.dim, len(fs.points)
    rows = []
    zero = (ZERO,) * e
    for i in range(n):
        for a in E.normals:
            rows.append(zero * i + tuple(a) + zero * (n - i - 1))
    if spec.metric is not None:
        for i, j in combinations(range(n), 2):
            d = spec.metric.table[i][j]
            for a in E.normals:
                r = [ZERO] * (e * n)
                for k in range(e):
                    r[i * e + k] = a[k] / d
                    r[j * e + k] = -a[k] / d
                rows.append(tuple(r))
    return list(dict.fromkeys(rows))


@lru_cache(maxsize=None)
def ball_vertices(spec: MaxNormSpec) -> tuple:
    return tuple(polytope_vertices(ball_halfspaces(spec)))


@dataclass(frozen=True)
class MaxNormCheck:
    passed: bool
    exact: bool
    witness: dict | None = None

    def __bool__(self):
        return self.passed


def _random_element(fs: FunctionSpace, rng: random.Random) -> FunctionElement:
    return fs.element(
        [tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(fs.space.dim)) for _ in fs.points]
    )


def verify_max_norm_isometry(
    T: BlockOperator, specA: MaxNormSpec, specB: MaxNormSpec, samples: int = 200, seed: int = 0
) -> MaxNormCheck:
    """Decide whether T is a surjective isometry for the two max norms.

    Exact when the balls are small enough to enumerate: every vertex f of
    ball A must satisfy ||Tf||_B = 1 and every vertex g of ball B must satisfy
    ||T^-1 g||_A = 1. Seeded random elements are checked on top.
    """
    if T.domain != specA.fspace or T.codomain != specB.fspace:
        raise ShapeMismatch("operator and norm specs disagree on the spaces")
    Tinv = T.inverse()
    if Tinv is None:
        if T.domain.dim != T.codomain.dim:
            return MaxNormCheck(False, True, {"reason": "not square"})
        k = nullspace(T.matrix, T.domain.dim)[0]
        return MaxNormCheck(False, True, {"reason": "singular", "f": T.domain.from_stacked(k)})
    exact = T.domain.dim <= MAX_EXACT_VARS and T.codomain.dim <= MAX_EXACT_VARS
    if exact:
        for v in ball_vertices(specA):
            f = T.domain.from_stacked(v)
            nb = specB.norm(T.apply(f))
            if nb != ONE:
                return MaxNormCheck(False, True, {"reason": "vertex", "f": f, "norm_A": ONE, "norm_B": nb})
        for v in ball_vertices(specB):
            g = T.codomain.from_stacked(v)
            na = specA.norm(Tinv.apply(g))
            if na != ONE:
                return MaxNormCheck(False, True, {"reason": "inverse vertex", "g": g, "norm_B": ONE, "norm_A": na})
    else:
        log.warning("max-norm ball has %d coordinates; falling back to sampling", T.domain.dim)
        samples = max(samples, 2000)
    rng = random.Random(seed)
    for _ in range(samples):
        f = _random_element(T.domain, rng)
        na, nb = specA.norm(f), specB.norm(T.apply(f))
        if na != nb:
            return MaxNormCheck(False, exact, {"reason": "sample", "f": f, "norm_A": na, "norm_B": nb})
    return MaxNormCheck(True, exact)


@dataclass(frozen=True)
class StResult:
    counterexample: tuple | None  # (u, y0)
    checked: int

    @property
    def found(self) -> bool:
        return self.counterexample is not None


def constants_map(T: BlockOperator, y0) -> tuple:
    """Matrix of v -> T(v-hat)(y0), where v-hat is the constant function v."""
    j = T.codomain.points.index(y0)
    rows = T.row_block(j)
    e = T.domain.space.dim
    nx = len(T.domain.points)
    return tuple(tuple(sum((row[i * e + k] for i in range(nx)), ZERO) for k in range(e)) for row in rows)


def st_sample(F, samples: int, seed: int) -> list[Vector]:
    """Structured sample of u in F: 0, scaled ball vertices, then seeded randoms."""
    us = [F.zero()]
    for s in (Fraction(1, 2), ONE, Fraction(2), Fraction(4)):
        us.extend(tuple(s * c for c in v) for v in F.vertices)
    us = us[:samples]
    rng = random.Random(seed)
    while len(us) < samples:
        us.append(tuple(Fraction(rng.randint(-40, 40), rng.randint(1, 8)) for _ in range(F.dim)))
    return us


def st_holds_at(T: BlockOperator, y0, u: Sequence) -> bool:
    """Exact (St) test at one (u, y0).

    Need some unit v with ||L v + u|| > ||u||, L the constants map at y0.
    ||.|| is convex, so the max over the sphere equals the max over ball
    vertices, and ``max_v max_a a.(Lv + u) = max_a (h_a + a.u)`` with
    ``h_a = max_v a.Lv``.
    """
    return _st_exact(_support_values(T, y0), T.codomain.space, u)


def _support_values(T: BlockOperator, y0) -> list:
    E, F = T.domain.space, T.codomain.space
    L = constants_map(T, y0)
    images = [mat_vec(L, v) for v in E.vertices]
    return [(a, max(dot(a, w) for w in images)) for a in F.normals]


def _st_exact(h, F, u) -> bool:
    nu = F.norm(u)
    return any(ha + dot(a, u) > nu for a, ha in h)


def st_falsify(T: BlockOperator, specB: MaxNormSpec | None = None, samples: int = 10000, seed: int = 0) -> StResult:
    """Search for (u, y0) at which (St) fails.

    Each sampled u is decided exactly; only the quantifier over all of F is
    sampled, so "no counterexample" is evidence, not proof.
    """
    if specB is not None and specB.fspace != T.codomain:
        raise ShapeMismatch("spec is not over the operator's codomain")
    F = T.codomain.space
    us = st_sample(F, samples, seed)
    support = {y0: _support_values(T, y0) for y0 in T.codomain.points}
    checked = 0
    for u in us:
        for y0 in T.codomain.points:
            checked += 1
            if not _st_exact(support[y0], F, u):
                return StResult((u, y0), checked)
    return StResult(None, checked)


class NotMaxNormIsometry(Exception):
    def __init__(self, check: MaxNormCheck):
        super().__init__("operator is not a max-norm isometry")
        self.check = check


class StFalsified(Exception):
    def __init__(self, direction: str, result: StResult):
        u, y0 = result.counterexample
        super().__init__(f"(St) fails for {direction} at y0={y0!r}")
        self.direction = direction
        self.result = result


class PropositionViolation(AssertionError):
    """(St) passed both ways but T is not a sup-norm isometry."""


@dataclass
class PipelineReport:
    max_norm_check: MaxNormCheck
    st_forward: StResult
    st_inverse: StResult
    sup_isometry: bool
    decomposition: Decomposition


def theorem_app_pipeline(
    T: BlockOperator, specA: MaxNormSpec, specB: MaxNormSpec, samples: int = 10000, seed: int = 0
) -> PipelineReport:
    chk = verify_max_norm_isometry(T, specA, specB, seed=seed)
    if not chk:
        raise NotMaxNormIsometry(chk)
    Tinv = T.inverse()
    fwd = st_falsify(T, specB, samples, seed)
    if fwd.found:
        raise StFalsified("T", fwd)
    back = st_falsify(Tinv, specA, samples, seed)
    if back.found:
        raise StFalsified("T^-1", back)
    if not verify_isometry(T):
        raise PropositionViolation(
            "(St) found no counterexample for T or T^-1, yet T is not a sup-norm isometry; "
            "either the sample missed a failure of (St) or there is a bug"
        )
    D = decompose(T)
    return PipelineReport(chk, fwd, back, True, D)
