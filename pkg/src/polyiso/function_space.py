"""C(X, E) for a finite point set X with the sup norm.

On a finite discrete X every subset is open, so the peaked elements that
complete regularity asks for are the single-point bumps, and their span is
already all of C(X, E). The only completely regular subspace is therefore the
full product space, which is what this module (and the isometry engine)
works with.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .polyhedral_space import DimensionMismatch, NormedSpace
from .rational import ZERO, Vector, dot, rank, vec
from .tset_geometry import TSet, gamma, tsets


class UnknownLabel(KeyError):
    pass


@dataclass(frozen=True)
class PointSet:
    labels: tuple

    def __post_init__(self):
        if not self.labels:
            raise ValueError("point set must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in {self.labels}")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(label) from None


@dataclass(frozen=True)
class FunctionSpace:
    """C(X, E); elements are stacked point-major coordinate vectors."""

    points: PointSet
    space: NormedSpace

    @property
    def dim(self) -> int:
        return len(self.points) * self.space.dim

    def element(self, values: Mapping | Sequence) -> "FunctionElement":
        if isinstance(values, Mapping):
            unknown = set(values) - set(self.points.labels)
            if unknown:
                raise UnknownLabel(sorted(map(str, unknown))[0])
            rows = [values.get(x, (ZERO,) * self.space.dim) for x in self.points]
        else:
            rows = list(values)
            if len(rows) != len(self.points):
                raise DimensionMismatch(f"need {len(self.points)} values, got {len(rows)}")
        vals = tuple(vec(r) for r in rows)
        for x, v in zip(self.points, vals):
            if len(v) != self.space.dim:
                raise DimensionMismatch(f"value at {x!r} has length {len(v)}")
        return FunctionElement(self, vals)

    def from_stacked(self, flat: Sequence) -> "FunctionElement":
        d = self.space.dim
        if len(flat) != self.dim:
            raise DimensionMismatch(f"need {self.dim} coordinates, got {len(flat)}")
        return FunctionElement(self, tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(len(self.points))))

    def zero(self) -> "FunctionElement":
        return FunctionElement(self, tuple(self.space.zero() for _ in self.points))

    def constant(self, v: Sequence) -> "FunctionElement":
        v = vec(v)
        return self.element([v] * len(self.points))


@dataclass(frozen=True)
class FunctionElement:
    fspace: FunctionSpace
    values: tuple

    def __call__(self, label) -> Vector:
        return self.values[self.fspace.points.index(label)]

    def stacked(self) -> Vector:
        return tuple(c for v in self.values for c in v)

    def __add__(self, other: "FunctionElement") -> "FunctionElement":
        return FunctionElement(
            self.fspace, tuple(tuple(a + b for a, b in zip(u, v)) for u, v in zip(self.values, other.values))
        )

    def scaled(self, t) -> "FunctionElement":
        return FunctionElement(self.fspace, tuple(tuple(t * a for a in v) for v in self.values))


@dataclass(frozen=True)
class FunctionTSet:
    value_tset: TSet
    point: object


@dataclass(frozen=True)
class ExtremeFunctional:
    covector: Vector
    point: object


def sup_norm(f: FunctionElement) -> Fraction:
    E = f.fspace.space
    return max(E.norm(v) for v in f.values)


def function_tsets(points: PointSet, space: NormedSpace) -> list[FunctionTSet]:
    return [FunctionTSet(s, x) for x in points for s in tsets(space)]


def function_tset_contains(f: FunctionElement, fts: FunctionTSet) -> bool:
    E = f.fspace.space
    fx = f(fts.point)
    if any(fx) and dot(fts.value_tset.support, fx) != E.norm(fx):
        return False
    return sup_norm(f) == E.norm(fx)


def evaluate_functional(phi: ExtremeFunctional, f: FunctionElement) -> Fraction:
    return dot(phi.covector, f(phi.point))


def peak_functional(space: NormedSpace, fts: FunctionTSet) -> ExtremeFunctional:
    """The evaluation functional gamma(S) at x that peaks on (S, x)."""
    (w,) = gamma(space, fts.value_tset).functionals
    return ExtremeFunctional(w, fts.point)


def bump(fspace: FunctionSpace, x, u: Sequence) -> FunctionElement:
    """f(x) = u and f = 0 elsewhere, so sup_norm(f) = norm(u)."""
    fspace.points.index(x)
    u = vec(u)
    if len(u) != fspace.space.dim:
        raise DimensionMismatch(f"expected dimension {fspace.space.dim}, got {len(u)}")
    return fspace.element({x: u})


def is_completely_regular(fspace: FunctionSpace, elements: Iterable[FunctionElement] | None = None) -> bool:
    """Complete regularity of span(elements) inside C(X, E) at finite scale.

    With ``elements=None`` the whole space is meant and the answer is True:
    ``bump`` realizes the peaked witness for every (x, u). For a spanning set
    the subspace is completely regular iff it contains every bump, which for a
    linear subspace means it is the full space.
    """
    if elements is None:
        return True
    rows = [f.stacked() for f in elements]
    return bool(rows) and rank(rows) == fspace.dim


def _rand_q(rng: random.Random, lo: int, hi: int, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def tset_members(fspace: FunctionSpace, fts: FunctionTSet, count: int = 50, seed: int = 0) -> list[FunctionElement]:
    """Seeded sample of members of the T-set (S, x).

    Each member peaks at x with a value in the cone over S: either a facet
    vertex or a strictly positive combination of the facet vertices (a
    relative-interior point), scaled by t in [1, 8]. Other points get noise of
    norm at most the peak.
    """
    rng = random.Random(seed)
    E = fspace.space
    ids = sorted(fts.value_tset.incident_vertex_ids)
    verts = [E.vertices[i] for i in ids]
    xi = fspace.points.index(fts.point)
    out = []
    for k in range(count):
        if k % 3 == 0:
            peak = verts[rng.randrange(len(verts))]
        else:
            w = [Fraction(rng.randint(1, 6)) for _ in verts]
            tot = sum(w)
            peak = tuple(sum(wi * v[j] for wi, v in zip(w, verts)) / tot for j in range(E.dim))
        t = Fraction(rng.randint(4, 32), 4)
        peak = tuple(t * c for c in peak)
        vals = []
        for j in range(len(fspace.points)):
            if j == xi:
                vals.append(peak)
                continue
            noise = tuple(_rand_q(rng, -3, 3) for _ in range(E.dim))
            n = E.norm(noise)
            if n > t:
                noise = tuple(c * t / n for c in noise)
            if k % 5 == 0:
                noise = E.zero()
            vals.append(noise)
        out.append(FunctionElement(fspace, tuple(vals)))
    return out

