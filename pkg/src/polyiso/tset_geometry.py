"""T-sets of a polyhedral normed space and the discrepancy properties.

For a polytope ball the T-sets (maximal norm-additive subsets) are exactly the
cones over the facets, so a T-set is identified with its facet. Two facet
cones meet only at 0 iff the facets share no vertex, since faces of a
polytope meet in a face and every nonempty face has a vertex.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .polyhedral_space import DimensionMismatch, NormedSpace
from .rational import ONE, Vector, add, dot, is_zero, solve


class SameTSet(ValueError):
    pass


class NotOnSphere(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class TSet:
    facet_id: int
    incident_vertex_ids: frozenset
    support: Vector


@dataclass(frozen=True)
class GammaRecord:
    tset_id: int
    functionals: tuple


class Verdict(str, enum.Enum):
    TRIVIALLY_INTERSECTING = "TriviallyIntersecting"
    VIA_WITNESS = "ViaWitness"
    NOT_DISCREPANT = "NotDiscrepant"


@dataclass(frozen=True)
class DiscrepancyReport:
    pair: tuple
    verdict: Verdict
    witness: int | None = None
    # candidate L -> vertex ids it shares with R or S (only for NotDiscrepant)
    blocking_evidence: dict = field(default_factory=dict)

    @property
    def discrepant(self) -> bool:
        return self.verdict is not Verdict.NOT_DISCREPANT


@dataclass(frozen=True)
class PropertyD:
    holds: bool
    counterexample: DiscrepancyReport | None = None


@dataclass(frozen=True)
class PropertyDw:
    holds: bool
    witness: int | None = None
    # per candidate R0 that failed: the first report that broke it
    rejections: dict = field(default_factory=dict)


def tsets(space: NormedSpace) -> list[TSet]:
    return [TSet(i, f.vertex_ids, f.normal) for i, f in enumerate(space.facets)]


def tset_contains(space: NormedSpace, tset: TSet, v: Sequence) -> bool:
    if len(v) != space.dim:
        raise DimensionMismatch(f"expected dimension {space.dim}, got {len(v)}")
    if is_zero(v):
        return True
    return dot(tset.support, v) == space.norm(v)


def gamma(space: NormedSpace, tset: TSet) -> GammaRecord:
    """Norm-one functionals attaining the norm on the whole cone.

    Such a functional equals 1 on every facet vertex; the facet vertices span
    the space, so the solution is unique.
    """
    rows = [space.vertices[i] for i in sorted(tset.incident_vertex_ids)]
    w = solve(rows, [ONE] * len(rows))
    if w is None or space.dual_norm(w) != ONE:
        return GammaRecord(tset.facet_id, ())
    return GammaRecord(tset.facet_id, (w,))


def _tset(space: NormedSpace, t) -> TSet:
    if isinstance(t, TSet):
        return t
    f = space.facets[t]
    return TSet(t, f.vertex_ids, f.normal)


def trivially_intersecting(space: NormedSpace, r, s) -> bool:
    r, s = _tset(space, r), _tset(space, s)
    if r.facet_id == s.facet_id:
        raise SameTSet(f"T-set {r.facet_id} compared with itself")
    return not (r.incident_vertex_ids & s.incident_vertex_ids)


def discrepant(space: NormedSpace, r, s) -> DiscrepancyReport:
    r, s = _tset(space, r), _tset(space, s)
    pair = (r.facet_id, s.facet_id)
    if trivially_intersecting(space, r, s):
        return DiscrepancyReport(pair, Verdict.TRIVIALLY_INTERSECTING)
    blocking = {}
    for lid, f in enumerate(space.facets):
        if lid in pair:
            continue
        shared = f.vertex_ids & (r.incident_vertex_ids | s.incident_vertex_ids)
        if not shared:
            return DiscrepancyReport(pair, Verdict.VIA_WITNESS, witness=lid)
        blocking[lid] = tuple(sorted(shared))
    return DiscrepancyReport(pair, Verdict.NOT_DISCREPANT, blocking_evidence=blocking)


def discrepancy_matrix(space: NormedSpace) -> dict:
    n = len(space.facets)
    return {(i, j): discrepant(space, i, j) for i in range(n) for j in range(i + 1, n)}


def has_property_D(space: NormedSpace) -> PropertyD:
    n = len(space.facets)
    for i in range(n):
        for j in range(i + 1, n):
            rep = discrepant(space, i, j)
            if not rep.discrepant:
                return PropertyD(False, rep)
    return PropertyD(True)


def has_property_Dw(space: NormedSpace) -> PropertyDw:
    n = len(space.facets)
    rejections = {}
    for r0 in range(n):
        for r in range(n):
            if r == r0:
                continue
            rep = discrepant(space, r0, r)
            if not rep.discrepant:
                rejections[r0] = rep
                break
        else:
            return PropertyDw(True, witness=r0, rejections=rejections)
    return PropertyDw(False, rejections=rejections)


def _require_sphere(space: NormedSpace, v: Sequence, name: str) -> None:
    if not space.on_sphere(v):
        raise NotOnSphere(f"{name} has norm {space.norm(v)}, not 1", witness=tuple(v))


def st_contains(space: NormedSpace, e: Sequence, e2: Sequence) -> bool:
    """Is ``e2`` in the star-like set of ``e``, i.e. ||e + e2|| = 2?"""
    _require_sphere(space, e, "e")
    _require_sphere(space, e2, "e'")
    return space.norm(add(e, e2)) == 2


def shares_facet(space: NormedSpace, e: Sequence, e2: Sequence) -> bool:
    return any(dot(a, e) == ONE and dot(a, e2) == ONE for a in space.normals)


def stw_contains(space: NormedSpace, u: Sequence, e2: Sequence) -> bool:
    """Weak star condition ||u + e'|| > ||u|| for a unit vector e'."""
    _require_sphere(space, e2, "e'")
    return space.norm(add(u, e2)) > space.norm(u)

