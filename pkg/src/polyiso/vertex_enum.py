"""Double description method over the integers.

Used to enumerate vertices of bounded polytopes ``{x : r.x <= 1}`` whose
interior contains the origin. Rays are kept as primitive integer vectors and
zero sets as bitmasks, so the inner loop never builds a Fraction.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .rational import inverse, primitive, rank


class UnboundedPolyhedron(ValueError):
    pass


def _normalize(r: list[int]) -> tuple[int, ...]:
    g = 0
    for x in r:
        g = gcd(g, x)
    if g > 1:
        return tuple(x // g for x in r)
    return tuple(r)


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b) if x and y)


def extreme_rays(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{z : A z >= 0}`` for integer ``A``."""
    m = len(rows[0])
    # greedy choice of m independent rows for the initial simplicial cone
    basis: list[int] = []
    for i, row in enumerate(rows):
        if rank([rows[j] for j in basis] + [row]) > len(basis):
            basis.append(i)
        if len(basis) == m:
            break
    if len(basis) < m:
        raise UnboundedPolyhedron("cone is not pointed")
    kinv = inverse([rows[i] for i in basis])
    rays: list[tuple[int, ...]] = []
    zsets: list[int] = []
    full = 0
    for i in basis:
        full |= 1 << i
    for j in range(m):
        col = [kinv[i][j] for i in range(m)]
        rays.append(primitive(col))
        zsets.append(full & ~(1 << basis[j]))
    done = set(basis)

    for i, a in enumerate(rows):
        if i in done:
            continue
        vals = [_idot(a, r) for r in rays]
        plus = [k for k, s in enumerate(vals) if s > 0]
        minus = [k for k, s in enumerate(vals) if s < 0]
        zero = [k for k, s in enumerate(vals) if s == 0]
        new_rays = [rays[k] for k in plus] + [rays[k] for k in zero]
        new_z = [zsets[k] for k in plus] + [zsets[k] | (1 << i) for k in zero]
        for p in plus:
            for q in minus:
                common = zsets[p] & zsets[q]
                if bin(common).count("1") < m - 2:
                    continue
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and (zsets[k] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                sp, sq = vals[p], vals[q]
                r = [sp * yq - sq * yp for yp, yq in zip(rays[p], rays[q])]
                new_rays.append(_normalize(r))
                new_z.append(common | (1 << i))
        rays, zsets = new_rays, new_z
        done.add(i)
    return rays


def polytope_vertices(normals: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{x : a.x <= 1 for a in normals}``; must be bounded.

    Homogenizes to the cone ``{(x, t) : t - a.x >= 0, t >= 0}`` and reads
    vertices off the rays with ``t > 0``.
    """
    n = len(normals[0])
    rows = []
    for a in normals:
        # t - a.x >= 0, cleared of denominators
        rows.append(primitive([-Fraction(x) for x in a] + [Fraction(1)]))
    rows.append(tuple([0] * n + [1]))
    out = []
    seen = set()
    for r in extreme_rays(rows):
        t = r[-1]
        if t == 0:
            raise UnboundedPolyhedron(f"recession direction {r[:-1]}")
        v = tuple(Fraction(x, t) for x in r[:-1])
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out
