"""Sup-norm isometries between finite function spaces C(X, E) -> C(Y, F).

An operator is an exact rational matrix acting on stacked point-major
coordinates. ``decompose`` recovers the weighted-composition form
``(Tf)(y) = V_y f(phi(y))`` by transporting facet functionals: for a facet R
of F and a point y, the covector ``gamma(R) . row_block(y)`` of T must be an
extreme functional of the domain, i.e. a single E-facet normal sitting at a
single point x. All facets agreeing on x at y defines ``phi(y) = x``.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Mapping

from .function_space import FunctionElement, FunctionSpace, UnknownLabel
from .polyhedral_space import NormedSpace
from .rational import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    dot,
    inverse,
    mat,
    mat_vec,
    nullspace,
    rank,
    transpose,
    vec_mat,
)
from .tset_geometry import gamma, has_property_Dw, tsets


class ShapeMismatch(ValueError):
    pass


class FailureKind(str, enum.Enum):
    BLOCK_SUPPORT_NOT_SINGLETON = "BlockSupportNotSingleton"
    FUNCTIONAL_NOT_EXTREME = "FunctionalNotExtreme"
    PHI_DISAGREEMENT = "PhiDisagreement"
    NOT_ISOMETRY = "NotIsometry"


class DecompositionFailure(Exception):
    def __init__(self, kind: FailureKind, witness: dict, message: str = ""):
        super().__init__(message or kind.value)
        self.kind = kind
        self.witness = witness


@dataclass(frozen=True)
class BlockOperator:
    domain: FunctionSpace
    codomain: FunctionSpace
    matrix: Matrix

    def __post_init__(self):
        rows, cols = self.codomain.dim, self.domain.dim
        if len(self.matrix) != rows or any(len(r) != cols for r in self.matrix):
            raise ShapeMismatch(f"matrix must be {rows}x{cols}")

    def row_block(self, j: int) -> Matrix:
        d = self.codomain.space.dim
        return self.matrix[j * d:(j + 1) * d]

    def block_at(self, j: int, i: int) -> Matrix:
        e = self.domain.space.dim
        return tuple(row[i * e:(i + 1) * e] for row in self.row_block(j))

    def block(self, y, x) -> Matrix:
        return self.block_at(self.codomain.points.index(y), self.domain.points.index(x))

    def apply(self, f: FunctionElement) -> FunctionElement:
        return self.codomain.from_stacked(mat_vec(self.matrix, f.stacked()))

    def value_at(self, f: FunctionElement, y) -> Vector:
        return mat_vec(self.row_block(self.codomain.points.index(y)), f.stacked())

    def inverse(self) -> "BlockOperator | None":
        inv = inverse(self.matrix)
        if inv is None:
            return None
        return BlockOperator(self.codomain, self.domain, inv)


# -- isometry decision ---------------------------------------------------------


@dataclass(frozen=True)
class IsometryCheck:
    ok: bool
    reason: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


def _ball_violation(T: BlockOperator):
    """A vertex f of the domain ball with sup_norm(Tf) > 1, or None.

    ``max over ball vertices of a.(Tf)(y)`` splits over the domain points, so
    each (y, facet a) needs only one pass over the E-vertices per point
    instead of a pass over all |V_E|^|X| vertex tuples.
    """
    E = T.domain.space
    F = T.codomain.space
    e = E.dim
    for j in range(len(T.codomain.points)):
        rows = T.row_block(j)
        for a in F.normals:
            c = vec_mat(a, rows)
            total = ZERO
            choice = []
            for i in range(len(T.domain.points)):
                piece = c[i * e:(i + 1) * e]
                best, arg = max(((dot(piece, v), k) for k, v in enumerate(E.vertices)), key=lambda t: t[0])
                total += best
                choice.append(E.vertices[arg])
            if total > ONE:
                f = T.domain.element(choice)
                return f, T.codomain.points.labels[j], a, total
    return None


def check_isometry(T: BlockOperator) -> IsometryCheck:
    """Exact test that T maps the unit ball of C(X,E) onto that of C(Y,F).

    T(ball) inside ball and T^-1(ball) inside ball together give equality; by
    convexity it suffices to test the vertices of each product ball.
    """
    if T.domain.dim != T.codomain.dim:
        return IsometryCheck(False, "not square")
    Tinv = T.inverse()
    if Tinv is None:
        k = nullspace(T.matrix, T.domain.dim)[0]
        return IsometryCheck(False, "singular", T.domain.from_stacked(k))
    v = _ball_violation(T)
    if v is not None:
        f, y, a, val = v
        return IsometryCheck(False, "expands", {"f": f, "y": y, "facet_normal": a, "value": val})
    v = _ball_violation(Tinv)
    if v is not None:
        g, x, a, val = v
        return IsometryCheck(False, "inverse expands", {"g": g, "x": x, "facet_normal": a, "value": val})
    return IsometryCheck(True)


def verify_isometry(T: BlockOperator) -> bool:
    return check_isometry(T).ok


# -- weighted compositions -----------------------------------------------------


def make_weighted_composition(
    domain: FunctionSpace, codomain: FunctionSpace, phi: Mapping, fibers: Mapping
) -> BlockOperator:
    """Matrix of f -> (y -> V_y f(phi(y))): block (y, phi(y)) is V_y, others 0."""
    e, d = domain.space.dim, codomain.space.dim
    rows = [[ZERO] * domain.dim for _ in range(codomain.dim)]
    for j, y in enumerate(codomain.points):
        if y not in phi or y not in fibers:
            raise UnknownLabel(y)
        i = domain.points.index(phi[y])
        V = mat(fibers[y])
        if len(V) != d or any(len(r) != e for r in V):
            raise ShapeMismatch(f"fiber at {y!r} must be {d}x{e}")
        for r in range(d):
            for c in range(e):
                rows[j * d + r][i * e + c] = V[r][c]
    return BlockOperator(domain, codomain, tuple(tuple(r) for r in rows))


@lru_cache(maxsize=None)
def linear_isometries(E: NormedSpace, F: NormedSpace) -> tuple:
    """All linear maps E -> F carrying ball(E) onto ball(F), as dimF x dimE matrices.

    Such a map permutes ball vertices, so it is fixed by where a vertex basis
    goes; every ordered choice of distinct F-vertices is tried and kept when
    the whole vertex set lands exactly on F's vertex set.
    """
    if E.dim != F.dim or len(E.vertices) != len(F.vertices):
        return ()
    basis: list[int] = []
    for k, v in enumerate(E.vertices):
        if rank([E.vertices[i] for i in basis] + [v]) > len(basis):
            basis.append(k)
        if len(basis) == E.dim:
            break
    Binv = inverse(transpose([E.vertices[i] for i in basis]))
    targets = set(F.vertices)
    found = []
    for imgs in permutations(range(len(F.vertices)), E.dim):
        W = transpose([F.vertices[i] for i in imgs])
        M = tuple(tuple(dot(row, col) for col in zip(*Binv)) for row in W)
        seen = set()
        for v in E.vertices:
            w = mat_vec(M, v)
            if w not in targets:
                break
            seen.add(w)
        else:
            if len(seen) == len(targets):
                found.append(M)
    return tuple(found)


def symmetry_group(E: NormedSpace) -> tuple:
    return linear_isometries(E, E)


def random_weighted_composition(domain: FunctionSpace, codomain: FunctionSpace, rng: random.Random):
    """Seeded (phi, fibers, T) with phi a bijection and isometric fibers."""
    if len(domain.points) != len(codomain.points):
        raise ShapeMismatch("phi must be a bijection")
    group = linear_isometries(domain.space, codomain.space)
    if not group:
        raise ShapeMismatch("value spaces are not linearly isometric")
    xs = list(domain.points)
    rng.shuffle(xs)
    phi = dict(zip(codomain.points, xs))
    fibers = {y: group[rng.randrange(len(group))] for y in codomain.points}
    return phi, fibers, make_weighted_composition(domain, codomain, phi, fibers)


# -- decomposition -------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    facet_id: int
    y: object
    x: object
    covector: Vector


@dataclass
class Decomposition:
    phi: dict
    fibers: dict
    certificates: list = field(default_factory=list)
    codomain_has_dw: bool | None = None


@lru_cache(maxsize=None)
def _gammas(F: NormedSpace) -> tuple:
    out = []
    for t in tsets(F):
        (w,) = gamma(F, t).functionals
        out.append(w)
    return tuple(out)


def recover_functional(T: BlockOperator, R, y) -> tuple:
    """Pull gamma(R) at y back through T and read off (x, v*).

    Returns the unique domain point carrying the pulled-back covector and the
    E-facet normal it equals.
    """
    F = T.codomain.space
    E = T.domain.space
    rid = R if isinstance(R, int) else R.facet_id
    w = _gammas(F)[rid]
    j = T.codomain.points.index(y)
    ell = vec_mat(w, T.row_block(j))
    e = E.dim
    pieces = [ell[i * e:(i + 1) * e] for i in range(len(T.domain.points))]
    support = [i for i, p in enumerate(pieces) if any(p)]
    if len(support) != 1:
        raise DecompositionFailure(
            FailureKind.BLOCK_SUPPORT_NOT_SINGLETON,
            {"facet": rid, "y": y, "support": [T.domain.points.labels[i] for i in support]},
        )
    (i,) = support
    if pieces[i] not in set(E.normals):
        raise DecompositionFailure(
            FailureKind.FUNCTIONAL_NOT_EXTREME,
            {"facet": rid, "y": y, "x": T.domain.points.labels[i], "covector": pieces[i]},
        )
    return T.domain.points.labels[i], pieces[i]


def _contraction_ok(E: NormedSpace, F: NormedSpace, V: Matrix) -> bool:
    return all(F.norm(mat_vec(V, v)) <= ONE for v in E.vertices)


def decompose(T: BlockOperator) -> Decomposition:
    chk = check_isometry(T)
    if not chk:
        raise DecompositionFailure(FailureKind.NOT_ISOMETRY, {"reason": chk.reason, "detail": chk.witness})
    F = T.codomain.space
    E = T.domain.space
    phi, fibers, certs = {}, {}, []
    for y in T.codomain.points:
        found = []
        for R in tsets(F):
            x, v = recover_functional(T, R.facet_id, y)
            found.append(Certificate(R.facet_id, y, x, v))
        points = {c.x for c in found}
        if len(points) > 1:
            first = found[0]
            other = next(c for c in found if c.x != first.x)
            raise DecompositionFailure(
                FailureKind.PHI_DISAGREEMENT,
                {
                    "y": y,
                    "facets": [first.facet_id, other.facet_id],
                    "points": [first.x, other.x],
                    "transport": [(c.facet_id, c.x) for c in found],
                },
            )
        x = found[0].x
        phi[y] = x
        fibers[y] = T.block(y, x)
        certs.extend(found)
        for x2 in T.domain.points:
            if x2 != x and any(any(r) for r in T.block(y, x2)):
                raise DecompositionFailure(
                    FailureKind.BLOCK_SUPPORT_NOT_SINGLETON, {"y": y, "phi_y": x, "nonzero_block": x2}
                )
    D = Decomposition(phi, fibers, certs, has_property_Dw(F).holds)
    for y, V in fibers.items():
        if not _contraction_ok(E, F, V):
            raise RuntimeError(f"fiber at {y!r} expands the ball; isometry check is inconsistent")
    if make_weighted_composition(T.domain, T.codomain, phi, fibers).matrix != T.matrix:
        raise RuntimeError("re-synthesis differs from the operator")
    return D


def _fiber_is_surjective_isometry(E: NormedSpace, F: NormedSpace, V: Matrix) -> bool:
    Vinv = inverse(V)
    if Vinv is None:
        return False
    return _contraction_ok(E, F, V) and _contraction_ok(F, E, Vinv)


def structural_decompose(T: BlockOperator) -> Decomposition:
    """Decomposition by block sparsity alone, without functionals.

    Accepts iff every block row has exactly one nonzero block, the resulting
    point map is a bijection and each fiber maps ball(E) onto ball(F).
    """
    E, F = T.domain.space, T.codomain.space
    phi, fibers = {}, {}
    for j, y in enumerate(T.codomain.points):
        nz = [x for i, x in enumerate(T.domain.points) if any(any(r) for r in T.block_at(j, i))]
        if len(nz) != 1:
            raise DecompositionFailure(FailureKind.BLOCK_SUPPORT_NOT_SINGLETON, {"y": y, "support": nz})
        phi[y] = nz[0]
        fibers[y] = T.block(y, nz[0])
    if len(set(phi.values())) != len(T.domain.points) or len(phi) != len(T.domain.points):
        raise DecompositionFailure(FailureKind.NOT_ISOMETRY, {"reason": "phi is not a bijection"})
    for y, V in fibers.items():
        if not _fiber_is_surjective_isometry(E, F, V):
            raise DecompositionFailure(FailureKind.NOT_ISOMETRY, {"reason": "fiber is not an isometry", "y": y})
    return Decomposition(phi, fibers)


@dataclass(frozen=True)
class StrongReport:
    phi_bijective: bool
    fibers_surjective_isometries: dict
    domain_has_dw: bool
    codomain_has_dw: bool
    codomain_completely_regular: bool = True

    @property
    def ok(self) -> bool:
        return self.phi_bijective and all(self.fibers_surjective_isometries.values())


def verify_decomposition_strong(T: BlockOperator, D: Decomposition) -> StrongReport:
    E, F = T.domain.space, T.codomain.space
    bij = len(D.phi) == len(T.codomain.points) and set(D.phi.values()) == set(T.domain.points) and len(
        T.domain.points
    ) == len(T.codomain.points)
    fib = {y: _fiber_is_surjective_isometry(E, F, V) for y, V in D.fibers.items()}
    return StrongReport(bij, fib, has_property_Dw(E).holds, has_property_Dw(F).holds)


@dataclass(frozen=True)
class VanishCheck:
    passed: bool
    witness: dict | None = None

    def __bool__(self):
        return self.passed


def vanish_transfer_check(T: BlockOperator, D: Decomposition, trials: int = 500, seed: int = 0) -> VanishCheck:
    """Random f with f(phi(y)) = 0 must give (Tf)(y) = 0."""
    rng = random.Random(seed)
    e = T.domain.space.dim
    ys = list(T.codomain.points)
    for t in range(trials):
        y = ys[rng.randrange(len(ys))]
        x0 = D.phi[y]
        vals = []
        for x in T.domain.points:
            if x == x0:
                vals.append((ZERO,) * e)
            else:
                vals.append(tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in range(e)))
        f = T.domain.element(vals)
        out = T.value_at(f, y)
        if any(out):
            return VanishCheck(False, {"trial": t, "y": y, "f": f, "Tf_y": out})
    return VanishCheck(True)
