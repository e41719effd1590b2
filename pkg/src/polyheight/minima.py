"""Essential, absolute and successive minima over polytopes.

The base term of the fibration is a concave function of the character m
(``ZetaOracle``); the toric term is the global roof. Everything reduces to
maximizing or minimizing concave functions over faces, which is exact for the
supported oracle kinds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import (BadDimension, DimensionMismatch, DomainMismatch, EmptyRegion,
                     NonConcaveOracle, NotFullDimensional, NotPSD)
from .polyint import Polynomial
from .polytope import RationalPolytope, canonicalize, faces, support_value
from .roofs import AdelicPolytope, Roof, sum_roofs

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class QuadraticForm:
    """``m -> m.Q.m + b.m + c`` with Q symmetric PSD."""
    Q: tuple
    b: tuple = ()
    c: Fraction = Fraction(0)

    def __post_init__(self):
        q = la.check_psd(self.Q, "quadratic form")
        n = len(q)
        b = la.vec(self.b) if self.b else (Fraction(0),) * n
        if len(b) != n:
            raise DimensionMismatch("linear part has the wrong length")
        object.__setattr__(self, "Q", tuple(tuple(r) for r in q))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", la.frac(self.c))

    @property
    def dim(self) -> int:
        return len(self.Q)

    def __call__(self, m) -> Fraction:
        m = la.vec(m)
        return la.quad(self.Q, m) + la.dot(self.b, m) + self.c

    def to_polynomial(self) -> Polynomial:
        n = self.dim
        terms: dict = {(0,) * n: self.c}
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0) + self.Q[i][j]
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + self.b[i]
        return Polynomial(n, terms)

    def shifted(self, grad, const) -> "QuadraticForm":
        """``self - (grad.m + const)``."""
        return QuadraticForm(self.Q, la.sub(self.b, grad), self.c - la.frac(const))


def min_quadratic_over_polytope(F: RationalPolytope, q: QuadraticForm) -> tuple[Fraction, Point]:
    """Exact minimum of a convex quadratic over a polytope, with a minimizer.

    On every face the stationary set of q restricted to the face's affine hull
    is an affine space on which q is constant; intersecting it with the face
    gives feasible candidates. The true minimizer is stationary on the face
    that contains it in its relative interior, so the best candidate wins.
    Ties go to the lexicographically smallest point.
    """
    if q.dim != F.ambient_dim:
        raise DimensionMismatch("form and polytope dimensions differ")
    t = F.ambient_dim
    if t == 0:
        return q(()), ()
    best: tuple[Fraction, Point] | None = None
    twoQ = [[2 * x for x in row] for row in q.Q]
    for idx in F.face_lattice:
        face = F.face_from_indices(idx)
        v0 = face.vertices[0]
        dirs, _ = la.rref([la.sub(v, v0) for v in face.vertices[1:]]) if len(face.vertices) > 1 else ([], [])
        dirs = [d for d in dirs if any(d)]
        hs = list(face.halfspaces)
        if face.affine_dim == 0:
            hs = [(e, x) for e, x in _point_equations(v0)]
        for d in dirs:
            row = la.matvec(la.transpose(twoQ), d)  # (2Q d) since Q symmetric
            rhs = -la.dot(d, q.b)
            hs.append((row, rhs))
            hs.append((tuple(-x for x in row), -rhs))
        try:
            region = canonicalize(halfspaces=hs, dim=t)
        except EmptyRegion:
            continue
        x = region.vertices[0]
        cand = (q(x), x)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def _point_equations(p):
    out = []
    for i, x in enumerate(p):
        e = tuple(Fraction(int(i == j)) for j in range(len(p)))
        out.append((e, x))
        out.append((tuple(-y for y in e), -x))
    return out


class ZetaOracle:
    """Certified-concave base term ``m -> zeta(m)``.

    Kinds: ``concave_quadratic`` (minus a PSD quadratic form), ``affine`` and
    ``tabulated`` (upper envelope of given point values, every one of which
    must lie on the envelope).
    """

    def __init__(self, kind: str, quadratic: QuadraticForm | None = None,
                 gradient=None, constant=0, table: Roof | None = None):
        self.kind = kind
        self.quadratic = quadratic
        self.gradient = la.vec(gradient) if gradient is not None else None
        self.constant = la.frac(constant)
        self.table = table

    @classmethod
    def concave_quadratic(cls, Q, b=None, c=0) -> "ZetaOracle":
        try:
            q = QuadraticForm(Q, tuple(b) if b is not None else (), c)
        except NotPSD as exc:
            raise NonConcaveOracle(f"not concave: {exc}") from exc
        return cls("concave_quadratic", quadratic=q)

    @classmethod
    def affine(cls, gradient, constant=0) -> "ZetaOracle":
        return cls("affine", gradient=gradient, constant=constant)

    @classmethod
    def tabulated(cls, points) -> "ZetaOracle":
        pts = [(la.vec(p), la.frac(h)) for p, h in points]
        if not pts:
            raise ValueError("empty table")
        domain = canonicalize(vertices=[p for p, _ in pts])
        roof = Roof.from_points(domain, pts)
        for p, h in pts:
            if roof.value(p) != h:
                raise NonConcaveOracle(f"value at {tuple(map(str, p))} lies below the concave envelope")
        return cls("tabulated", table=roof)

    @property
    def dim(self) -> int:
        if self.kind == "concave_quadratic":
            return self.quadratic.dim
        if self.kind == "affine":
            return len(self.gradient)
        return self.table.domain.ambient_dim

    def __call__(self, m) -> Fraction:
        m = la.vec(m)
        if self.kind == "concave_quadratic":
            return -self.quadratic(m)
        if self.kind == "affine":
            return la.dot(self.gradient, m) + self.constant
        return self.table(m)

    def as_roof(self, domain: RationalPolytope) -> Roof:
        """Piecewise-affine kinds as a (possibly negative) roof on ``domain``."""
        if self.kind == "affine":
            return Roof.from_points(domain, [(v, self(v)) for v in domain.vertices])
        if self.kind == "tabulated":
            if not all(self.table.domain.contains(v) for v in domain.vertices):
                raise DomainMismatch("tabulated oracle does not cover the polytope")
            r = self.table.restrict(domain)
            return Roof(domain, r.vertices, r.cells)
        raise ValueError("quadratic oracles are not piecewise affine")


def _check(domain: RationalPolytope, z: ZetaOracle):
    if not isinstance(z, ZetaOracle):
        raise NonConcaveOracle("only certified-concave oracles are accepted")
    if z.dim != domain.ambient_dim:
        raise DimensionMismatch("oracle and polytope dimensions differ")


def _sup(domain: RationalPolytope, theta: Roof, z: ZetaOracle) -> tuple[Fraction, Point]:
    """max over ``domain`` of ``z + theta`` and a lex-least maximizer."""
    if z.kind == "concave_quadratic":
        best = None
        for cell in theta.cells:
            val, pt = min_quadratic_over_polytope(cell.polytope,
                                                  z.quadratic.shifted(cell.gradient, cell.constant))
            cand = (-val, pt)
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and pt < best[1]):
                best = cand
        return best
    total = sum_roofs([(Fraction(1), z.as_roof(domain)), (Fraction(1), theta)], domain)
    top = total.max()
    return top, min(p for p, h in total.vertices if h == top)


def essential_minimum(P: AdelicPolytope, z: ZetaOracle, with_point: bool = False):
    """``sup_m (z(m) + theta(m))`` over the base polytope."""
    _check(P.base, z)
    val, pt = _sup(P.base, P.global_roof, z)
    return (val, pt) if with_point else val


def absolute_minimum(P: AdelicPolytope, z: ZetaOracle, with_flag: bool = False):
    """Infimum of ``z + theta`` over the relative interior of the base.

    The function is concave and continuous, so the infimum is the minimum over
    the vertices. ``with_flag`` also returns whether the infimum is reached
    only on the boundary (true unless the function is constant or the base is
    a point).
    """
    _check(P.base, z)
    theta = P.global_roof
    val = min(z(v) + theta.value(v) for v in P.base.vertices)
    if not with_flag:
        return val
    if P.base.affine_dim == 0:
        return val, False
    top, _ = _sup(P.base, theta, z)
    return val, top != val


def _face_dims(t: int, g: int, convention: str) -> list[int]:
    if convention == "default":
        return [max(i - g - 1, 0) for i in range(1, t + g + 2)]
    if convention == "printed":
        return [min(t + g + 1 - i, t) for i in range(1, t + g + 2)]
    raise ValueError(f"unknown convention {convention!r}")


def successive_minima(P: AdelicPolytope, z: ZetaOracle, g: int,
                      convention: str = "default") -> list[Fraction]:
    """Zhang minima of the fibration: per face dimension k, the minimum over
    k-faces of the essential minimum restricted to the face."""
    _check(P.base, z)
    if g < 0:
        raise BadDimension("abelian dimension must be nonnegative")
    base = P.base
    if not base.is_full_dimensional:
        raise NotFullDimensional("successive minima need a full-dimensional polytope")
    t = base.ambient_dim
    theta = P.global_roof
    cache: dict[int, Fraction] = {}

    def zeta(k):
        if k not in cache:
            vals = []
            for F in faces(base, k):
                rf = theta.restrict(F) if k < t else theta
                vals.append(_sup(F, rf, z)[0])
            cache[k] = min(vals)
        return cache[k]

    return [zeta(k) for k in _face_dims(t, g, convention)]


def successive_minima_semiabelian(delta: RationalPolytope, hq: QuadraticForm, g: int,
                                  convention: str = "default") -> list[Fraction]:
    """``-max_F min_F hq`` over faces F of the dimension attached to each index."""
    if not isinstance(hq, QuadraticForm):
        raise TypeError("hq must be a QuadraticForm")
    if hq.dim != delta.ambient_dim:
        raise DimensionMismatch("form and polytope dimensions differ")
    if g < 0:
        raise BadDimension("abelian dimension must be nonnegative")
    if not delta.is_full_dimensional:
        raise NotFullDimensional("successive minima need a full-dimensional polytope")
    t = delta.ambient_dim
    cache: dict[int, Fraction] = {}

    def zeta(k):
        if k not in cache:
            cache[k] = -max(min_quadratic_over_polytope(F, hq)[0] for F in faces(delta, k))
        return cache[k]

    return [zeta(k) for k in _face_dims(t, g, convention)]


def filtration_height(P: AdelicPolytope, ell: Sequence) -> Fraction:
    """``max_m theta(m) + <ell, m>``; a max of affine functions of ell."""
    ell = la.vec(ell)
    if len(ell) != P.base.ambient_dim:
        raise DimensionMismatch("functional and polytope dimensions differ")
    if not P.roofs:
        return support_value(P.base, ell)
    return max(h + la.dot(ell, p) for p, h in P.global_roof.vertices)
