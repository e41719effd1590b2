"""Adelic polytopes: roof functions, hypographs, duality and adelic fans.

A roof is a concave piecewise-affine function on a polytope, stored as the
upper hull of finitely many lifted points. Heights at a place are the local
roofs; the global roof is their weighted sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from . import hull
from . import linalg as la
from .errors import (DomainMismatch, EmptyRegion, IncompatibleFan, MissingVertexHeight,
                     NegativeHeight, NotComplete, PointOutsideDomain)
from .fan import Fan
from .polytope import RationalPolytope, canonicalize, minkowski_sum

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Cell:
    """A maximal linearity region and the affine piece living on it."""
    polytope: RationalPolytope
    gradient: Point
    constant: Fraction

    def value(self, m) -> Fraction:
        return la.dot(self.gradient, m) + self.constant


def _upper_hull(domain: RationalPolytope, pts: list[tuple[Point, Fraction]]):
    """Vertices and upper facets of the lifted point set, in ambient coordinates."""
    piv = domain.pivots
    d = len(piv)
    t = domain.ambient_dim
    floor = min(h for _, h in pts) - 1
    chart = {}
    for p, h in pts:
        key = tuple(p[i] for i in piv) + (h,)
        chart[key] = (p, h)
    aux = [tuple(v[i] for i in piv) + (floor,) for v in domain.vertices]
    facets = hull.facets_of_points(list(chart) + aux)
    upper = [(a, b) for a, b in facets if a[-1] > 0]
    lifted = list(chart)
    on = [[q for q in lifted if la.dot(a, q) == b] for a, b in upper]
    verts = set()
    # a lifted point is a hull vertex iff the facets through it pin it down
    for q in lifted:
        tight = [a for a, b in facets if la.dot(a, q) == b]
        if la.rank(tight) == d + 1:
            verts.add(q)
    cells = []
    for (a, b), pts_on in zip(upper, on):
        c = a[-1]
        grad = [Fraction(0)] * t
        for coef, i in zip(a[:-1], piv):
            grad[i] = -Fraction(coef) / c
        const = Fraction(b) / c
        cell_pts = [chart[q][0] for q in pts_on if q in verts]
        cells.append(Cell(canonicalize(vertices=cell_pts), tuple(grad), const))
    cells.sort(key=lambda c: c.polytope.vertices)
    vertex_data = sorted(chart[q] for q in verts)
    return vertex_data, cells


class Roof:
    """Concave piecewise-affine function on a polytope.

    Built only through :func:`build_roof` (which enforces nonnegativity) or
    the internal ``Roof.from_points`` which also accepts negative heights.
    """

    def __init__(self, domain: RationalPolytope, vertices, cells):
        self.domain = domain
        self.vertices: tuple[tuple[Point, Fraction], ...] = tuple(vertices)
        self.cells: tuple[Cell, ...] = tuple(cells)

    @classmethod
    def from_points(cls, domain: RationalPolytope, pts) -> "Roof":
        pts = [(la.vec(p), la.frac(h)) for p, h in pts]
        verts, cells = _upper_hull(domain, pts)
        return cls(domain, verts, cells)

    @classmethod
    def constant(cls, domain: RationalPolytope, c=0) -> "Roof":
        c = la.frac(c)
        return cls.from_points(domain, [(v, c) for v in domain.vertices])

    @classmethod
    def from_function(cls, domain: RationalPolytope, f, points) -> "Roof":
        return cls.from_points(domain, [(p, f(la.vec(p))) for p in points])

    def __call__(self, m) -> Fraction:
        m = la.vec(m)
        if not self.domain.contains(m):
            raise PointOutsideDomain(f"{tuple(map(str, m))} is outside the domain")
        return self.value(m)

    def value(self, m) -> Fraction:
        """Evaluate without the domain check (min over the affine pieces)."""
        return min(c.value(m) for c in self.cells)

    @property
    def pieces(self) -> list[tuple[Point, Fraction]]:
        return [(c.gradient, c.constant) for c in self.cells]

    @property
    def heights(self) -> dict[Point, Fraction]:
        return dict(self.vertices)

    def max(self) -> Fraction:
        return max(h for _, h in self.vertices)

    def min(self) -> Fraction:
        # concave: the minimum is attained at a vertex of the domain
        return min(self.value(v) for v in self.domain.vertices)

    def is_nonnegative(self) -> bool:
        return self.min() >= 0

    def scale(self, c) -> "Roof":
        c = la.frac(c)
        if c < 0:
            raise ValueError("roofs scale by nonnegative factors only")
        return Roof.from_points(self.domain, [(p, c * h) for p, h in self.vertices])

    def shift(self, c) -> "Roof":
        c = la.frac(c)
        return Roof.from_points(self.domain, [(p, h + c) for p, h in self.vertices])

    def restrict(self, face: RationalPolytope) -> "Roof":
        return Roof.from_points(face, [(v, self.value(v)) for v in _breakpoints(self, face)])

    def __add__(self, other: "Roof") -> "Roof":
        return sum_roofs([(Fraction(1), self), (Fraction(1), other)], self.domain)

    def __eq__(self, other):
        return (isinstance(other, Roof) and self.domain == other.domain
                and self.vertices == other.vertices)

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        vs = ", ".join(f"({','.join(map(str, p))};{h})" for p, h in self.vertices)
        return f"Roof([{vs}])"


def _cell_meet(a: RationalPolytope, b: RationalPolytope, dim: int):
    try:
        c = canonicalize(halfspaces=a.halfspaces + b.halfspaces, dim=a.ambient_dim)
    except EmptyRegion:
        return None
    return c if c.affine_dim == dim else None


def _breakpoints(roof: Roof, face: RationalPolytope) -> list[Point]:
    """Vertices of the cells of ``roof`` cut down to ``face``."""
    pts = set(face.vertices)
    for cell in roof.cells:
        try:
            c = canonicalize(halfspaces=cell.polytope.halfspaces + face.halfspaces,
                             dim=face.ambient_dim)
        except EmptyRegion:
            continue
        pts.update(c.vertices)
    return sorted(pts)


def sum_roofs(terms: Sequence[tuple[Fraction, Roof]], domain: RationalPolytope) -> Roof:
    """Weighted sum, realized on the common refinement of all cell complexes."""
    terms = [(la.frac(w), r) for w, r in terms]
    for _, r in terms:
        if r.domain != domain:
            raise DomainMismatch("roofs live on different polytopes")
    if not terms:
        return Roof.constant(domain, 0)
    d = domain.affine_dim
    cells = [domain]
    for _, r in terms:
        if len(r.cells) == 1:
            continue
        nxt = []
        for c in cells:
            for rc in r.cells:
                m = _cell_meet(c, rc.polytope, d)
                if m is not None:
                    nxt.append(m)
        cells = nxt
    pts = sorted({v for c in cells for v in c.vertices})
    return Roof.from_points(domain, [(p, sum(w * r.value(p) for w, r in terms)) for p in pts])


def build_roof(domain: RationalPolytope, lifted_points) -> Roof:
    """Concave upper envelope of ``(point, height)`` pairs over ``domain``."""
    pts = []
    for p, h in lifted_points:
        p, h = la.vec(p), la.frac(h)
        if len(p) != domain.ambient_dim:
            raise PointOutsideDomain("lifted point has the wrong dimension")
        if h < 0:
            raise NegativeHeight(f"height {h} is negative")
        if not domain.contains(p):
            raise PointOutsideDomain(f"{tuple(map(str, p))} is outside the domain")
        pts.append((p, h))
    have = {p for p, _ in pts}
    missing = [v for v in domain.vertices if v not in have]
    if missing:
        raise MissingVertexHeight(f"no height for vertex {tuple(map(str, missing[0]))}")
    return Roof.from_points(domain, pts)


class AdelicPolytope:
    """A polytope with local roofs at finitely many places and place weights.

    Places without a roof carry the zero roof. Weights default to 1.
    """

    def __init__(self, base: RationalPolytope, roofs: Mapping | None = None,
                 weights: Mapping | None = None, virtual: bool = False):
        self.base = base
        self.roofs: dict = dict(roofs or {})
        self.weights: dict = {}
        for v, r in self.roofs.items():
            if r.domain != base:
                raise DomainMismatch(f"roof at place {v!r} has a different domain")
            if not virtual and not r.is_nonnegative():
                raise NegativeHeight(f"roof at place {v!r} takes negative values")
        for v, w in (weights or {}).items():
            w = la.frac(w)
            if w <= 0:
                raise ValueError(f"weight at place {v!r} must be positive")
            self.weights[v] = w

    @property
    def places(self) -> list:
        return sorted(set(self.roofs) | set(self.weights), key=str)

    def weight(self, place) -> Fraction:
        return self.weights.get(place, Fraction(1))

    def roof(self, place) -> Roof:
        r = self.roofs.get(place)
        return r if r is not None else Roof.constant(self.base, 0)

    @cached_property
    def global_roof(self) -> Roof:
        return sum_roofs([(self.weight(v), r) for v, r in sorted(self.roofs.items(), key=lambda kv: str(kv[0]))],
                         self.base)

    def scale_weights(self, c) -> "AdelicPolytope":
        c = la.frac(c)
        return AdelicPolytope(self.base, self.roofs,
                              {v: c * self.weight(v) for v in self.places})

    def __repr__(self):
        return f"AdelicPolytope(base={self.base!r}, places={self.places})"


def global_roof(p: AdelicPolytope) -> Roof:
    return p.global_roof


def _hypograph_of(roof: Roof) -> RationalPolytope:
    pts = [v + (Fraction(0),) for v in roof.domain.vertices]
    pts += [p + (h,) for p, h in roof.vertices]
    return canonicalize(vertices=pts)


def hypograph(p: AdelicPolytope, place=None) -> RationalPolytope:
    """``{(x, s) : x in base, 0 <= s <= theta(x)}``; ``place=None`` uses the global roof."""
    roof = p.global_roof if place is None else p.roof(place)
    return _hypograph_of(roof)


# Legendre-Fenchel duality


class DualRoof:
    """``n -> min_k (<A_k, n> + c_k)``: a concave PL function on the dual space.

    ``cells`` gives, per piece, the halfspaces ``a.n <= b`` of the region where
    that piece attains the minimum.
    """

    def __init__(self, dim: int, pieces):
        self.dim = dim
        self.pieces: tuple[tuple[Point, Fraction], ...] = tuple(
            sorted((la.vec(a), la.frac(c)) for a, c in pieces))

    def __call__(self, n) -> Fraction:
        n = la.vec(n)
        return min(la.dot(a, n) + c for a, c in self.pieces)

    @property
    def cells(self) -> list[list[tuple[Point, Fraction]]]:
        out = []
        for a, c in self.pieces:
            out.append([(la.sub(a, b), d - c) for b, d in self.pieces if (b, d) != (a, c)])
        return out

    def __eq__(self, other):
        return isinstance(other, DualRoof) and self.pieces == other.pieces

    def __repr__(self):
        return f"DualRoof({[(tuple(map(str, a)), str(c)) for a, c in self.pieces]})"


def legendre_dual(r: Roof) -> DualRoof:
    """Concave conjugate ``n -> inf_{m in domain} (<m, n> - r(m))``."""
    return DualRoof(r.domain.ambient_dim, [(p, -h) for p, h in r.vertices])


def reconstruct(dual: DualRoof) -> Roof:
    """Inverse of :func:`legendre_dual`: recover the domain and the roof."""
    domain = canonicalize(vertices=[a for a, _ in dual.pieces])
    return Roof.from_points(domain, [(a, -c) for a, c in dual.pieces])


# Minkowski structure


def _sup_convolution(r1: Roof, r2: Roof, domain: RationalPolytope) -> Roof:
    pts = [(la.add(p, q), h + k) for p, h in r1.vertices for q, k in r2.vertices]
    return Roof.from_points(domain, pts)


def adelic_sum(p: AdelicPolytope, q: AdelicPolytope) -> AdelicPolytope:
    """Minkowski sum; roofs combine by sup-convolution at every place."""
    base = minkowski_sum(p.base, q.base)
    weights = {}
    for v in set(p.weights) | set(q.weights):
        if v in p.weights and v in q.weights and p.weights[v] != q.weights[v]:
            raise ValueError(f"summands disagree on the weight at place {v!r}")
        weights[v] = p.weights.get(v, q.weights.get(v))
    roofs = {v: _sup_convolution(p.roof(v), q.roof(v), base)
             for v in set(p.roofs) | set(q.roofs)}
    return AdelicPolytope(base, roofs, weights)


def adelic_dilate(p: AdelicPolytope, lam) -> AdelicPolytope:
    lam = la.frac(lam)
    base = p.base.dilate(lam)
    roofs = {v: Roof.from_points(base, [(la.scale(lam, a), lam * h) for a, h in r.vertices])
             for v, r in p.roofs.items()}
    return AdelicPolytope(base, roofs, p.weights)


# adelic fans


def canonical_lift(sigma: Fan) -> Fan:
    """Cones ``s + 0`` and ``s + R_{>=0}`` for every cone ``s`` of ``sigma``."""
    n = sigma.ambient_dim
    rays = [r + (0,) for r in sigma.rays] + [(0,) * n + (1,)]
    up = len(sigma.rays)
    cones = []
    for c in sigma.cones:
        cones.append(frozenset(c))
        cones.append(frozenset(c) | {up})
    return Fan(n + 1, rays, cones)


def restrict_to_base(lift: Fan) -> Fan:
    """The part of a lift inside ``N + 0``, as a fan on ``N``."""
    n = lift.ambient_dim - 1
    flat = [i for i, r in enumerate(lift.rays) if r[-1] == 0]
    pos = {i: k for k, i in enumerate(flat)}
    cones = [frozenset(pos[i] for i in c) for c in lift.cones if all(i in pos for i in c)]
    return Fan(n, [lift.rays[i][:-1] for i in flat], cones)


@dataclass
class AdelicFan:
    recession: Fan
    lifts: dict = field(default_factory=dict)

    def __post_init__(self):
        for v, lift in self.lifts.items():
            if lift.ambient_dim != self.recession.ambient_dim + 1:
                raise IncompatibleFan(f"lift at place {v!r} has the wrong dimension")
            if any(r[-1] < 0 for r in lift.rays):
                raise IncompatibleFan(f"lift at place {v!r} leaves the upper half space")
            if restrict_to_base(lift) != self.recession:
                raise IncompatibleFan(f"lift at place {v!r} does not restrict to the recession fan")

    def lift(self, place) -> Fan:
        f = self.lifts.get(place)
        return f if f is not None else canonical_lift(self.recession)


def canonical_adelic_fan(sigma: Fan) -> AdelicFan:
    if not sigma.is_complete():
        raise NotComplete("the recession fan must be complete")
    return AdelicFan(sigma, {})


def _argmax(q: RationalPolytope, y) -> frozenset[int]:
    vals = [la.dot(y, v) for v in q.vertices]
    top = max(vals)
    return frozenset(i for i, x in enumerate(vals) if x == top)


def _dual_faces(q: RationalPolytope, lift: Fan) -> list[frozenset[int]]:
    out = []
    for c in lift.maximal_cones:
        common = frozenset(range(len(q.vertices)))
        for r in lift.cone_rays(c):
            common &= _argmax(q, r)
        out.append(common)
    return out


def is_compatible(p: AdelicPolytope, fan: AdelicFan, place) -> bool:
    """Normal fan of the hypograph, cut to the upper half space, coarsens the lift."""
    return all(_dual_faces(hypograph(p, place), fan.lift(place)))


def is_v_interior(p: AdelicPolytope, fan: AdelicFan, place) -> bool:
    """Every maximal cone of the lift is dual to its own vertex of the hypograph."""
    if p.base.ambient_dim != fan.recession.ambient_dim:
        raise DomainMismatch("polytope and fan live in different dimensions")
    for w in set(p.roofs) | set(fan.lifts) | {place}:
        if not is_compatible(p, fan, w):
            raise IncompatibleFan(f"hypograph at place {w!r} is not compatible with the lift")
    q = hypograph(p, place)
    if not q.is_full_dimensional:
        return False
    duals = _dual_faces(q, fan.lift(place))
    if any(len(f) != 1 for f in duals):
        return False
    return len(set(duals)) == len(duals)
