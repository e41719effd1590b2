"""Exact rational polytopes with synchronized V- and H-descriptions."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import hull
from . import linalg as la
from .errors import BadDimension, DimensionMismatch, EmptyRegion

Point = tuple[Fraction, ...]


def _affine_chart(points: list[Point]):
    """Base point, pivot coordinates and equations of the affine hull.

    Projecting onto the pivot coordinates is injective on the affine hull, so
    all relative computations happen there.
    """
    t = len(points[0])
    base = points[0]
    diffs = [la.sub(p, base) for p in points[1:]]
    if diffs:
        red, pivots = la.rref(diffs)
    else:
        pivots = []
    # equations: normals orthogonal to every difference
    normals = la.nullspace(diffs, t) if diffs else la.nullspace([], t)
    eqs = []
    for nrm in normals:
        a = la.primitive(nrm)
        a = tuple(Fraction(x) for x in a)
        eqs.append((a, la.dot(a, base)))
    return base, pivots, eqs


class RationalPolytope:
    """A nonempty polytope in Q^t, stored by its vertices.

    ``halfspaces`` lists facet inequalities ``a.x <= b`` (a primitive integer)
    followed, for lower-dimensional polytopes, by the two inequalities of each
    affine-hull equation, so that the listed halfspaces always cut out exactly
    the polytope.
    """

    def __init__(self, vertices: Sequence[Point], _checked: bool = False):
        if not _checked:
            raise TypeError("use canonicalize() to build a RationalPolytope")
        self.vertices: tuple[Point, ...] = tuple(vertices)
        self.ambient_dim = len(self.vertices[0])
        _, self._pivots, self._eqs = _affine_chart(list(self.vertices))
        self.affine_dim = len(self._pivots)

    # chart helpers
    def to_chart(self, x: Sequence) -> Point:
        return tuple(la.frac(x[i]) for i in self._pivots)

    @property
    def pivots(self) -> list[int]:
        return list(self._pivots)

    @property
    def equations(self) -> list[tuple[Point, Fraction]]:
        return list(self._eqs)

    @cached_property
    def facet_halfspaces(self) -> list[tuple[Point, Fraction]]:
        d = self.affine_dim
        if d == 0:
            return []
        chart_pts = [self.to_chart(v) for v in self.vertices]
        out = []
        for a, b in hull.facets_of_points(chart_pts):
            full = [Fraction(0)] * self.ambient_dim
            for c, i in zip(a, self._pivots):
                full[i] = Fraction(c)
            prim = la.primitive(full)
            j = next(i for i in range(self.ambient_dim) if full[i])
            s = prim[j] / full[j]
            out.append((tuple(Fraction(x) for x in prim), b * s))
        return sorted(out)

    @property
    def halfspaces(self) -> list[tuple[Point, Fraction]]:
        out = list(self.facet_halfspaces)
        for a, b in self._eqs:
            out.append((a, b))
            out.append((tuple(-x for x in a), -b))
        return out

    @cached_property
    def facet_vertex_sets(self) -> list[frozenset[int]]:
        sets = []
        for a, b in self.facet_halfspaces:
            sets.append(frozenset(i for i, v in enumerate(self.vertices) if la.dot(a, v) == b))
        return sets

    @cached_property
    def face_lattice(self) -> dict[frozenset[int], int]:
        """Every nonempty face as a vertex-index set, mapped to its dimension."""
        top = frozenset(range(len(self.vertices)))
        faces = {top}
        frontier = set(self.facet_vertex_sets)
        facets = list(self.facet_vertex_sets)
        while frontier:
            faces |= frontier
            nxt = set()
            for f in frontier:
                for g in facets:
                    h = f & g
                    if h and h not in faces:
                        nxt.add(h)
            frontier = nxt
        return {f: self._dim_of(f) for f in faces}

    def _dim_of(self, idx: Iterable[int]) -> int:
        pts = [self.vertices[i] for i in sorted(idx)]
        if len(pts) <= 1:
            return 0
        return la.rank([la.sub(p, pts[0]) for p in pts[1:]])

    def face_from_indices(self, idx: Iterable[int]) -> "RationalPolytope":
        return RationalPolytope(sorted(self.vertices[i] for i in idx), _checked=True)

    def contains(self, x: Sequence) -> bool:
        x = la.vec(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatch("point and polytope dimensions differ")
        return all(la.dot(a, x) <= b for a, b in self.halfspaces)

    def translate(self, p: Sequence) -> "RationalPolytope":
        p = la.vec(p)
        return RationalPolytope(sorted(la.add(v, p) for v in self.vertices), _checked=True)

    def dilate(self, lam) -> "RationalPolytope":
        lam = la.frac(lam)
        if lam < 0:
            raise ValueError("dilation factor must be nonnegative")
        return canonicalize(vertices=[la.scale(lam, v) for v in self.vertices])

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.ambient_dim

    def __eq__(self, other):
        return isinstance(other, RationalPolytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"RationalPolytope([{vs}])"


def _extreme(points: list[Point]) -> list[Point]:
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    base, pivots, _ = _affine_chart(pts)
    d = len(pivots)
    if d == 1:
        return [pts[0], pts[-1]] if pts[0] != pts[-1] else [pts[0]]
    chart = [tuple(p[i] for i in pivots) for p in pts]
    facets = hull.facets_of_points(chart)
    keep = []
    for p, c in zip(pts, chart):
        tight = [k for k, (a, b) in enumerate(facets) if la.dot(a, c) == b]
        # a point is a vertex iff its tight normals span the chart space
        if len(tight) >= d and la.rank([facets[k][0] for k in tight]) == d:
            keep.append(p)
    return keep


def canonicalize(vertices=None, halfspaces=None, dim: int | None = None) -> RationalPolytope:
    """Build a polytope from either a point list or a halfspace list.

    Halfspaces are pairs ``(normal, offset)`` meaning ``normal.x <= offset``.
    """
    if (vertices is None) == (halfspaces is None):
        raise ValueError("give exactly one of vertices or halfspaces")
    if vertices is not None:
        pts = [la.vec(v) for v in vertices]
        if not pts:
            raise EmptyRegion("empty vertex list")
        t = len(pts[0])
        if any(len(p) != t for p in pts):
            raise DimensionMismatch("points of different dimensions")
        if t == 0:
            return RationalPolytope([()], _checked=True)
        return RationalPolytope(_extreme(pts), _checked=True)
    hs = [(la.vec(a), la.frac(b)) for a, b in halfspaces]
    if dim is None:
        if not hs:
            raise ValueError("dimension unknown for an empty halfspace list")
        dim = len(hs[0][0])
    if any(len(a) != dim for a, _ in hs):
        raise DimensionMismatch("halfspace normals of different dimensions")
    verts = hull.vertices_of_halfspaces(hs, dim)
    return canonicalize(vertices=verts)


def _check_dims(p: RationalPolytope, q: RationalPolytope):
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {p.ambient_dim} and {q.ambient_dim}")


def minkowski_sum(p: RationalPolytope, q: RationalPolytope) -> RationalPolytope:
    _check_dims(p, q)
    return canonicalize(vertices=[la.add(u, v) for u in p.vertices for v in q.vertices])


def support_value(p: RationalPolytope, n: Sequence) -> Fraction:
    n = la.vec(n)
    if len(n) != p.ambient_dim:
        raise DimensionMismatch("direction and polytope dimensions differ")
    return max(la.dot(n, v) for v in p.vertices)


def faces(p: RationalPolytope, k: int) -> list[RationalPolytope]:
    """All ``k``-dimensional faces, in lexicographic order of their vertices."""
    if k < 0 or k > p.affine_dim:
        raise BadDimension(f"face dimension {k} outside 0..{p.affine_dim}")
    out = [p.face_from_indices(f) for f, d in p.face_lattice.items() if d == k]
    return sorted(out, key=lambda f: f.vertices)


class Simplex:
    """Affinely independent vertices; the degenerate case is a lone point."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Point]):
        self.vertices = tuple(tuple(la.frac(x) for x in v) for v in vertices)
        if len(self.vertices) > 1:
            base = self.vertices[0]
            if la.rank([la.sub(v, base) for v in self.vertices[1:]]) != len(self.vertices) - 1:
                raise ValueError("simplex vertices are affinely dependent")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    def volume(self) -> Fraction:
        """Lebesgue volume in the ambient space (zero when not full)."""
        t = self.ambient_dim
        if self.dim != t:
            return Fraction(1) if t == 0 else Fraction(0)
        base = self.vertices[0]
        m = [la.sub(v, base) for v in self.vertices[1:]]
        return abs(la.det(m)) / math.factorial(t)

    def __repr__(self):
        return f"Simplex({[tuple(str(x) for x in v) for v in self.vertices]})"


def _pull(p: RationalPolytope, face: frozenset[int], dim: int, by_dim) -> list[tuple[int, ...]]:
    if dim == 0:
        return [tuple(face)]
    apex = min(face)  # vertices are stored in lex order
    out = []
    for g in by_dim.get(dim - 1, ()):
        if g <= face and apex not in g:
            for s in _pull(p, g, dim - 1, by_dim):
                out.append((apex,) + s)
    return out


def triangulate(p: RationalPolytope) -> list[Simplex]:
    """Pulling triangulation, always pulling the lexicographically least vertex."""
    lattice = p.face_lattice
    by_dim: dict[int, list[frozenset[int]]] = {}
    for f, d in lattice.items():
        by_dim.setdefault(d, []).append(f)
    for d in by_dim:
        by_dim[d].sort(key=sorted)
    top = frozenset(range(len(p.vertices)))
    return [Simplex([p.vertices[i] for i in s]) for s in _pull(p, top, p.affine_dim, by_dim)]


def volume(p: RationalPolytope) -> Fraction:
    if not p.is_full_dimensional:
        return Fraction(1) if p.ambient_dim == 0 else Fraction(0)
    return sum((s.volume() for s in triangulate(p)), Fraction(0))


def relative_volume(p: RationalPolytope) -> Fraction:
    """Volume in the coordinate chart of the affine hull."""
    if p.affine_dim == 0:
        return Fraction(1)
    chart = canonicalize(vertices=[p.to_chart(v) for v in p.vertices])
    return volume(chart)


def simplex_of(vertices) -> RationalPolytope:
    return canonicalize(vertices=vertices)


def unit_cube(t: int) -> RationalPolytope:
    from itertools import product
    return canonicalize(vertices=list(product((0, 1), repeat=t)))


def standard_simplex(t: int, scale=1) -> RationalPolytope:
    s = la.frac(scale)
    pts = [tuple(Fraction(0) for _ in range(t))]
    for i in range(t):
        pts.append(tuple(s if j == i else Fraction(0) for j in range(t)))
    return canonicalize(vertices=pts)
