"""Rational polyhedral fans.

A fan keeps a list of primitive integer rays and every cone as the frozenset
of indices of the rays it contains. The zero cone is the empty set.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

from . import hull
from . import linalg as la
from .errors import DimensionMismatch, NotFullDimensional
from .polytope import RationalPolytope


def cone_inequalities(rays: Sequence[Sequence], n: int):
    """H-description of ``cone(rays)``: x is inside iff ``y.x >= 0`` for the
    returned ``ineqs`` and ``l.x == 0`` for the returned ``eqs``."""
    ineqs, lin = hull.cone_rays([list(r) for r in rays], [], n)
    return ineqs, [la.primitive(l) for l in lin]


def in_cone(x: Sequence, ineqs, eqs) -> bool:
    return all(la.dot(y, x) >= 0 for y in ineqs) and all(la.dot(l, x) == 0 for l in eqs)


def cone_face_sets(rays: Sequence[Sequence], n: int) -> set[frozenset[int]]:
    """All faces of ``cone(rays)``, as sets of positions into ``rays``."""
    ineqs, _ = cone_inequalities(rays, n)
    whole = frozenset(range(len(rays)))
    facets = [frozenset(i for i, r in enumerate(rays) if la.dot(y, r) == 0) for y in ineqs]
    faces = {whole, frozenset()}
    frontier = set(facets)
    while frontier:
        faces |= frontier
        frontier = {f & g for f in frontier for g in facets} - faces
    return faces


class Fan:
    """A fan in Q^n given by rays and the full set of cones."""

    def __init__(self, ambient_dim: int, rays: Sequence[Sequence[int]],
                 cones: Iterable[Iterable[int]], dual_face: dict | None = None):
        self.ambient_dim = ambient_dim
        self.rays: tuple[tuple[int, ...], ...] = tuple(tuple(int(x) for x in r) for r in rays)
        for r in self.rays:
            if len(r) != ambient_dim:
                raise DimensionMismatch("ray of wrong dimension")
            if la.primitive(r) != r:
                raise ValueError(f"ray {r} is not primitive")
        self.cones: frozenset[frozenset[int]] = frozenset(frozenset(c) for c in cones)
        self.dual_face = dual_face or {}

    @classmethod
    def from_maximal(cls, ambient_dim: int, rays, maximal) -> "Fan":
        """Build the fan generated by the given cones and all their faces."""
        rays = [la.primitive(r) for r in rays]
        uniq = sorted(set(rays))
        pos = {r: i for i, r in enumerate(uniq)}
        cones = set()
        for cone in maximal:
            idx = sorted({pos[rays[i]] for i in cone})
            for face in cone_face_sets([uniq[i] for i in idx], ambient_dim):
                cones.add(frozenset(idx[j] for j in face))
        if not maximal:
            cones.add(frozenset())
        return cls(ambient_dim, uniq, cones)

    def cone_rays(self, cone) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in sorted(cone)]

    def dim(self, cone) -> int:
        return la.rank(self.cone_rays(cone)) if cone else 0

    @cached_property
    def maximal_cones(self) -> list[frozenset[int]]:
        out = [c for c in self.cones if not any(c < d for d in self.cones)]
        return sorted(out, key=sorted)

    @cached_property
    def _hrep(self) -> dict:
        return {c: cone_inequalities(self.cone_rays(c), self.ambient_dim) for c in self.cones}

    def contains(self, cone, x) -> bool:
        ineqs, eqs = self._hrep[frozenset(cone)]
        return in_cone(la.vec(x), ineqs, eqs)

    def smallest_cone(self, x) -> frozenset[int] | None:
        """The unique cone containing ``x`` in its relative interior."""
        hits = [c for c in self.cones if self.contains(c, x)]
        if not hits:
            return None
        return min(hits, key=lambda c: (len(c), sorted(c)))

    @property
    def is_simplicial(self) -> bool:
        return all(self.dim(c) == len(c) for c in self.cones)

    def walls(self) -> list[frozenset[int]]:
        n = self.ambient_dim
        return [c for c in self.cones if self.dim(c) == n - 1]

    def is_complete(self) -> bool:
        n = self.ambient_dim
        if n == 0:
            return frozenset() in self.cones
        maxes = self.maximal_cones
        if not maxes or any(self.dim(c) != n for c in maxes):
            return False
        for w in self.walls():
            if sum(1 for c in maxes if w <= c) != 2:
                return False
        return True

    def ray_index(self, ray) -> int:
        return self.rays.index(tuple(ray))

    def __eq__(self, other):
        if not isinstance(other, Fan) or other.ambient_dim != self.ambient_dim:
            return False
        mine = {frozenset(self.rays[i] for i in c) for c in self.cones}
        theirs = {frozenset(other.rays[i] for i in c) for c in other.cones}
        return mine == theirs

    def __hash__(self):
        return hash((self.ambient_dim, frozenset(frozenset(self.rays[i] for i in c) for c in self.cones)))

    def __repr__(self):
        return f"Fan(dim={self.ambient_dim}, rays={len(self.rays)}, maximal={len(self.maximal_cones)})"


def normal_fan(p: RationalPolytope) -> Fan:
    """Outer normal fan; ``dual_face`` maps each cone to the face it is normal to."""
    if not p.is_full_dimensional:
        raise NotFullDimensional("normal fan needs a full-dimensional polytope")
    t = p.ambient_dim
    if t == 0:
        return Fan(0, [], [frozenset()], {frozenset(): frozenset({0})})
    normals = [la.primitive(a) for a, _ in p.facet_halfspaces]
    facet_sets = p.facet_vertex_sets
    order = sorted(range(len(normals)), key=lambda i: normals[i])
    rays = [normals[i] for i in order]
    sets = [facet_sets[i] for i in order]
    cones = []
    dual = {}
    for face in p.face_lattice:
        c = frozenset(j for j, s in enumerate(sets) if face <= s)
        cones.append(c)
        dual[c] = face
    return Fan(t, rays, cones, dual)


def fan_coarsens(coarse: Fan, fine: Fan) -> bool:
    """True iff every cone of ``fine`` lies in some cone of ``coarse``."""
    if coarse.ambient_dim != fine.ambient_dim:
        raise DimensionMismatch("fans live in different dimensions")
    for c in fine.maximal_cones:
        rays = fine.cone_rays(c)
        if not any(all(coarse.contains(d, r) for r in rays) for d in coarse.maximal_cones):
            return False
    return True

