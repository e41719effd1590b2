"""Double description: extreme rays of polyhedral cones, exactly.

The cone is ``{x : A x >= 0, E x = 0}``. Lineality is split off first, so
the iteration always runs on a pointed cone, in a coordinate system where
the cone is full dimensional. Rays are kept as primitive integer vectors.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import EmptyRegion, UnboundedRegion


def _int_row(row) -> tuple[int, ...]:
    row = [la.frac(x) for x in row]
    den = math.lcm(*(x.denominator for x in row)) if row else 1
    return tuple(int(x * den) for x in row)


def _normalize(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _idot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _pointed_rays(rows: list[tuple[int, ...]], k: int) -> list[tuple[int, ...]]:
    """Extreme rays of a pointed cone ``{y in R^k : rows . y >= 0}``."""
    if k == 0:
        return []
    # pick k independent rows for the starting simplicial cone
    basis: list[int] = []
    for i, r in enumerate(rows):
        if la.rank([rows[j] for j in basis] + [r]) > len(basis):
            basis.append(i)
            if len(basis) == k:
                break
    assert len(basis) == k, "cone is not pointed"
    inv = la.inverse([rows[i] for i in basis])
    rays = [_normalize(_int_row(col)) for col in la.transpose(inv)]
    # tight[j] = indices of processed rows vanishing on ray j
    tight = [frozenset(basis[m] for m in range(k) if m != j) for j in range(k)]
    done = list(basis)

    for i, a in enumerate(rows):
        if i in basis:
            continue
        vals = [_idot(a, r) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > 0]
        neg = [j for j, v in enumerate(vals) if v < 0]
        zero = [j for j, v in enumerate(vals) if v == 0]
        new_rays = [rays[j] for j in pos + zero]
        new_tight = [tight[j] | ({i} if vals[j] == 0 else set()) for j in pos + zero]
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                if len(common) < k - 2:
                    continue
                if any(m != p and m != q and common <= tight[m] for m in range(len(rays))):
                    continue
                r = tuple(vals[p] * y - vals[q] * x for x, y in zip(rays[p], rays[q]))
                new_rays.append(_normalize(r))
                new_tight.append(common | {i})
        rays, tight = new_rays, new_tight
        done.append(i)
    return rays


def cone_rays(ineqs: Sequence[Sequence], eqs: Sequence[Sequence], n: int):
    """Extreme rays and lineality basis of ``{x : ineqs.x >= 0, eqs.x = 0}``.

    Returns ``(rays, lineality)``: rays are primitive integer tuples, sorted,
    and describe the cone modulo its lineality space.
    """
    ineqs = [_int_row(r) for r in ineqs]
    eqs = [_int_row(r) for r in eqs]
    lineality = la.nullspace(ineqs + eqs, n) if (ineqs or eqs) else la.nullspace([], n)
    all_eqs = eqs + [_int_row(l) for l in lineality]
    param = la.nullspace(all_eqs, n) if all_eqs else la.nullspace([], n)
    k = len(param)
    if k == 0:
        return [], lineality
    cols = la.transpose(param)  # n x k
    rows = [_int_row(la.matvec(la.transpose(cols), a)) for a in ineqs]
    rows = [r for r in rows if any(r)]
    ys = _pointed_rays(rows, k)
    out = set()
    for y in ys:
        x = la.matvec(cols, y)
        out.add(la.primitive(x))
    return sorted(out), lineality


def facets_of_points(points: Sequence[Sequence[Fraction]]):
    """Irredundant ``(a, b)`` with ``a.x <= b`` for a full-dimensional hull."""
    t = len(points[0])
    rows = [(Fraction(1),) + tuple(p) for p in points]
    rays, lin = cone_rays(rows, [], t + 1)
    assert not lin, "point set is not full dimensional"
    out = []
    for y in rays:
        b, a = y[0], tuple(-c for c in y[1:])
        out.append((a, Fraction(b)))
    return out


def vertices_of_halfspaces(halfspaces: Sequence[tuple[Sequence, object]], t: int):
    """Vertices of ``{x : a.x <= b}``; raises on empty or unbounded input."""
    rows = [(Fraction(1),) + tuple(Fraction(0) for _ in range(t))]
    for a, b in halfspaces:
        rows.append((la.frac(b),) + tuple(-la.frac(x) for x in a))
    rays, lin = cone_rays(rows, [], t + 1)
    finite = [r for r in rays if r[0] > 0]
    if not finite:
        raise EmptyRegion("halfspace system is infeasible")
    if lin or any(r[0] == 0 for r in rays):
        raise UnboundedRegion("halfspace region is unbounded")
    return sorted({tuple(Fraction(x, r[0]) for x in r[1:]) for r in finite})
