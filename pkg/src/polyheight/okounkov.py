"""Okounkov bodies of toric bundles with their concave transforms.

Two encodings are supported. In constant-fiber mode the body is a product
``base x fiber`` and the transform depends on the base point only:
``G(m, x) = theta(m) + zeta(m)``. In graph mode the body is an arbitrary
polytope over the base and the transform is ``theta(m)`` plus a concave
piecewise-affine function on the body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import DimensionMismatch, DomainMismatch, EmptyRegion, NotFullDimensional
from .minima import QuadraticForm, ZetaOracle, _sup
from .polyint import Polynomial, integrate_over_roof_cells, integrate_polynomial
from .polytope import RationalPolytope, canonicalize, volume
from .roofs import AdelicPolytope, Roof, sum_roofs


@dataclass(frozen=True)
class FiberedBody:
    base: RationalPolytope
    body: RationalPolytope
    theta: Roof
    mode: str = "constant"
    fiber: RationalPolytope | None = None
    base_transform: ZetaOracle | None = None
    graph_transform: Roof | None = None

    @property
    def t(self) -> int:
        return self.base.ambient_dim

    @property
    def total_dim(self) -> int:
        return self.body.ambient_dim

    def transform(self, y) -> Fraction:
        """``G`` at a point of the body."""
        y = la.vec(y)
        if not self.body.contains(y):
            raise DomainMismatch("point is outside the body")
        m = y[:self.t]
        val = self.theta.value(m)
        if self.mode == "constant":
            return val + (self.base_transform(m) if self.base_transform else 0)
        return val + self.graph_transform.value(y)


def _product(p: RationalPolytope, q: RationalPolytope) -> RationalPolytope:
    return canonicalize(vertices=[u + v for u in p.vertices for v in q.vertices])


def _point0() -> RationalPolytope:
    return canonicalize(vertices=[()])


def toric_okounkov(P: AdelicPolytope) -> FiberedBody:
    """Body = the base polytope, transform = the global roof."""
    return FiberedBody(P.base, P.base, P.global_roof, "constant", _point0(), None)


def _as_oracle(tr, delta: RationalPolytope) -> ZetaOracle | None:
    if tr is None:
        return None
    if isinstance(tr, QuadraticForm):
        return ZetaOracle("concave_quadratic", quadratic=tr)
    if isinstance(tr, Roof):
        if tr.domain != delta:
            raise DomainMismatch("transform lives on a different polytope")
        return ZetaOracle.tabulated(tr.vertices)
    if isinstance(tr, ZetaOracle):
        if tr.kind == "tabulated" and tr.table.domain != delta:
            raise DomainMismatch("transform lives on a different polytope")
        if tr.dim != delta.ambient_dim:
            raise DomainMismatch("transform has the wrong number of variables")
        return tr
    raise TypeError(f"unsupported transform {type(tr).__name__}")


def product_body(P: AdelicPolytope, fiber: RationalPolytope, base_transform=None) -> FiberedBody:
    """Body ``base x fiber``; transform ``theta(m) + base_transform(m)``.

    ``base_transform`` may be a ZetaOracle, a Roof on the base (any sign), or a
    QuadraticForm q standing for ``-q``.
    """
    z = _as_oracle(base_transform, P.base)
    return FiberedBody(P.base, _product(P.base, fiber), P.global_roof, "constant", fiber, z)


def graph_body(P: AdelicPolytope, body: RationalPolytope, transform: Roof | None = None) -> FiberedBody:
    """Body given directly in ``R^(t+g)``, projecting onto the base."""
    t = P.base.ambient_dim
    if body.ambient_dim < t:
        raise DimensionMismatch("body has fewer coordinates than the base")
    proj = canonicalize(vertices=[v[:t] for v in body.vertices])
    if proj != P.base:
        raise DomainMismatch("body does not project onto the base polytope")
    if transform is None:
        transform = Roof.from_points(body, [(v, 0) for v in body.vertices])
    if transform.domain != body:
        raise DomainMismatch("transform lives on a different polytope")
    return FiberedBody(P.base, body, P.global_roof, "graph", None, None, transform)


def _base_integral(B: FiberedBody) -> Fraction:
    """``∫_base (theta + zeta)``."""
    t = B.t
    f = Polynomial.var(t + 1, t)
    z = B.base_transform
    if z is None:
        return integrate_over_roof_cells(B.theta, f)
    if z.kind == "concave_quadratic":
        q = z.quadratic.to_polynomial()
        g = Polynomial(t + 1, {e + (0,): -c for e, c in q.terms.items()})
        return integrate_over_roof_cells(B.theta, f + g)
    total = sum_roofs([(Fraction(1), B.theta), (Fraction(1), z.as_roof(B.base))], B.base)
    return integrate_over_roof_cells(total, f)


def _lifted_theta_cells(B: FiberedBody):
    """Cells of the body on which ``theta(m) + G_graph`` is affine."""
    n = B.total_dim
    pad = n - B.t
    out = []
    for tc in B.theta.cells:
        hs_t = [(tuple(a) + (Fraction(0),) * pad, b) for a, b in tc.polytope.halfspaces]
        for gc in B.graph_transform.cells:
            try:
                cell = canonicalize(halfspaces=hs_t + gc.polytope.halfspaces, dim=n)
            except EmptyRegion:
                continue
            if cell.affine_dim != B.body.affine_dim:
                continue
            grad = la.add(tuple(tc.gradient) + (Fraction(0),) * pad, gc.gradient)
            out.append((cell, grad, tc.constant + gc.constant))
    return out


def volumes(B: FiberedBody) -> tuple[Fraction, Fraction]:
    """``(d! vol(body), (d+1)! ∫_body G)``."""
    d = B.total_dim
    if B.mode == "constant":
        fv = volume(B.fiber)
        geo = volume(B.base) * fv
        integral = fv * _base_integral(B)
    else:
        if not B.body.is_full_dimensional:
            raise NotFullDimensional("graph-mode body must be full-dimensional")
        geo = volume(B.body)
        integral = sum((integrate_polynomial(c, Polynomial.linear(g, k))
                        for c, g, k in _lifted_theta_cells(B)), Fraction(0))
    return math.factorial(d) * geo, math.factorial(d + 1) * integral


def transform_extrema(B: FiberedBody) -> tuple[Fraction, Fraction]:
    """Exact ``(max G, inf G)`` over the body; the inf sits at a vertex."""
    if B.mode == "constant":
        z = B.base_transform or ZetaOracle.affine((0,) * B.t)
        top, _ = _sup(B.base, B.theta, z)
        low = min(B.theta.value(v) + z(v) for v in B.base.vertices)
        return top, low
    vals = [la.dot(g, v) + k for c, g, k in _lifted_theta_cells(B) for v in c.vertices]
    return max(vals), min(B.transform(v) for v in B.body.vertices)


def positive_part_integral(B: FiberedBody) -> Fraction:
    """``(d+1)! ∫_body max(0, G)`` for piecewise-affine transforms.

    Each affinity cell is cut at ``G = 0``; the upper part is integrated.
    """
    d = B.total_dim
    if B.mode == "constant":
        z = B.base_transform
        if z is not None and z.kind == "concave_quadratic":
            raise ValueError("positive part is only computed for piecewise-affine transforms")
        g = B.theta if z is None else sum_roofs(
            [(Fraction(1), B.theta), (Fraction(1), z.as_roof(B.base))], B.base)
        pieces = [(c.polytope, c.gradient, c.constant) for c in g.cells]
        factor = volume(B.fiber)
    else:
        pieces = _lifted_theta_cells(B)
        factor = Fraction(1)
    total = Fraction(0)
    for cell, grad, const in pieces:
        n = cell.ambient_dim
        hs = cell.halfspaces + [(tuple(-x for x in grad), const)]
        try:
            part = canonicalize(halfspaces=hs, dim=n) if n else cell
        except EmptyRegion:
            continue
        if n == 0 and const < 0:
            continue
        total += integrate_polynomial(part, Polynomial.linear(grad, const))
    return math.factorial(d + 1) * factor * total
