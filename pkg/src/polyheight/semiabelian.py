"""Heights and minima of toric compactifications of semiabelian varieties.

The torus bundle is described by a Gram matrix ``G[i][j] = B(c(e_i), c(e_j))``
of the Néron-Tate pairing, so ``hq(m) = m.G.m``. The height is computed twice:
once by integrating the transform over the product Okounkov body, once by
expanding the intersection number over the abelian degree table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .base_model import abelian_canonical_ring
from .bkk import BkkInstance, I_hat
from .errors import BadDimensions, DimensionMismatch, DomainMismatch, InconsistentRoutes
from .minima import (QuadraticForm, ZetaOracle, absolute_minimum, successive_minima,
                     successive_minima_semiabelian)
from .okounkov import product_body, volumes
from .polyint import integrate_polynomial
from .polytope import RationalPolytope, canonicalize
from .roofs import AdelicPolytope

NORMALIZATION_NOTE = (
    "printed_formula omits the factor deg(M)/g! (volume of the abelian Okounkov body) "
    "that the product-body and intersection routes both carry; the two routes agree "
    "with each other and differ from the printed value by that factor when roofs vanish")


@dataclass
class SemiabelianInput:
    t: int
    g: int
    polytope: RationalPolytope
    gram: list
    degM: Fraction
    roofs: AdelicPolytope | None = None
    hq: QuadraticForm = field(init=False, repr=False)

    def __post_init__(self):
        if self.t < 0 or self.g < 1:
            raise BadDimensions("need t >= 0 and g >= 1")
        if len(self.gram) != self.t or any(len(r) != self.t for r in self.gram):
            raise BadDimensions(f"gram matrix must be {self.t}x{self.t}")
        if self.polytope.ambient_dim != self.t:
            raise DimensionMismatch("polytope must live in R^t")
        self.degM = la.frac(self.degM)
        if self.degM <= 0:
            raise ValueError("degM must be positive")
        self.hq = QuadraticForm(self.gram)
        self.gram = [list(r) for r in self.hq.Q]
        if self.roofs is None:
            self.roofs = AdelicPolytope(self.polytope)
        elif self.roofs.base != self.polytope:
            raise DomainMismatch("roof data lives on a different polytope")

    @property
    def d(self) -> int:
        return self.t + self.g


@dataclass
class HeightReport:
    okounkov_route: Fraction
    bkk_route: Fraction
    printed_formula: Fraction
    consistent: bool
    normalization_note: str = NORMALIZATION_NOTE


def abelian_fiber(g: int, degM) -> RationalPolytope:
    """A box in R^g of volume ``degM / g!``."""
    side = la.frac(degM) / math.factorial(g)
    pts = []
    for k in range(2 ** g):
        pts.append(tuple(Fraction((k >> j) & 1) * (side if j == 0 else 1) for j in range(g)))
    return canonicalize(vertices=pts)


def okounkov_height(inp: SemiabelianInput) -> Fraction:
    body = product_body(inp.roofs, abelian_fiber(inp.g, inp.degM), inp.hq)
    return volumes(body)[1]


def bkk_height(inp: SemiabelianInput) -> Fraction:
    """``sum_i C(d+1, t+i) (t+i)!/i! Î_i`` with ``gamma = omega^(g+1-i)``."""
    ring = abelian_canonical_ring(inp.g, inp.degM, inp.gram)
    omega = ring.gen("omega")
    t, d = inp.t, inp.d
    total = Fraction(0)
    for i in range(inp.g + 2):
        inst = BkkInstance(ring, omega ** (inp.g + 1 - i), i)
        val = I_hat(inst, inp.roofs)
        if val:
            total += math.comb(d + 1, t + i) * Fraction(math.factorial(t + i), math.factorial(i)) * val
    return total


def printed_height(inp: SemiabelianInput) -> Fraction:
    """The literal ``-(d+1)! ∫ hq`` (no roofs, no fiber volume)."""
    return -math.factorial(inp.d + 1) * integrate_polynomial(inp.polytope, inp.hq.to_polynomial())


def height(inp: SemiabelianInput, check: bool = True) -> HeightReport:
    ok = okounkov_height(inp)
    bk = bkk_height(inp)
    if check and ok != bk:
        raise InconsistentRoutes(f"okounkov route {ok} != intersection route {bk}")
    return HeightReport(ok, bk, printed_height(inp), ok == bk)


def minima_report(inp: SemiabelianInput, convention: str = "default") -> list[Fraction]:
    """Successive minima ``zeta_1..zeta_(d+1)``; roofs enter face by face."""
    if not inp.roofs.roofs:
        return successive_minima_semiabelian(inp.polytope, inp.hq, inp.g, convention)
    z = ZetaOracle("concave_quadratic", quadratic=inp.hq)
    return successive_minima(inp.roofs, z, inp.g, convention)


def chambert_loir_polytope(t: int) -> RationalPolytope:
    """``(t+1) * standard simplex - sum e_i``; its vertices sum to zero."""
    if t < 1:
        raise BadDimensions("t must be at least 1")
    shift = [Fraction(-1)] * t
    pts = [tuple(shift)]
    for i in range(t):
        v = list(shift)
        v[i] += t + 1
        pts.append(tuple(v))
    return canonicalize(vertices=pts)


def cl_vertex_values(t: int, gram) -> list[Fraction]:
    """``[hq(-q)] + [hq((t+1)q_i - q)]`` evaluated through the Gram matrix."""
    G = la.check_psd(gram, "gram matrix")
    q = [Fraction(1)] * t  # q = sum of q_i in the basis q_1..q_t
    vals = [la.quad(G, [-x for x in q])]
    for i in range(t):
        v = [-x for x in q]
        v[i] += t + 1
        vals.append(la.quad(G, v))
    return vals


@dataclass
class ClosedForms:
    zeta_abs_closed: Fraction
    height_closed: Fraction
    route_height: Fraction
    ratio: Fraction | None


def cl_closed_forms(t: int, gram, degM, g: int) -> ClosedForms:
    """Vertex formula for the absolute minimum and the closed-form height,
    with the ratio of the latter to the route-consistent height."""
    if len(gram) != t:
        raise BadDimensions(f"gram matrix must be {t}x{t}")
    vals = cl_vertex_values(t, gram)
    degM = la.frac(degM)
    d = t + g
    zeta = -max(vals)
    closed = -Fraction((d + 1) * degM, (t + 1) * (t + 2)) * sum(vals)
    route = height(SemiabelianInput(t, g, chambert_loir_polytope(t), gram, degM)).okounkov_route
    ratio = closed / route if route else None
    return ClosedForms(zeta, closed, route, ratio)


def cl_absolute_minimum(t: int, gram) -> Fraction:
    """``absolute_minimum`` of ``-hq`` on the Chambert-Loir simplex."""
    delta = chambert_loir_polytope(t)
    return absolute_minimum(AdelicPolytope(delta), ZetaOracle.concave_quadratic(gram))
