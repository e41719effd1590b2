"""The functionals Î and F̂, their polarization and polynomial extension.

Adelic polytopes compatible with a fixed simplicial adelic fan are encoded
by support coordinates: one number per ray of the recession fan and one per
non-horizontal ray of each lift. In these coordinates Î is a homogeneous
polynomial of degree t+i; everything below evaluates it exactly, either by
integrating a realized polytope or through its polarization.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import linalg as la
from .base_model import BaseRing, RingElement, c_hat, deg
from .errors import DimensionMismatch, GradeMismatch, IncompatibleFan, UnknownRay, WrongArity
from .polyint import Polynomial, integrate_roof_composite
from .polytope import canonicalize
from .roofs import AdelicFan, AdelicPolytope, Roof, adelic_sum, hypograph


@dataclass
class BkkInstance:
    """A ring, a class ``gamma`` of grade ``top - i`` and the power ``i``."""
    ring: BaseRing
    gamma: RingElement
    i: int

    def __post_init__(self):
        if self.i < 0:
            raise GradeMismatch("i must be nonnegative")
        g = self.gamma.grade
        if g is not None and g + self.i != self.ring.top_degree:
            raise GradeMismatch(
                f"gamma has grade {g}, expected {self.ring.top_degree - self.i}")
        self._f = None

    @property
    def t(self) -> int:
        return self.ring.rank

    @property
    def degree(self) -> int:
        return self.t + self.i

    def integrand(self) -> Polynomial:
        """``f(m, s) = deg((c(m) + s[inf])^i gamma)`` expanded termwise."""
        if self._f is None:
            self._f = _integrand(self.ring, self.gamma, self.i)
        return self._f


def _integrand(ring: BaseRing, gamma: RingElement, i: int) -> Polynomial:
    t = ring.rank
    gens = [ring.c_of_basis(j) for j in range(t)]
    inf = ring.gen(ring.names[ring.infinity]) if ring.infinity is not None else None
    terms = {}
    for k in _compositions(i, t + 1):
        if k[-1] and inf is None:
            continue
        mult = math.factorial(i) // math.prod(math.factorial(x) for x in k)
        el = gamma
        for j in range(t):
            if k[j]:
                el = el * gens[j] ** k[j]
        if k[-1]:
            el = el * inf ** k[-1]
        if el.is_zero():
            continue
        terms[k] = mult * deg(ring, el)
    return Polynomial(t + 1, terms)


def _compositions(n: int, parts: int):
    if parts == 0:
        if n == 0:
            yield ()
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def I_hat(inst: BkkInstance, p: AdelicPolytope) -> Fraction:
    """``∫_Δ deg((c(m) + θ(m)[inf])^i gamma) dm``."""
    if p.base.ambient_dim != inst.t:
        raise DimensionMismatch(
            f"polytope lives in dimension {p.base.ambient_dim}, lattice rank is {inst.t}")
    return integrate_roof_composite(p, inst.integrand())


def F_hat(inst: BkkInstance, p: AdelicPolytope) -> Fraction:
    return Fraction(math.factorial(inst.t + inst.i), math.factorial(inst.i)) * I_hat(inst, p)


def zero_polytope(t: int) -> AdelicPolytope:
    return AdelicPolytope(canonicalize(vertices=[(0,) * t]))


def polarize_I(inst: BkkInstance, parts: Sequence[AdelicPolytope]) -> Fraction:
    """Symmetric multilinear form whose diagonal is Î, by subset sums."""
    n = inst.degree
    if len(parts) != n:
        raise WrongArity(f"expected {n} arguments, got {len(parts)}")
    if n == 0:
        return I_hat(inst, zero_polytope(inst.t))
    # group equal parts so each distinct subset sum is integrated once
    distinct: list[AdelicPolytope] = []
    counts: list[int] = []
    for p in parts:
        for k, q in enumerate(distinct):
            if q is p:
                counts[k] += 1
                break
        else:
            distinct.append(p)
            counts.append(1)
    total = Fraction(0)
    for beta in itertools.product(*(range(c + 1) for c in counts)):
        size = sum(beta)
        if size == 0:
            continue
        acc = None
        for b, q in zip(beta, distinct):
            for _ in range(b):
                acc = q if acc is None else adelic_sum(acc, q)
        coef = math.prod(math.comb(c, b) for c, b in zip(counts, beta))
        total += (-1) ** (n - size) * coef * I_hat(inst, acc)
    return total / math.factorial(n)


# support coordinates


RayId = tuple  # (place or None, primitive ray)


class SupportCoordinates:
    """Coordinates of adelic polytopes compatible with a simplicial adelic fan.

    ``keys`` lists ``(None, rho)`` for recession rays and ``(place, tau)`` for
    lift rays with positive last coordinate. The coordinate is the support
    value: ``max <rho, x>`` over Δ, resp. ``max <e, A> + a θ_v(A)``.
    """

    def __init__(self, fan: AdelicFan, places: Sequence, weights: dict | None = None):
        self.fan = fan
        self.t = fan.recession.ambient_dim
        self.places = sorted(set(places), key=str)
        self.weights = dict(weights or {})
        self.keys: list[RayId] = [(None, r) for r in fan.recession.rays]
        for v in self.places:
            lift = fan.lift(v)
            for r in lift.rays:
                if r[-1] > 0:
                    self.keys.append((v, r))
        self.pos = {k: i for i, k in enumerate(self.keys)}
        sigma = fan.recession
        if not sigma.is_simplicial or any(sigma.dim(c) != self.t for c in sigma.maximal_cones):
            raise IncompatibleFan("recession fan must be complete and simplicial")
        for v in self.places:
            lift = fan.lift(v)
            if any(len(c) != self.t + 1 or lift.dim(c) != self.t + 1
                   for c in lift.maximal_cones):
                raise IncompatibleFan(f"lift at place {v!r} is not simplicial of full dimension")

    @property
    def dim(self) -> int:
        return len(self.keys)

    def key_of(self, ray_id) -> RayId:
        place, ray = ray_id
        ray = tuple(int(x) for x in ray)
        if place is not None and len(ray) == self.t + 1 and ray[-1] == 0:
            place, ray = None, ray[:-1]
        key = (place, ray)
        if key in self.pos:
            return key
        if place is not None and place not in self.places:
            lift = self.fan.lift(place)
            if ray in lift.rays and ray[-1] > 0:
                raise UnknownRay(f"place {place!r} is not part of this coordinate system")
        raise UnknownRay(f"ray {ray} at place {place!r} is not a ray of the adelic fan")

    def unit(self, ray_id) -> tuple[Fraction, ...]:
        k = self.pos[self.key_of(ray_id)]
        return tuple(Fraction(int(j == k)) for j in range(self.dim))

    def _flat_value(self, s, ray) -> Fraction:
        return s[self.pos[(None, ray)]]

    def of(self, p: AdelicPolytope) -> tuple[Fraction, ...]:
        out = []
        for place, ray in self.keys:
            if place is None:
                out.append(max(la.dot(ray, v) for v in p.base.vertices))
            else:
                roof = p.roof(place)
                e, a = ray[:-1], ray[-1]
                out.append(max(la.dot(e, x) + a * h for x, h in roof.vertices))
        return tuple(out)

    def _lift_value(self, s, place, ray) -> Fraction:
        if ray[-1] == 0:
            return self._flat_value(s, ray[:-1])
        return s[self.pos[(place, ray)]]

    def vertices(self, s):
        """Per-cone solutions; returns ``(base, places)`` or None if not convex.

        ``base`` maps maximal cones of the recession fan to points ``u``;
        ``places[v]`` maps maximal cones of the lift to ``(A, a)``.
        The third entry reports strict convexity.
        """
        sigma = self.fan.recession
        strict = True
        base = {}
        for c in sigma.maximal_cones:
            rays = sigma.cone_rays(c)
            u = la.solve(rays, [self._flat_value(s, r) for r in rays]) if rays else ()
            base[c] = u
            for r in sigma.rays:
                val = la.dot(r, u) - self._flat_value(s, r)
                if val > 0:
                    return None
                if val == 0 and r not in rays:
                    strict = False
        places = {}
        for v in self.places:
            lift = self.fan.lift(v)
            sols = {}
            for c in lift.maximal_cones:
                rays = lift.cone_rays(c)
                x = la.solve(rays, [self._lift_value(s, v, r) for r in rays])
                sols[c] = x
                for r in lift.rays:
                    val = la.dot(r, x) - self._lift_value(s, v, r)
                    if val > 0:
                        return None
                    if val == 0 and r not in rays:
                        strict = False
            places[v] = sols
        return base, places, strict

    def is_strict(self, s) -> bool:
        res = self.vertices(s)
        return res is not None and res[2]

    def realize(self, s) -> AdelicPolytope | None:
        """The adelic polytope with support coordinates ``s`` (roofs may be
        negative), or None when ``s`` is not convex on the fan."""
        res = self.vertices(s)
        if res is None:
            return None
        base, places, _ = res
        delta = canonicalize(vertices=list(base.values()))
        roofs = {}
        for v, sols in places.items():
            pts = [(x[:-1], x[-1]) for x in sols.values()]
            roofs[v] = Roof.from_points(delta, pts)
        weights = {v: w for v, w in self.weights.items() if v in set(self.places)}
        return AdelicPolytope(delta, roofs, weights, virtual=True)

    def check_compatible(self, p: AdelicPolytope) -> tuple[Fraction, ...]:
        s = self.of(p)
        q = self.realize(s)
        if q is None or q.base != p.base or any(q.roof(v) != p.roof(v) for v in self.places):
            raise IncompatibleFan("polytope is not compatible with the adelic fan")
        extra = set(p.roofs) - set(self.places)
        if extra:
            raise IncompatibleFan(f"roofs at places {sorted(map(str, extra))} are outside the fan")
        return s

    def interior_point(self, near=None, seed: int = 0) -> tuple[Fraction, ...]:
        """A strictly convex coordinate vector, searched deterministically."""
        if near is not None and self.is_strict(near):
            return tuple(near)
        rng = random.Random(seed)
        base = tuple(near) if near is not None else (Fraction(0),) * self.dim
        for attempt in range(2000):
            scale = 1 + attempt // 100
            w = tuple(Fraction(rng.randint(0, 6 * scale)) for _ in range(self.dim))
            for cand in (la.add(base, la.scale(Fraction(1, 4), w)), w):
                if self.is_strict(cand):
                    return cand
        raise IncompatibleFan("no strictly convex element found; is the fan projective?")


class Evaluator:
    """Exact values of Î on support coordinates, cached.

    Realizable points are integrated directly. Other points are reached by
    the homogeneous polynomial extension: along ``R + λ s`` from a strictly
    convex ``R`` the leading coefficient in λ is Î(s).
    """

    def __init__(self, inst: BkkInstance, coords: SupportCoordinates):
        self.inst = inst
        self.coords = coords
        self.cache: dict[tuple, Fraction] = {}
        self._ref = None

    def direct(self, s) -> Fraction | None:
        s = tuple(s)
        if s in self.cache:
            return self.cache[s]
        p = self.coords.realize(s)
        if p is None:
            return None
        val = I_hat(self.inst, p)
        self.cache[s] = val
        return val

    def reference(self):
        if self._ref is None:
            self._ref = self.coords.interior_point()
        return self._ref

    def __call__(self, s) -> Fraction:
        val = self.direct(s)
        if val is not None:
            return val
        n = self.inst.degree
        ref = self.reference()
        h = Fraction(1)
        for _ in range(64):
            pts = [la.add(ref, la.scale(k * h, s)) for k in range(n + 1)]
            if all(self.coords.vertices(p) is not None for p in pts):
                vals = [self.direct(p) for p in pts]
                diff = sum(((-1) ** (n - k) * math.comb(n, k) * v for k, v in enumerate(vals)),
                           Fraction(0))
                return diff / (math.factorial(n) * h ** n)
            h /= 2
        raise IncompatibleFan("could not reach the point from a strictly convex reference")


# virtual polytopes


@dataclass(frozen=True)
class RayDual:
    """The virtual polytope with support 1 on one ray of the fan and 0 elsewhere."""
    place: object
    ray: tuple


@dataclass
class VirtualAdelicPolytope:
    """Formal combination ``sum lambda_k P_k`` (summands may be ray duals)."""
    terms: list = field(default_factory=list)

    def add(self, lam, p) -> "VirtualAdelicPolytope":
        return VirtualAdelicPolytope(self.terms + [(la.frac(lam), p)])

    def __add__(self, other: "VirtualAdelicPolytope"):
        return VirtualAdelicPolytope(self.terms + other.terms)

    def scaled(self, c) -> "VirtualAdelicPolytope":
        c = la.frac(c)
        return VirtualAdelicPolytope([(c * lam, p) for lam, p in self.terms])


def _places_of(fan: AdelicFan, polys, rays=()) -> list:
    places = set(fan.lifts)
    for p in polys:
        places |= set(p.roofs)
    for place, _ in rays:
        if place is not None:
            places.add(place)
    return sorted(places, key=str)


def _weights_of(polys) -> dict:
    out = {}
    for p in polys:
        for v, w in p.weights.items():
            if v in out and out[v] != w:
                raise ValueError(f"summands disagree on the weight at place {v!r}")
            out[v] = w
    return out


def multilinear_value(inst: BkkInstance, basis: Sequence, coeffs: Sequence, value) -> Fraction:
    """``Î(sum c_j b_j)`` from Î on nonnegative integer combinations of the basis.

    ``value(beta)`` must return Î of ``sum beta_j b_j``; the polarization
    identity then expands the homogeneous polynomial multilinearly.
    """
    n = inst.degree
    m = len(basis)
    if n == 0:
        return value((0,) * m)
    total = Fraction(0)
    for alpha in _compositions(n, m):
        lam = math.prod(c ** a for c, a in zip(coeffs, alpha))
        if not lam:
            continue
        # polarization on the multiset of basis elements given by alpha
        pol = Fraction(0)
        for beta in itertools.product(*(range(a + 1) for a in alpha)):
            size = sum(beta)
            if size == 0:
                continue
            coef = math.prod(math.comb(a, b) for a, b in zip(alpha, beta))
            pol += (-1) ** (n - size) * coef * value(beta)
        pol /= math.factorial(n)
        multinom = math.factorial(n) // math.prod(math.factorial(a) for a in alpha)
        total += multinom * lam * pol
    return total


def virtual_I(inst: BkkInstance, v: VirtualAdelicPolytope, fan: AdelicFan,
              evaluator: Evaluator | None = None) -> Fraction:
    """Î extended to a formal combination of compatible adelic polytopes.

    If the combination is itself realizable it is integrated directly;
    otherwise ray duals are traded for differences of realizable polytopes
    and the polarization expands the rest.
    """
    polys = [p for _, p in v.terms if isinstance(p, AdelicPolytope)]
    duals = [p for _, p in v.terms if isinstance(p, RayDual)]
    if evaluator is None:
        coords = SupportCoordinates(fan, _places_of(fan, polys, [(d.place, d.ray) for d in duals]),
                                    _weights_of(polys))
        evaluator = Evaluator(inst, coords)
    coords = evaluator.coords
    vecs = []
    for lam, p in v.terms:
        if isinstance(p, RayDual):
            vecs.append((lam, coords.unit((p.place, p.ray))))
        else:
            vecs.append((lam, coords.check_compatible(p)))
    net = (Fraction(0),) * coords.dim
    for lam, s in vecs:
        net = la.add(net, la.scale(lam, s))
    direct = evaluator.direct(net)
    if direct is not None:
        return direct
    # basis of realizable vectors: the genuine summands plus R and Q,
    # where the ray-dual part u is written as (Q - R)/eps
    basis: list[tuple] = []
    coeffs: list[Fraction] = []
    u = (Fraction(0),) * coords.dim
    for (lam, p), (_, s) in zip(v.terms, vecs):
        if isinstance(p, RayDual):
            u = la.add(u, la.scale(lam, s))
        elif s in basis:
            coeffs[basis.index(s)] += lam
        else:
            basis.append(s)
            coeffs.append(lam)
    if any(u):
        ref = evaluator.reference()
        eps = Fraction(1)
        while coords.vertices(la.add(ref, la.scale(eps, u))) is None:
            eps /= 2
        q = la.add(ref, la.scale(eps, u))
        basis += [q, ref]
        coeffs += [1 / eps, -1 / eps]

    def value(beta):
        s = (Fraction(0),) * coords.dim
        for b, vec in zip(beta, basis):
            if b:
                s = la.add(s, la.scale(b, vec))
        out = evaluator.direct(s)
        if out is None:  # sums of realizable vectors are realizable
            raise IncompatibleFan("summand is not compatible with the adelic fan")
        return out

    return multilinear_value(inst, basis, coeffs, value)


# derivatives


@lru_cache(maxsize=None)
def _stirling1(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return _stirling1(n - 1, k - 1) - (n - 1) * _stirling1(n - 1, k)


def lattice_coefficient(q, r: int, n: int, k: Sequence[int]) -> Fraction:
    """Coefficient of ``x^k`` of the degree-``n`` polynomial with values
    ``q(b)`` on ``{b in N^r : |b| <= n}`` (Newton interpolation)."""
    k = tuple(k)
    total = Fraction(0)
    for a in _lattice(r, n):
        if any(x < y for x, y in zip(a, k)):
            continue
        weight = Fraction(math.prod(_stirling1(x, y) for x, y in zip(a, k)),
                          math.prod(math.factorial(x) for x in a))
        if not weight:
            continue
        d = Fraction(0)
        for b in itertools.product(*(range(x + 1) for x in a)):
            coef = math.prod(math.comb(x, y) for x, y in zip(a, b))
            d += (-1) ** (sum(a) - sum(b)) * coef * q(b)
        total += weight * d
    return total


def _lattice(r: int, n: int):
    for size in range(n + 1):
        yield from _compositions(size, r)


def directional_derivative(inst: BkkInstance, p: AdelicPolytope, fan: AdelicFan,
                           rays: Sequence, evaluator: Evaluator | None = None) -> Fraction:
    """Mixed partial derivative of Î at ``p`` along the duals of ``rays``.

    ``rays`` is a multiset of ``(place, ray)``; recession rays may use
    ``place=None``. The polynomial is restricted to the span of the ray
    duals and recovered exactly from samples on a small lattice.
    """
    rays = [(pl, tuple(int(x) for x in r)) for pl, r in rays]
    if evaluator is None:
        coords = SupportCoordinates(fan, _places_of(fan, [p], rays), p.weights)
        evaluator = Evaluator(inst, coords)
    coords = evaluator.coords
    s0 = coords.check_compatible(p)
    keys = [coords.key_of(r) for r in rays]
    n = inst.degree
    if len(keys) > n:
        return Fraction(0)
    distinct = sorted(set(keys), key=lambda k: coords.pos[k])
    mult = tuple(keys.count(k) for k in distinct)
    units = [coords.unit(k) for k in distinct]
    r = len(distinct)
    if r == 0:
        return evaluator(s0)

    def sampler(eps, signs, virtual):
        def q(b):
            s = s0
            for bj, sg, u in zip(b, signs, units):
                if bj:
                    s = la.add(s, la.scale(sg * bj * eps, u))
            if virtual:
                return evaluator(s)
            val = evaluator.direct(s)
            if val is None:
                raise _NotRealizable
            return val
        return q

    factor = math.prod(math.factorial(x) for x in mult)
    # sample where the polytope stays realizable; shrink the step first,
    # then try other orthants, and only then use the virtual extension
    for signs in itertools.product((1, -1), repeat=r):
        eps = Fraction(1)
        for _ in range(12):
            try:
                c = lattice_coefficient(sampler(eps, signs, False), r, n, mult)
            except _NotRealizable:
                eps /= 2
                continue
            sign = math.prod(sg ** m for sg, m in zip(signs, mult))
            return sign * factor * c / eps ** sum(mult)
    c = lattice_coefficient(sampler(Fraction(1), (1,) * r, True), r, n, mult)
    return factor * c


class _NotRealizable(Exception):
    pass


def spans_cone(fan: AdelicFan, rays: Sequence, places: Sequence) -> bool:
    """Whether the distinct rays lie in one cone of the fan at some place."""
    keys = []
    t = fan.recession.ambient_dim
    for place, ray in rays:
        ray = tuple(int(x) for x in ray)
        if len(ray) == t:
            ray = ray + (0,)
        keys.append((place, ray))
    upper_places = {pl for pl, r in keys if r[-1] > 0}
    if len(upper_places) > 1:
        return False
    candidates = list(upper_places) if upper_places else (list(places) or [None])
    for v in candidates:
        lift = fan.lift(v)
        want = {lift.rays.index(r) for _, r in keys if r in lift.rays}
        if len(want) != len({r for _, r in keys}):
            continue
        if any(want <= c for c in lift.cones):
            return True
    return False


def predicted_cone_derivative(inst: BkkInstance, p: AdelicPolytope, fan: AdelicFan,
                              place, cone_rays: Sequence) -> Fraction:
    """Closed form of the squarefree derivative along a maximal cone at ``place``.

    The cone's rays ``e_1..e_{t+1}`` pick out the vertex ``(A, θ_v(A))``; the
    value is ``n_v * i * deg(c(A)^{i-1} [inf] gamma) / |det(e_1..e_{t+1})|``.
    The determinant divides: moving the supporting hyperplanes of a cone
    with index ``|det|`` by unit amounts moves the vertex by ``1/|det|``.
    """
    rays = [tuple(int(x) for x in r) for r in cone_rays]
    q = hypograph(p, place)
    common = set(range(len(q.vertices)))
    for r in rays:
        vals = [la.dot(r, x) for x in q.vertices]
        top = max(vals)
        common &= {j for j, x in enumerate(vals) if x == top}
    if len(common) != 1:
        raise IncompatibleFan("cone is not dual to a single vertex")
    vertex = q.vertices[common.pop()]
    a = vertex[:-1]
    ring = inst.ring
    if inst.i == 0 or ring.infinity is None:
        return Fraction(0)
    el = inst.gamma * ring.gen(ring.names[ring.infinity])
    if inst.i > 1:
        el = el * c_hat(ring, a) ** (inst.i - 1)
    d = abs(la.det(rays))
    return p.weight(place) * inst.i * deg(ring, el) / d
