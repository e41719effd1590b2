"""Seeded random generators and the identity suites run by ``polyheight verify``.

Every suite takes a ``random.Random`` and a case count and returns a
:class:`SuiteResult`. The suites are also what the acceptance tests call, so
the command line and the test-suite check the same things.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .base_model import BaseRing, RingElement, ZeroPattern, abelian_canonical_ring, build_ring, deg
from .bkk import (BkkInstance, Evaluator, RayDual, SupportCoordinates, VirtualAdelicPolytope,
                  I_hat, directional_derivative, predicted_cone_derivative,
                  spans_cone, virtual_I)
from .fan import Fan, normal_fan
from .minima import (QuadraticForm, ZetaOracle, absolute_minimum, essential_minimum,
                     successive_minima_semiabelian)
from .okounkov import toric_okounkov, volumes
from .polyint import (Polynomial, SymmetricForm, integrate_over_roof_cells, integrate_polynomial,
                      integrate_symmetric_form_simplex)
from .polytope import RationalPolytope, Simplex, canonicalize, volume
from .roofs import (AdelicFan, AdelicPolytope, Roof, build_roof, canonical_adelic_fan,
                    canonical_lift, hypograph, is_v_interior, legendre_dual, reconstruct)
from .semiabelian import (SemiabelianInput, chambert_loir_polytope, cl_closed_forms, height,
                          minima_report)

DEFAULT_SEED = 20240601


# generators


def half_integer(rng: random.Random, lo: int = -3, hi: int = 3) -> Fraction:
    return Fraction(rng.randint(2 * lo, 2 * hi), 2)


def random_polytope(rng: random.Random, t: int, max_vertices: int = 6) -> RationalPolytope:
    """Full-dimensional hull of at most ``max_vertices`` points of ``(1/2)Z^t`` in ``[-3, 3]^t``."""
    if t == 0:
        return canonicalize(vertices=[()])
    while True:
        k = rng.randint(t + 1, max(t + 1, max_vertices))
        p = canonicalize(vertices=[tuple(half_integer(rng) for _ in range(t)) for _ in range(k)])
        if p.is_full_dimensional and len(p.vertices) <= max_vertices:
            return p


def random_psd_gram(rng: random.Random, t: int) -> list[list[Fraction]]:
    """Symmetric PSD matrix with entries in ``[0, 4] ∩ (1/4)Z``."""
    while True:
        m = [[Fraction(0)] * t for _ in range(t)]
        for i in range(t):
            for j in range(i, t):
                m[i][j] = m[j][i] = Fraction(rng.randint(0, 16), 4)
        if all(p >= 0 for p in la.ldl_pivots(m)):
            return m


def random_point_in(rng: random.Random, p: RationalPolytope):
    w = [Fraction(rng.randint(0, 4)) for _ in p.vertices]
    if not any(w):
        w[0] = Fraction(1)
    s = sum(w)
    return tuple(sum(wi * v[j] for wi, v in zip(w, p.vertices)) / s for j in range(p.ambient_dim))


def random_roof(rng: random.Random, p: RationalPolytope, extra: int = 2, top: int = 3) -> Roof:
    """Nonnegative concave piecewise-affine roof from random lifted points."""
    pts = [(v, Fraction(rng.randint(0, 2 * top), 2)) for v in p.vertices]
    for _ in range(rng.randint(0, extra)):
        pts.append((random_point_in(rng, p), Fraction(rng.randint(0, 4 * top), 2)))
    return build_roof(p, pts)


def random_adelic_polytope(rng: random.Random, p: RationalPolytope, max_places: int = 2) -> AdelicPolytope:
    places = [f"v{k}" for k in range(rng.randint(1, max_places))]
    roofs = {v: random_roof(rng, p) for v in places}
    weights = {v: rng.choice([1, 2, 3, Fraction(1, 2)]) for v in places}
    return AdelicPolytope(p, roofs, weights)


def random_ring(rng: random.Random, t: int) -> tuple[BaseRing, int]:
    """A graded ring with t character generators, extra classes, and a
    random degree table; returns the ring and its top degree."""
    top = rng.randint(1, 3)
    xs = [f"x{i + 1}" for i in range(t)]
    gens = [(x, 1) for x in xs] + [("y", 1), ("z", 2), ("inf", 1)]
    zeros = [[{"generators": xs, "count": 2}]] if xs and rng.random() < 0.5 else []
    lattice = [{x: 1} for x in xs]
    pattern = [ZeroPattern(tuple((frozenset(i for i, (n, _) in enumerate(gens) if n in cl["generators"]),
                                  cl["count"]) for cl in pat)) for pat in zeros]
    shape = BaseRing(gens, "inf", top, {}, pattern, lattice)
    table = {shape.format_monomial(m): str(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
             for m in shape.top_monomials() if not shape.is_zero_monomial(m)}
    spec = {"generators": [{"name": n, "grade": g} for n, g in gens], "infinity": "inf",
            "top_degree": top, "table": table, "zeros": zeros, "lattice_map": lattice}
    return build_ring(spec), top


def random_element(rng: random.Random, ring: BaseRing, grade: int) -> RingElement:
    terms = {m: Fraction(rng.randint(-3, 3)) for m in ring.top_monomials(grade)
             if not ring.is_zero_monomial(m)}
    return RingElement.from_terms(ring, terms)


def random_simplex(rng: random.Random, t: int) -> Simplex:
    while True:
        pts = [tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(t))
               for _ in range(t + 1)]
        if t == 0 or la.rank([la.sub(p, pts[0]) for p in pts[1:]]) == t:
            return Simplex(pts)


def random_symmetric_form(rng: random.Random, t: int, r: int) -> SymmetricForm:
    coeffs = {idx: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
              for idx in itertools.combinations_with_replacement(range(t), r)}
    return SymmetricForm(t, r, coeffs)


def _stellar(fan: Fan, a: int, b: int) -> Fan:
    """Subdivide the 2-cone on rays ``a, b`` by their sum."""
    new = la.primitive(la.add(fan.rays[a], fan.rays[b]))
    rays = list(fan.rays) + [new]
    k = len(rays) - 1
    maximal = []
    for c in fan.maximal_cones:
        if a in c and b in c:
            maximal.append(sorted((c - {a}) | {k}))
            maximal.append(sorted((c - {b}) | {k}))
        else:
            maximal.append(sorted(c))
    return Fan.from_maximal(fan.ambient_dim, rays, maximal)


def random_smooth_fan(rng: random.Random, t: int) -> Fan:
    if t == 1:
        return Fan.from_maximal(1, [(1,), (-1,)], [[0], [1]])
    if rng.random() < 0.5:
        fan = normal_fan(canonicalize(vertices=[(0, 0), (1, 0), (0, 1)]))
    else:
        fan = normal_fan(canonicalize(vertices=[(0, 0), (1, 0), (0, 1), (1, 1)]))
    for _ in range(rng.randint(0, 1)):
        two = [c for c in fan.maximal_cones]
        a, b = sorted(rng.choice(two))
        fan = _stellar(fan, a, b)
    return fan


@dataclass
class FanInstance:
    fan: AdelicFan
    coords: SupportCoordinates
    polytope: AdelicPolytope
    places: list


def random_fan_instance(rng: random.Random, t: int, places=("v",), subdivisions: int = 2,
                        max_tries: int = 20) -> FanInstance:
    """A smooth adelic fan (stellar subdivisions of canonical lifts) and a
    v-interior adelic polytope with nonnegative roofs compatible with it."""
    sigma = random_smooth_fan(rng, t)
    flat = SupportCoordinates(canonical_adelic_fan(sigma), [])
    s_sigma = flat.interior_point(seed=rng.randint(0, 10 ** 6))
    values = {(None, r): x for r, x in zip(sigma.rays, s_sigma)}
    lifts = {}
    for v in places:
        lift = canonical_lift(sigma)
        up = (0,) * t + (1,)
        values[(v, up)] = Fraction(rng.randint(2, 6))
        for _ in range(subdivisions):
            twos = [c for c in lift.cones if len(c) == 2
                    and any(lift.rays[i][-1] > 0 for i in c)]
            a, b = sorted(rng.choice(sorted(twos, key=sorted)))
            ra, rb = lift.rays[a], lift.rays[b]
            cand = _stellar(lift, a, b)
            new = la.primitive(la.add(ra, rb))
            delta = Fraction(1, 2)
            for _ in range(max_tries):
                trial = dict(values)
                trial[(v, new)] = _val(values, v, ra) + _val(values, v, rb) - delta
                lifts_try = dict(lifts)
                lifts_try[v] = cand
                coords = SupportCoordinates(AdelicFan(sigma, lifts_try), list(lifts_try))
                s = _vector(coords, trial)
                if coords.is_strict(s):
                    values, lift = trial, cand
                    break
                delta /= 2
        lifts[v] = lift
    af = AdelicFan(sigma, lifts)
    weights = {v: rng.choice([1, 2, 3]) for v in places}
    coords = SupportCoordinates(af, list(places), weights)
    p = coords.realize(_vector(coords, values))
    # lifting a roof by a constant keeps every cell, hence compatibility
    roofs = {v: r.shift(max(0, -r.min())) for v, r in p.roofs.items()}
    p = AdelicPolytope(p.base, roofs, weights)
    return FanInstance(af, coords, p, list(places))


def _val(values, v, ray):
    if ray[-1] == 0:
        return values[(None, ray[:-1])]
    return values[(v, ray)]


def _vector(coords: SupportCoordinates, values) -> tuple:
    return tuple(values[k] for k in coords.keys)


def random_abelian_instance(rng: random.Random, t: int, i: int) -> BkkInstance:
    g = max(1, i - 1 + rng.randint(0, 1))
    ring = abelian_canonical_ring(g, rng.choice([1, 2, 3, 6]), random_psd_gram(rng, t))
    return BkkInstance(ring, ring.gen("omega") ** (g + 1 - i), i)


# suites


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    seconds: float = 0.0
    counterexample: str | None = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"[{status}] {self.name}: {self.cases} cases in {self.seconds:.2f}s"
        if self.counterexample:
            out += f" -- counterexample: {self.counterexample}"
        return out


class _Runner:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.failure: str | None = None
        self.start = time.perf_counter()

    def check(self, ok: bool, what) -> bool:
        self.cases += 1
        if not ok and self.failure is None:
            self.failure = what() if callable(what) else str(what)
        return ok

    def done(self, **details) -> SuiteResult:
        return SuiteResult(self.name, self.failure is None, self.cases,
                           time.perf_counter() - self.start, self.failure, details)


def suite_routes(rng: random.Random, n: int = 100) -> SuiteResult:
    """Height via the product Okounkov body equals the intersection expansion."""
    run = _Runner("route consistency")
    pinned = height(SemiabelianInput(1, 1, canonicalize(vertices=[(-1,), (1,)]), [[1]], 3))
    run.check((pinned.okounkov_route, pinned.bkk_route, pinned.printed_formula) == (-12, -12, -4),
              lambda: f"pinned instance gave {pinned}")
    for k in range(n):
        t, g = rng.choice([1, 2]), rng.choice([1, 2])
        delta = random_polytope(rng, t)
        gram = random_psd_gram(rng, t)
        degM = rng.choice([1, 2, 3, 6])
        roofs = random_adelic_polytope(rng, delta) if k % 2 else None
        rep = height(SemiabelianInput(t, g, delta, gram, degM, roofs), check=False)
        run.check(rep.consistent, lambda: f"t={t} g={g} {delta} gram={gram} degM={degM}: {rep}")
    return run.done()


def suite_degeneration(rng: random.Random, n: int = 50) -> SuiteResult:
    """With i = 0 the functional is vol(Δ) deg(gamma)."""
    run = _Runner("i=0 degeneration")
    for _ in range(n):
        t = rng.randint(1, 3)
        ring, top = random_ring(rng, t)
        gamma = random_element(rng, ring, top)
        inst = BkkInstance(ring, gamma, 0)
        p = random_adelic_polytope(rng, random_polytope(rng, t))
        lhs, rhs = I_hat(inst, p), volume(p.base) * deg(ring, gamma)
        run.check(lhs == rhs, lambda: f"{p.base}: {lhs} != {rhs}")
    return run.done()


def suite_polynomiality(rng: random.Random, n: int = 50) -> SuiteResult:
    """Order t+i+1 differences of the extension along ray duals vanish."""
    run = _Runner("polynomiality")
    mixed = 0
    for _ in range(n):
        t, i = rng.choice([1, 2]), rng.choice([0, 1, 2])
        fi = random_fan_instance(rng, t, subdivisions=rng.randint(0, 2))
        inst = random_abelian_instance(rng, t, i)
        ev = Evaluator(inst, fi.coords)
        keys = rng.sample(fi.coords.keys, min(len(fi.coords.keys), rng.randint(1, 3)))
        coef = [Fraction(rng.choice([-2, -1, 1, 2])) for _ in keys]
        order = inst.degree + 1
        # stretch the direction until the last sample leaves the realizable
        # region, so direct integrals and the extension are both exercised
        base = fi.coords.of(fi.polytope)
        for _ in range(6):
            far = base
            for c, key in zip(coef, keys):
                far = la.add(far, la.scale(c * order, fi.coords.unit(key)))
            if fi.coords.vertices(far) is None:
                break
            coef = [2 * c for c in coef]
        direction = VirtualAdelicPolytope([(c, RayDual(pl, r)) for c, (pl, r) in zip(coef, keys)])
        vals, direct = [], 0
        for lam in range(order + 1):
            v = VirtualAdelicPolytope([(1, fi.polytope)]) + direction.scaled(lam)
            net = fi.coords.of(fi.polytope)
            for c, key in zip(coef, keys):
                net = la.add(net, la.scale(c * lam, fi.coords.unit(key)))
            direct += fi.coords.vertices(net) is not None
            vals.append(virtual_I(inst, v, fi.fan, ev))
        mixed += 0 < direct < len(vals)
        diff = sum(((-1) ** (order - k) * math.comb(order, k) * x for k, x in enumerate(vals)),
                   Fraction(0))
        run.check(diff == 0, lambda: f"t={t} i={i} keys={keys} coef={coef}: difference {diff}")
    return run.done(mixed_direction_cases=mixed)


def suite_derivative(rng: random.Random, n: int = 20) -> SuiteResult:
    """Squarefree derivative along a maximal cone at the place matches the
    closed form ``n_v i deg(c(A)^(i-1) [inf] gamma) |det|`` (unimodular cones)."""
    run = _Runner("cone derivative")
    for _ in range(n):
        t, i = rng.choice([1, 2]), rng.choice([1, 2])
        fi = random_fan_instance(rng, t, subdivisions=rng.randint(1, 2))
        inst = random_abelian_instance(rng, t, i)
        v = fi.places[0]
        ok_interior = is_v_interior(fi.polytope, fi.fan, v)
        lift = fi.fan.lift(v)
        cone = rng.choice(lift.maximal_cones)
        rays = lift.cone_rays(cone)
        d = abs(la.det(rays))
        got = directional_derivative(inst, fi.polytope, fi.fan, [(v, r) for r in rays])
        want = predicted_cone_derivative(inst, fi.polytope, fi.fan, v, rays)
        # ``want`` carries 1/|det|; the closed form times |det| is want * det^2
        run.check(ok_interior and d == 1 and got == want == want * d * d,
                  lambda: f"t={t} i={i} rays={rays}: got {got}, want {want}, det {d}")
    return run.done()


def suite_noncone(rng: random.Random, n: int = 20) -> SuiteResult:
    """Mixed derivatives along ray multisets spanning no cone vanish."""
    run = _Runner("non-cone vanishing")
    with_mult = 0
    while run.cases < n:
        t, i = rng.choice([1, 2]), rng.choice([1, 2])
        fi = random_fan_instance(rng, t, places=("v", "w"), subdivisions=1)
        inst = random_abelian_instance(rng, t, i)
        keys = fi.coords.keys
        size = rng.randint(2, inst.degree)
        pick = [rng.choice(keys) for _ in range(size)]
        if run.cases % 2 == 0 and size >= 3:
            pick[1] = pick[0]
        rays = [(pl, r) for pl, r in pick]
        if spans_cone(fi.fan, rays, fi.places):
            continue
        with_mult += len(set(pick)) < len(pick)
        got = directional_derivative(inst, fi.polytope, fi.fan, rays)
        run.check(got == 0, lambda: f"rays={rays}: derivative {got}")
    return run.done(with_multiplicity=with_mult)


def suite_simplex(rng: random.Random, n: int = 100) -> SuiteResult:
    """Vertex-tuple formula for symmetric forms against direct integration."""
    run = _Runner("simplex formula")
    seg = canonicalize(vertices=[(-1,), (1,)])
    run.check(integrate_polynomial(seg, Polynomial(1, {(2,): 1})) == Fraction(2, 3), "∫ m^2 on [-1,1]")
    tri = chambert_loir_polytope(2)
    run.check(integrate_polynomial(tri, Polynomial(2, {(2, 0): 1, (0, 2): 1})) == Fraction(9, 2),
              "∫ x^2+y^2 on the CL triangle")
    for _ in range(n):
        t, r = rng.randint(1, 3), rng.randint(1, 4)
        s = random_simplex(rng, t)
        h = random_symmetric_form(rng, t, r)
        lhs = integrate_symmetric_form_simplex(s, h, r)
        rhs = integrate_polynomial(canonicalize(vertices=s.vertices), h.diagonal())
        run.check(lhs == rhs, lambda: f"{s} arity {r}: {lhs} != {rhs}")
    return run.done()


def suite_minima(rng: random.Random, n: int = 50) -> SuiteResult:
    """Worked instances, the vertex formula on the CL simplex, and the
    agreement of the extreme successive minima with the essential and
    absolute minima."""
    run = _Runner("minima")
    seg = canonicalize(vertices=[(-1,), (1,)])
    got = minima_report(SemiabelianInput(1, 1, seg, [[1]], 1))
    run.check(got == [-1, -1, 0], lambda: f"t=1 instance gave {got}")
    got2 = minima_report(SemiabelianInput(2, 1, chambert_loir_polytope(2), [[1, 0], [0, 1]], 1))
    run.check(got2 == [-5, -5, -1, 0], lambda: f"CL triangle gave {got2}")
    for _ in range(n):
        t, g = rng.randint(1, 3), rng.randint(1, 2)
        gram = random_psd_gram(rng, t)
        delta = chambert_loir_polytope(t)
        P, z = AdelicPolytope(delta), ZetaOracle.concave_quadratic(gram)
        closed = cl_closed_forms(t, gram, rng.choice([1, 2, 3, 6]), g)
        zs = successive_minima_semiabelian(delta, QuadraticForm(gram), g)
        ab, es = absolute_minimum(P, z), essential_minimum(P, z)
        ok = (closed.zeta_abs_closed == ab == zs[0] and zs[-1] == es
              and all(a <= b for a, b in zip(zs, zs[1:])))
        run.check(ok, lambda: f"gram={gram} g={g}: zeta={zs} abs={ab} ess={es} closed={closed}")
    return run.done()


def suite_duality(rng: random.Random, n: int = 100) -> SuiteResult:
    """Double conjugation returns the roof."""
    run = _Runner("Legendre involution")
    for _ in range(n):
        t = rng.randint(1, 3)
        r = random_roof(rng, random_polytope(rng, t, max_vertices=5))
        back = reconstruct(legendre_dual(r))
        run.check(back == r, lambda: f"{r} came back as {back}")
    return run.done()


def suite_toric_height(rng: random.Random, n: int = 50) -> SuiteResult:
    """chi of the toric Okounkov body is (t+1)! times the volume under θ."""
    run = _Runner("toric height identity")
    for k in range(n):
        t = rng.randint(1, 3)
        delta = random_polytope(rng, t, max_vertices=5)
        P = random_adelic_polytope(rng, delta) if k % 5 else AdelicPolytope(delta)
        _, chi = volumes(toric_okounkov(P))
        under = volume(hypograph(P)) if P.roofs else Fraction(0)
        ok = chi == math.factorial(t + 1) * under and (P.roofs or chi == 0)
        run.check(ok, lambda: f"{P}: chi {chi} vs {math.factorial(t + 1) * under}")
    return run.done()


def suite_hypograph(rng: random.Random, n: int = 50) -> SuiteResult:
    """Volume of the hypograph equals the integral of the roof."""
    run = _Runner("hypograph volume")
    for _ in range(n):
        t = rng.randint(1, 3)
        delta = random_polytope(rng, t, max_vertices=5)
        P = random_adelic_polytope(rng, delta)
        v = rng.choice(P.places)
        lhs = volume(hypograph(P, v))
        rhs = integrate_over_roof_cells(P.roof(v), Polynomial.var(t + 1, t))
        run.check(lhs == rhs, lambda: f"{P} at {v}: {lhs} != {rhs}")
    return run.done()


SUITES = {
    "routes": (suite_routes, 100),
    "degeneration": (suite_degeneration, 50),
    "polynomiality": (suite_polynomiality, 50),
    "derivative": (suite_derivative, 20),
    "noncone": (suite_noncone, 20),
    "simplex": (suite_simplex, 100),
    "minima": (suite_minima, 50),
    "duality": (suite_duality, 100),
    "toric_height": (suite_toric_height, 50),
    "hypograph": (suite_hypograph, 50),
}


def run_suites(names="all", seed: int = DEFAULT_SEED, cases: int | None = None) -> list[SuiteResult]:
    """Run suites by name; each gets its own generator seeded from ``seed``."""
    if names == "all":
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    out = []
    for name in names:
        fn, default = SUITES[name]
        rng = random.Random(f"{seed}:{name}")
        out.append(fn(rng, cases if cases is not None else default))
    return out
