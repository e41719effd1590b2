import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from polyheight import linalg as la
from polyheight import verify
from polyheight.base_model import abelian_canonical_ring, build_ring, c_hat, deg
from polyheight.bkk import (BkkInstance, Evaluator, F_hat, I_hat, RayDual, VirtualAdelicPolytope,
                            directional_derivative, polarize_I, predicted_cone_derivative,
                            spans_cone, virtual_I)
from polyheight.errors import GradeMismatch, WrongArity
from polyheight.polyint import Polynomial, integrate_roof_composite
from polyheight.polytope import canonicalize, unit_cube, volume
from polyheight.roofs import AdelicPolytope, Roof, adelic_dilate, adelic_sum, build_roof, is_v_interior

from conftest import rngs

UNIT = canonicalize(vertices=[(0,), (1,)])
SEG02 = canonicalize(vertices=[(0,), (2,)])
SQUARE = unit_cube(2)


def null_ring(t, degM=3):
    """Lattice map identically zero: only the [inf] term survives."""
    spec = {"generators": [{"name": "omega", "grade": 1}, {"name": "inf", "grade": 1}],
            "infinity": "inf", "top_degree": 2,
            "table": {"omega^2": 0, "inf*omega": degM}, "lattice_map": [{}] * t}
    return build_ring(spec)


def test_i_zero_is_volume():
    R = abelian_canonical_ring(1, 1, [[2]])
    inst = BkkInstance(R, R.gen("inf") * R.gen("omega"), 0)
    assert I_hat(inst, AdelicPolytope(UNIT)) == 1


def test_i_one_linear_integrand():
    R = abelian_canonical_ring(2, 3, [[Fraction(5, 4)]])
    gamma = R.gen("x1") * R.gen("omega")
    inst = BkkInstance(R, gamma, 1)
    centroid = deg(R, c_hat(R, (1,)) * gamma)
    assert I_hat(inst, AdelicPolytope(SEG02)) == volume(SEG02) * centroid
    assert centroid == -3 * Fraction(5, 4)


def test_null_lattice_map_keeps_infinity_term():
    R = null_ring(1, degM=3)
    inst = BkkInstance(R, R.gen("omega"), 1)
    hat = build_roof(SEG02, [((0,), 0), ((1,), 1), ((2,), 0)])
    P = AdelicPolytope(SEG02, {"v": hat})
    assert I_hat(inst, P) == 3 * integrate_roof_composite(P, Polynomial.var(2, 1))
    assert I_hat(inst, AdelicPolytope(SEG02)) == 0
    assert F_hat(inst, AdelicPolytope(SEG02)) == 0


def test_f_hat_examples():
    R = abelian_canonical_ring(1, 1, [[1, 0], [0, 1]])
    inst = BkkInstance(R, R.gen("inf") * R.gen("omega"), 0)
    assert F_hat(inst, AdelicPolytope(SQUARE)) == 2
    R1 = abelian_canonical_ring(1, 3, [[1]])
    inst1 = BkkInstance(R1, R1.gen("omega"), 1)
    P = AdelicPolytope(SEG02, {"v": Roof.constant(SEG02, 2)})
    assert F_hat(inst1, P) == 2 * I_hat(inst1, P)


def test_gamma_grade_checked():
    R = abelian_canonical_ring(1, 3, [[1]])
    with pytest.raises(GradeMismatch):
        BkkInstance(R, R.gen("omega"), 0)


def test_polarization_examples():
    R = abelian_canonical_ring(1, 1, [[1, 0], [0, 1]])
    inst = BkkInstance(R, R.gen("inf") * R.gen("omega"), 0)
    sq = AdelicPolytope(SQUARE)
    seg = AdelicPolytope(canonicalize(vertices=[(0, 0), (1, 0)]))
    assert polarize_I(inst, [sq, sq]) == 1
    assert polarize_I(inst, [sq, seg]) == Fraction(1, 2)
    assert polarize_I(inst, [seg, sq]) == Fraction(1, 2)
    with pytest.raises(WrongArity):
        polarize_I(inst, [sq])


def _fan_case(rng, t=None, i=None, places=("v",)):
    t = t or rng.choice([1, 2])
    i = rng.choice([1, 2]) if i is None else i
    fi = verify.random_fan_instance(rng, t, places=places, subdivisions=rng.randint(0, 2))
    return fi, verify.random_abelian_instance(rng, t, i)


@settings(max_examples=10)
@given(rngs)
def test_virtual_examples(rng):
    fi, inst = _fan_case(rng)
    P = fi.polytope
    zero = VirtualAdelicPolytope([(1, P), (-1, P)])
    assert virtual_I(inst, zero, fi.fan) == 0
    double = VirtualAdelicPolytope([(2, P)])
    assert virtual_I(inst, double, fi.fan) == 2 ** inst.degree * I_hat(inst, P)


@settings(max_examples=10)
@given(rngs)
def test_virtual_matches_interpolation(rng):
    fi, inst = _fan_case(rng)
    place, ray = rng.choice(fi.coords.keys)
    ev = Evaluator(inst, fi.coords)
    n = inst.degree

    def at(lam):
        v = VirtualAdelicPolytope([(1, fi.polytope), (lam, RayDual(place, ray))])
        return virtual_I(inst, v, fi.fan, ev)

    xs = list(range(n + 1))
    ys = [at(x) for x in xs]
    target = Fraction(-3, 2)
    interp = sum(y * math.prod(Fraction(target - xk, xj - xk) for xk in xs if xk != xj)
                 for xj, y in zip(xs, ys))
    assert at(target) == interp


@settings(max_examples=8)
@given(rngs)
def test_derivative_of_too_high_order_vanishes(rng):
    fi, inst = _fan_case(rng)
    rays = [rng.choice(fi.coords.keys) for _ in range(inst.degree + 1)]
    assert directional_derivative(inst, fi.polytope, fi.fan, rays) == 0


@settings(max_examples=8)
@given(rngs)
def test_cone_derivative_closed_form(rng):
    fi, inst = _fan_case(rng)
    v = fi.places[0]
    assert is_v_interior(fi.polytope, fi.fan, v)
    lift = fi.fan.lift(v)
    rays = lift.cone_rays(rng.choice(lift.maximal_cones))
    got = directional_derivative(inst, fi.polytope, fi.fan, [(v, r) for r in rays])
    assert abs(la.det(rays)) == 1
    assert got == predicted_cone_derivative(inst, fi.polytope, fi.fan, v, rays)


@settings(max_examples=8)
@given(rngs)
def test_non_cone_derivative_vanishes(rng):
    fi, inst = _fan_case(rng, places=("v", "w"))
    keys = fi.coords.keys
    for _ in range(50):
        pick = [rng.choice(keys) for _ in range(rng.randint(2, inst.degree))]
        if not spans_cone(fi.fan, pick, fi.places):
            break
    else:
        return
    assert directional_derivative(inst, fi.polytope, fi.fan, pick) == 0


@given(rngs, st.integers(1, 2), st.integers(0, 2), st.integers(0, 6).map(lambda k: Fraction(k, 2)))
def test_homogeneity(rng, t, i, lam):
    inst = verify.random_abelian_instance(rng, t, i)
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    assert I_hat(inst, adelic_dilate(P, lam)) == lam ** inst.degree * I_hat(inst, P)


@given(rngs, st.integers(1, 2), st.integers(0, 2))
def test_f_over_i_ratio(rng, t, i):
    inst = verify.random_abelian_instance(rng, t, i)
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    assert F_hat(inst, P) == Fraction(math.factorial(t + i), math.factorial(i)) * I_hat(inst, P)


@given(rngs, st.integers(1, 3))
def test_i_zero_ignores_roofs(rng, t):
    R, top = verify.random_ring(rng, t)
    gamma = verify.random_element(rng, R, top)
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    assert I_hat(BkkInstance(R, gamma, 0), P) == volume(P.base) * deg(R, gamma)


@settings(max_examples=15)
@given(rngs, st.integers(0, 1))
def test_polarization_symmetric_multilinear(rng, i):
    t = 1
    inst = verify.random_abelian_instance(rng, t, i)

    def poly():
        base = verify.random_polytope(rng, t)
        return AdelicPolytope(base, {"v": verify.random_roof(rng, base)})

    a, b, c = poly(), poly(), poly()
    rest = [c] * (inst.degree - 1)
    assert polarize_I(inst, [a] * inst.degree) == I_hat(inst, a)
    if inst.degree >= 2:
        assert polarize_I(inst, [a, b] + rest[1:]) == polarize_I(inst, [b, a] + rest[1:])
    lhs = polarize_I(inst, [adelic_sum(a, b)] + rest)
    assert lhs == polarize_I(inst, [a] + rest) + polarize_I(inst, [b] + rest)
