from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyheight import verify

from conftest import rngs
from polyheight.errors import NegativeHeight, NotComplete
from polyheight.fan import Fan, normal_fan
from polyheight.polyint import Polynomial, integrate_roof_composite
from polyheight.polytope import canonicalize, minkowski_sum, volume
from polyheight.roofs import (AdelicFan, AdelicPolytope, Roof, adelic_sum, build_roof,
                              canonical_adelic_fan, canonical_lift, global_roof, hypograph,
                              is_v_interior, legendre_dual, reconstruct)

SEG02 = canonicalize(vertices=[(0,), (2,)])
UNIT = canonicalize(vertices=[(0,), (1,)])
SYM = canonicalize(vertices=[(-1,), (1,)])
P1 = Fan(1, [(1,), (-1,)], [frozenset(), {0}, {1}])



def hat(domain, pts):
    return build_roof(domain, pts)


def test_upper_hull_pieces():
    r = hat(SEG02, [((0,), 0), ((1,), 1), ((2,), 0)])
    assert sorted(r.pieces) == [((-1,), 2), ((1,), 0)]
    assert r((Fraction(1, 2),)) == Fraction(1, 2)


def test_negative_lift_rejected():
    with pytest.raises(NegativeHeight):
        build_roof(SEG02, [((0,), 0), ((2,), -1)])


def test_dominated_point_dropped():
    r = hat(SEG02, [((0,), 0), ((1,), 0), ((2,), 0), ((1,), Fraction(1, 2))])
    assert r.heights == {(0,): 0, (1,): Fraction(1, 2), (2,): 0}


def test_global_roof_examples():
    one = Roof.constant(SEG02, 1)
    avg = AdelicPolytope(SEG02, {"a": one, "b": one}, {"a": Fraction(1, 2), "b": Fraction(1, 2)})
    assert global_roof(avg) == Roof.constant(SEG02, 1)
    r1 = hat(SEG02, [((0,), 0), ((1,), 1), ((2,), 0)])
    assert global_roof(AdelicPolytope(SEG02, {"a": r1})) == r1
    r2 = hat(SEG02, [((0,), 0), ((1,), 2), ((2,), 0)])
    g = global_roof(AdelicPolytope(SEG02, {"a": r1, "b": r2}))
    assert [p for p, _ in g.vertices] == [(0,), (1,), (2,)]
    assert g.heights[(1,)] == 3


def test_hypograph_examples():
    assert hypograph(AdelicPolytope(UNIT, {"v": Roof.constant(UNIT, 1)}), "v") == \
        canonicalize(vertices=[(0, 0), (1, 0), (0, 1), (1, 1)])
    assert hypograph(AdelicPolytope(UNIT), "v") == canonicalize(vertices=[(0, 0), (1, 0)])
    ramp = hat(UNIT, [((0,), 0), ((1,), 1)])
    assert hypograph(AdelicPolytope(UNIT, {"v": ramp}), "v") == \
        canonicalize(vertices=[(0, 0), (1, 0), (1, 1)])


@pytest.mark.parametrize("n", [Fraction(-3), Fraction(-1, 2), Fraction(0), Fraction(2, 3), Fraction(5)])
def test_legendre_examples(n):
    flat = legendre_dual(Roof.constant(SYM, 0))
    assert flat((n,)) == -abs(n)
    tent = legendre_dual(hat(SYM, [((-1,), 0), ((0,), 1), ((1,), 0)]))
    assert tent((n,)) == -max(1, abs(n))


def test_canonical_adelic_fan_examples():
    lift = canonical_adelic_fan(P1).lift("v")
    assert len(lift.cones) == 6
    point = canonical_adelic_fan(Fan(0, [], [frozenset()]))
    assert len(point.lift("v").cones) == 2
    with pytest.raises(NotComplete):
        canonical_adelic_fan(Fan(1, [(1,)], [frozenset(), {0}]))


def test_v_interior_examples():
    tent = hat(SYM, [((-1,), 0), ((0,), 1), ((1,), 0)])
    P = AdelicPolytope(SYM, {"v": tent})
    lift = Fan.from_maximal(2, [(1, 0), (1, 1), (-1, 1), (-1, 0)], [{0, 1}, {1, 2}, {2, 3}])
    assert is_v_interior(P, AdelicFan(P1, {"v": lift}), "v")
    flat = AdelicPolytope(SYM)
    finer = Fan.from_maximal(2, [(1, 0), (1, 1), (0, 1), (-1, 0)], [{0, 1}, {1, 2}, {2, 3}])
    assert not is_v_interior(flat, AdelicFan(P1, {"v": finer}), "v")
    # no lift given at "w": the canonical one is used, and the flat hypograph fails
    assert not is_v_interior(P, AdelicFan(P1, {"v": lift}), "w")


@given(rngs, st.integers(1, 3), st.integers(1, 6).map(lambda k: Fraction(k, 2)))
def test_global_roof_is_linear(rng, t, c):
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    assert P.scale_weights(c).global_roof == P.global_roof.scale(c)
    r = verify.random_roof(rng, P.base)
    both = AdelicPolytope(P.base, {"v": r, "w": r})
    assert both.global_roof == r.scale(2)


@given(rngs, st.integers(1, 3))
def test_double_conjugation(rng, t):
    r = verify.random_roof(rng, verify.random_polytope(rng, t))
    back = reconstruct(legendre_dual(r))
    assert back.domain == r.domain and back == r


@given(rngs, st.integers(1, 2), st.integers(1, 4))
def test_conjugation_reverses_order(rng, t, c):
    r = verify.random_roof(rng, verify.random_polytope(rng, t))
    lo, hi = legendre_dual(r), legendre_dual(r.shift(c))
    n = tuple(verify.half_integer(rng) for _ in range(t))
    assert hi(n) == lo(n) - c


@given(rngs, st.integers(1, 3))
def test_hypograph_volume_is_integral(rng, t):
    base = verify.random_polytope(rng, t)
    P = AdelicPolytope(base, {"v": verify.random_roof(rng, base)})
    s = Polynomial.var(t + 1, t)
    assert volume(hypograph(P, "v")) == integrate_roof_composite(P, s)


def test_canonical_fan_zero_roofs():
    for p in (SYM, canonicalize(vertices=[(-1, -1), (2, -1), (-1, 2)])):
        sigma = normal_fan(p)
        P = AdelicPolytope(p)
        assert not is_v_interior(P, canonical_adelic_fan(sigma), "v")
        assert global_roof(P) == Roof.constant(p, 0)


@given(rngs, st.integers(1, 2))
def test_hypograph_of_sum_is_sum_of_hypographs(rng, t):
    a, b = verify.random_polytope(rng, t), verify.random_polytope(rng, t)
    P = AdelicPolytope(a, {"v": verify.random_roof(rng, a)})
    Q = AdelicPolytope(b, {"v": verify.random_roof(rng, b)})
    assert hypograph(adelic_sum(P, Q), "v") == minkowski_sum(hypograph(P, "v"), hypograph(Q, "v"))


def test_canonical_lift_contains_recession():
    lift = canonical_lift(P1)
    assert (0, 1) in lift.rays and (1, 0) in lift.rays and (-1, 0) in lift.rays
