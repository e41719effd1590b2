import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyheight import linalg as la
from polyheight import verify
from polyheight.errors import NonConcaveOracle, NotFullDimensional, NotPSD
from polyheight.minima import (QuadraticForm, ZetaOracle, absolute_minimum, essential_minimum,
                               filtration_height, min_quadratic_over_polytope, successive_minima,
                               successive_minima_semiabelian)
from polyheight.polytope import canonicalize, faces, support_value
from polyheight.roofs import AdelicPolytope, Roof, build_roof

from conftest import rngs

SYM = canonicalize(vertices=[(-1,), (1,)])
SEG02 = canonicalize(vertices=[(0,), (2,)])
TRI = canonicalize(vertices=[(-1, -1), (2, -1), (-1, 2)])


def test_essential_examples():
    val, pt = essential_minimum(AdelicPolytope(SYM), ZetaOracle.concave_quadratic([[1]]), with_point=True)
    assert (val, pt) == (0, (0,))
    shifted = AdelicPolytope(SYM, {"v": Roof.constant(SYM, 3)})
    assert essential_minimum(shifted, ZetaOracle.concave_quadratic([[1]])) == 3
    assert essential_minimum(AdelicPolytope(TRI), ZetaOracle.affine((1, 2), 1)) == 4


def test_absolute_examples():
    h = Fraction(3, 2)
    val, flag = absolute_minimum(AdelicPolytope(SYM), ZetaOracle.concave_quadratic([[h]]), with_flag=True)
    assert val == -h and flag
    pt = canonicalize(vertices=[(Fraction(1, 3),)])
    val, flag = absolute_minimum(AdelicPolytope(pt), ZetaOracle.concave_quadratic([[9]]), with_flag=True)
    assert val == -1 and not flag


def test_qp_examples():
    edge = [f for f in faces(TRI, 1) if all(sum(v) == 1 for v in f.vertices)][0]
    assert min_quadratic_over_polytope(edge, QuadraticForm([[1, 0], [0, 1]])) == \
        (Fraction(1, 2), (Fraction(1, 2), Fraction(1, 2)))
    vertex = canonicalize(vertices=[(2, -1)])
    assert min_quadratic_over_polytope(vertex, QuadraticForm([[1, 0], [0, 1]]))[0] == 5
    with pytest.raises(NotPSD):
        QuadraticForm([[1, 0], [0, -1]])


def test_worked_successive_minima():
    assert successive_minima_semiabelian(SYM, QuadraticForm([[2]]), 1) == [-2, -2, 0]
    assert successive_minima_semiabelian(TRI, QuadraticForm([[1, 0], [0, 1]]), 1) == [-5, -5, -1, 0]
    assert successive_minima_semiabelian(TRI, QuadraticForm([[0, 0], [0, 0]]), 2) == [0] * 5


def test_printed_convention():
    assert successive_minima_semiabelian(TRI, QuadraticForm([[1, 0], [0, 1]]), 1, "printed") == \
        [0, 0, -1, -5]


def test_lower_dimensional_base_rejected():
    flat = canonicalize(vertices=[(0, 0), (1, 1)])
    with pytest.raises(NotFullDimensional):
        successive_minima_semiabelian(flat, QuadraticForm([[1, 0], [0, 1]]), 1)


def test_non_concave_oracles():
    with pytest.raises(NonConcaveOracle):
        ZetaOracle.concave_quadratic([[-1]])
    with pytest.raises(NonConcaveOracle):
        ZetaOracle.tabulated([((0,), 0), ((1,), -1), ((2,), 0)])
    with pytest.raises(NonConcaveOracle):
        essential_minimum(AdelicPolytope(SYM), lambda m: 0)


def test_filtration_examples():
    hat = build_roof(SEG02, [((0,), 0), ((1,), 1), ((2,), 0)])
    P = AdelicPolytope(SEG02, {"v": hat})
    assert filtration_height(P, (0,)) == 1
    assert filtration_height(AdelicPolytope(TRI), (1, 0)) == support_value(TRI, (1, 0))
    assert filtration_height(P, (Fraction(1, 2),)) == Fraction(3, 2)


def _grid(p, steps=6):
    lo = [min(v[i] for v in p.vertices) for i in range(p.ambient_dim)]
    hi = [max(v[i] for v in p.vertices) for i in range(p.ambient_dim)]
    axes = [[lo[i] + (hi[i] - lo[i]) * Fraction(k, steps) for k in range(steps + 1)]
            for i in range(p.ambient_dim)]
    return [x for x in itertools.product(*axes) if p.contains(x)]


@given(rngs, st.integers(1, 3))
def test_qp_beats_grid(rng, t):
    p = verify.random_polytope(rng, t)
    q = QuadraticForm(verify.random_psd_gram(rng, t), [Fraction(rng.randint(-4, 4), 2) for _ in range(t)])
    val, pt = min_quadratic_over_polytope(p, q)
    assert p.contains(pt) and q(pt) == val
    for x in list(p.vertices) + _grid(p):
        assert val <= q(x)


@given(rngs, st.integers(1, 2), st.integers(1, 2))
def test_minima_monotone_and_consistent(rng, t, g):
    p = verify.random_polytope(rng, t)
    if not p.is_full_dimensional:
        return
    gram = verify.random_psd_gram(rng, t)
    z = successive_minima_semiabelian(p, QuadraticForm(gram), g)
    assert len(z) == t + g + 1
    assert all(a <= b for a, b in zip(z, z[1:]))
    oracle = ZetaOracle.concave_quadratic(gram)
    assert z[-1] == essential_minimum(AdelicPolytope(p), oracle)
    assert z[0] == absolute_minimum(AdelicPolytope(p), oracle)


@given(rngs, st.integers(1, 2))
def test_essential_above_absolute(rng, t):
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    z = ZetaOracle.concave_quadratic(verify.random_psd_gram(rng, t))
    assert essential_minimum(P, z) >= absolute_minimum(P, z)


@given(rngs, st.integers(1, 2))
def test_general_minima_with_zero_roofs_match(rng, t):
    p = verify.random_polytope(rng, t)
    if not p.is_full_dimensional:
        return
    gram = verify.random_psd_gram(rng, t)
    assert successive_minima(AdelicPolytope(p), ZetaOracle.concave_quadratic(gram), 1) == \
        successive_minima_semiabelian(p, QuadraticForm(gram), 1)


@given(rngs, st.integers(1, 3))
def test_filtration_convex(rng, t):
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    a = [verify.half_integer(rng) for _ in range(t)]
    b = [verify.half_integer(rng) for _ in range(t)]
    mid = [(x + y) / 2 for x, y in zip(a, b)]
    assert 2 * filtration_height(P, mid) <= filtration_height(P, a) + filtration_height(P, b)


@given(rngs, st.integers(1, 2))
def test_affine_and_tabulated_agree(rng, t):
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    grad = [verify.half_integer(rng) for _ in range(t)]
    aff = ZetaOracle.affine(grad, 1)
    tab = ZetaOracle.tabulated([(v, la.dot(grad, v) + 1) for v in P.base.vertices])
    assert essential_minimum(P, aff) == essential_minimum(P, tab)
    assert absolute_minimum(P, aff) == absolute_minimum(P, tab)
