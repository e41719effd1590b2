from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from polyheight import linalg as la
from polyheight import verify
from polyheight.errors import NotPSD
from polyheight.polytope import canonicalize, volume
from polyheight.roofs import AdelicPolytope, Roof
from polyheight.semiabelian import (SemiabelianInput, chambert_loir_polytope, cl_absolute_minimum,
                                    cl_closed_forms, cl_vertex_values, height, minima_report)

from conftest import rngs

SYM = canonicalize(vertices=[(-1,), (1,)])


@pytest.mark.parametrize("h", [Fraction(1), Fraction(3, 4), Fraction(0)])
def test_pinned_instance(h):
    rep = height(SemiabelianInput(1, 1, SYM, [[h]], 3))
    assert rep.okounkov_route == rep.bkk_route == -12 * h
    assert rep.printed_formula == -4 * h
    assert rep.consistent
    assert "deg(M)/g!" in rep.normalization_note


@pytest.mark.parametrize("g", [1, 2, 3])
def test_abelian_only(g):
    rep = height(SemiabelianInput(0, g, canonicalize(vertices=[()]), [], 5))
    assert rep.okounkov_route == rep.bkk_route == 0


def test_isotrivial_zero():
    tri = chambert_loir_polytope(2)
    rep = height(SemiabelianInput(2, 2, tri, [[0, 0], [0, 0]], 2))
    assert (rep.okounkov_route, rep.bkk_route, rep.printed_formula) == (0, 0, 0)


def test_not_psd():
    with pytest.raises(NotPSD):
        SemiabelianInput(1, 1, SYM, [[-1]], 3)


def test_minima_report_examples():
    assert minima_report(SemiabelianInput(1, 1, SYM, [[1]], 3)) == [-1, -1, 0]
    tri = chambert_loir_polytope(2)
    assert minima_report(SemiabelianInput(2, 1, tri, [[1, 0], [0, 1]], 3)) == [-5, -5, -1, 0]
    assert minima_report(SemiabelianInput(2, 1, tri, [[0, 0], [0, 0]], 3)) == [0, 0, 0, 0]


def test_cl_polytopes():
    assert chambert_loir_polytope(1) == SYM
    tri = chambert_loir_polytope(2)
    assert set(tri.vertices) == {(-1, -1), (2, -1), (-1, 2)}
    assert volume(tri) == Fraction(9, 2)
    for t in range(1, 5):
        p = chambert_loir_polytope(t)
        assert all(sum(v[i] for v in p.vertices) == 0 for i in range(t))


def test_closed_forms_examples():
    h = Fraction(5, 2)
    assert cl_closed_forms(1, [[h]], 3, 1).zeta_abs_closed == -h == cl_absolute_minimum(1, [[h]])
    zero = cl_closed_forms(2, [[0, 0], [0, 0]], 3, 1)
    assert zero.zeta_abs_closed == 0 and zero.height_closed == 0
    ident = cl_closed_forms(2, [[1, 0], [0, 1]], 3, 1)
    assert ident.zeta_abs_closed == -5
    assert ident.ratio == Fraction(1, 27)


@settings(max_examples=15)
@given(rngs, st.integers(1, 2), st.integers(1, 2))
def test_routes_agree(rng, t, g):
    delta = verify.random_polytope(rng, t)
    roofs = verify.random_adelic_polytope(rng, delta)
    inp = SemiabelianInput(t, g, delta, verify.random_psd_gram(rng, t), rng.choice([1, 2, 3, 6]), roofs)
    rep = height(inp)
    assert rep.okounkov_route == rep.bkk_route


@given(rngs, st.integers(1, 3))
def test_closed_minimum_is_vertex_minimum(rng, t):
    gram = verify.random_psd_gram(rng, t)
    assert cl_closed_forms(t, gram, 1, 1).zeta_abs_closed == cl_absolute_minimum(t, gram)


@given(rngs, st.integers(1, 4))
def test_vertex_identity(rng, t):
    gram = verify.random_psd_gram(rng, t)
    p = chambert_loir_polytope(t)
    assert sorted(cl_vertex_values(t, gram)) == sorted(la.quad(gram, v) for v in p.vertices)


@settings(max_examples=10)
@given(rngs, st.integers(1, 2), st.sampled_from([1, 2, 3, 6]))
def test_closed_form_ratio_is_stable(rng, t, degM):
    ratios = set()
    for _ in range(2):
        gram = verify.random_psd_gram(rng, t)
        cf = cl_closed_forms(t, gram, degM, 1)
        if cf.ratio is not None:
            ratios.add(cf.ratio)
    assert len(ratios) <= 1


@settings(max_examples=15)
@given(rngs, st.integers(1, 2), st.integers(0, 4))
def test_height_monotone_in_roofs(rng, t, bump):
    delta = verify.random_polytope(rng, t)
    gram = verify.random_psd_gram(rng, t)
    r = verify.random_roof(rng, delta)
    lo = SemiabelianInput(t, 1, delta, gram, 2, AdelicPolytope(delta, {"v": r}))
    hi = SemiabelianInput(t, 1, delta, gram, 2, AdelicPolytope(delta, {"v": r.shift(bump)}))
    assert height(hi).okounkov_route >= height(lo).okounkov_route


def test_roofs_enter_minima():
    roofs = AdelicPolytope(SYM, {"v": Roof.constant(SYM, 2)})
    assert minima_report(SemiabelianInput(1, 1, SYM, [[1]], 3, roofs)) == [1, 1, 2]
