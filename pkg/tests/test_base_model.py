from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyheight import verify
from polyheight.base_model import abelian_canonical_ring, build_ring, c_hat, deg
from polyheight.errors import GradeMismatch, InfinitySquared, MissingTableEntry, NotPSD

from conftest import halves, rngs


def small_ring(table=None, lattice=None):
    spec = {"generators": [{"name": "x", "grade": 1}, {"name": "inf", "grade": 1}],
            "infinity": "inf", "top_degree": 2,
            "table": table or {"x^2": 5, "x*inf": 2},
            "lattice_map": lattice or [{"x": 1}]}
    return build_ring(spec)


def test_infinity_squared_rejected():
    with pytest.raises(InfinitySquared):
        small_ring({"x^2": 1, "x*inf": 1, "inf^2": 3})


def test_missing_entry():
    with pytest.raises(MissingTableEntry):
        small_ring({"x^2": 1})


def test_zero_table_value():
    R = abelian_canonical_ring(2, 3, [[1]])
    w = R.gen("omega")
    assert deg(R, w ** 3) == 0


def test_grade_two_in_lattice_slot():
    spec = {"generators": [{"name": "x", "grade": 1}, {"name": "y", "grade": 2}],
            "top_degree": 2, "table": {"x^2": 1, "y": 1}, "lattice_map": [{"y": 1}]}
    with pytest.raises(GradeMismatch):
        build_ring(spec)


def test_c_hat_linear():
    R = abelian_canonical_ring(1, 3, [[1, 0], [0, 2]])
    assert c_hat(R, (2, 0)) == c_hat(R, (1, 0)) * 2
    assert c_hat(R, (0, 0)).is_zero()
    assert c_hat(R, (1, 1)) == R.gen("x1") + R.gen("x2")


def test_abelian_degrees():
    h = Fraction(7, 4)
    R = abelian_canonical_ring(1, 3, [[h]])
    x, w, inf = R.gen("x1"), R.gen("omega"), R.gen("inf")
    assert deg(R, x * x) == -6 * h
    assert deg(R, inf * w) == 3
    assert deg(R, w * w) == 0
    assert deg(R, x * w) == 0


@pytest.mark.parametrize("g", [1, 2, 3])
def test_infinity_against_fiber(g):
    R = abelian_canonical_ring(g, 6, [[1]])
    assert deg(R, R.gen("inf") * R.gen("omega") ** g) == 6


def test_not_psd():
    with pytest.raises(NotPSD):
        abelian_canonical_ring(1, 3, [[-1]])
    with pytest.raises(NotPSD):
        abelian_canonical_ring(1, 3, [[1, 2], [2, 1]])


@given(rngs, st.integers(1, 2))
def test_deg_multilinear(rng, t):
    R, top = verify.random_ring(rng, t)
    a, b = verify.random_element(rng, R, 1), verify.random_element(rng, R, 1)
    rest = verify.random_element(rng, R, top - 1)
    c = Fraction(rng.randint(-4, 4), 3)
    assert deg(R, (a * c + b) * rest) == c * deg(R, a * rest) + deg(R, b * rest)


@given(rngs, st.integers(1, 2))
def test_infinity_is_nilpotent(rng, t):
    R, top = verify.random_ring(rng, t)
    inf = R.gen("inf")
    if top < 2:
        return
    a = verify.random_element(rng, R, top - 2)
    assert (inf * inf * a).is_zero()


@given(st.integers(1, 3), st.sampled_from([1, 2, 3, 6]),
       st.lists(halves(-2, 2), min_size=2, max_size=2))
def test_quadratic_degree_identity(g, degM, m):
    gram = [[2, 1], [1, 3]]
    R = abelian_canonical_ring(g, degM, gram)
    el = c_hat(R, m) ** 2 * R.gen("omega") ** (g - 1)
    B = sum(m[i] * gram[i][j] * m[j] for i in range(2) for j in range(2))
    assert deg(R, el) == -Fraction(2 * degM, g) * B


@given(rngs, st.integers(1, 2))
def test_commutative_associative(rng, t):
    R, _ = verify.random_ring(rng, t)
    a, b, c = (verify.random_element(rng, R, 1) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
