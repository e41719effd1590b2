from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyheight import linalg as la
from polyheight.errors import NotPSD

small = st.integers(-5, 5)


def test_frac_parses_strings():
    assert la.frac("3/6") == Fraction(1, 2)
    assert la.frac("-4") == -4
    with pytest.raises((ValueError, TypeError)):
        la.frac(0.5)


def test_primitive():
    assert la.primitive((4, -6)) == (2, -3)
    assert la.primitive((Fraction(1, 2), Fraction(1, 3))) == (3, 2)


def test_psd():
    la.check_psd([[2, 1], [1, 2]])
    la.check_psd([[0, 0], [0, 0]])
    with pytest.raises(NotPSD):
        la.check_psd([[1, 2], [2, 1]])
    with pytest.raises(NotPSD):
        la.check_psd([[0, 1], [1, 0]])
    with pytest.raises(NotPSD):
        la.check_psd([[1, 0], [1, 1]])


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_and_det(m):
    d = la.det(m)
    if d == 0:
        assert la.rank(m) < 3
        return
    inv = la.inverse(m)
    prod = [[sum(Fraction(m[i][k]) * inv[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert prod == [[int(i == j) for j in range(3)] for i in range(3)]
    assert la.det(inv) == 1 / d


@given(st.lists(st.lists(small, min_size=2, max_size=2), min_size=2, max_size=3))
def test_gram_matrices_are_psd(rows):
    g = [[sum(a * b for a, b in zip(r, s)) for s in zip(*rows)] for r in zip(*rows)]
    la.check_psd(g)
