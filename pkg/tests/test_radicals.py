import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachelab.radicals import RootSum, as_exact_str, precision_floor, to_decimal


def test_sqrt_merges_equivalent_kernels():
    assert RootSum.sqrt(2) + RootSum.sqrt(8) == 3 * RootSum.sqrt(2)
    assert RootSum.sqrt(18) == 3 * RootSum.sqrt(2)
    assert (RootSum.sqrt(2) - RootSum.sqrt(2)).sign() == 0


def test_sqrt_of_rational():
    x = RootSum.sqrt(Fraction(9, 4))
    assert x.is_rational() and x.as_fraction() == Fraction(3, 2)
    y = RootSum.sqrt(Fraction(1, 2))
    assert y * y == Fraction(1, 2)


def test_sqrt_rejects_negative():
    with pytest.raises(ValueError):
        RootSum.sqrt(-1)


def test_exact_equality_on_boundaries():
    assert RootSum.sqrt(4) == 2
    assert RootSum.sqrt(2) * RootSum.sqrt(2) == 2
    assert not (RootSum.sqrt(2) + RootSum.sqrt(3) == RootSum.sqrt(5))


def test_tight_comparison_against_convergent():
    # 3363/2378 is a continued-fraction convergent of sqrt(2); the gap is
    # below 1e-7, far inside one interval-refinement round.
    assert RootSum.sqrt(2) < Fraction(3363, 2378)
    assert RootSum.sqrt(2) > Fraction(2378, 1682)


def test_ordering_operators():
    a = RootSum.sqrt(2)
    assert a < 2 and a > 1 and a <= a and a >= a
    assert 1 + a > a


def test_inverse_known_values():
    x = 1 + RootSum.sqrt(2)
    assert x.inverse() == RootSum.sqrt(2) - 1
    y = RootSum.sqrt(2) + RootSum.sqrt(3)
    assert y * y.inverse() == 1
    assert y.inverse() == RootSum.sqrt(3) - RootSum.sqrt(2)
    with pytest.raises(ZeroDivisionError):
        RootSum(0).inverse()


def test_division_operator():
    assert RootSum.sqrt(8) / RootSum.sqrt(2) == 2
    assert 1 / RootSum.sqrt(4) == Fraction(1, 2)


def test_floor_and_ceil():
    assert (3 * RootSum.sqrt(2)).floor() == 4
    assert (3 * RootSum.sqrt(2)).ceil() == 5
    assert RootSum(Fraction(7, 2)).floor() == 3
    assert RootSum.sqrt(9).floor() == 3
    assert (-RootSum.sqrt(2)).floor() == -2


def test_float_and_strings():
    x = Fraction(3, 2) + Fraction(5, 4) * RootSum.sqrt(6)
    assert math.isclose(float(x), 1.5 + 1.25 * math.sqrt(6))
    assert "sqrt(6)" in as_exact_str(x)
    assert to_decimal(Fraction(1, 3)) == "0.333333333333"


def test_precision_floor_roundtrip():
    old = precision_floor()
    try:
        assert precision_floor(128) == 128
        assert RootSum.sqrt(2) < Fraction(3363, 2378)
    finally:
        precision_floor(old)
    with pytest.raises(ValueError):
        precision_floor(4)


small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(small_fractions, st.integers(min_value=1, max_value=400)),
                min_size=1, max_size=4))
def test_sign_matches_float(terms):
    x = RootSum(0)
    approx = 0.0
    for coeff, kernel in terms:
        x = x + Fraction(coeff) * RootSum.sqrt(kernel)
        approx += float(coeff) * math.sqrt(kernel)
    if abs(approx) > 1e-6:
        assert x.sign() == (1 if approx > 0 else -1)
    assert (x - x).sign() == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small_fractions, st.integers(min_value=1, max_value=60)),
                min_size=1, max_size=3))
def test_inverse_round_trips(terms):
    x = RootSum(0)
    for coeff, kernel in terms:
        x = x + Fraction(coeff) * RootSum.sqrt(kernel)
    if x.sign() == 0:
        return
    assert x * x.inverse() == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 9))
def test_floor_of_pure_root(n):
    assert RootSum.sqrt(n).floor() == math.isqrt(n)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=20),
       st.integers(min_value=1, max_value=10 ** 12),
       st.fractions(min_value=-50, max_value=50, max_denominator=20),
       st.integers(min_value=1, max_value=10 ** 12))
def test_two_term_sign_matches_closed_form(c1, k1, c2, k2):
    # independent oracle: sign(c1*sqrt(k1) + c2*sqrt(k2)) is decided by
    # comparing c1^2*k1 with c2^2*k2 when the coefficients have mixed signs
    x = Fraction(c1) * RootSum.sqrt(k1) + Fraction(c2) * RootSum.sqrt(k2)
    a, b = Fraction(c1) ** 2 * k1, Fraction(c2) ** 2 * k2
    if c1 >= 0 and c2 >= 0:
        expect = 1 if (c1 or c2) else 0
    elif c1 <= 0 and c2 <= 0:
        expect = -1 if (c1 or c2) else 0
    else:
        positive_sq, negative_sq = (a, b) if c1 > 0 else (b, a)
        expect = 1 if positive_sq > negative_sq else (-1 if positive_sq < negative_sq else 0)
    assert x.sign() == expect
