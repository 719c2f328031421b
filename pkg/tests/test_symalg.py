import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsv.errors import NonMinorDenominator, NotDivisible, PolySyntaxError
from gsv.symalg import (
    LocalizedElement,
    Polynomial,
    factor_minor_product,
    format_poly,
    local_arith,
    minor_polynomial,
    parse_poly,
    poly_arith,
    poly_exact_div,
    x,
    y,
)

X11, X12, X21, X22 = (Polynomial.variable(v) for v in (x(1, 1), x(1, 2), x(2, 1), x(2, 2)))
Y11, Y21 = Polynomial.variable(y(1, 1)), Polynomial.variable(y(2, 1))
VARS = [x(1, 1), x(1, 2), x(2, 1), x(2, 2), y(1, 1), y(2, 1), y(3, 2)]


@st.composite
def polys(draw, max_terms=4):
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(st.fractions(min_value=-5, max_value=5, max_denominator=4))
        mono = {v: draw(st.integers(0, 2)) for v in draw(st.sets(st.sampled_from(VARS), max_size=3))}
        terms.append((c, mono))
    return Polynomial.from_terms(terms)


def rand_point(rng, variables=VARS):
    return {v: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for v in variables}


# -- ring axioms ----------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial.constant(0)
    assert a * Polynomial.constant(1) == a


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_evaluation_is_a_ring_homomorphism(a, b):
    pt = rand_point(random.Random(hash((str(a), str(b))) & 0xFFFF))
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
    assert (a - b).evaluate(pt) == a.evaluate(pt) - b.evaluate(pt)


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_exact_division_inverts_multiplication(a, b):
    if b.is_zero():
        return
    assert poly_exact_div(a * b, b) == a


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_leibniz_rule(a, b):
    v = x(1, 2)
    assert (a * b).derivative(v) == a.derivative(v) * b + a * b.derivative(v)


@settings(max_examples=40, deadline=None)
@given(polys())
def test_mixed_partials_commute(a):
    assert a.derivative(x(1, 1)).derivative(y(2, 1)) == a.derivative(y(2, 1)).derivative(x(1, 1))


@settings(max_examples=60, deadline=None)
@given(polys())
def test_format_parse_round_trip(a):
    assert parse_poly(format_poly(a)) == a
    assert format_poly(parse_poly(format_poly(a))) == format_poly(a)


# -- worked examples ------------------------------------------------------


def test_poly_arith_examples():
    assert poly_arith(X11, -X11, "add").is_zero()
    assert poly_arith(X11 + X12, X11 - X12, "mul") == X11 ** 2 - X12 ** 2
    eq = X11 * Y11 + X12 * Y21 - 1
    assert eq.evaluate({x(1, 1): 1, x(1, 2): 0, y(1, 1): 1, y(2, 1): 0}) == 0


def test_exact_div_examples():
    assert poly_exact_div(X11 ** 2 - X12 ** 2, X11 - X12) == X11 + X12
    a = X11 * Y21 + 3
    assert poly_exact_div(a, Polynomial.constant(1)) == a
    with pytest.raises(NotDivisible):
        poly_exact_div(X11 + 1, X12)
    with pytest.raises(ZeroDivisionError):
        poly_exact_div(X11, Polynomial.constant(0))


def test_derivative_examples():
    assert (X11 * Y21).derivative(y(2, 1)) == X11
    assert Polynomial.constant(7).derivative(x(1, 1)).is_zero()


def test_quotient_rule_matches_closed_form():
    f = LocalizedElement(1 - X12 * Y21, {(1,): 1})
    expected = LocalizedElement(-(1 - X12 * Y21), {(1,): 2})
    assert f.derivative(x(1, 1)) == expected


def test_quotient_rule_against_finite_difference():
    # forward difference error is O(h): shrinking h by 1000 must shrink it by > 100
    f = LocalizedElement(1 - X12 * Y21, {(1,): 1})
    df = f.derivative(x(1, 1))
    rng = random.Random(7)
    for _ in range(10):
        pt = rand_point(rng, [x(1, 1), x(1, 2), y(2, 1)])
        if pt[x(1, 1)] == 0:
            continue
        exact = df.evaluate(pt)
        errs = []
        for h in (Fraction(1, 10 ** 3), Fraction(1, 10 ** 6)):
            shifted = {**pt, x(1, 1): pt[x(1, 1)] + h}
            errs.append(abs((f.evaluate(shifted) - f.evaluate(pt)) / h - exact))
        assert errs[1] < errs[0] / 100 or errs[1] == 0


def test_local_arith_examples():
    a = LocalizedElement(1 - X12 * Y21, {(1,): 1})
    assert local_arith(a, a, "sub").is_zero()
    assert local_arith(a, LocalizedElement(X11), "mul") == LocalizedElement(1 - X12 * Y21)
    g = LocalizedElement(-X12, {(1,): 1}) * LocalizedElement(X11, {(2,): 1})
    assert g == -1
    rng = random.Random(3)
    for _ in range(20):
        pt = rand_point(rng, [x(1, 1), x(1, 2)])
        if pt[x(1, 1)] and pt[x(1, 2)]:
            assert g.evaluate(pt) == -1


def test_localized_division_by_minor_products_only():
    m = LocalizedElement(minor_polynomial((1, 2)))
    q = LocalizedElement.one() / (m * m)
    assert q.den == (((1, 2), 2),)
    with pytest.raises(NonMinorDenominator):
        LocalizedElement.one() / LocalizedElement(X11 + 1)


def test_factor_minor_product():
    p = minor_polynomial((1, 2)) ** 2 * minor_polynomial((1, 3)) * 6
    c, factors = factor_minor_product(p)
    assert c == 6 and factors == {(1, 2): 2, (1, 3): 1}
    with pytest.raises(NonMinorDenominator):
        factor_minor_product(X11 * X22 + X12)


def test_reduced_cancels_common_minor():
    m = minor_polynomial((1,))
    e = LocalizedElement(m * X12, {(1,): 1}).reduced()
    assert e.is_polynomial() and e.numerator == X12


def test_parse_examples():
    assert parse_poly("x1_1*y1_1 + x1_2*y2_1 - 1") == X11 * Y11 + X12 * Y21 - 1
    assert parse_poly("0").is_zero()
    assert parse_poly("(x1_1 + x1_2)^2") == X11 ** 2 + 2 * X11 * X12 + X12 ** 2
    assert parse_poly("1/2*x1_1 − 3") == X11 / 2 - 3
    assert format_poly(X11 * X22 - X12 * X21) == format_poly(-(X12 * X21) + X22 * X11)


@pytest.mark.parametrize("text", ["x1_1 +", "z1_1", "x1_1 * * 2", "(x1_1", "x0_1"])
def test_parse_rejects_malformed(text):
    with pytest.raises(PolySyntaxError):
        parse_poly(text)


def test_minor_polynomial_leibniz():
    assert minor_polynomial((1, 2)) == X11 * X22 - X12 * X21
    assert minor_polynomial((3,)) == Polynomial.variable(x(1, 3))
