from __future__ import annotations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from snfmom.errors import DivisionFailure, LaurentEscape, MultivariateInput, ParseError
from snfmom.polyring import (Poly, const, divides, evaluate, exact_div, gcd_univariate, parse,
                             substitute, var)

from strategies import polys, univariate

q, a, z = var("q"), var("a"), var("z")


def test_add_examples():
    assert (q + 1) + (q ** 2 - 1) == q ** 2 + q
    p = q ** 3 - 2 * a
    assert p + 0 == p
    assert ((q - 1) + (1 - q)).is_zero()


def test_mul_examples():
    assert (1 + q) * (1 + q + q ** 2) == 1 + 2 * q + 2 * q ** 2 + q ** 3
    p = a * q + 3
    assert p * 1 == p
    ql = var("q", laurent=True)
    assert ql * ql ** -1 == 1


def test_negative_power_needs_laurent():
    with pytest.raises(DivisionFailure):
        q ** -1
    with pytest.raises(LaurentEscape):
        Poly.from_terms([(1, {"q": -1})])


def test_exact_div_examples():
    assert exact_div(q ** 2 - 1, q - 1) == q + 1
    with pytest.raises(DivisionFailure):
        exact_div(q ** 2 + 1, q - 1)
    assert exact_div(z * (z - 2), z) == z - 2
    with pytest.raises(DivisionFailure):
        exact_div(1, q)
    with pytest.raises(ZeroDivisionError):
        exact_div(q, 0)


def test_laurent_division_by_monomial():
    b = var("b0", laurent=True)
    assert exact_div(1, b) == b ** -1
    assert exact_div(b + 1, b) * b == b + 1


def test_substitute_examples():
    x11, x21 = var("x_1_1"), var("x_2_1")
    p = x11 * x21 + x21 + 1
    assert substitute(p, {"x_1_1": q, "x_2_1": q}) == q ** 2 + q + 1
    assert substitute(p, {"x_1_1": x11}) == p
    assert substitute(1 + a * (1 + q), {"a": 1, "q": 1}) == 3


def test_substitute_laurent_escape():
    b = var("b", laurent=True)
    with pytest.raises(LaurentEscape):
        substitute(b ** -1, {"b": q + 1})
    assert substitute(b ** -2, {"b": 1}) == 1


def test_gcd_examples():
    assert gcd_univariate(q ** 2 - 1, q ** 2 - q) == q - 1
    assert gcd_univariate(-q - 1, 0) == q + 1
    assert gcd_univariate(6, 4) == 2
    with pytest.raises(MultivariateInput):
        gcd_univariate(q, a)


def test_to_string_examples():
    c3 = 1 + 2 * q + q ** 2 + q ** 3
    assert c3.to_string() == "q^3 + q^2 + 2*q + 1"
    assert const(0).to_string() == "0"
    assert parse("q^3 + q^2 + 2*q + 1") == c3
    assert (-a * q ** 2 + a - 1).to_string() == "-a*q^2 + a - 1"


def test_parse_errors_and_laurent():
    with pytest.raises(ParseError) as err:
        parse("q + $")
    assert err.value.position == 4
    with pytest.raises(ParseError):
        parse("")
    b = var("b1", laurent=True)
    p = b ** -2 * q - 3
    assert parse(p.to_string(), laurent=["b1"]) == p


def test_evaluate():
    assert evaluate(q ** 2 + 2 * a, {"q": 3, "a": 1}) == 11


@given(polys(), polys(), polys())
def test_ring_axioms(p, r, s):
    assert (p + r) + s == p + (r + s)
    assert (p * r) * s == p * (r * s)
    assert p + r == r + p
    assert p * r == r * p
    assert p * (r + s) == p * r + p * s
    assert p - p == 0


@given(polys(), polys())
def test_exact_div_round_trip(c, d):
    assume(not d.is_zero())
    assert exact_div(c * d, d) == c
    assert divides(d, c * d)


@given(polys(), polys(), polys(names=("q",), max_terms=3), polys(names=("a", "y"), max_terms=2))
def test_substitute_homomorphism(p, r, sq, sa):
    b = {"q": sq, "a": sa}
    assert substitute(p * r, b) == substitute(p, b) * substitute(r, b)
    assert substitute(p + r, b) == substitute(p, b) + substitute(r, b)


@given(polys(max_terms=6))
def test_string_round_trip(p):
    assert parse(p.to_string()) == p


@given(univariate(), univariate())
def test_gcd_divides_both(p, r):
    g = gcd_univariate(p, r)
    if g.is_zero():
        assert p.is_zero() and r.is_zero()
        return
    exact_div(p, g)
    exact_div(r, g)


@given(univariate(max_terms=3), univariate(max_terms=3), univariate(max_terms=3))
def test_gcd_contains_common_factor(p, r, c):
    assume(not c.is_zero() and not p.is_zero() and not r.is_zero())
    g = gcd_univariate(p * c, r * c)
    assert divides(gcd_univariate(c, 0), g)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_integer_gcd(m, n):
    import math
    assert gcd_univariate(m, n) == math.gcd(m, n)
