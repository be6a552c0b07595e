"""Exact arithmetic: rationals, cyclotomic scalars, polynomials, rational functions."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bispectral.field import (
    BiRatFun,
    Cyclo,
    Q,
    RatFun,
    UniPoly,
    cyclotomic_poly,
    euler_phi,
    poly_gcd,
    poly_lcm,
    poly_xgcd,
    qstr,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
coeff_lists = st.lists(small, min_size=0, max_size=6)
nonzero_lists = coeff_lists.filter(lambda c: any(c))


def poly(c, var="x"):
    return UniPoly([Q(x) for x in c], var)


def naive_mul(a, b):
    """Schoolbook product on Fractions, used as an oracle."""
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def naive_eval(c, x):
    return sum((Fraction(ci) * x**i for i, ci in enumerate(c)), Fraction(0))


# scalars ------------------------------------------------------------------

def test_rational_parsing_and_printing():
    assert Q("3/6") == Q(1) / 2
    assert qstr(Q("-4/6")) == "-2/3"
    assert qstr(Q(5)) == "5"
    with pytest.raises((ValueError, ArithmeticError)):
        Q("one")


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(3) == (1, 1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert [euler_phi(n) for n in (1, 2, 3, 4, 6, 12)] == [1, 1, 2, 2, 2, 4]


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_root_of_unity_has_order_N(N):
    z = Cyclo.zeta(N)
    acc = Cyclo.const(N, 1)
    for k in range(1, N + 1):
        acc = acc * z
        assert (acc == Cyclo.const(N, 1)) == (k == N)


@given(st.integers(2, 6), st.lists(small, min_size=1, max_size=5).filter(any))
def test_cyclo_inverse(N, c):
    z = Cyclo.zeta(N)
    x = Cyclo.const(N, 0)
    p = Cyclo.const(N, 1)
    for ci in c:
        x = x + p * Q(ci)
        p = p * z
    if x == Cyclo.const(N, 0):
        return
    assert x * x.inverse() == Cyclo.const(N, 1)


def test_cyclo_sum_of_roots_vanishes():
    for N in (2, 3, 5):
        s = Cyclo.const(N, 0)
        for k in range(N):
            s = s + Cyclo.zeta(N, k)
        assert s == Cyclo.const(N, 0)
        assert s.is_rational()


# polynomials --------------------------------------------------------------

@given(coeff_lists, coeff_lists)
def test_poly_mul_matches_schoolbook(a, b):
    assert poly(a) * poly(b) == poly(naive_mul(a, b))


@given(coeff_lists, nonzero_lists)
def test_poly_divmod(a, b):
    A, B = poly(a), poly(b)
    q, r = A.divmod(B)
    assert q * B + r == A
    assert r.deg() < B.deg()


@given(coeff_lists, small)
def test_poly_evaluation(a, x):
    assert poly(a)(Q(x)) == naive_eval(a, x)


@given(nonzero_lists, nonzero_lists, nonzero_lists)
def test_gcd_properties(a, b, c):
    A, B, C = poly(a), poly(b), poly(c)
    g = poly_gcd(A * C, B * C)
    assert g.lc() == 1
    assert (A * C).divmod(g)[1].is_zero()
    assert (B * C).divmod(g)[1].is_zero()
    assert g.divmod(C.monic())[1].is_zero()


@given(nonzero_lists, nonzero_lists)
def test_xgcd_bezout(a, b):
    A, B = poly(a), poly(b)
    g, s, t = poly_xgcd(A, B)
    assert s * A + t * B == g
    assert g.monic() == poly_gcd(A, B)


@given(nonzero_lists, nonzero_lists)
def test_lcm_times_gcd(a, b):
    A, B = poly(a), poly(b)
    assert poly_lcm(A, B) * poly_gcd(A, B) == (A * B).monic()


def test_gcd_known_values():
    x = UniPoly.gen()
    one = UniPoly.const(1)
    assert poly_gcd(x * x - one, x * x + x * 2 + one) == x + one
    assert poly_gcd(x**5 * (x - one), x**3 * (x + one)) == x**3
    assert poly_gcd(x * 3 + one, x * 3 - one) == one


def test_compose_and_power_substitution():
    x = UniPoly.gen()
    p = x * x + UniPoly.const(1)
    assert p.compose(x + UniPoly.const(1)) == x * x + x * 2 + UniPoly.const(2)
    assert p.subs_power(3) == x**6 + UniPoly.const(1)
    assert p.subs_power(3).contract_power(3) == p
    assert p.scale_var(Q(2)) == x * x * 4 + UniPoly.const(1)


# rational functions -------------------------------------------------------

@given(coeff_lists, nonzero_lists)
def test_ratfun_canonical_form(a, b):
    f = RatFun(poly(a), poly(b))
    assert f.den.lc() == 1
    assert poly_gcd(f.num, f.den) == UniPoly.const(1) or f.num.is_zero()
    assert f == RatFun(poly(a) * 3, poly(b) * 3)


@given(nonzero_lists, nonzero_lists)
def test_ratfun_inverse(a, b):
    f = RatFun(poly(a), poly(b))
    assert f * f.inverse() == RatFun.one()


@given(coeff_lists, nonzero_lists)
def test_ratfun_derivative_quotient_rule(a, b):
    A, B = poly(a), poly(b)
    expected = RatFun(A.derivative() * B - A * B.derivative(), B * B)
    assert RatFun(A, B).derivative() == expected


@given(coeff_lists, nonzero_lists, coeff_lists, nonzero_lists)
def test_ratfun_field_laws(a, b, c, d):
    f, g = RatFun(poly(a), poly(b)), RatFun(poly(c), poly(d))
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) * g == f * g + g * g
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()


def test_ratfun_x_powers():
    assert RatFun.x_power(-2) * RatFun.x_power(3) == RatFun.x_power(1)
    assert RatFun.x_power(-1).derivative() == RatFun.x_power(-2, -1)


def test_birational_derivatives():
    x = RatFun.x_power(1)
    u = BiRatFun.from_x(x * x, 2) + BiRatFun.from_x(RatFun.one(), 1)  # x^2 z^2 + z
    assert (u.dx() - BiRatFun.from_x(x * 2, 2)).is_zero()
    assert (u.dz() - BiRatFun.from_x(x * x * 2, 1) - BiRatFun.from_x(RatFun.one(), 0)).is_zero()
    assert not (u.dx() - u).is_zero()
