"""Differential operators over Q(x): products, division, adjoints, D-form."""

from math import comb

import pytest
from hypothesis import assume, given, strategies as st

from bispectral.diffop import (
    DFormOp,
    DiffOp,
    from_dform,
    op_adjoint,
    op_exact_right_divide,
    op_left_divide,
    op_of_euler_poly,
    op_of_poly,
    op_right_divide,
    op_to_latex,
    stirling1,
    stirling2,
    to_dform,
)
from bispectral.errors import NonzeroRemainder, NotZNHomogeneous
from bispectral.field import Q, RatFun, UniPoly

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
polys = st.lists(small, min_size=0, max_size=3).map(lambda c: UniPoly([Q(x) for x in c]))
nz_polys = polys.filter(lambda p: not p.is_zero())
ratfuns = st.builds(lambda a, b: RatFun(a, b), polys, nz_polys)
ops = st.lists(ratfuns, min_size=1, max_size=3).map(DiffOp)
nz_ops = ops.filter(lambda A: not A.is_zero())

x = RatFun.x_power(1)


def leibniz_mul(A: DiffOp, B: DiffOp) -> DiffOp:
    """Product through d^k b = sum_j C(k,j) b^(j) d^(k-j); independent of op_mul."""
    out = [RatFun.zero() for _ in range(len(A.c) + len(B.c))]
    for k, a in enumerate(A.c):
        for m, b in enumerate(B.c):
            der = b
            for j in range(k + 1):
                out[k - j + m] = out[k - j + m] + a * der.scale(comb(k, j))
                der = der.derivative()
    return DiffOp(out)


def test_stirling_numbers():
    assert [stirling1(4, k) for k in range(5)] == [0, -6, 11, -6, 1]
    assert [stirling2(4, k) for k in range(5)] == [0, 1, 7, 6, 1]


def test_basic_constructors():
    d = DiffOp.d()
    assert d.order == 1 and d.is_monic()
    assert DiffOp.euler() == DiffOp.mult(x) * d
    assert (d * DiffOp.mult(x)) - DiffOp.mult(x) * d == DiffOp.one()


@given(ops, ops)
def test_product_matches_leibniz(A, B):
    assert A * B == leibniz_mul(A, B)


@given(ops, ops, ops)
def test_product_associative(A, B, C):
    assert (A * B) * C == A * (B * C)


@given(ops, ops, ratfuns)
def test_apply_is_a_homomorphism(A, B, f):
    assert (A * B).apply(f) == A.apply(B.apply(f))


@given(ops, nz_ops)
def test_right_division(A, B):
    q, r = op_right_divide(A, B)
    assert q * B + r == A
    assert r.is_zero() or r.order < B.order


@given(ops, nz_ops)
def test_left_division(A, B):
    q, r = op_left_divide(A, B)
    assert B * q + r == A
    assert r.is_zero() or r.order < B.order


@given(nz_ops, nz_ops)
def test_exact_division_recovers_factor(A, B):
    assert op_exact_right_divide(A * B, B) == A


def test_exact_division_rejects_remainder():
    with pytest.raises(NonzeroRemainder):
        op_exact_right_divide(DiffOp.d(2), DiffOp([x, 1]))


@given(ops, ops)
def test_adjoint_antihomomorphism(A, B):
    assert op_adjoint(A * B) == op_adjoint(B) * op_adjoint(A)
    assert op_adjoint(op_adjoint(A)) == A


def test_adjoint_values():
    assert op_adjoint(DiffOp.d()) == DiffOp.d().scale(-1)
    assert op_adjoint(DiffOp.euler()) == (DiffOp.euler() + DiffOp.one()).scale(-1)


@given(st.lists(small, min_size=0, max_size=4), st.integers(-3, 3))
def test_euler_polynomial_on_monomials(c, a):
    # p(D) x^a = p(a) x^a
    p = UniPoly([Q(v) for v in c])
    assert op_of_euler_poly(p).apply(RatFun.x_power(a)) == RatFun.x_power(a, p(Q(a)))


@given(st.lists(small, min_size=1, max_size=3), ops)
def test_poly_of_operator_horner(c, L):
    h = UniPoly([Q(v) for v in c], "t")
    expected = DiffOp.zero()
    power = DiffOp.one()
    for ck in h.c:
        expected = expected + power.scale(ck)
        power = power * L
    assert op_of_poly(h, L) == expected


dforms = st.builds(
    lambda n, N, nums, den: (n, N, nums, den),
    st.integers(0, 3),
    st.integers(1, 3),
    st.lists(st.lists(small, min_size=0, max_size=2), min_size=1, max_size=3),
    st.lists(small, min_size=1, max_size=2),
)


@given(dforms)
def test_dform_round_trip(data):
    n, N, nums, den = data
    num = tuple(UniPoly([Q(v) for v in c], "t") for c in nums)
    dp = UniPoly([Q(v) for v in den] + [Q(1)], "t")
    assume(not num[-1].is_zero())
    A = from_dform(DFormOp(n, N, num, dp))
    F = to_dform(A, N)
    assert from_dform(F) == A
    assert F.order == A.order


def test_dform_of_bessel_square():
    # x^-2 (D - 1)(D - 2) = d^2 - (2/x) d + 2/x^2 ... checked against direct expansion
    D = DiffOp.euler()
    A = DiffOp.mult(RatFun.x_power(-2)) * (D - DiffOp.one()) * (D - DiffOp.one().scale(2))
    F = to_dform(A, 2)
    assert F.n == 2 and F.den == UniPoly.const(1, "t")
    assert [p(Q(0)) for p in F.num] == [2, -3, 1]


def test_dform_rejects_mixed_powers():
    with pytest.raises(NotZNHomogeneous):
        to_dform(DiffOp.d(2) + DiffOp.mult(x), 2)


def test_json_and_latex():
    A = DiffOp([RatFun(UniPoly([1]), UniPoly([-1, 1])), Q("1/2"), 1])
    assert DiffOp.from_json(A.to_json()) == A
    tex = op_to_latex(A)
    assert tex.startswith(r"\partial_x^{2}")
    assert r"\frac{1}{2}\partial_x" in tex
