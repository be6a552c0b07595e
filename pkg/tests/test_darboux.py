"""Darboux planes, bispectral partners, involutions, spectral algebras, closed forms."""

import json

import pytest
from hypothesis import assume, given, settings, strategies as st

from bispectral.airy import AiryParam
from bispectral.bessel import BesselParam, bessel_param, beta_power
from bispectral.darboux import (
    BispectralPair,
    DarbouxPlane,
    build_plane,
    check_ab_bas,
    complete_pair,
    identity_plane,
    involution_a,
    involution_b,
    involution_s,
    minimal_annihilator,
    minimal_L,
    monomial_closed_forms,
    monomial_conditions,
    one_point_laws,
    pair_checks,
    planes_equal,
    rank_of,
    recover_one_point,
    spectral_algebra,
    split_g,
)
from bispectral.diffop import DiffOp, op_adjoint, op_of_poly
from bispectral.errors import DegenerateGamma, InvalidParameter, NotFound
from bispectral.examples import example_conditions, shipped_examples
from bispectral.field import Q, RatFun, UniPoly
from bispectral.kernelspace import ConditionSet, PointSupport, base_operator

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
nonzero = small.filter(bool)
x = RatFun.x_power(1)
t = UniPoly.gen("t")


def airy_P(a, lam2, a0):
    """Airy N=2 one-point operator written through lambda^2."""
    X = x.scale(a0) + RatFun.const(lam2)
    den = RatFun.const(1) - X.scale(a * a)
    return DiffOp([(X * X.scale(a * a) - X - RatFun.const(a * a0)) / den, RatFun.const(a * a * a0) / den, 1])


def plane(name, **kw):
    return build_plane(example_conditions(name, **kw))


# partners -----------------------------------------------------------------

@pytest.mark.parametrize("name", shipped_examples())
def test_pair_checks_hold(name, pair_of):
    pair = pair_of(name)
    assert all(pair_checks(pair).values()), pair_checks(pair)
    L = base_operator(pair.param)
    assert pair.Q * pair.P == op_of_poly(pair.h, L)
    assert pair.f * pair.g == pair.h.with_var("z").subs_power(pair.N)


def test_identity_plane():
    p = bessel_param([0, 1])
    W = build_plane(ConditionSet(p, ()))
    assert planes_equal(W, identity_plane(p))
    pair = complete_pair(W)
    assert pair.P == DiffOp.one() and pair.h == t
    assert pair.L == base_operator(p)


def test_theta_frozen_value(pair_of):
    # Theta for the default rank-two plane with orders 4, 6, 8, 10
    assert pair_of("9.3").Theta == UniPoly([Q(19600) / 81, 0, 0, 0, Q(280) / 9, 0, 0, 0, 1])


def test_split_g():
    z = UniPoly.gen("z")
    r, G = split_g(z * (z * z - UniPoly.const(4, "z")), 2)
    assert r == 1 and G == UniPoly([-4, 1], "t")


def test_minimal_annihilator():
    L = DiffOp.d()
    # P = d - 1 divides (L - 1), and nothing of lower degree
    assert minimal_annihilator(DiffOp([-1, 1]), L) == UniPoly([-1, 1], "t")
    with pytest.raises(NotFound):
        minimal_annihilator(DiffOp([x, 1]), L, max_deg=2)


# Airy one-point planes ----------------------------------------------------

@settings(max_examples=10)
@given(nonzero, small, st.sampled_from([Q(1), Q(2), Q(-1) / 3]))
def test_airy_partner_closed_forms(a, lam, a0):
    assume(a * a * lam * lam != 1)
    pair = complete_pair(build_plane(ConditionSet(AiryParam(2, a0), (PointSupport(lam, (1, a)),))))
    mu2 = (1 - a * a * lam * lam) / (a * a)
    assert pair.P == airy_P(a, lam * lam, a0)
    assert pair.Q == op_adjoint(airy_P(-a, lam * lam, a0))
    assert pair.P_b == airy_P(a, mu2, a0)
    assert pair.Q_b == op_adjoint(airy_P(-a, mu2, a0))
    assert pair.g_b == UniPoly([-mu2, 0, 1], "z")


@settings(max_examples=10)
@given(nonzero, small, small)
def test_airy_rank_three_law(a, lam, a2):
    cs = ConditionSet(AiryParam(3, 1, (a2,)), (PointSupport(lam, (1, a)),))
    laws = one_point_laws(build_plane(cs))
    assert laws["holds"]
    assert laws["lambda^N"] + laws["mu^N"] == -(1 + a * a * a2) / a**3


# Bessel one-point planes --------------------------------------------------

@given(st.sampled_from(["1/3", "1/4", "2/5", "3/2"]), nonzero, nonzero)
def test_bessel_one_point_laws(nu, a, lam):
    nu = Q(nu)
    p = bessel_param([1 - nu, nu])
    val = p.char_poly()(-1 / a)
    assume(val != 0 and a != -1)
    W = build_plane(ConditionSet(p, (PointSupport(lam, (1, a), "euler"),)))
    laws = one_point_laws(W)
    assert laws["holds"]
    assert laws["mu^N"] == (a + 1 + a * a * nu * (1 - nu)) / (a * a * lam * lam)
    assert 1 / laws["a"] + 1 / laws["b"] + 1 == 0


def test_bessel_one_point_frozen():
    laws = one_point_laws(plane("9.8"))
    assert laws["mu^N"] == Q(35) / 36
    assert laws["b"] == Q(-2) / 3
    assert recover_one_point(plane("e2")).a == 2


# involutions --------------------------------------------------------------

@pytest.mark.parametrize("name", ["9.2", "9.3", "9.5", "9.8", "9.9", "9.10", "log", "n1", "e2"])
def test_involutions_square_to_identity(name):
    W = plane(name)
    for inv in (involution_a, involution_s, involution_b):
        assert planes_equal(inv(inv(W)), W)


@pytest.mark.parametrize("name", ["9.2", "9.3", "9.5", "9.8", "log", "n1", "e2"])
def test_ab_equals_bas(name):
    assert check_ab_bas(plane(name))


def test_involution_family_mismatch_detected():
    W = plane("9.9")
    V = plane("9.3")
    assert not planes_equal(W, V)


# spectral algebra ---------------------------------------------------------

@pytest.mark.parametrize("name", ["9.2", "9.3", "9.5", "9.8", "9.9", "9.10", "log", "n1", "e2"])
def test_spectral_routes_agree(name):
    W = plane(name)
    assert spectral_algebra(W, 10, "model") == spectral_algebra(W, 10, "operator")


def test_spectral_orders_known():
    assert [o for _, o in spectral_algebra(plane("9.3"))] == [4, 6, 8, 10]
    u, Lmin = minimal_L(plane("9.2"))
    assert u == t and Lmin.order == 2
    W = plane("9.4", **{"lambda": "5"})
    u, Lmin = minimal_L(W)
    assert u == t**3 + t * t * 5 and Lmin.order == 6
    assert rank_of([6, 9]) == 3
    with pytest.raises(InvalidParameter):
        rank_of([])


def test_minimal_L_intertwines(pair_of):
    pair = pair_of("9.3")
    u, Lmin = minimal_L(pair.plane)
    assert Lmin * pair.P == pair.P * op_of_poly(u, base_operator(pair.param))


# closed forms for monomial planes ----------------------------------------

@st.composite
def monomial_data(draw):
    """(param, A, d) with distinct gamma, homogeneous rows, and some row reaching x^(beta_k + (d-1)N)."""
    N = draw(st.integers(1, 3))
    fr = [draw(st.sampled_from([0, 1, 2, 3])) / Q(draw(st.sampled_from([2, 3, 5]))) + draw(st.integers(-2, 2))
          for _ in range(N - 1)]
    beta = fr + [Q(N * (N - 1)) / 2 - sum(fr, Q(0))]
    p = BesselParam(N, tuple(beta))
    d = draw(st.integers(1, 3))
    gamma = beta_power(p, d)
    assume(len(set(gamma)) == len(gamma))
    classes = []
    for i, g in enumerate(gamma):
        for c in classes:
            if ((g - gamma[c[0]]) / N).denominator == 1:
                c.append(i)
                break
        else:
            classes.append([i])
    n = draw(st.integers(1, min(3, d * N)))
    A = []
    for _ in range(n):
        c = draw(st.sampled_from(classes))
        row = [0] * len(gamma)
        for i in c:
            row[i] = draw(st.integers(-3, 3))
        A.append(row)
    # the closed form takes d as given, so d must be the minimal exponent
    assume(any(row[i] for row in A for i in range(d - 1, len(gamma), d)))
    return p, A, d


def closed_vs_pipeline(p, A, d):
    try:
        mf = monomial_closed_forms(p, A, d).normalized()
        cs = monomial_conditions(p, A, d)
    except (DegenerateGamma, InvalidParameter):
        return None
    pair = complete_pair(build_plane(cs), reduce=False)
    return [
        mf.P == pair.P, mf.Q == pair.Q, mf.g == pair.g, mf.f == pair.f, mf.h == pair.h,
        mf.P_b == pair.P_b, mf.g_b == pair.g_b, mf.Q_b == pair.Q_b, mf.f_b == pair.f_b,
    ]


@given(monomial_data())
def test_closed_forms_match_pipeline(data):
    res = closed_vs_pipeline(*data)
    assume(res is not None)
    assert all(res), res


def test_closed_forms_frozen():
    # one row x^(1/3) + x^(7/3) over beta = (1/3, 2/3), d = 2
    p = bessel_param(["1/3", "2/3"])
    mf = monomial_closed_forms(p, [[1, 1, 0, 0]], 2)
    assert mf.gamma == [Q(1) / 3, Q(7) / 3, Q(2) / 3, Q(8) / 3]
    assert [I for I, _, _ in mf.subsets] == [(0,), (1,)]
    assert mf.g == UniPoly([0, 1], "z") and mf.f == UniPoly([0, 0, 0, 1], "z")
    assert mf.P == DiffOp([RatFun(UniPoly([Q(-1) / 3, 0, Q(-7) / 3]), UniPoly([0, 1, 0, 1])), 1])


def test_degenerate_gamma_rejected():
    with pytest.raises(DegenerateGamma):
        monomial_closed_forms(bessel_param([1, 1, 1]), [[1, 0, 0]], 1)


# serialization ------------------------------------------------------------

@pytest.mark.parametrize("name", shipped_examples())
def test_pair_json_round_trip(name, pair_of):
    pair = pair_of(name)
    text = json.dumps(pair.to_json(), sort_keys=True)
    again = BispectralPair.from_json(json.loads(text))
    assert json.dumps(again.to_json(), sort_keys=True) == text
    assert all(pair_checks(again).values())


def test_plane_json_round_trip_and_strictness():
    W = involution_a(plane("9.3"))
    obj = W.to_json()
    assert planes_equal(DarbouxPlane.from_json(obj), W)
    obj["surprise"] = 1
    with pytest.raises(InvalidParameter):
        DarbouxPlane.from_json(obj)
