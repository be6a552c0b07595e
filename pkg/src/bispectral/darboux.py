"""Darboux planes, bispectral pairs and the involutions a, s, b.

A plane over a base operator L_V (Bessel or Airy) is stored as the pair
(P, g) with Psi_W = g(z)^{-1} P Psi_V.  Completing it produces Q, f, h with

    Q P = h(L_V),   f(z) g(z) = h(z^N),

together with the image under the bispectral involution (P_b, g_b, Q_b, f_b)
and the operators L = P Q, Lambda = P_b Q_b.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .airy import AiryParam, airy_involutions
from .bessel import BesselParam, beta_adjoint, beta_power, bessel_action_zero, euler_product_op
from .diffop import (
    DiffOp,
    binom,
    op_adjoint,
    op_exact_right_divide,
    op_left_divide,
    op_of_euler_poly,
    op_of_poly,
    op_right_divide,
    poly_to_json,
    stirling1,
    to_dform,
)
from .errors import (
    DegenerateGamma,
    IdentityFailed,
    InvalidParameter,
    NonzeroRemainder,
    NotFound,
)
from .field import Q, RatFun, UniPoly, poly_lcm, qstr
from .kernelspace import (
    Certificate,
    ConditionSet,
    PointSupport,
    ZeroSupport,
    ZeroTerm,
    base_operator,
    family_of,
    g_from_conditions,
    min_h_exponents,
    plane_operator,
    zero_group,
)
from .linalg import det, rref, solve_augmented

Param = Union[BesselParam, AiryParam]


# ---------------------------------------------------------------------------
# small polynomial helpers

def _zpoly(p: UniPoly) -> UniPoly:
    return p.with_var("z")


def _flip(p: UniPoly) -> UniPoly:
    """p(z) -> p(-z)."""
    return p.scale_var(-1)


def _to_t(p: UniPoly, N: int) -> UniPoly:
    """p(z) = q(z^N)  ->  q(t)."""
    return p.contract_power(N).with_var("t")


def _from_t(q: UniPoly, N: int, var: str = "z") -> UniPoly:
    return q.with_var(var).subs_power(N)


def split_g(g: UniPoly, N: int) -> Tuple[int, UniPoly]:
    """g(z) = z^r G(z^N) with 0 <= r < N; returns (r, G in t)."""
    low = g.low_order()
    r = low % N
    return r, _to_t(g.shift(-r), N)


def _const_of(f: RatFun):
    if not f.is_const():
        raise IdentityFailed("leading coefficient is not constant", value=f.to_str())
    return f.const_value()


# ---------------------------------------------------------------------------
# planes

@dataclass
class DarbouxPlane:
    """Psi_W = g(z)^{-1} P(x, d) Psi_V over the base plane V of ``param``.

    Q, f, h are filled in when known (they are for planes produced by the
    involutions).  ``origin`` records how the plane was obtained.
    """

    param: Param
    P: DiffOp
    g: UniPoly
    cs: Optional[ConditionSet] = None
    Q: Optional[DiffOp] = None
    f: Optional[UniPoly] = None
    h: Optional[UniPoly] = None
    origin: str = "conditions"
    certificate: Optional[Certificate] = None

    @property
    def family(self) -> str:
        return family_of(self.param)

    @property
    def N(self) -> int:
        return self.param.N

    @property
    def derived(self) -> bool:
        return self.origin != "conditions"

    @property
    def order(self) -> int:
        return self.P.order

    def to_json(self) -> dict:
        out = {
            "schema": "darboux-plane/1",
            "family": self.family,
            "param": self.param.to_json(),
            "origin": self.origin,
            "P": self.P.to_json(),
            "g": poly_to_json(self.g),
        }
        if self.cs is not None:
            out["conditions"] = self.cs.to_json()["conditions"]
        if self.Q is not None:
            out["Q"] = self.Q.to_json()
            out["f"] = poly_to_json(self.f)
            out["h"] = poly_to_json(self.h)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "DarbouxPlane":
        from .diffop import poly_from_json

        allowed = {"schema", "family", "param", "origin", "P", "g", "conditions", "Q", "f", "h"}
        extra = set(obj) - allowed
        if extra:
            raise InvalidParameter(f"unknown field(s) in plane: {sorted(extra)}")
        param = param_from_json(obj["family"], obj["param"])
        cs = None
        if "conditions" in obj:
            spec = {"family": obj["family"], "conditions": obj["conditions"]}
            spec.update(obj["param"])
            cs = ConditionSet.from_json(spec)
        plane = cls(
            param,
            DiffOp.from_json(obj["P"]),
            poly_from_json(obj["g"], "z"),
            cs=cs,
            origin=obj.get("origin", "conditions"),
        )
        if "Q" in obj:
            plane.Q = DiffOp.from_json(obj["Q"])
            plane.f = poly_from_json(obj["f"], "z")
            plane.h = poly_from_json(obj["h"], "t")
        return plane


def param_from_json(family: str, obj: dict) -> Param:
    if family == "bessel":
        return BesselParam(int(obj["N"]), tuple(Q(b) for b in obj["beta"]))
    if family == "airy":
        return AiryParam(int(obj["N"]), Q(obj["alpha0"]), tuple(Q(a) for a in obj.get("alphas", [])))
    raise InvalidParameter("unknown family", family=family)


def identity_plane(param: Param) -> DarbouxPlane:
    return build_plane(ConditionSet(param, ()))


def build_plane(cs: ConditionSet) -> DarbouxPlane:
    """Monic P with the prescribed kernel and g(z) from the conditions."""
    P, cert = plane_operator(cs)
    g = g_from_conditions(cs)
    return DarbouxPlane(cs.param, P, g, cs=cs, certificate=cert)


def planes_equal(A: DarbouxPlane, B: DarbouxPlane) -> bool:
    """Equality of the planes (not of the representing data).

    (P, g) and (P G(L), g G(z^N)) describe the same wave function, so with
    g_i = z^r G_i(z^N) the planes agree iff P_1 G_2(L) = P_2 G_1(L).
    """
    if A.family != B.family or A.param != B.param:
        return False
    N = A.N
    r1, G1 = split_g(A.g, N)
    r2, G2 = split_g(B.g, N)
    if r1 != r2:
        return False
    L = base_operator(A.param)
    return A.P * op_of_poly(G2, L) == B.P * op_of_poly(G1, L)


# ---------------------------------------------------------------------------
# minimal polynomial annihilating ker P

def _rem_powers(L: DiffOp, P: DiffOp, start: DiffOp, count: int) -> List[DiffOp]:
    """rem(L^i start, P) for i < count, using rem(L A, P) = rem(L rem(A, P), P)."""
    out = [op_right_divide(start, P)[1]]
    for _ in range(count - 1):
        out.append(op_right_divide(L * out[-1], P)[1])
    return out


def _coefficient_equations(ops: Sequence[DiffOp]) -> List[list]:
    """Rows over Q expressing sum_i u_i ops[i] = 0 coefficient by coefficient."""
    width = max((len(o.c) for o in ops), default=0)
    rows: List[list] = []
    for k in range(width):
        coeffs = [o.coeff(k) for o in ops]
        den = UniPoly.const(1)
        for c in coeffs:
            if not c.is_zero():
                den = poly_lcm(den, c.den)
        nums = [c.num * den.exact_div(c.den) if not c.is_zero() else UniPoly(()) for c in coeffs]
        top = max((p.deg() for p in nums), default=-1)
        for j in range(top + 1):
            row = [p.coeff(j) for p in nums]
            if any(row):
                rows.append(row)
    return rows


def _solve_monic_combination(ops: Sequence[DiffOp]) -> Optional[List]:
    """Monic u (last coefficient 1) with sum u_i ops[i] = 0, free variables zero."""
    d = len(ops) - 1
    rows = _coefficient_equations(ops)
    if not rows:
        return [mpq(0)] * d + [mpq(1)]
    aug = [r[:d] + [-r[d]] for r in rows]
    if d == 0:
        return None if any(r[0] for r in rows) else [mpq(1)]
    sol, _, ok = solve_augmented(aug, d)
    if not ok:
        return None
    return list(sol) + [mpq(1)]


def minimal_annihilator(P: DiffOp, L: DiffOp, base: UniPoly = None, max_deg: int = 24) -> UniPoly:
    """Smallest monic u = base * v with P dividing u(L) on the right."""
    base = base if base is not None else UniPoly.const(1, "t")
    start = op_of_poly(base, L)
    for d in range(max_deg + 1):
        ops = _rem_powers(L, P, start, d + 1)
        v = _solve_monic_combination(ops)
        if v is not None:
            return base * UniPoly(v, "t")
    raise NotFound("no annihilating polynomial up to the degree cap", max_deg=max_deg)


def _g_base(g: UniPoly, N: int) -> UniPoly:
    """Smallest t-polynomial u(t) with g(z) | u(z^N)."""
    r, G = split_g(g, N)
    return G * UniPoly.gen("t") if r else G


# ---------------------------------------------------------------------------
# bispectral pair

@dataclass
class BispectralPair:
    plane: DarbouxPlane
    P: DiffOp
    Q: DiffOp
    g: UniPoly
    f: UniPoly
    h: UniPoly  # in t = z^N
    P_b: DiffOp
    Q_b: DiffOp
    g_b: UniPoly
    f_b: UniPoly
    h_b: UniPoly  # Q_b P_b = h_b(L_V)
    L: DiffOp
    Lam: DiffOp
    Theta: UniPoly  # f_b(x) g_b(x), a polynomial in x
    raw_b: Dict = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def param(self) -> Param:
        return self.plane.param

    @property
    def family(self) -> str:
        return self.plane.family

    @property
    def N(self) -> int:
        return self.plane.N

    def b_plane(self) -> DarbouxPlane:
        return DarbouxPlane(
            self.param, self.P_b, self.g_b, Q=self.Q_b, f=self.f_b, h=self.h_b, origin="b"
        )

    def to_json(self) -> dict:
        out = {
            "schema": "bispectral-pair/1",
            "family": self.family,
            "param": self.param.to_json(),
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
            "g": poly_to_json(self.g),
            "f": poly_to_json(self.f),
            "h": poly_to_json(self.h),
            "P_b": self.P_b.to_json(),
            "Q_b": self.Q_b.to_json(),
            "g_b": poly_to_json(self.g_b),
            "f_b": poly_to_json(self.f_b),
            "h_b": poly_to_json(self.h_b),
            "L": self.L.to_json(),
            "Lambda": self.Lam.to_json(),
            "Theta": poly_to_json(self.Theta),
            "checks": dict(sorted(self.checks.items())),
        }
        if self.plane.cs is not None:
            out["conditions"] = self.plane.cs.to_json()["conditions"]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BispectralPair":
        from .diffop import poly_from_json

        allowed = {
            "schema", "family", "param", "P", "Q", "g", "f", "h", "P_b", "Q_b", "g_b",
            "f_b", "h_b", "L", "Lambda", "Theta", "checks", "conditions", "spectral",
        }
        extra = set(obj) - allowed
        if extra:
            raise InvalidParameter(f"unknown field(s) in pair: {sorted(extra)}")
        param = param_from_json(obj["family"], obj["param"])
        op = DiffOp.from_json
        z = lambda k: poly_from_json(obj[k], "z")
        t = lambda k: poly_from_json(obj[k], "t")
        cs = None
        if "conditions" in obj:
            spec = {"family": obj["family"], "conditions": obj["conditions"]}
            spec.update(obj["param"])
            cs = ConditionSet.from_json(spec)
        plane = DarbouxPlane(param, op(obj["P"]), z("g"), cs=cs, Q=op(obj["Q"]), f=z("f"), h=t("h"))
        return cls(
            plane, op(obj["P"]), op(obj["Q"]), z("g"), z("f"), t("h"),
            op(obj["P_b"]), op(obj["Q_b"]), z("g_b"), z("f_b"), t("h_b"),
            op(obj["L"]), op(obj["Lambda"]), poly_from_json(obj["Theta"], "x"),
            checks=dict(obj.get("checks", {})),
        )


def partner(plane: DarbouxPlane) -> Tuple[DiffOp, UniPoly, UniPoly]:
    """(Q, f, h) with Q P = h(L_V) and f g = h(z^N)."""
    if plane.Q is not None:
        return plane.Q, plane.f, plane.h
    N = plane.N
    L = base_operator(plane.param)
    if plane.cs is not None:
        h = min_h_exponents(plane.cs).h
    else:
        h = minimal_annihilator(plane.P, L, _g_base(plane.g, N))
    Qop = op_exact_right_divide(op_of_poly(h, L), plane.P)
    f = _from_t(h, N).exact_div(plane.g)
    return Qop, f, h


def complete_pair(plane: DarbouxPlane, reduce: bool = True) -> BispectralPair:
    """Steps 2-4: partner data, the bispectral image and L, Lambda, Theta."""
    Qop, f, h = partner(plane)
    N = plane.N
    L = base_operator(plane.param)
    checks = {
        "QP_equals_hL": Qop * plane.P == op_of_poly(h, L),
        "fg_equals_h": f * plane.g == _from_t(h, N),
    }
    full = DarbouxPlane(plane.param, plane.P, plane.g, cs=plane.cs, Q=Qop, f=f, h=h,
                        origin=plane.origin, certificate=plane.certificate)
    if plane.family == "bessel":
        img = bessel_b_image(full)
    else:
        img = airy_b_image(full)
    raw = dict(img.raw)
    Pb, gb, Qb, fb, hb = img.P_b, img.g_b, img.Q_b, img.f_b, img.h_b
    if reduce and plane.family == "bessel":
        Pb, gb, Qb, fb, hb, steps = reduce_b_data(plane.param, Pb, gb, Qb, fb, hb)
        raw["reduced_steps"] = steps
    checks.update(img.checks)
    checks["QbPb_equals_hb"] = Qb * Pb == op_of_poly(hb, L)
    checks["fbgb_equals_hb"] = fb * gb == _from_t(hb, N)
    theta = theta_of(plane.param, fb * gb, hb)
    return BispectralPair(
        full, plane.P, Qop, plane.g, f, h, Pb, Qb, gb, fb, hb,
        plane.P * Qop, Pb * Qb, theta, raw_b=raw, checks=checks,
    )


def pair_checks(pair: "BispectralPair") -> Dict[str, bool]:
    """Recompute every algebraic invariant of a pair from its stored data."""
    N = pair.N
    L = base_operator(pair.param)
    hL = op_of_poly(pair.h, L)
    hbL = op_of_poly(pair.h_b, L)
    return {
        "QP_equals_hL": pair.Q * pair.P == hL,
        "fg_equals_h": pair.f * pair.g == _from_t(pair.h, N),
        "QbPb_equals_hb": pair.Q_b * pair.P_b == hbL,
        "fbgb_equals_hb": pair.f_b * pair.g_b == _from_t(pair.h_b, N),
        "L_equals_PQ": pair.L == pair.P * pair.Q,
        "Lambda_equals_PbQb": pair.Lam == pair.P_b * pair.Q_b,
        "L_intertwines": pair.L * pair.P == pair.P * hL,
        "Lambda_intertwines": pair.Lam * pair.P_b == pair.P_b * hbL,
        "Theta_matches": pair.Theta == theta_of(pair.param, pair.f_b * pair.g_b, pair.h_b),
        "P_monic": pair.P.is_monic(),
        "Pb_monic": pair.P_b.is_monic(),
    }


def theta_of(param: Param, fbgb: UniPoly, hb: UniPoly) -> UniPoly:
    """Eigenvalue of Lambda as a polynomial in x.

    Bessel: f_b(x) g_b(x).  Airy: h_b(alpha_0 x), since Lambda acts in the
    variable alpha_0^{-1} z^N.
    """
    if isinstance(param, BesselParam):
        return fbgb.with_var("x")
    return hb.with_var("x").scale_var(param.alpha0)


# ---------------------------------------------------------------------------
# bispectral images

@dataclass
class BImage:
    P_b: DiffOp
    g_b: UniPoly
    Q_b: DiffOp
    f_b: UniPoly
    h_b: UniPoly
    raw: Dict = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)


def _dform_image(param: BesselParam, A: DiffOp, prefactor: UniPoly):
    """(1/prefactor(x)) sum_k D^k p_k(L_beta) and z^n p_n(z^N) for the D-form of A."""
    N = param.N
    L = base_operator(param)
    F = to_dform(A, N)
    total = DiffOp.zero()
    for k, pk in enumerate(F.num):
        if pk:
            total = total + op_of_euler_poly(UniPoly.monomial(k, 1)) * op_of_poly(pk, L)
    pre = RatFun(UniPoly.const(1), prefactor.with_var("x"))
    op = DiffOp.mult(pre) * total
    gb = UniPoly.monomial(F.n, 1, "z") * _from_t(F.den, N)
    return op, gb, F


def bessel_b_image(plane: DarbouxPlane) -> BImage:
    """P_b, g_b from the D-form of P; Q_b, f_b from the D-form of Q^*(-x,-d).

    The second expression for Q_b is the exact right quotient of
    Theta(L_beta) by P_b; both are computed and compared.
    """
    param = plane.param
    N = param.N
    L = base_operator(param)
    P, g, Qop, f = plane.P, plane.g, plane.Q, plane.f
    Pb, gb, F = _dform_image(param, P, g)
    lc = _const_of(Pb.lc())
    Pb = Pb.scale(1 / lc)
    gb = gb.scale(1 / lc)
    checks = {"Pb_leading_constant": True, "Pb_lc_matches_gb": gb.lc() == 1}
    # route 1: Q_b = sum_s q_s((-1)^N L)(-D-1)^s (1/f(x))
    Qt = op_adjoint(Qop).sign_flip()
    G = to_dform(Qt, N)
    m = G.n
    sgnL = L.scale((-1) ** N)
    minus_D_minus_1 = op_of_euler_poly(UniPoly([-1, -1]))
    inv_f = DiffOp.mult(RatFun(UniPoly.const(1), f.with_var("x")))
    Qb1 = DiffOp.zero()
    power = DiffOp.one()
    for s, qs in enumerate(G.num):
        if s:
            power = power * minus_D_minus_1
        if qs:
            Qb1 = Qb1 + op_of_poly(qs, sgnL) * power
    Qb1 = Qb1 * inv_f
    fb = UniPoly.monomial(m, (-1) ** m, "z") * _from_t(G.den, N).scale_var(-1)
    c = fb.lc()
    Qb1 = Qb1.scale(1 / c)
    fb = fb.scale(1 / c)
    theta = fb * gb
    hb = _to_t(theta, N)
    hL = op_of_poly(hb, L)
    Qb2, rem = op_right_divide(hL, Pb)
    if not rem.is_zero():
        raise NonzeroRemainder("Theta(L) is not divisible by P_b", order=rem.order)
    checks["Qb_routes_agree"] = Qb1 == Qb2
    raw = {"P_b": Pb, "g_b": gb, "Q_b_adjoint_route": Qb1, "dform_shift": F.n}
    return BImage(Pb, gb, Qb2, fb, hb, raw=raw, checks=checks)


def reduce_b_data(param: BesselParam, Pb, gb, Qb, fb, hb):
    """Strip L_beta factors: P_b = P' L with z^N | g_b, and Q_b = L Q' with z^N | f_b."""
    N = param.N
    L = base_operator(param)
    zN = UniPoly.monomial(N, 1, "z")
    steps = 0
    while True:
        changed = False
        if gb.low_order() >= N and Pb.order >= N:
            q, r = op_right_divide(Pb, L)
            if r.is_zero():
                Pb, gb = q, gb.exact_div(zN)
                hb = hb.shift(-1)
                steps += 1
                changed = True
        if fb.low_order() >= N and Qb.order >= N:
            q, r = op_left_divide(Qb, L)
            if r.is_zero():
                Qb, fb = q, fb.exact_div(zN)
                hb = hb.shift(-1)
                steps += 1
                changed = True
        if not changed:
            return Pb, gb, Qb, fb, hb, steps


def airy_b_image(plane: DarbouxPlane) -> BImage:
    """b_1 image: P = (1/p_n) sum p_k d^k  ->  (1/g_1(a0 x)) sum d^k p_k(L/a0)."""
    param: AiryParam = plane.param
    N = param.N
    a0 = param.alpha0
    L = base_operator(param)
    P, g = plane.P, plane.g
    pn = UniPoly.const(1)
    for c in P.c:
        pn = poly_lcm(pn, c.den)
    Lscaled = L.scale(1 / a0)
    total = DiffOp.zero()
    for k, c in enumerate(P.c):
        pk = c.num * pn.exact_div(c.den)
        if pk:
            total = total + DiffOp.d(k) * op_of_poly(pk, Lscaled)
    g1 = _to_t(g, N).with_var("x").scale_var(a0)
    Pb = DiffOp.mult(RatFun(UniPoly.const(1), g1)) * total
    gb = pn.with_var("z").scale_var(1 / a0).subs_power(N)
    lc = _const_of(Pb.lc())
    Pb = Pb.scale(1 / lc)
    gb = gb.scale(1 / lc)
    checks = {"Pb_leading_constant": True, "Pb_lc_matches_gb": gb.lc() == 1}
    hb = minimal_annihilator(Pb, L, _g_base(gb, N))
    Qb = op_exact_right_divide(op_of_poly(hb, L), Pb)
    fb = _from_t(hb, N).exact_div(gb)
    return BImage(Pb, gb, Qb, fb, hb, raw={"P_b": Pb, "g_b": gb}, checks=checks)


# ---------------------------------------------------------------------------
# involutions

def _with_partner(plane: DarbouxPlane) -> DarbouxPlane:
    if plane.Q is not None:
        return plane
    Qop, f, h = partner(plane)
    return replace(plane, Q=Qop, f=f, h=h)


def _h_sign(h: UniPoly, N: int) -> UniPoly:
    """(-1)^{N deg h} h((-1)^N t)."""
    return h.scale_var((-1) ** N).scale((-1) ** (N * h.deg()))


def involution_a(plane: DarbouxPlane) -> DarbouxPlane:
    """Adjoint: (P, g, Q, f) -> ((-1)^m Q^*, (-1)^m f(-z), (-1)^n P^*, (-1)^n g(-z))."""
    W = _with_partner(plane)
    n, m = W.P.order, W.Q.order
    if isinstance(W.param, BesselParam):
        new_param = beta_adjoint(W.param)
    else:
        new_param = airy_involutions(W.param)[1]
    return DarbouxPlane(
        new_param,
        op_adjoint(W.Q).scale((-1) ** m),
        _flip(W.f).scale((-1) ** m),
        Q=op_adjoint(W.P).scale((-1) ** n),
        f=_flip(W.g).scale((-1) ** n),
        h=_h_sign(W.h, W.N),
        origin="a",
    )


def involution_s(plane: DarbouxPlane) -> DarbouxPlane:
    """Sign: Psi(x, z) -> Psi(-x, -z)."""
    W = _with_partner(plane)
    n, m = W.P.order, W.Q.order
    if isinstance(W.param, BesselParam):
        new_param = W.param
    else:
        new_param = airy_involutions(W.param)[0]
    return DarbouxPlane(
        new_param,
        W.P.sign_flip().scale((-1) ** n),
        _flip(W.g).scale((-1) ** n),
        Q=W.Q.sign_flip().scale((-1) ** m),
        f=_flip(W.f).scale((-1) ** m),
        h=_h_sign(W.h, W.N),
        origin="s",
    )


def involution_b(plane: DarbouxPlane, reduce: bool = True) -> DarbouxPlane:
    """Bispectral involution (b_1 for Airy planes)."""
    return complete_pair(plane, reduce=reduce).b_plane()


def check_ab_bas(plane: DarbouxPlane) -> bool:
    """a(b(W)) and b(a(s(W))) are the same plane."""
    if plane.family != "bessel":
        raise InvalidParameter("ab = bas is checked on Bessel planes")
    left = involution_a(involution_b(plane))
    right = involution_b(involution_a(involution_s(plane)))
    return planes_equal(left, right)


# ---------------------------------------------------------------------------
# one-point planes: parameter recovery

@dataclass
class OnePointData:
    """A plane with kernel spanned by (1 + a X) Psi at the N sheets over lambda^N.

    X is D_x for Bessel planes and d_x for Airy planes.
    """

    lamN: object
    a: object

    def to_json(self) -> dict:
        return {"lambda^N": qstr(self.lamN), "a": qstr(self.a)}


def recover_one_point(plane: DarbouxPlane) -> OnePointData:
    """Read off (lambda^N, a) from a one-point plane (P, g)."""
    N = plane.N
    L = base_operator(plane.param)
    r, G = split_g(plane.g, N)
    if r != 0 or G.deg() != 1 or plane.P.order != N:
        raise InvalidParameter("not a one-point plane", g=plane.g.to_str())
    lamN = -G.coeff(0) / G.coeff(1)
    T = L - DiffOp.mult(RatFun.const(lamN))
    X = DiffOp.euler() if plane.family == "bessel" else DiffOp.d(1)
    base = op_right_divide(plane.P, T)[1]
    lin = op_right_divide(plane.P * X, T)[1]
    a = None
    for k in range(N):
        u, v = base.coeff(k), lin.coeff(k)
        if not v.is_zero():
            cand = -u / v
            if not cand.is_const():
                raise InvalidParameter("one-point parameter is not constant")
            a = cand.const_value()
            break
    if a is None:
        raise InvalidParameter("cannot recover the one-point parameter")
    if not (base + lin.scale(a)).is_zero():
        raise InvalidParameter("plane is not of one-point form")
    return OnePointData(lamN, a)


def one_point_laws(plane: DarbouxPlane) -> Dict:
    """Parameter laws for one-point planes under a and b.

    Airy: lambda^N + mu^N = P_{alpha'}(-1/a).
    Bessel: lambda^N mu^N = P_beta(-1/a) and 1/a + 1/b + N - 1 = 0, where
    b is the parameter of the adjoint plane.
    """
    N = plane.N
    here = recover_one_point(plane)
    pair = complete_pair(plane)
    image = recover_one_point(pair.b_plane())
    adj = recover_one_point(involution_a(plane))
    out = {
        "lambda^N": here.lamN,
        "a": here.a,
        "mu^N": image.lamN,
        "c": image.a,
        "b": adj.a,
        "adjoint_lambda^N": adj.lamN,
    }
    if plane.family == "airy":
        val = plane.param.char_poly()(-1 / here.a)
        out["law"] = "lambda^N + mu^N = P_alpha'(-1/a)"
        out["holds"] = here.lamN + image.lamN == val
        out["rhs"] = val
    else:
        val = plane.param.char_poly()(-1 / here.a)
        out["law"] = "lambda^N mu^N = P_beta(-1/a); 1/a + 1/b + N - 1 = 0"
        out["holds"] = (here.lamN * image.lamN == val) and (1 / here.a + 1 / adj.a + N - 1 == 0)
        out["rhs"] = val
    out["c_equals_a"] = image.a == here.a
    out["adjoint_lambda_flips"] = adj.lamN == (-1) ** N * here.lamN
    return out


# ---------------------------------------------------------------------------
# spectral algebra: u(L_V) ker P inside ker P

class ModelSpace:
    """Finite L_V-invariant space containing ker P, with exact coordinates.

    Zero-supported kernel functions live in the span of x^e ln^l x; each
    group of point conditions at lambda^N gets the basis D_z^k Psi (Bessel)
    or d_x^k Psi (Airy) evaluated on one sheet.  The Z_N rotation acts the
    same way on every sheet, so one sheet represents the whole group.
    """

    def __init__(self, cs: ConditionSet, cap: int = 4096):
        self.cs = cs
        self.param = cs.param
        self.keys: List = []
        self._index: Dict = {}
        self.kernel: List[Dict] = []
        self._build(cap)

    def _add_key(self, key):
        if key not in self._index:
            self._index[key] = len(self.keys)
            self.keys.append(key)

    def _zero_vectors(self) -> List[Dict]:
        from math import factorial

        N = self.param.N
        out = []
        for c in self.cs.zero_conditions():
            j0 = max(t.j for t in c.terms if t.b)
            for l in range(j0 + 1):
                v: Dict = {}
                for t in c.terms:
                    if t.b and t.j >= l:
                        e = self.param.beta[t.i - 1] + t.k * N
                        key = ("zero", e, t.j - l)
                        v[key] = v.get(key, 0) + t.b * (factorial(t.j) // factorial(t.j - l))
                out.append({k: x for k, x in v.items() if x})
        return out

    def _point_vectors(self) -> List[Dict]:
        out = []
        for kappa, conds in self.cs.point_groups():
            for c in conds:
                if isinstance(self.param, BesselParam) and c.form == "partial":
                    K = len(c.coeffs)
                    coeffs = [
                        sum((c.coeffs[k] * c.lam ** (-k) * stirling1(k, j) for k in range(j, K)), mpq(0))
                        for j in range(K)
                    ]
                else:
                    coeffs = list(c.coeffs)
                out.append({("point", kappa, k): a for k, a in enumerate(coeffs) if a})
        return out

    def _build(self, cap: int):
        self.kernel = self._zero_vectors() + self._point_vectors()
        todo = []
        for v in self.kernel:
            for key in v:
                if key not in self._index:
                    self._add_key(key)
                    todo.append(key)
        # point blocks: all lower derivative orders
        for key in list(self.keys):
            if key[0] == "point":
                for k in range(key[2]):
                    self._add_key(("point", key[1], k))
        while todo:
            key = todo.pop()
            for k2 in self._action(key):
                if k2 not in self._index:
                    self._add_key(k2)
                    todo.append(k2)
            if len(self.keys) > cap:
                raise NotFound("model space does not close", size=len(self.keys))

    def _action(self, key) -> Dict:
        """L_V applied to one basis element."""
        if key[0] == "zero":
            _, e, l = key
            return {("zero", e2, l2): c for e2, l2, c in bessel_action_zero(self.param, e, l)}
        _, kappa, k = key
        if isinstance(self.param, BesselParam):
            N = self.param.N
            return {("point", kappa, m): kappa * binom(k, m) * N ** (k - m) for m in range(k + 1)}
        out = {("point", kappa, k): kappa}
        if k:
            out[("point", kappa, k - 1)] = self.param.alpha0 * k
        return out

    def apply_L(self, v: Dict) -> Dict:
        out: Dict = {}
        for key, a in v.items():
            for k2, c in self._action(key).items():
                out[k2] = out.get(k2, 0) + a * c
        return {k: x for k, x in out.items() if x}

    def dense(self, v: Dict) -> List:
        row = [mpq(0)] * len(self.keys)
        for k, a in v.items():
            row[self._index[k]] = mpq(a)
        return row


def _reduce_mod(rows: List[list], pivots: List[int], v: list) -> list:
    v = list(v)
    for r, c in zip(rows, pivots):
        if v[c]:
            f = v[c]
            v = [a - f * b for a, b in zip(v, r)]
    return v


class InvariantSearch:
    """Monic u of a given degree with u(L_V) C inside C, C = ker P."""

    def __init__(self, space: ModelSpace):
        self.space = space
        basis = [space.dense(v) for v in space.kernel]
        self._rows, self._piv = rref(basis) if basis else ([], [])
        self._rows = self._rows[: len(self._piv)]
        self._powers: List[List[list]] = [[self._red(space.dense(v))] for v in space.kernel]
        self._cur = [dict(v) for v in space.kernel]

    def _red(self, dense_v: list) -> list:
        return _reduce_mod(self._rows, self._piv, dense_v)

    def _extend(self, d: int):
        for idx in range(len(self._cur)):
            while len(self._powers[idx]) <= d:
                self._cur[idx] = self.space.apply_L(self._cur[idx])
                self._powers[idx].append(self._red(self.space.dense(self._cur[idx])))

    def solve(self, d: int) -> Optional[UniPoly]:
        self._extend(d)
        rows = []
        for pw in self._powers:
            for j in range(len(self.space.keys)):
                row = [pw[i][j] for i in range(d + 1)]
                if any(row):
                    rows.append(row)
        if not rows:
            return UniPoly.monomial(d, 1, "t")
        if d == 0:
            return None
        sol, _, ok = solve_augmented([r[:d] + [-r[d]] for r in rows], d)
        if not ok:
            return None
        return UniPoly(list(sol) + [mpq(1)], "t")


class OperatorInvariantSearch:
    """Same question answered with operators: P u(L_V) divisible on the right by P."""

    def __init__(self, P: DiffOp, L: DiffOp):
        self.P, self.L = P, L
        self._R = [op_right_divide(DiffOp.one(), P)[1]]
        self._C = [op_right_divide(P * self._R[0], P)[1]]

    def _extend(self, d: int):
        while len(self._R) <= d:
            R = op_right_divide(self.L * self._R[-1], self.P)[1]
            self._R.append(R)
            self._C.append(op_right_divide(self.P * R, self.P)[1])

    def solve(self, d: int) -> Optional[UniPoly]:
        self._extend(d)
        v = _solve_monic_combination(self._C[: d + 1])
        return None if v is None else UniPoly(v, "t")


def _searcher(plane: DarbouxPlane, method: str):
    if method == "model" and plane.cs is not None:
        return InvariantSearch(ModelSpace(plane.cs))
    return OperatorInvariantSearch(plane.P, base_operator(plane.param))


def spectral_algebra(plane: DarbouxPlane, max_order: int = 10, method: str = "model") -> List[Tuple[UniPoly, int]]:
    """Monic u (one per degree, free coefficients zero) with P u(L_V) P^{-1} differential.

    ``method`` is "model" (matrix action on a model space; needs conditions)
    or "operator" (remainders of P L_V^i modulo P).  Orders are N deg u.
    """
    N = plane.N
    search = _searcher(plane, method)
    out = []
    for d in range(1, max_order // N + 1):
        u = search.solve(d)
        if u is not None:
            out.append((u, N * d))
    return out


def minimal_L(plane: DarbouxPlane, max_deg: int = 8, method: str = "model") -> Tuple[UniPoly, DiffOp]:
    """Lowest-degree invariant u and L_min with L_min P = P u(L_V)."""
    search = _searcher(plane, method)
    L = base_operator(plane.param)
    for d in range(1, max_deg + 1):
        u = search.solve(d)
        if u is not None:
            return u, op_exact_right_divide(plane.P * op_of_poly(u, L), plane.P)
    raise NotFound("no invariant polynomial up to the degree cap", max_deg=max_deg)


def rank_of(orders: Sequence[int]) -> int:
    """gcd of the orders of the commuting operators."""
    if not orders:
        raise InvalidParameter("rank needs at least one order")
    r = 0
    for o in orders:
        r = gcd(r, int(o))
    return r


# ---------------------------------------------------------------------------
# monomial planes in closed form

@dataclass
class MonomialForms:
    P: DiffOp
    Q: DiffOp
    g: UniPoly
    f: UniPoly
    h: UniPoly
    P_b: DiffOp
    Q_b: DiffOp
    g_b: UniPoly
    f_b: UniPoly
    gamma: List
    subsets: List[Tuple[Tuple[int, ...], object, int]]  # (I, c_I, p_I)
    I_min: Tuple[int, ...] = ()
    L: Optional[DiffOp] = None
    common_P: Optional[UniPoly] = None  # u(t) with P_b = P_b' u(L), g_b = g_b' u(z^N)
    common_Q: Optional[UniPoly] = None  # u(t) with Q_b = u(L) Q_b', f_b = f_b' u(z^N)

    def normalized(self) -> "MonomialForms":
        """Cancel common L-factors, then make P_b and f_b monic.

        The subset sum S(t) can share a factor u(t) with the numerator of P
        (or Q); it cancels in the reduced D-form of P but survives in P_b as a
        right factor u(L) (in Q_b as a left factor).  Dividing it out leaves
        the same plane.
        """
        Pb, gb, Qb, fb = self.P_b, self.g_b, self.Q_b, self.f_b
        if self.common_P is not None and self.common_P.deg() > 0:
            Pb = op_exact_right_divide(Pb, op_of_poly(self.common_P, self.L))
            gb = gb.exact_div(_from_t(self.common_P, self._N))
        if self.common_Q is not None and self.common_Q.deg() > 0:
            q, r = op_left_divide(Qb, op_of_poly(self.common_Q, self.L))
            if not r.is_zero():
                raise NonzeroRemainder("common factor does not divide Q_b on the left")
            Qb = q
            fb = fb.exact_div(_from_t(self.common_Q, self._N))
        lc = _const_of(Pb.lc())
        cf = fb.lc()
        return replace(
            self,
            P_b=Pb.scale(1 / lc),
            g_b=gb.scale(1 / lc),
            Q_b=Qb.scale(1 / cf),
            f_b=fb.scale(1 / cf),
            common_P=None,
            common_Q=None,
        )

    @property
    def _N(self) -> int:
        return self.L.order


def monomial_conditions(param: BesselParam, A: Sequence[Sequence], d: int) -> ConditionSet:
    """Rows of A as zero conditions sum_i A_ri x^{gamma_i}, gamma = beta^d."""
    conds = []
    for row in A:
        terms = []
        for idx, a in enumerate(row):
            if a:
                k, j = divmod(idx, d)
                terms.append(ZeroTerm(k + 1, j, 0, a))
        conds.append(ZeroSupport(tuple(terms)))
    return ConditionSet(param, tuple(conds))


def _vandermonde(vals: Sequence) -> object:
    out = mpq(1)
    for s in range(len(vals)):
        for r in range(s):
            out *= vals[s] - vals[r]
    return out


def _subset_terms(A, gamma, n, threads: int = 1):
    """(I, det A^I * Delta_I, sum gamma_I) for every n-subset with det A^I != 0."""
    subsets = list(combinations(range(len(gamma)), n))

    def one(I):
        dA = det([[row[i] for i in I] for row in A]) if n else mpq(1)
        if not dA:
            return None
        return I, dA * _vandermonde([gamma[i] for i in I]), sum((gamma[i] for i in I), mpq(0))

    if threads > 1 and len(subsets) > 64:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, subsets))
    else:
        results = [one(I) for I in subsets]
    return [r for r in results if r is not None]


def _L_power(L: DiffOp, k: int) -> DiffOp:
    out = DiffOp.one()
    for _ in range(k):
        out = out * L
    return out


def monomial_closed_forms(param: BesselParam, A: Sequence[Sequence], d: int, threads: int = 1) -> MonomialForms:
    """P, Q, P_b, Q_b, g, f, g_b, f_b for a monomial plane, by subset sums.

    The kernel is spanned by the rows of A against x^{gamma_i}; each n-subset
    I with det A^I != 0 contributes c_I = det A^I * Delta_I at the shift
    p_I = sum gamma_I - min.
    """
    N = param.N
    gamma = beta_power(param, d)
    if len(set(gamma)) != len(gamma):
        raise DegenerateGamma("coordinates of beta^d collide", gamma=[qstr(g) for g in gamma])
    n = len(A)
    if any(len(r) != len(gamma) for r in A):
        raise InvalidParameter("A must have d N columns", columns=len(gamma))
    terms = _subset_terms([[Q(a) for a in r] for r in A], gamma, n, threads)
    if not terms:
        raise InvalidParameter("rows of A are linearly dependent")
    low = min(s for _, _, s in terms)
    Imin = min(I for I, _, s in terms if s == low)
    data = []
    for I, c, s in terms:
        p = s - low
        if p.denominator != 1 or int(p) % N:
            raise DegenerateGamma("subset shift not divisible by N", subset=list(I), shift=qstr(p))
        data.append((I, c, int(p)))
    data.sort(key=lambda t: t[0])
    L = base_operator(param)
    x = lambda k, c=1: DiffOp.mult(RatFun.x_power(k, c))
    S = UniPoly(())
    for I, c, p in data:
        S = S + UniPoly.monomial(p, c)
    invS = DiffOp.mult(RatFun(UniPoly.const(1), S))
    P = DiffOp.zero()
    Qsum = DiffOp.zero()
    Pb = DiffOp.zero()
    Qb = DiffOp.zero()
    for I, c, p in data:
        gI = [gamma[i] for i in I]
        rest = [gamma[i] - n for i in range(len(gamma)) if i not in I]
        Lp = _L_power(L, p // N)
        P = P + x(p, c) * euler_product_op(gI, n)
        Qsum = Qsum + euler_product_op(rest, d * N - n) * x(p, c)
        Pb = Pb + (euler_product_op(gI, n) * Lp).scale(c)
        Qb = Qb + (Lp * euler_product_op(rest, d * N - n)).scale(c)
    P = invS * P
    Qop = Qsum * invS
    g = UniPoly.monomial(n, 1, "z")
    f = UniPoly.monomial(d * N - n, 1, "z")
    Sz = S.with_var("z")
    gb = UniPoly.monomial(n, 1, "z") * Sz
    fb = UniPoly.monomial(d * N - n, 1, "z") * Sz
    h = UniPoly.monomial(d, 1, "t")
    S_t = S.contract_power(N).with_var("t").monic()
    common_P = S_t.exact_div(to_dform(P, N).den)
    common_Q = S_t.exact_div(to_dform(op_adjoint(Qop).sign_flip(), N).den.scale_var((-1) ** N).monic())
    return MonomialForms(P, Qop, g, f, h, Pb, Qb, gb, fb, gamma, data, Imin, L, common_P, common_Q)

