"""Independent checks of bispectral pairs.

Symbolic path: Psi_V is replaced by finitely many symbols closed under both
derivatives (D_w^m Phi(w), w = xz, for Bessel; Phi^{(m)}(x + w), w = z^N/alpha_0,
for Airy).  Every operator is conjugated and cleared of denominators once,
so both eigenvalue identities become exact polynomial identities in
(x, z) with coefficients on the symbols.

Series path (Bessel only): Psi_W = e^{xz} sum A_k(x) z^{-k} from the
truncated master series, with shape, decay and eigenvalue checks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .airy import AiryParam, airy_reduce_rule
from .bessel import BesselParam, bessel_wave_coeffs
from .darboux import (
    BispectralPair,
    DarbouxPlane,
    check_ab_bas,
    complete_pair,
    pair_checks,
    rank_of,
    spectral_algebra,
)
from .diffop import DiffOp, op_exact_right_divide, op_of_poly
from .errors import IdentityFailed, InvalidParameter, MarginExhausted
from .field import RatFun, UniPoly, poly_lcm, qstr
from .kernelspace import base_operator

# a symbolic expression: {(m, i, j): coeff} meaning coeff * x^i * v^j * S_m
Expr = Dict[Tuple[int, int, int], object]


def _add_into(out: Expr, key, val):
    v = out.get(key, 0) + val
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class SymbolRing:
    """Derivatives of symbol expressions in x and in the spectral variable v.

    Bessel: v = z, S_m = D_w^m Phi(xz), d_x S_m = x^{-1} S_{m+1}.
    Airy:   v = w, S_m = Phi^{(m)}(x + w), d_x S_m = d_w S_m = S_{m+1}.
    """

    def __init__(self, param):
        self.param = param
        self.N = param.N
        self.bessel = isinstance(param, BesselParam)
        if self.bessel:
            P = param.char_poly()
            self._p = [P.coeff(j) for j in range(self.N)]
        else:
            rule = airy_reduce_rule(param)
            # r_m(x + w) expanded: {m: {(i, j): c}}
            self._rule: Dict[int, Dict[Tuple[int, int], object]] = {}
            for m, r in rule.items():
                terms: Dict[Tuple[int, int], object] = {}
                for k, c in enumerate(r.c):
                    if c:
                        for j in range(k + 1):
                            terms[(k - j, j)] = terms.get((k - j, j), 0) + c * comb(k, j)
                self._rule[m] = {k: v for k, v in terms.items() if v}

    def _raise(self, out: Expr, m: int, i: int, j: int, c):
        """Add c x^i v^j S_{m+1}, reducing S_N."""
        N = self.N
        if m + 1 < N:
            _add_into(out, (m + 1, i, j), c)
            return
        if self.bessel:
            _add_into(out, (0, i + N, j + N), c)
            for l, pl in enumerate(self._p):
                if pl:
                    _add_into(out, (l, i, j), -pl * c)
        else:
            for l, terms in self._rule.items():
                for (a, b), r in terms.items():
                    _add_into(out, (l, i + a, j + b), r * c)

    def dx(self, e: Expr) -> Expr:
        out: Expr = {}
        for (m, i, j), c in e.items():
            if i:
                _add_into(out, (m, i - 1, j), i * c)
            if self.bessel:
                self._raise(out, m, i - 1, j, c)
            else:
                self._raise(out, m, i, j, c)
        return out

    def dv(self, e: Expr) -> Expr:
        out: Expr = {}
        for (m, i, j), c in e.items():
            if j:
                _add_into(out, (m, i, j - 1), j * c)
            if self.bessel:
                self._raise(out, m, i, j - 1, c)
            else:
                self._raise(out, m, i, j, c)
        return out

    def base(self) -> Expr:
        return {(0, 0, 0): mpq(1)}


def clear_denominators(A: DiffOp) -> Tuple[UniPoly, List[Dict[int, object]]]:
    """(D, [c_k]) with D(x) A = sum c_k(x) d^k and Laurent polynomial c_k."""
    D = UniPoly.const(1, A.var)
    for c in A.c:
        if c.is_zero():
            continue
        low = c.den.low_order()
        D = poly_lcm(D, c.den.shift(-low) if low > 0 else c.den)
    out = []
    for c in A.c:
        if c.is_zero():
            out.append({})
            continue
        low = c.den.low_order()
        rest = c.den.shift(-low) if low > 0 else c.den
        num = c.num * D.exact_div(rest)
        out.append({k - low: v for k, v in enumerate(num.c) if v})
    return D, out


def _mul_poly(e: Expr, p: Dict[int, object], in_x: bool) -> Expr:
    out: Expr = {}
    for (m, i, j), c in e.items():
        for k, v in p.items():
            key = (m, i + k, j) if in_x else (m, i, j + k)
            _add_into(out, key, c * v)
    return out


def _apply(ring: SymbolRing, coeffs: List[Dict[int, object]], e: Expr, in_x: bool) -> Expr:
    out: Expr = {}
    cur = e
    for k, ck in enumerate(coeffs):
        if ck:
            for key, v in _mul_poly(cur, ck, in_x).items():
                _add_into(out, key, v)
        if k + 1 < len(coeffs):
            cur = ring.dx(cur) if in_x else ring.dv(cur)
    return out


def _poly_dict(p: UniPoly) -> Dict[int, object]:
    return {k: v for k, v in enumerate(p.c) if v}


def _conjugate(c: UniPoly, A: DiffOp) -> DiffOp:
    """c A c^{-1} for a polynomial c."""
    if c.deg() <= 0:
        return A
    return DiffOp.mult(RatFun(c)) * A * DiffOp.mult(RatFun(UniPoly.const(1, c.var), c))


@dataclass
class IdentityReport:
    name: str
    passed: bool
    residual_terms: int
    seconds: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual_terms": self.residual_terms,
            "seconds": round(self.seconds, 3),
        }


def _g_spectral(pair: BispectralPair) -> UniPoly:
    """g in the spectral variable: g(z) for Bessel, g_1(alpha_0 w) for Airy."""
    if isinstance(pair.param, BesselParam):
        return pair.g
    return _spectral_poly(pair.param, pair.g.contract_power(pair.N))


def _spectral_poly(param, p: UniPoly) -> UniPoly:
    """p(z^N) on the Bessel side, p(alpha_0 w) on the Airy side (variable v)."""
    if isinstance(param, BesselParam):
        return p.with_var("z").subs_power(param.N)
    return p.with_var("z").scale_var(param.alpha0)


def check_bispectral_symbolic(pair: BispectralPair, L: DiffOp = None, Lam: DiffOp = None,
                              raise_on_fail: bool = True) -> List[IdentityReport]:
    """L Psi_W = h Psi_W in x and Lambda Psi_W = Theta(x) Psi_W in the spectral variable."""
    param = pair.param
    ring = SymbolRing(param)
    L = pair.L if L is None else L
    Lam = pair.Lam if Lam is None else Lam
    Dp, pc = clear_denominators(pair.P)
    E = _apply(ring, pc, ring.base(), in_x=True)
    reports = []

    t0 = time.time()
    Dl, lc = clear_denominators(_conjugate(Dp, L))
    lhs = _apply(ring, lc, E, in_x=True)
    rhs = _mul_poly(_mul_poly(E, _poly_dict(Dl), True), _poly_dict(_spectral_poly(param, pair.h)), False)
    for key, v in rhs.items():
        _add_into(lhs, key, -v)
    reports.append(IdentityReport("L Psi = h Psi", not lhs, len(lhs), time.time() - t0))

    t0 = time.time()
    G = _g_spectral(pair).with_var("x")
    Dm, mc = clear_denominators(_conjugate(G, Lam))
    lhs = _apply(ring, mc, E, in_x=False)
    rhs = _mul_poly(_mul_poly(E, _poly_dict(Dm), False), _poly_dict(pair.Theta), True)
    for key, v in rhs.items():
        _add_into(lhs, key, -v)
    reports.append(IdentityReport("Lambda Psi = Theta Psi", not lhs, len(lhs), time.time() - t0))

    if raise_on_fail:
        for r in reports:
            if not r.passed:
                raise IdentityFailed("bispectral identity fails", identity=r.name, residual_terms=r.residual_terms)
    return reports


# ---------------------------------------------------------------------------
# wave series (Bessel)

@dataclass
class WaveSeries:
    """Psi_W = e^{xz} sum_k A_k(x) z^{-k}; A_k exact for k <= margin."""

    K: int
    margin: int
    A: List[RatFun]
    lead_exponent: int

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "margin": self.margin,
            "lead_exponent": self.lead_exponent,
            "A": [a.to_str() for a in self.A],
        }


Series = Dict[int, RatFun]


def _series_apply(A: DiffOp, F: Series) -> Series:
    """A(x, d + z) on a z-series {exponent: coefficient in x}."""
    out: Series = {}
    cur = dict(F)
    for k, ck in enumerate(A.c):
        if not ck.is_zero():
            for e, v in cur.items():
                w = v * ck
                out[e] = out[e] + w if e in out else w
        if k + 1 < len(A.c):
            nxt: Series = {}
            for e, v in cur.items():
                dv = v.derivative()
                if not dv.is_zero():
                    nxt[e] = nxt[e] + dv if e in nxt else dv
                nxt[e + 1] = nxt[e + 1] + v if (e + 1) in nxt else v
            cur = {e: v for e, v in nxt.items() if not v.is_zero()}
    return {e: v for e, v in out.items() if not v.is_zero()}


def _master_series(param: BesselParam, K: int) -> Series:
    a = bessel_wave_coeffs(param, K).a
    return {-k: RatFun.x_power(-k, a[k]) for k in range(K + 1) if a[k]}


def wave_series(plane: DarbouxPlane, K: int = 12, depth: int = 8) -> WaveSeries:
    """Normalized coefficients A_k of g(z)^{-1} P Psi_V, exact for k <= K.

    The tail of the master series beyond z^{-K} only reaches exponents below
    n - K after P(x, d + z), and dividing by g (degree n) maps those below
    z^{-K}, so every A_k with k <= K is exact.
    """
    if not isinstance(plane.param, BesselParam):
        raise InvalidParameter("the series path is for Bessel planes")
    if K < depth:
        raise MarginExhausted("truncation too short for the requested depth", K=K, required=depth)
    F = _master_series(plane.param, K)
    R = _series_apply(plane.P, F)
    g = plane.g
    D = g.deg()
    top = max(R) if R else 0
    lead = top - D
    # A(z) = R(z) / g(z) as a series in z^{-1} starting at z^{lead}
    inv_lc = 1 / g.lc()
    A: List[RatFun] = []
    for k in range(K + 1):
        e = top - k
        acc = R.get(e, RatFun.zero())
        for j in range(1, min(k, D) + 1):
            c = g.coeff(D - j)
            if c:
                acc = acc - A[k - j].scale(c)
        A.append(acc.scale(inv_lc))
    return WaveSeries(K, K, A, lead)


@dataclass
class SeriesReport:
    shape: bool
    decay: bool
    eigen: bool
    margin: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.shape and self.decay and self.eigen

    def to_json(self) -> dict:
        return {
            "shape": self.shape,
            "decay": self.decay,
            "eigen": self.eigen,
            "margin": self.margin,
            "passed": self.passed,
            "detail": self.detail,
        }


def check_wave_series(plane: DarbouxPlane, L: DiffOp, h: UniPoly, K: int = 12, depth: int = 8) -> SeriesReport:
    """Shape A_0 = 1 at z^0, decay of A_1..A_depth at x = oo, and L A = h(z^N) A."""
    ws = wave_series(plane, K, depth)
    notes = []
    shape = ws.lead_exponent == 0 and ws.A[0] == RatFun.one()
    if not shape:
        notes.append(f"leading term z^{ws.lead_exponent} * ({ws.A[0].to_str()})")
    decay = True
    for k in range(1, depth + 1):
        a = ws.A[k]
        if not a.is_zero() and a.num.deg() >= a.den.deg():
            decay = False
            notes.append(f"A_{k} does not vanish at infinity")
            break
    series = {ws.lead_exponent - k: a for k, a in enumerate(ws.A) if not a.is_zero()}
    lhs = _series_apply(L, series)
    N = plane.N
    for i, c in enumerate(h.c):
        if c:
            for e, v in series.items():
                key = e + N * i
                w = v.scale(-c)
                lhs[key] = lhs[key] + w if key in lhs else w
    top = ws.lead_exponent + N * h.deg()
    exact_from = top - K
    bad = [e for e, v in lhs.items() if e >= exact_from and not v.is_zero()]
    eigen = not bad
    if bad:
        notes.append(f"eigen residual at z^{max(bad)}")
    return SeriesReport(shape, decay, eigen, ws.margin, "; ".join(notes))


# ---------------------------------------------------------------------------
# rank and full report

def certified_orders(plane: DarbouxPlane, h: UniPoly, max_order: int = 10, method: str = "model") -> List[int]:
    """Orders found by the invariant search plus N deg(h) and N (deg h + 1).

    The last two come from u = h and u = t h, for which P u(L) = (P t^i Q) P
    is checked by exact right division.
    """
    orders = [o for _, o in spectral_algebra(plane, max_order, method)]
    L = base_operator(plane.param)
    t = UniPoly.gen("t")
    for u in (h, h * t):
        if u.deg() < 1:
            continue
        op_exact_right_divide(plane.P * op_of_poly(u, L), plane.P)
        o = plane.N * u.deg()
        if o not in orders:
            orders.append(o)
    return sorted(orders)


@dataclass
class VerificationReport:
    family: str
    identities: List[IdentityReport]
    series: Optional[SeriesReport]
    checks: Dict[str, bool]
    orders: List[int]
    rank: int
    b_orders: List[int]
    b_rank: int
    ab_bas: Optional[bool]
    seconds: float

    @property
    def passed(self) -> bool:
        ok = all(r.passed for r in self.identities) and all(self.checks.values())
        ok = ok and self.rank == self.expected_rank and self.b_rank == self.expected_rank
        if self.series is not None:
            ok = ok and self.series.passed
        if self.ab_bas is not None:
            ok = ok and self.ab_bas
        return ok

    expected_rank: int = 0

    def to_json(self) -> dict:
        return {
            "schema": "verification-report/1",
            "family": self.family,
            "passed": self.passed,
            "identities": [r.to_json() for r in self.identities],
            "series": self.series.to_json() if self.series is not None else None,
            "checks": dict(sorted(self.checks.items())),
            "orders": self.orders,
            "rank": self.rank,
            "b_orders": self.b_orders,
            "b_rank": self.b_rank,
            "expected_rank": self.expected_rank,
            "ab_bas": self.ab_bas,
            "seconds": round(self.seconds, 3),
        }


def verify_pair(pair: BispectralPair, K: int = 12, max_order: int = 10, with_ab_bas: bool = True,
                with_series: bool = True) -> VerificationReport:
    t0 = time.time()
    idents = check_bispectral_symbolic(pair, raise_on_fail=False)
    series = None
    plane = pair.plane
    if pair.family == "bessel" and with_series:
        series = check_wave_series(plane, pair.L, pair.h, K)
        b_series = check_wave_series(pair.b_plane(), pair.Lam, pair.h_b, K)
        if not b_series.passed:
            series = SeriesReport(series.shape and b_series.shape, series.decay and b_series.decay,
                                  series.eigen and b_series.eigen, series.margin, "b-image: " + b_series.detail)
    orders = certified_orders(plane, pair.h, max_order)
    b_orders = certified_orders(pair.b_plane(), pair.h_b, max_order, "operator")
    ab = check_ab_bas(plane) if (with_ab_bas and pair.family == "bessel") else None
    return VerificationReport(
        pair.family, idents, series, pair_checks(pair), orders, rank_of(orders),
        b_orders, rank_of(b_orders), ab, time.time() - t0, expected_rank=pair.N,
    )
