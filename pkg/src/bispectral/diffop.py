"""Ordinary differential operators sum_k c_k(x) d^k with rational coefficients.

Operators are immutable tuples of ``RatFun``.  The Euler operator
D = x d and the D-form  x^{-n} (1/p_n(x^N)) sum_k p_k(x^N) D^k  are
supported through ``to_dform`` / ``from_dform``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import NotZNHomogeneous
from .field import (
    Cyclo,
    Q,
    RatFun,
    UniPoly,
    as_scalar,
    is_rational_scalar,
    poly_gcd,
    poly_lcm,
    qstr,
)


@lru_cache(maxsize=None)
def binom(n: int, k: int) -> int:
    return math.comb(n, k)


@lru_cache(maxsize=None)
def stirling1(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,k) x^k."""
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    return stirling1(n - 1, k - 1) - (n - 1) * stirling1(n - 1, k)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def _as_ratfun(c, var="x") -> RatFun:
    if isinstance(c, RatFun):
        return c
    if isinstance(c, UniPoly):
        return RatFun(c)
    return RatFun.const(as_scalar(c) if not isinstance(c, (str,)) else Q(c), var)


class DiffOp:
    """sum_k c[k] * d^k acting on functions of ``var``."""

    __slots__ = ("c", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        c = [_as_ratfun(x, var) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.c: Tuple[RatFun, ...] = tuple(c)
        self.var = var

    @classmethod
    def _raw(cls, c, var="x") -> "DiffOp":
        c = list(c)
        while c and c[-1].is_zero():
            c.pop()
        obj = object.__new__(cls)
        obj.c = tuple(c)
        obj.var = var
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, var="x") -> "DiffOp":
        return cls._raw((), var)

    @classmethod
    def one(cls, var="x") -> "DiffOp":
        return cls._raw((RatFun.one(var),), var)

    @classmethod
    def d(cls, k: int = 1, var="x") -> "DiffOp":
        return cls._raw([RatFun.zero(var)] * k + [RatFun.one(var)], var)

    @classmethod
    def mult(cls, f, var="x") -> "DiffOp":
        """Multiplication operator by a function of x."""
        return cls._raw((_as_ratfun(f, var),), var)

    @classmethod
    def euler(cls, var="x") -> "DiffOp":
        """D = x d."""
        return cls._raw((RatFun.zero(var), RatFun.x_power(1, 1, var)), var)

    # basic queries ----------------------------------------------------
    @property
    def order(self):
        """Order; the zero operator has order -inf."""
        return len(self.c) - 1 if self.c else -math.inf

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, k: int) -> RatFun:
        return self.c[k] if 0 <= k < len(self.c) else RatFun.zero(self.var)

    def lc(self) -> RatFun:
        return self.c[-1]

    def is_monic(self) -> bool:
        return bool(self.c) and self.c[-1] == 1

    def is_rational(self) -> bool:
        return all(x.is_rational() for x in self.c)

    def rationalize(self) -> "DiffOp":
        return DiffOp._raw([x.rationalize() for x in self.c], self.var)

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.c == other.c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    # ring structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.mult(other, self.var)
        a, b = self.c, other.c
        n = max(len(a), len(b))
        out = []
        for k in range(n):
            if k < len(a) and k < len(b):
                out.append(a[k] + b[k])
            elif k < len(a):
                out.append(a[k])
            else:
                out.append(b[k])
        return DiffOp._raw(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp._raw([-x for x in self.c], self.var)

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.mult(other, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "DiffOp":
        """Left multiplication by a scalar or a function of x."""
        if isinstance(s, (RatFun, UniPoly)):
            f = _as_ratfun(s, self.var)
            return DiffOp._raw([f * x for x in self.c], self.var)
        return DiffOp._raw([x.scale(s) for x in self.c], self.var)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return op_mul(self, other)
        if isinstance(other, (RatFun, UniPoly)):
            return op_mul(self, DiffOp.mult(other, self.var))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int) -> "DiffOp":
        out = DiffOp.one(self.var)
        for _ in range(k):
            out = out * self
        return out

    def d_left(self) -> "DiffOp":
        """d composed with self:  d . A."""
        c = self.c
        out = []
        for k in range(len(c) + 1):
            t = c[k].derivative() if k < len(c) else RatFun.zero(self.var)
            if k >= 1:
                t = t + c[k - 1]
            out.append(t)
        return DiffOp._raw(out, self.var)

    # actions ----------------------------------------------------------
    def apply(self, f: RatFun) -> RatFun:
        """A applied to a rational function."""
        f = _as_ratfun(f, self.var)
        out = RatFun.zero(self.var)
        for ck in self.c:
            if not ck.is_zero():
                out = out + ck * f
            f = f.derivative()
        return out

    def adjoint(self) -> "DiffOp":
        return op_adjoint(self)

    def sign_flip(self) -> "DiffOp":
        """A(x, d) -> A(-x, -d)."""
        return self.scale_x(-1)

    def scale_x(self, s) -> "DiffOp":
        """Substitution x -> s x: c_k(x) d^k -> s^{-k} c_k(s x) d^k."""
        s = as_scalar(s)
        out = []
        inv = 1 / s
        pw = Q(1)
        for ck in self.c:
            out.append(ck.scale_var(s).scale(pw))
            pw = pw * inv
        return DiffOp._raw(out, self.var)

    def map_coeffs(self, fn) -> "DiffOp":
        return DiffOp._raw([fn(x) for x in self.c], self.var)

    def monic(self) -> "DiffOp":
        if not self.c:
            return self
        inv = self.c[-1].inverse()
        return DiffOp._raw([x * inv for x in self.c], self.var)

    def with_var(self, var: str) -> "DiffOp":
        return DiffOp._raw([x.with_var(var) for x in self.c], var)

    # presentation -----------------------------------------------------
    def __repr__(self):
        return f"DiffOp({self.to_str()})"

    def to_str(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for k in range(len(self.c) - 1, -1, -1):
            ck = self.c[k]
            if ck.is_zero():
                continue
            mon = "" if k == 0 else ("d" if k == 1 else f"d^{k}")
            cs = ck.to_str()
            if k and cs == "1":
                parts.append(mon)
            elif k:
                parts.append(f"({cs})*{mon}")
            else:
                parts.append(f"({cs})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "var": self.var,
            "order": len(self.c) - 1 if self.c else None,
            "coeffs": [ratfun_to_json(x) for x in self.c],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiffOp":
        var = obj.get("var", "x")
        return cls._raw([ratfun_from_json(x, var) for x in obj["coeffs"]], var)

    def to_latex(self) -> str:
        return op_to_latex(self)


# ---------------------------------------------------------------------------
# core operations

def op_mul(A: DiffOp, B: DiffOp) -> DiffOp:
    """Composition A . B using d^i b = sum_l C(i,l) b^(l) d^(i-l)."""
    var = A.var
    if A.is_zero() or B.is_zero():
        return DiffOp.zero(var)
    m = len(A.c) - 1
    # derivatives of B's coefficients up to order m
    ders: List[List[RatFun]] = []
    for bj in B.c:
        row = [bj]
        for _ in range(m):
            row.append(row[-1].derivative())
        ders.append(row)
    out = [RatFun.zero(var) for _ in range(len(A.c) + len(B.c) - 1)]
    for i, ai in enumerate(A.c):
        if ai.is_zero():
            continue
        for j in range(len(B.c)):
            for l in range(i + 1):
                bl = ders[j][l]
                if bl.is_zero():
                    continue
                term = ai * bl
                if l:
                    term = term.scale(binom(i, l))
                out[i - l + j] = out[i - l + j] + term
    return DiffOp._raw(out, var)


def op_adjoint(A: DiffOp) -> DiffOp:
    """Formal adjoint sum_k (-d)^k . c_k."""
    var = A.var
    if A.is_zero():
        return A
    out = [RatFun.zero(var) for _ in A.c]
    for k, ck in enumerate(A.c):
        if ck.is_zero():
            continue
        sign = -1 if k % 2 else 1
        der = ck
        for l in range(k + 1):
            if not der.is_zero():
                out[k - l] = out[k - l] + der.scale(sign * binom(k, l))
            der = der.derivative()
    return DiffOp._raw(out, var)


def op_right_divide(A: DiffOp, B: DiffOp) -> Tuple[DiffOp, DiffOp]:
    """A = Q . B + R with ord R < ord B."""
    if B.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    var = A.var
    nb = len(B.c) - 1
    inv_lc = B.c[-1].inverse()
    R = A
    if len(R.c) - 1 < nb:
        return DiffOp.zero(var), R
    top = len(R.c) - 1 - nb
    shifted = [B]
    for _ in range(top):
        shifted.append(shifted[-1].d_left())
    q = [RatFun.zero(var) for _ in range(top + 1)]
    while not R.is_zero() and len(R.c) - 1 >= nb:
        m = len(R.c) - 1 - nb
        t = R.c[-1] * inv_lc
        q[m] = q[m] + t
        sub = shifted[m].scale(t)
        rc = list(R.c)
        for k, sk in enumerate(sub.c):
            rc[k] = rc[k] - sk
        rc[-1] = RatFun.zero(var)
        R = DiffOp._raw(rc, var)
    return DiffOp._raw(q, var), R


def op_left_divide(A: DiffOp, B: DiffOp) -> Tuple[DiffOp, DiffOp]:
    """A = B . Q + R with ord R < ord B (through adjoints)."""
    q, r = op_right_divide(op_adjoint(A), op_adjoint(B))
    return op_adjoint(q), op_adjoint(r)


def op_of_poly(h: UniPoly, L: DiffOp) -> DiffOp:
    """h(L) by Horner composition."""
    var = L.var
    out = DiffOp.zero(var)
    for coef in reversed(h.c):
        out = op_mul(out, L) if not out.is_zero() else out
        if coef:
            out = out + DiffOp.mult(RatFun.const(coef, var), var)
    return out


def op_exact_right_divide(A: DiffOp, B: DiffOp) -> DiffOp:
    q, r = op_right_divide(A, B)
    if not r.is_zero():
        from .errors import NonzeroRemainder

        raise NonzeroRemainder("right division leaves a remainder", order=r.order)
    return q


def op_of_euler_poly(p: UniPoly, var: str = "x") -> DiffOp:
    """p(D) with D = x d, expanded through D^k = sum_j S2(k,j) x^j d^j."""
    out = [RatFun.zero(var) for _ in range(max(len(p.c), 1))]
    for k, pk in enumerate(p.c):
        if not pk:
            continue
        for j in range(k + 1):
            s = stirling2(k, j)
            if s:
                out[j] = out[j] + RatFun.x_power(j, pk * s, var)
    return DiffOp._raw(out, var)


# ---------------------------------------------------------------------------
# D-form

@dataclass(frozen=True)
class DFormOp:
    """x^{-n} (1/den(x^N)) sum_k num[k](x^N) D^k  with gcd(num, den) = 1."""

    n: int
    N: int
    num: Tuple[UniPoly, ...]
    den: UniPoly

    @property
    def order(self) -> int:
        return len(self.num) - 1

    def is_monic_form(self) -> bool:
        return self.num[-1] == self.den


def _euler_coeffs(A: DiffOp) -> List[RatFun]:
    """e_j with A = sum_j e_j(x) D^j, using d^k = x^{-k} sum_j s(k,j) D^j."""
    var = A.var
    out = [RatFun.zero(var) for _ in A.c]
    for k, ck in enumerate(A.c):
        if ck.is_zero():
            continue
        base = ck * RatFun.x_power(-k, 1, var)
        for j in range(k + 1):
            s = stirling1(k, j)
            if s:
                out[j] = out[j] + base.scale(s)
    return out


def _in_x_to_N(f: RatFun, N: int) -> bool:
    for p in (f.num, f.den):
        for i, x in enumerate(p.c):
            if x and i % N:
                return False
    return True


def to_dform(A: DiffOp, N: int) -> DFormOp:
    """Rewrite A as x^{-n} (1/p_n(x^N)) sum_k p_k(x^N) D^k."""
    if A.is_zero():
        raise ValueError("zero operator has no D-form")
    e = _euler_coeffs(A)
    order = len(e) - 1
    shift = None
    for s in range(N):
        n = order + s
        xn = RatFun.x_power(n, 1, A.var)
        if all(_in_x_to_N(ej * xn, N) for ej in e):
            shift = n
            break
    if shift is None:
        raise NotZNHomogeneous("operator mixes x-powers not congruent mod N", N=N)
    xn = RatFun.x_power(shift, 1, A.var)
    r = [ej * xn for ej in e]
    nums = [x.num.contract_power(N).with_var("t") for x in r]
    dens = [x.den.contract_power(N).with_var("t") for x in r]
    common = dens[0]
    for d in dens[1:]:
        common = poly_lcm(common, d)
    polys = [nums[k] * common.exact_div(dens[k]) for k in range(len(r))]
    # common is monic and coprime to the gcd of the numerators' content
    g = None
    for p in polys:
        if p:
            g = p if g is None else poly_gcd(g, p)
    g = poly_gcd(g, common)
    if g.deg() > 0:
        polys = [p.exact_div(g) for p in polys]
        common = common.exact_div(g)
    return DFormOp(n=shift, N=N, num=tuple(polys), den=common)


def from_dform(F: DFormOp, var: str = "x") -> DiffOp:
    out = DiffOp.zero(var)
    inv = RatFun(UniPoly.const(1, var), F.den.with_var(var).subs_power(F.N))
    pre = inv * RatFun.x_power(-F.n, 1, var)
    for k, pk in enumerate(F.num):
        if not pk:
            continue
        coef = pre * RatFun(pk.with_var(var).subs_power(F.N))
        ek = op_of_euler_poly(UniPoly.monomial(k, 1, var), var)
        out = out + DiffOp.mult(coef, var) * ek
    return out


# ---------------------------------------------------------------------------
# serialization

def scalar_to_json(v):
    v = as_scalar(v)
    if isinstance(v, Cyclo):
        return {"zeta": v.N, "c": [qstr(x) for x in v.c]}
    return qstr(v)


def scalar_from_json(obj):
    if isinstance(obj, dict):
        return as_scalar(Cyclo(int(obj["zeta"]), [Q(x) for x in obj["c"]]))
    return Q(obj)


def poly_to_json(p: UniPoly) -> list:
    return [scalar_to_json(x) for x in p.c]


def poly_from_json(obj: list, var: str = "x") -> UniPoly:
    return UniPoly([scalar_from_json(x) for x in obj], var)


def ratfun_to_json(f: RatFun) -> list:
    return [poly_to_json(f.num), poly_to_json(f.den)]


def ratfun_from_json(obj, var: str = "x") -> RatFun:
    return RatFun(poly_from_json(obj[0], var), poly_from_json(obj[1], var))


# ---------------------------------------------------------------------------
# LaTeX

def _scalar_latex(v) -> str:
    v = as_scalar(v)
    if isinstance(v, Cyclo):
        return "(" + repr(v) + ")"
    if v.denominator == 1:
        return str(int(v.numerator))
    sign = "-" if v < 0 else ""
    return f"{sign}\\frac{{{abs(int(v.numerator))}}}{{{int(v.denominator)}}}"


def poly_to_latex(p: UniPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.deg(), -1, -1):
        x = p.c[i]
        if not x:
            continue
        mon = "" if i == 0 else (p.var if i == 1 else f"{p.var}^{{{i}}}")
        s = _scalar_latex(x)
        if mon and s == "1":
            s = ""
        elif mon and s == "-1":
            s = "-"
        parts.append(s + mon if mon else s)
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


def ratfun_to_latex(f: RatFun) -> str:
    if f.is_poly():
        return poly_to_latex(f.num)
    return f"\\frac{{{poly_to_latex(f.num)}}}{{{poly_to_latex(f.den)}}}"


def op_to_latex(A: DiffOp) -> str:
    if A.is_zero():
        return "0"
    parts = []
    for k in range(len(A.c) - 1, -1, -1):
        ck = A.c[k]
        if ck.is_zero():
            continue
        mon = "" if k == 0 else (f"\\partial_{A.var}" if k == 1 else f"\\partial_{A.var}^{{{k}}}")
        cs = ratfun_to_latex(ck)
        if mon and cs == "1":
            parts.append(mon)
        elif mon and not ck.is_poly():
            parts.append(cs + mon)
        elif mon:
            parts.append(f"\\left({cs}\\right){mon}" if len(ck.num.c) > 1 else cs + mon)
        else:
            parts.append(cs)
    return " + ".join(parts).replace("+ -", "- ")
