"""Generalized Airy operators  L_alpha = d^N - alpha_0 x + sum_i alpha_i d^{N-i}.

The wave function is Phi(y) with y = alpha_0^{-1} z^N + x, where
P_{alpha'}(d_y) Phi = alpha_0 y Phi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from gmpy2 import mpq

from .diffop import DiffOp, binom
from .errors import InvalidParameter
from .field import Q, RatFun, UniPoly, qstr


@dataclass(frozen=True)
class AiryParam:
    N: int
    alpha0: object
    alphas: Tuple = ()  # alpha_2 .. alpha_{N-1}

    def __post_init__(self):
        if self.N < 2:
            raise InvalidParameter("Airy operators need N >= 2", N=self.N)
        a0 = Q(self.alpha0)
        if a0 == 0:
            raise InvalidParameter("alpha_0 must be nonzero")
        rest = tuple(Q(a) for a in self.alphas)
        if not rest:
            rest = (mpq(0),) * (self.N - 2)
        if len(rest) != self.N - 2:
            raise InvalidParameter("need N-2 entries alpha_2..alpha_{N-1}", N=self.N)
        object.__setattr__(self, "alpha0", a0)
        object.__setattr__(self, "alphas", rest)

    def alpha(self, i: int):
        """alpha_i for 2 <= i <= N-1 (zero outside)."""
        if 2 <= i <= self.N - 1:
            return self.alphas[i - 2]
        return mpq(0)

    def char_poly(self, var: str = "t") -> UniPoly:
        """P_{alpha'}(t) = t^N + sum_i alpha_i t^{N-i}."""
        c = [mpq(0)] * (self.N + 1)
        c[self.N] = mpq(1)
        for i in range(2, self.N):
            c[self.N - i] = self.alpha(i)
        return UniPoly(c, var)

    def to_json(self) -> dict:
        return {"N": self.N, "alpha0": qstr(self.alpha0), "alphas": [qstr(a) for a in self.alphas]}


def airy_op(p: AiryParam, var: str = "x") -> DiffOp:
    c = [RatFun.const(x, var) for x in p.char_poly(var).c]
    c[0] = c[0] + RatFun.x_power(1, -p.alpha0, var)
    return DiffOp(c, var)


def airy_reduce_rule(p: AiryParam) -> Dict[int, UniPoly]:
    """d_y^N Phi = sum_m r[m](y) d_y^m Phi with m < N."""
    out = {m: UniPoly((), "y") for m in range(p.N)}
    out[0] = UniPoly([0, p.alpha0], "y")
    for i in range(2, p.N):
        a = p.alpha(i)
        if a:
            out[p.N - i] = out[p.N - i] + UniPoly.const(-a, "y")
    return out


def airy_normal_form(p: AiryParam, k: int) -> List[UniPoly]:
    """d_y^k Phi written as sum_{m<N} c_m(y) d_y^m Phi."""
    rule = airy_reduce_rule(p)
    cur = [UniPoly((), "y") for _ in range(p.N)]
    if k < p.N:
        cur[k] = UniPoly.const(1, "y")
        return cur
    cur = [rule[m] for m in range(p.N)]
    for _ in range(k - p.N):
        nxt = [c.derivative() for c in cur]
        top = cur[p.N - 1]
        for m in range(p.N - 1):
            nxt[m + 1] = nxt[m + 1] + cur[m]
        for m in range(p.N):
            nxt[m] = nxt[m] + top * rule[m]
        cur = nxt
    return cur


def airy_involutions(p: AiryParam) -> Tuple[AiryParam, AiryParam]:
    """(s(alpha), a(alpha)); alpha_i picks up (-1)^i in both."""
    rest = tuple(((-1) ** i) * p.alpha(i) for i in range(2, p.N))
    s = AiryParam(p.N, (-1) ** (p.N + 1) * p.alpha0, rest)
    a = AiryParam(p.N, (-1) ** p.N * p.alpha0, rest)
    return s, a


def airy_star1(Qop: DiffOp, N: int) -> DiffOp:
    """sum_k (d + ((1-N)/N) x^{-1})^k (-1)^{(N-1)k} q_k((-1)^N x)."""
    var = Qop.var
    shifted = DiffOp([RatFun.x_power(-1, mpq(1 - N, N), var), 1], var)
    out = DiffOp.zero(var)
    power = DiffOp.one(var)
    for k, qk in enumerate(Qop.c):
        if k:
            power = power * shifted
        if qk.is_zero():
            continue
        coef = qk.scale_var((-1) ** N).scale((-1) ** ((N - 1) * k))
        out = out + power * coef
    return out
