"""Built-in example planes with small rational default parameters.

Each entry builds a ConditionSet from a parameter dict; unspecified
parameters take the defaults listed in ``EXAMPLES[name].defaults``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List

from gmpy2 import mpq

from .airy import AiryParam
from .bessel import BesselParam
from .errors import InvalidParameter
from .field import Q
from .kernelspace import ConditionSet, PointSupport, ZeroSupport, ZeroTerm


def phi_scales(param: BesselParam, d: int) -> Dict[tuple, object]:
    """mu_kj with Phi_kj = mu_kj x^{beta_k + (j-1)N} and L_beta Phi_kj = Phi_{k,j-1}."""
    N = param.N
    P = param.char_poly()
    out = {}
    for k in range(1, N + 1):
        mu = mpq(1)
        out[(k, 1)] = mu
        for j in range(2, d + 1):
            val = P(param.beta[k - 1] + (j - 1) * N)
            if not val:
                raise InvalidParameter("Phi basis needs P_beta nonzero on the ladder", k=k, j=j)
            mu = mu / val
            out[(k, j)] = mu
    return out


def phi_condition(param: BesselParam, d: int, coeffs: Dict[int, object]) -> ZeroSupport:
    """sum c_m Phi_m with m = (k-1)d + j (1-based), as a zero condition."""
    mu = phi_scales(param, d)
    terms = []
    for m, c in sorted(coeffs.items()):
        c = Q(c)
        if not c:
            continue
        k, j = divmod(m - 1, d)
        k, j = k + 1, j + 1
        terms.append(ZeroTerm(k, j - 1, 0, c * mu[(k, j)]))
    return ZeroSupport(tuple(terms))


def _beta(p: Dict, default) -> tuple:
    raw = p.get("beta")
    if raw is None:
        return tuple(Q(b) for b in default)
    if isinstance(raw, str):
        raw = [x for x in raw.replace(";", ",").split(",") if x.strip()]
    return tuple(Q(b) for b in raw)


def _ex_92(p):
    param = BesselParam(2, _beta(p, ("5/2", "-3/2")))
    t0, t1, s0, s1 = (Q(p[k]) for k in ("t0", "t1", "s0", "s1"))
    f0 = phi_condition(param, 2, {1: t0, 3: s0})
    f1 = phi_condition(param, 2, {1: t1, 2: t0, 3: s1, 4: s0})
    return ConditionSet(param, (f0, f1))


def _ex_93(p):
    param = BesselParam(2, _beta(p, ("1/3", "2/3")))
    a, b = Q(p["a"]), Q(p["b"])
    f0 = phi_condition(param, 2, {1: 1, 2: a})
    f1 = phi_condition(param, 2, {3: 1, 4: b})
    return ConditionSet(param, (f0, f1))


def _ex_94(p):
    param = BesselParam(2, _beta(p, ("9/2", "-7/2")))
    a, b, lam = Q(p["a"]), Q(p["b"]), Q(p["lambda"])
    f0 = phi_condition(param, 4, {1: lam, 5: lam * a + b, 6: lam * b})
    f1 = phi_condition(param, 4, {3: 1, 7: a, 8: b})
    return ConditionSet(param, (f0, f1))


def _ex_95(p):
    param = BesselParam(2, _beta(p, ("-1/2", "3/2")))
    t = Q(p["t"])
    return ConditionSet(param, (ZeroSupport((ZeroTerm(1, 0, 0, t), ZeroTerm(2, 0, 0, 1))),))


def _ex_98(p):
    nu = Q(p["nu"])
    param = BesselParam(2, (1 - nu, nu))
    return ConditionSet(param, (PointSupport(Q(p["lambda"]), (1, Q(p["a"])), "euler"),))


def _ex_e2(p):
    N = int(p["N"])
    default = {2: ("2/3", "1/3"), 3: ("-1/3", "1", "7/3")}.get(N)
    if default is None and p.get("beta") is None:
        raise InvalidParameter("give beta for this N", N=N)
    param = BesselParam(N, _beta(p, default))
    return ConditionSet(param, (PointSupport(Q(p["lambda"]), (1, Q(p["a"])), "euler"),))


def _ex_99(p):
    param = AiryParam(2, Q(p["alpha0"]))
    return ConditionSet(param, (PointSupport(Q(p["lambda"]), (1, Q(p["a"]))),))


def _ex_910(p):
    param = AiryParam(3, Q(p["alpha0"]), (Q(p["alpha2"]),))
    return ConditionSet(param, (PointSupport(Q(p["lambda"]), (1, Q(p["a"]))),))


def _ex_log(p):
    param = BesselParam(3, _beta(p, ("1", "1", "1")))
    terms = (
        ZeroTerm(1, 0, 0, Q(p["a0"])),
        ZeroTerm(1, 0, 1, Q(p["a1"])),
        ZeroTerm(1, 1, 2, Q(p["a2"])),
    )
    return ConditionSet(param, (ZeroSupport(terms),))


def _ex_n1(p):
    param = BesselParam(1, _beta(p, ("0",)))
    terms = (ZeroTerm(1, 0, 0, Q(p["a"])), ZeroTerm(1, 2, 0, 1))
    return ConditionSet(param, (ZeroSupport(terms),))


def _ex_empty(p):
    return ConditionSet(BesselParam(2, _beta(p, ("0", "1"))), ())


@dataclass
class Example:
    name: str
    title: str
    build: Callable[[Dict], ConditionSet]
    defaults: Dict[str, str] = field(default_factory=dict)

    def conditions(self, **overrides) -> ConditionSet:
        params = dict(self.defaults)
        for k, v in overrides.items():
            if v is None:
                continue
            if k not in params and k != "beta":
                raise InvalidParameter(f"example {self.name} has no parameter {k!r}")
            params[k] = v
        return self.build(params)


EXAMPLES: Dict[str, Example] = {
    e.name: e
    for e in [
        Example("9.2", "Bessel N=2, L-invariant block kernel (d = n = 2)", _ex_92,
                {"t0": "1", "t1": "2", "s0": "3", "s1": "-1"}),
        Example("9.3", "Bessel N=2, commuting orders 4, 6, 8, 10", _ex_93, {"a": "1", "b": "1"}),
        Example("9.4", "Bessel N=2, invariant under L^3 + lambda L^2", _ex_94,
                {"a": "1", "b": "2", "lambda": "3"}),
        Example("9.5", "Bessel N=2, one zero condition t x^b1 + x^b2", _ex_95, {"t": "2"}),
        Example("9.8", "Bessel N=2 one-point plane, Euler form (1 + a D)", _ex_98,
                {"nu": "1/3", "a": "2", "lambda": "1"}),
        Example("e2", "Bessel one-point plane for general N", _ex_e2,
                {"N": "3", "a": "2", "lambda": "1"}),
        Example("9.9", "Airy N=2 one-point plane (1 + a d)", _ex_99,
                {"alpha0": "1", "a": "1", "lambda": "0"}),
        Example("9.10", "Airy N=3 one-point plane (1 + a d)", _ex_910,
                {"alpha0": "1", "alpha2": "1", "a": "1", "lambda": "1"}),
        Example("log", "Bessel N=3 with a triple exponent and log terms", _ex_log,
                {"a0": "1", "a1": "1", "a2": "1"}),
        Example("n1", "Bessel N=1 (L = d), kernel a + x^2", _ex_n1, {"a": "3"}),
        Example("empty", "identity plane", _ex_empty, {}),
    ]
}


def example_conditions(name: str, **params) -> ConditionSet:
    if name not in EXAMPLES:
        raise InvalidParameter("unknown example", example=name, known=sorted(EXAMPLES))
    return EXAMPLES[name].conditions(**params)


def shipped_examples() -> List[str]:
    return [n for n in EXAMPLES if n != "empty"]
