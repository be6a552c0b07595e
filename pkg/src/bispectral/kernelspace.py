"""Kernel conditions, symbolic kernel functions and the operator P.

A plane is described by conditions of two kinds:

* zero support: groups  d_y^l ( sum b x^{beta_i + kN} y^j ) at y = ln x,
* point support at lambda != 0: the N sheet functions
  sum_k a_k eps^{ki} d_z^k Psi(x, z) at z = eps^i lambda
  (or sum_k a_k D_z^k Psi with the Euler form; for Airy planes the
  coefficients multiply d_x^k Psi).

The monic operator P with ker P spanned by these functions is obtained from
the linear system P f = 0.  Point functions are handled through an operator M
with f_i = M Psi_i, where Psi_i runs over a basis of ker(L_V - lambda^N); the
rows of the system are then the remainders of d^k M modulo L_V - lambda^N,
which are rational and the same for every sheet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .airy import AiryParam, airy_normal_form, airy_op
from .bessel import BesselParam, bessel_op
from .diffop import (
    DiffOp,
    op_of_euler_poly,
    op_right_divide,
    scalar_from_json,
    scalar_to_json,
    stirling1,
    stirling2,
)
from .errors import (
    DependentKernel,
    InvalidParameter,
    NotZNHomogeneous,
    RationalizationFailure,
)
from .field import Cyclo, Q, RatFun, UniPoly, as_scalar, qstr
from .linalg import rref, solve_augmented

Param = Union[BesselParam, AiryParam]


# ---------------------------------------------------------------------------
# conditions

@dataclass(frozen=True)
class ZeroTerm:
    i: int  # 1-based index into beta
    k: int
    j: int
    b: object

    def __post_init__(self):
        object.__setattr__(self, "b", Q(self.b))


@dataclass(frozen=True)
class ZeroSupport:
    terms: Tuple[ZeroTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class PointSupport:
    lam: object
    coeffs: Tuple
    form: str = "partial"  # "partial" (d_z^k) or "euler" (D_z^k); Airy uses d_x^k

    def __post_init__(self):
        object.__setattr__(self, "lam", Q(self.lam))
        object.__setattr__(self, "coeffs", tuple(Q(a) for a in self.coeffs))
        if self.form not in ("partial", "euler"):
            raise InvalidParameter("point form must be 'partial' or 'euler'", form=self.form)
        if not any(self.coeffs):
            raise InvalidParameter("point condition needs a nonzero coefficient")

    @property
    def k0(self) -> int:
        return max(k for k, a in enumerate(self.coeffs) if a)


Condition = Union[ZeroSupport, PointSupport]


def family_of(param: Param) -> str:
    return "bessel" if isinstance(param, BesselParam) else "airy"


def zero_mult(param: BesselParam, e) -> List[int]:
    """Sorted p_s with e = beta_{i_s} + p_s N, p_s >= 0."""
    out = []
    for b in param.beta:
        d = (e - b) / param.N
        if d.denominator == 1 and d >= 0:
            out.append(int(d))
    return sorted(out)


@dataclass(frozen=True)
class ConditionSet:
    param: Param
    conditions: Tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        for c in self.conditions:
            if isinstance(c, ZeroSupport):
                self._check_zero(c)
            elif isinstance(c, PointSupport):
                if self.family == "bessel" and c.lam == 0:
                    raise InvalidParameter("Bessel point conditions need lambda != 0")
                if self.family == "airy" and c.form != "partial":
                    raise InvalidParameter("Airy point conditions use d_x coefficients")
            else:
                raise InvalidParameter(f"unknown condition {c!r}")

    def _check_zero(self, c: ZeroSupport):
        if self.family != "bessel":
            raise InvalidParameter("zero-supported conditions are Bessel-only")
        if not c.terms or not any(t.b for t in c.terms):
            raise InvalidParameter("zero condition needs a nonzero term")
        p = self.param
        exps = set()
        for t in c.terms:
            if not 1 <= t.i <= p.N or t.k < 0 or t.j < 0:
                raise InvalidParameter("zero term index out of range", i=t.i, k=t.k, j=t.j)
            e = p.beta[t.i - 1] + t.k * p.N
            if t.j > len(zero_mult(p, e)) - 1:
                raise InvalidParameter(
                    "log power exceeds multiplicity", exponent=qstr(e), j=t.j
                )
            exps.add(e)
        base = min(exps)
        for e in exps:
            d = (e - base) / p.N
            if d.denominator != 1:
                raise NotZNHomogeneous(
                    "zero condition mixes exponents not congruent mod N",
                    exponents=[qstr(x) for x in sorted(exps)],
                )

    @property
    def family(self) -> str:
        return family_of(self.param)

    @property
    def N(self) -> int:
        return self.param.N

    def zero_conditions(self) -> List[ZeroSupport]:
        return [c for c in self.conditions if isinstance(c, ZeroSupport)]

    def point_conditions(self) -> List[PointSupport]:
        return [c for c in self.conditions if isinstance(c, PointSupport)]

    @property
    def n0(self) -> int:
        return sum(zero_group(self.param, c)[2] + 1 for c in self.zero_conditions())

    def point_groups(self) -> List[Tuple[object, List[PointSupport]]]:
        """Point conditions grouped by lambda^N, in order of appearance."""
        groups: List[Tuple[object, List[PointSupport]]] = []
        for c in self.point_conditions():
            key = c.lam ** self.N
            for g in groups:
                if g[0] == key:
                    g[1].append(c)
                    break
            else:
                groups.append((key, [c]))
        return groups

    @property
    def order(self) -> int:
        return self.n0 + self.N * len(self.point_conditions())

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        out = {"family": self.family, "N": self.N}
        if self.family == "bessel":
            out["beta"] = [qstr(b) for b in self.param.beta]
        else:
            out["alpha0"] = qstr(self.param.alpha0)
            out["alphas"] = [qstr(a) for a in self.param.alphas]
        conds = []
        for c in self.conditions:
            if isinstance(c, ZeroSupport):
                conds.append(
                    {
                        "support": "zero",
                        "terms": [
                            {"i": t.i, "k": t.k, "j": t.j, "b": qstr(t.b)} for t in c.terms
                        ],
                    }
                )
            else:
                d = {"support": "point", "lambda": qstr(c.lam), "coeffs": [qstr(a) for a in c.coeffs]}
                if c.form != "partial":
                    d["form"] = c.form
                conds.append(d)
        out["conditions"] = conds
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConditionSet":
        _strict(obj, {"family", "N", "beta", "alpha0", "alphas", "conditions", "schema"}, "spec")
        fam = obj.get("family", "bessel")
        if fam == "bessel":
            beta = [Q(b) for b in obj["beta"]]
            N = int(obj.get("N", len(beta)))
            param: Param = BesselParam(N, tuple(beta))
        elif fam == "airy":
            param = AiryParam(int(obj["N"]), Q(obj["alpha0"]), tuple(Q(a) for a in obj.get("alphas", [])))
        else:
            raise InvalidParameter("unknown family", family=fam)
        conds: List[Condition] = []
        for c in obj.get("conditions", []):
            sup = c.get("support")
            if sup == "zero":
                _strict(c, {"support", "terms"}, "zero condition")
                terms = []
                for t in c["terms"]:
                    _strict(t, {"i", "k", "j", "b"}, "zero term")
                    terms.append(ZeroTerm(int(t["i"]), int(t.get("k", 0)), int(t.get("j", 0)), Q(t.get("b", "1"))))
                conds.append(ZeroSupport(tuple(terms)))
            elif sup == "point":
                _strict(c, {"support", "lambda", "coeffs", "form"}, "point condition")
                conds.append(PointSupport(Q(c["lambda"]), tuple(Q(a) for a in c["coeffs"]), c.get("form", "partial")))
            else:
                raise InvalidParameter("unknown support kind", support=sup)
        return cls(param, tuple(conds))


def _strict(obj: dict, allowed: set, what: str):
    if not isinstance(obj, dict):
        raise InvalidParameter(f"{what} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise InvalidParameter(f"unknown field(s) in {what}: {sorted(extra)}")


# ---------------------------------------------------------------------------
# zero-support data

def zero_group(param: BesselParam, c: ZeroSupport):
    """(base exponent e0, {l: r_l}, j0) with G = x^{e0} sum_l r_l(x) L^l."""
    exps = [param.beta[t.i - 1] + t.k * param.N for t in c.terms]
    e0 = min(e for e, t in zip(exps, c.terms) if t.b)
    r: Dict[int, RatFun] = {}
    for e, t in zip(exps, c.terms):
        if not t.b:
            continue
        mono = RatFun.x_power(int(e - e0), t.b)
        r[t.j] = r[t.j] + mono if t.j in r else mono
    r = {l: v for l, v in r.items() if not v.is_zero()}
    j0 = max(r) if r else 0
    return e0, r, j0


def _zero_derivative(e0, r: Dict[int, RatFun]) -> Dict[int, RatFun]:
    """x^{-e0} d/dx of x^{e0} sum_l r_l L^l, as {l: coefficient}."""
    inv_x = RatFun.x_power(-1)
    out: Dict[int, RatFun] = {}
    for l, rl in r.items():
        t = rl.derivative() + (rl * inv_x).scale(e0)
        out[l] = out[l] + t if l in out else t
        if l:
            u = (rl * inv_x).scale(l)
            out[l - 1] = out[l - 1] + u if (l - 1) in out else u
    return {l: v for l, v in out.items() if not v.is_zero()}


def _zero_rows(param: BesselParam, c: ZeroSupport, n: int) -> List[List[RatFun]]:
    e0, r, j0 = zero_group(param, c)
    ders = [r]
    for _ in range(n):
        ders.append(_zero_derivative(e0, ders[-1]))
    zero = RatFun.zero()
    return [[d.get(l, zero) for d in ders] for l in range(j0 + 1)]


# ---------------------------------------------------------------------------
# point-support data

def base_operator(param: Param) -> DiffOp:
    return bessel_op(param) if isinstance(param, BesselParam) else airy_op(param)


def point_operator(param: Param, c: PointSupport) -> DiffOp:
    """M with sheet functions f_i = M Psi(x, eps^i lambda)."""
    if isinstance(param, AiryParam):
        return DiffOp([RatFun.const(a) for a in c.coeffs])
    if c.form == "euler":
        return op_of_euler_poly(UniPoly(c.coeffs))
    # d_z^k Psi(x, z) = (x/z)^k d_x^k Psi(x, z); the eps factors cancel
    out = []
    inv = 1 / c.lam
    for k, a in enumerate(c.coeffs):
        out.append(RatFun.x_power(k, a * inv ** k))
    return DiffOp(out)


def _point_rows(param: Param, c: PointSupport, n: int) -> List[List[RatFun]]:
    T = base_operator(param) - DiffOp.mult(RatFun.const(c.lam ** param.N))
    R = op_right_divide(point_operator(param, c), T)[1]
    ders = [R]
    for _ in range(n):
        ders.append(op_right_divide(ders[-1].d_left(), T)[1])
    return [[d.coeff(m) for d in ders] for m in range(param.N)]


# ---------------------------------------------------------------------------
# the operator P

@dataclass
class Certificate:
    order: int
    equations: int
    rank: int
    det: Optional[RatFun]
    rational: bool
    method: str

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "equations": self.equations,
            "rank": self.rank,
            "det": self.det.to_str() if self.det is not None else None,
            "rational": self.rational,
            "method": self.method,
        }


def _solve_monic(rows: List[List[RatFun]], n: int, method: str) -> Tuple[DiffOp, Certificate]:
    """Solve sum_{k<n} c_k row[k] = -row[n] and return d^n + sum c_k d^k."""
    if n == 0:
        return DiffOp.one(), Certificate(0, 0, 0, None, True, method)
    aug = [r[:n] + [-r[n]] for r in rows]
    sol, rk, ok = solve_augmented(aug, n)
    if rk < n:
        raise DependentKernel("kernel functions are linearly dependent", rank=rk, order=n)
    if not ok:
        raise RationalizationFailure(
            "kernel is not the kernel of an operator with these coefficients "
            "(input not closed under rotation)",
            order=n,
        )
    P = DiffOp(list(sol) + [RatFun.one()])
    rational = P.is_rational()
    if not rational:
        raise RationalizationFailure("coefficients of P are not rational")
    P = P.rationalize()
    d = None
    if len(rows) == n:
        from .linalg import det

        d = det([r[:n] for r in rows])
    return P, Certificate(n, len(rows), rk, d, rational, method)


def plane_operator(cs: ConditionSet) -> Tuple[DiffOp, Certificate]:
    """Monic P with the prescribed kernel (exact, rational)."""
    n = cs.order
    rows: List[List[RatFun]] = []
    for c in cs.conditions:
        if isinstance(c, ZeroSupport):
            rows.extend(_zero_rows(cs.param, c, n))
        else:
            rows.extend(_point_rows(cs.param, c, n))
    return _solve_monic(rows, n, "reduced-rows")


# ---------------------------------------------------------------------------
# symbolic kernel functions

@dataclass(frozen=True)
class PowerLog:
    """x^e ln^l x with 0 <= e < 1 (integer shifts live in the coefficient)."""

    e: object
    l: int


@dataclass(frozen=True)
class PsiSym:
    """Bessel: Phi^{(m)}(w) at w = eps^sheet * lam * x.
    Airy: the branch ``sheet`` of Phi^{(m)}(y), y = x + alpha_0^{-1} lam^N."""

    lam: object
    sheet: int
    m: int


class KernelFn:
    """Finite sum of symbols with rational (possibly cyclotomic) coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict = None):
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    def __add__(self, other: "KernelFn") -> "KernelFn":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return KernelFn(out)

    def scale(self, f) -> "KernelFn":
        if isinstance(f, RatFun):
            return KernelFn({k: v * f for k, v in self.terms.items()})
        return KernelFn({k: v.scale(f) for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return "KernelFn(" + ", ".join(f"{k}: {v.to_str()}" for k, v in self.terms.items()) + ")"


def power_log(e, l: int, coeff=1) -> KernelFn:
    e = Q(e)
    base = e - (e.numerator // e.denominator)
    shift = int(e - base)
    return KernelFn({PowerLog(base, l): RatFun.x_power(shift, Q(coeff))})


class KernelContext:
    """Differentiation rules for kernel functions over a base plane."""

    def __init__(self, param: Param):
        self.param = param
        self.N = param.N
        if isinstance(param, BesselParam):
            # P_beta(D_w) = sum_l c_l w^l d_w^l with c_N = 1
            P = param.char_poly()
            self._c = [
                sum((P.coeff(j) * stirling2(j, l) for j in range(l, self.N + 1)), mpq(0))
                for l in range(self.N + 1)
            ]
        self._cache: Dict = {}

    def _sheet_scale(self, sym: PsiSym):
        return Cyclo.zeta(self.N, sym.sheet) * sym.lam

    def derivative(self, f: KernelFn) -> KernelFn:
        out = KernelFn()
        for sym, c in f.terms.items():
            out = out + self._d_term(sym, c)
        return out

    def _d_term(self, sym, c: RatFun) -> KernelFn:
        if isinstance(sym, PowerLog):
            # (c x^e L^l)' = (c' + e c / x) x^e L^l + l c / x x^e L^{l-1}
            inv_x = RatFun.x_power(-1)
            terms = {sym: c.derivative() + (c * inv_x).scale(sym.e)}
            if sym.l:
                terms[PowerLog(sym.e, sym.l - 1)] = (c * inv_x).scale(sym.l)
            return KernelFn(terms)
        terms = {sym: c.derivative()}
        up = self._raise(sym)
        return KernelFn(terms) + up.scale(c)

    def _raise(self, sym: PsiSym) -> KernelFn:
        """d/dx of the symbol itself."""
        key = ("raise", sym)
        if key in self._cache:
            return self._cache[key]
        N = self.N
        if isinstance(self.param, BesselParam):
            s = as_scalar(self._sheet_scale(sym))
            if sym.m + 1 < N:
                out = KernelFn({PsiSym(sym.lam, sym.sheet, sym.m + 1): RatFun.const(s)})
            else:
                # Phi^{(N)}(w) = Phi - sum_{l<N} c_l w^{l-N} Phi^{(l)},  w = s x
                terms = {PsiSym(sym.lam, sym.sheet, 0): RatFun.const(s)}
                for l in range(N):
                    if self._c[l]:
                        coef = RatFun.x_power(l - N, -self._c[l] * s ** (l - N) * s)
                        k = PsiSym(sym.lam, sym.sheet, l)
                        terms[k] = terms[k] + coef if k in terms else coef
                out = KernelFn(terms)
        else:
            if sym.m + 1 < N:
                out = KernelFn({PsiSym(sym.lam, sym.sheet, sym.m + 1): RatFun.one()})
            else:
                y = RatFun(UniPoly([sym.lam ** N / self.param.alpha0, 1]))
                nf = airy_normal_form(self.param, N)
                out = KernelFn(
                    {PsiSym(sym.lam, sym.sheet, l): RatFun(nf[l].with_var("x")).compose_poly(y.num)
                     for l in range(N) if nf[l]}
                )
        self._cache[key] = out
        return out

    def apply(self, P: DiffOp, f: KernelFn) -> KernelFn:
        out = KernelFn()
        cur = f
        for k, ck in enumerate(P.c):
            if not ck.is_zero():
                out = out + cur.scale(ck)
            if k + 1 < len(P.c):
                cur = self.derivative(cur)
        return out


def _bessel_w_normal_form(param: BesselParam, k: int, euler: bool) -> List[RatFun]:
    """d_w^k Phi (or D_w^k Phi) as sum_{l<N} c_l(w) Phi^{(l)}(w)."""
    ctx = KernelContext(param)
    N = param.N
    sym0 = PsiSym(mpq(1), 0, 0)
    if euler:
        f = KernelFn()
        for l in range(k + 1):
            s = stirling2(k, l)
            if s:
                g = KernelFn({sym0: RatFun.one("x")})
                for _ in range(l):
                    g = ctx.derivative(g)
                f = f + g.scale(RatFun.x_power(l, s))
    else:
        f = KernelFn({sym0: RatFun.one()})
        for _ in range(k):
            f = ctx.derivative(f)
    return [f.terms.get(PsiSym(mpq(1), 0, l), RatFun.zero()) for l in range(N)]


def materialize_kernel(cs: ConditionSet) -> List[KernelFn]:
    """Symbolic basis of ker P, sheet by sheet."""
    out: List[KernelFn] = []
    param = cs.param
    N = cs.N
    for c in cs.conditions:
        if isinstance(c, ZeroSupport):
            j0 = max(t.j for t in c.terms if t.b)
            for l in range(j0 + 1):
                f = KernelFn()
                for t in c.terms:
                    if t.b and t.j >= l:
                        e = param.beta[t.i - 1] + t.k * N
                        coef = t.b * (factorial(t.j) // factorial(t.j - l))
                        f = f + power_log(e, t.j - l, coef)
                out.append(f)
        elif isinstance(param, AiryParam):
            for sheet in range(N):
                f = KernelFn()
                for k, a in enumerate(c.coeffs):
                    if not a:
                        continue
                    nf = airy_normal_form(param, k)
                    y = UniPoly([c.lam ** N / param.alpha0, 1])
                    f = f + KernelFn(
                        {PsiSym(c.lam, sheet, l): RatFun(nf[l].with_var("x").compose(y)).scale(a)
                         for l in range(N) if nf[l]}
                    )
                out.append(f)
        else:
            euler = c.form == "euler"
            for sheet in range(N):
                s = Cyclo.zeta(N, sheet) * c.lam
                f = KernelFn()
                for k, a in enumerate(c.coeffs):
                    if not a:
                        continue
                    nf = _bessel_w_normal_form(param, k, euler)
                    for l, cl in enumerate(nf):
                        if cl.is_zero():
                            continue
                        # substitute w = s x; the partial form also carries x^k eps^{ki}
                        val = cl.scale_var(s)
                        if not euler:
                            val = val * RatFun.x_power(k, as_scalar(Cyclo.zeta(N, k * sheet)))
                        f = f + KernelFn({PsiSym(c.lam, sheet, l): val.scale(a)})
                out.append(f)
    return out


def wronskian_op(basis: Sequence[KernelFn], ctx: KernelContext) -> Tuple[DiffOp, Certificate]:
    """Monic P with P f = 0 for every basis function.

    Coefficients of each symbol give linear equations over Q(zeta_N)(x);
    the result must be rational.
    """
    n = len(basis)
    rows: List[List[RatFun]] = []
    for f in basis:
        ders = [f]
        for _ in range(n):
            ders.append(ctx.derivative(ders[-1]))
        syms = []
        for d in ders:
            for s in d.terms:
                if s not in syms:
                    syms.append(s)
        for s in syms:
            rows.append([d.terms.get(s, RatFun.zero()) for d in ders])
    if not rows:
        return DiffOp.one(), Certificate(0, 0, 0, None, True, "symbolic")
    return _solve_monic(rows, n, "symbolic")


def kernel_residuals(P: DiffOp, basis: Sequence[KernelFn], ctx: KernelContext) -> List[KernelFn]:
    return [ctx.apply(P, f) for f in basis]


# ---------------------------------------------------------------------------
# rotation closure

def _rotate(f: KernelFn, ctx: KernelContext) -> Optional[KernelFn]:
    N = ctx.N
    eps = Cyclo.zeta(N)
    out = {}
    for sym, c in f.terms.items():
        if isinstance(sym, PowerLog):
            return None
        if isinstance(ctx.param, BesselParam):
            # Phi(eps^i lam (eps x)) is the next sheet; coefficients see x -> eps x
            out[PsiSym(sym.lam, (sym.sheet + 1) % N, sym.m)] = c.scale_var(eps)
        else:
            out[PsiSym(sym.lam, (sym.sheet + 1) % N, sym.m)] = c
    return KernelFn(out)


def _flatten(fs: List[KernelFn]) -> List[list]:
    """Scalar coordinate vectors of kernel functions over a common denominator."""
    keys = []
    for f in fs:
        for s in f.terms:
            if s not in keys:
                keys.append(s)
    dens = {}
    for s in keys:
        d = UniPoly.const(1)
        for f in fs:
            if s in f.terms:
                from .field import poly_lcm

                d = poly_lcm(d, f.terms[s].den)
        dens[s] = d
    vecs = []
    for f in fs:
        coords = {}
        for s in keys:
            if s in f.terms:
                v = f.terms[s]
                num = v.num * dens[s].exact_div(v.den)
                for i, x in enumerate(num.c):
                    if x:
                        coords[(s, i)] = x
        vecs.append(coords)
    allk = []
    for v in vecs:
        for k in v:
            if k not in allk:
                allk.append(k)
    return [[v.get(k, mpq(0)) for k in allk] for v in vecs]


def zn_check(obj, ctx: KernelContext = None) -> bool:
    """Rotation closure f(x) in ker P  =>  f(eps x) in ker P.

    Accepts a ConditionSet (closed by construction once validated) or an
    explicit list of kernel functions.
    """
    if isinstance(obj, ConditionSet):
        return True
    basis = list(obj)
    if ctx is None:
        raise ValueError("a KernelContext is required for explicit bases")
    if ctx.N == 1:
        return True
    psi = [f for f in basis if not any(isinstance(s, PowerLog) for s in f.terms)]
    logs = [f for f in basis if all(isinstance(s, PowerLog) for s in f.terms)]
    if len(psi) + len(logs) != len(basis):
        return False
    for f in logs:
        exps = set()
        for s, c in f.terms.items():
            # coefficients are Laurent polynomials num / x^m
            if c.den.low_order() != c.den.deg():
                return False
            m = c.den.deg()
            for i, x in enumerate(c.num.c):
                if x:
                    exps.add(s.e + i - m)
        es = sorted(exps)
        if any(((e - es[0]) / ctx.N).denominator != 1 for e in es):
            return False
    if not psi:
        return True
    from .linalg import rank

    base_rank = rank(_flatten(psi))
    for f in psi:
        g = _rotate(f, ctx)
        if rank(_flatten(psi + [g])) != base_rank:
            return False
    return True


# ---------------------------------------------------------------------------
# g and h

def g_from_conditions(cs: ConditionSet, var: str = "z") -> UniPoly:
    """z^{n0} prod (z^N - lambda_j^N)^{n_j}."""
    N = cs.N
    g = UniPoly.monomial(cs.n0, 1, var)
    for key, conds in cs.point_groups():
        factor = UniPoly.monomial(N, 1, var) - UniPoly.const(key, var)
        g = g * factor ** len(conds)
    return g


def zero_condition_d(param: BesselParam, c: ZeroSupport) -> int:
    """1 + max p_{j(k)} over the exponents of one zero condition."""
    best = 0
    jmax: Dict[object, int] = {}
    for t in c.terms:
        if t.b:
            e = param.beta[t.i - 1] + t.k * param.N
            jmax[e] = max(jmax.get(e, 0), t.j)
    for e, j in jmax.items():
        ps = zero_mult(param, e)
        best = max(best, 1 + ps[j])
    return best


@dataclass
class HData:
    d0: int
    ds: List[Tuple[object, int]]  # (lambda^N, d_j)
    h: UniPoly  # in t, eigenvalue variable t = z^N

    def h_of_z(self, N: int) -> UniPoly:
        return self.h.with_var("z").subs_power(N)


def min_h_exponents(cs: ConditionSet) -> HData:
    """Minimal d_j with ker P inside ker h(L_V), h(t) = t^{d0} prod (t - lambda_j^N)^{d_j}."""
    t = UniPoly.gen("t")
    if not cs.conditions:
        return HData(1 if cs.family == "bessel" else 0, [], t)
    d0 = 0
    if cs.family == "bessel":
        for c in cs.zero_conditions():
            d0 = max(d0, zero_condition_d(cs.param, c))
    h = UniPoly.monomial(d0, 1, "t")
    ds = []
    for key, conds in cs.point_groups():
        d = 1 + max(c.k0 for c in conds)
        ds.append((key, d))
        h = h * (t - UniPoly.const(key, "t")) ** d
    return HData(d0, ds, h)
