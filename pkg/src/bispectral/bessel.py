"""Bessel operators  L_beta = x^{-N} (D - beta_1) ... (D - beta_N),  D = x d/dx.

Also the formal wave coefficients of Psi_beta(z) = e^z (1 + sum a_k z^{-k}),
powers beta^d, and the action of L_beta on the power-log and eigenfunction
model spaces used to build kernels and spectral algebras.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from gmpy2 import mpq

from .diffop import DiffOp, op_of_euler_poly
from .errors import InvalidParameter, RecursionSingular
from .field import Q, RatFun, UniPoly, qstr


@dataclass(frozen=True)
class BesselParam:
    N: int
    beta: Tuple

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParameter("N must be positive", N=self.N)
        b = tuple(Q(x) for x in self.beta)
        if len(b) != self.N:
            raise InvalidParameter("beta must have N entries", N=self.N, beta=b)
        if sum(b) != mpq(self.N * (self.N - 1), 2):
            raise InvalidParameter(
                "beta entries must sum to N(N-1)/2", beta=[qstr(x) for x in b]
            )
        object.__setattr__(self, "beta", b)

    def char_poly(self, var: str = "t") -> UniPoly:
        """P_beta(t) = prod (t - beta_i)."""
        out = UniPoly.const(1, var)
        for b in self.beta:
            out = out * UniPoly([-b, 1], var)
        return out

    def multiplicity(self, value) -> int:
        value = Q(value)
        return sum(1 for b in self.beta if b == value)

    def to_json(self) -> dict:
        return {"N": self.N, "beta": [qstr(b) for b in self.beta]}


def bessel_param(beta: Sequence, N: int = None) -> BesselParam:
    beta = tuple(Q(b) for b in beta)
    return BesselParam(len(beta) if N is None else N, beta)


def bessel_op(p: BesselParam, var: str = "x") -> DiffOp:
    """x^{-N} P_beta(D) in d-form."""
    core = op_of_euler_poly(p.char_poly(var), var)
    return DiffOp.mult(RatFun.x_power(-p.N, 1, var), var) * core


def euler_product_op(gammas: Sequence, shift: int, var: str = "x") -> DiffOp:
    """x^{-shift} prod (D - gamma_i) for an arbitrary list of exponents."""
    poly = UniPoly.const(1, var)
    for g in gammas:
        poly = poly * UniPoly([-Q(g), 1], var)
    return DiffOp.mult(RatFun.x_power(-shift, 1, var), var) * op_of_euler_poly(poly, var)


def beta_adjoint(p: BesselParam) -> BesselParam:
    """a(beta) = (N-1) delta - beta; L_beta^* = (-1)^N L_{a(beta)}."""
    return BesselParam(p.N, tuple(Q(p.N - 1) - b for b in p.beta))


def beta_power(p: BesselParam, d: int) -> List:
    """beta^d: each beta_k expanded to beta_k, beta_k + N, ..., beta_k + (d-1)N."""
    if d < 1:
        raise InvalidParameter("d must be >= 1", d=d)
    return [b + j * p.N for b in p.beta for j in range(d)]


# ---------------------------------------------------------------------------
# wave coefficients

@dataclass(frozen=True)
class WaveCoeffs:
    K: int
    a: Tuple  # a[0] = 1, a[k] for k = 1..K


def _factor_images(p: BesselParam, k: int) -> Dict[int, object]:
    """prod_i (z + D - beta_i) applied to z^{-k}, as {exponent: coeff}."""
    cur = {-k: mpq(1)}
    for b in p.beta:
        nxt: Dict[int, object] = {}
        for e, v in cur.items():
            nxt[e + 1] = nxt.get(e + 1, 0) + v
            nxt[e] = nxt.get(e, 0) + (e - b) * v
        cur = nxt
    return cur


def bessel_wave_coeffs(p: BesselParam, K: int) -> WaveCoeffs:
    """Coefficients a_k of Psi = e^z (1 + sum_{k<=K} a_k z^{-k}).

    Substituting into P_beta(D) Psi = z^N Psi via D(e^z f) = e^z (z + D) f
    gives, at z^{N-1-r}, the relation  -N r a_r = -(terms in a_0..a_{r-1}).
    """
    if K < 0:
        raise InvalidParameter("K must be >= 0", K=K)
    N = p.N
    images = [_factor_images(p, k) for k in range(K + 1)]
    a = [mpq(1)]
    for r in range(1, K + 1):
        e = N - 1 - r
        lead = images[r].get(e, 0)
        if lead == 0:
            raise RecursionSingular("leading coefficient vanishes", k=r)
        rest = 0
        for k in range(r):
            c = images[k].get(e, 0)
            if c:
                rest += a[k] * c
        a.append(-rest / lead)
    # the r = 0 equation is the sum constraint on beta
    assert images[0].get(N - 1, 0) == 0
    return WaveCoeffs(K, tuple(a))


def wave_residual(p: BesselParam, w: WaveCoeffs) -> Dict[int, object]:
    """Coefficients of e^{-z}(P_beta(D) - z^N) applied to the truncated series.

    Only exponents below N - 1 - K may be nonzero.
    """
    out: Dict[int, object] = {}
    for k, ak in enumerate(w.a):
        for e, c in _factor_images(p, k).items():
            out[e] = out.get(e, 0) + ak * c
        out[p.N - k] = out.get(p.N - k, 0) - ak
    return {e: v for e, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# model-space actions

def bessel_action_zero(p: BesselParam, alpha, j: int) -> List[Tuple[object, int, object]]:
    """L_beta (x^alpha ln^j x) as a list of (exponent, log power, coefficient).

    D acts on x^alpha L^j as x^alpha (alpha + d/dL) L^j, so the result is
    x^{alpha-N} sum_m P^{(m)}(alpha)/m! * j!/(j-m)! L^{j-m}.
    """
    alpha = Q(alpha)
    P = p.char_poly()
    out = []
    der = P
    for m in range(j + 1):
        val = der(alpha) / factorial(m)
        if val:
            out.append((alpha - p.N, j - m, val * (factorial(j) // factorial(j - m))))
        der = der.derivative()
    return out


def bessel_action_lambda(p: BesselParam, lam, k: int) -> List:
    """Row r with L_beta D_lam^k Psi = sum_m r[m] D_lam^m Psi, namely lam^N (D + N)^k."""
    if not lam:
        raise InvalidParameter("lambda must be nonzero")
    lamN = lam ** p.N
    return [lamN * comb(k, m) * p.N ** (k - m) for m in range(k + 1)]


# ---------------------------------------------------------------------------
# genericity heuristic

@dataclass
class GenericityReport:
    status: str  # "generic" | "nongeneric" | "unknown"
    classes: List[List]
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "classes": [[qstr(b) for b in c] for c in self.classes],
            "reason": self.reason,
        }


def genericity_check(p: BesselParam) -> GenericityReport:
    """Congruence-class heuristic for whether L_beta may reduce to a lower N.

    Entries are grouped by equality mod N Z.  If the residues mod N are
    invariant under a shift by a proper divisor M of N, the operator is a
    Darboux transform of a rank-M operator and is flagged.  Otherwise all
    singleton classes are reported generic and anything else unknown.
    """
    N = p.N
    classes: List[List] = []
    for b in p.beta:
        for c in classes:
            diff = b - c[0]
            if diff.denominator == 1 and int(diff) % N == 0:
                c.append(b)
                break
        else:
            classes.append([b])
    residues = sorted(b % N for b in p.beta)
    for M in range(1, N):
        if N % M:
            continue
        shifted = sorted((r + M) % N for r in residues)
        if shifted == residues:
            return GenericityReport(
                "nongeneric", classes, f"residues mod {N} invariant under shift by {M}"
            )
    if all(len(c) == 1 for c in classes):
        return GenericityReport("generic", classes, "distinct residue classes")
    return GenericityReport("unknown", classes, "repeated residue classes")
