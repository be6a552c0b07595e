"""Exact arithmetic: rationals, the cyclotomic field Q(zeta_N), dense
univariate polynomials and reduced rational functions over them, plus a
light bivariate rational type used by the identity checker.

Rationals are ``gmpy2.mpq``.  Cyclotomic numbers are coefficient vectors of
length deg(Phi_N) reduced modulo the N-th cyclotomic polynomial.  All
values are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd, lcm
from typing import Dict, Iterable, Sequence, Tuple, Union

from gmpy2 import mpq

Rational = type(mpq(0))
_ZERO = mpq(0)
_ONE = mpq(1)


def Q(v) -> "Rational":
    """Coerce an int, str, Fraction, mpq or rational Cyclo to mpq."""
    if isinstance(v, Rational):
        return v
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, int):
        return mpq(v)
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    if isinstance(v, str):
        s = v.strip()
        if "/" in s:
            p, q = s.split("/")
            return mpq(int(p), int(q))
        return mpq(s)
    if isinstance(v, Cyclo):
        return v.to_rational()
    raise TypeError(f"cannot convert {type(v).__name__} to a rational")


def qstr(v) -> str:
    """Canonical string of an exact rational: '3', '-1/2'."""
    v = Q(v)
    if v.denominator == 1:
        return str(int(v.numerator))
    return f"{int(v.numerator)}/{int(v.denominator)}"


def is_rational_scalar(v) -> bool:
    if isinstance(v, Cyclo):
        return v.is_rational()
    return True


# ---------------------------------------------------------------------------
# cyclotomic field

def _int_poly_divexact(a: list, b: list) -> list:
    """Exact division of integer polynomials (low-to-high), b monic."""
    a = list(a)
    db = len(b) - 1
    out = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        out[k - db] = c
        if c:
            for i in range(db + 1):
                a[k - db + i] -= c * b[i]
    if any(a[:db]):
        raise ArithmeticError("inexact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> Tuple[int, ...]:
    """Integer coefficients of Phi_N, low degree first."""
    if N < 1:
        raise ValueError("N must be positive")
    p = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            p = _int_poly_divexact(p, list(cyclotomic_poly(d)))
    return tuple(p)


def euler_phi(N: int) -> int:
    return len(cyclotomic_poly(N)) - 1


def _reduce_mod_phi(coeffs: list, N: int) -> Tuple:
    phi = cyclotomic_poly(N)
    m = len(phi) - 1
    c = list(coeffs)
    for k in range(len(c) - 1, m - 1, -1):
        t = c[k]
        if t:
            for i in range(m):
                if phi[i]:
                    c[k - m + i] -= t * phi[i]
            c[k] = _ZERO
    c = c[:m] + [_ZERO] * (m - len(c))
    return tuple(mpq(x) if not isinstance(x, Rational) else x for x in c)


class Cyclo:
    """Element of Q(zeta_N), zeta = exp(2 pi i / N)."""

    __slots__ = ("N", "c")

    def __init__(self, N: int, coeffs: Iterable = ()):
        self.N = N
        self.c = _reduce_mod_phi([Q(x) for x in coeffs], N)

    @classmethod
    def _raw(cls, N, c):
        obj = object.__new__(cls)
        obj.N = N
        obj.c = c
        return obj

    @classmethod
    def zeta(cls, N: int, power: int = 1) -> "Cyclo":
        power %= N
        return cls(N, [0] * power + [1])

    @classmethod
    def const(cls, N: int, v) -> "Cyclo":
        return cls(N, [Q(v)])

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.N == self.N:
                return other
            if other.is_rational():
                return Cyclo.const(self.N, other.c[0])
            if self.is_rational():
                return None
            raise ValueError("mixing different cyclotomic fields")
        if isinstance(other, (Rational, int, Fraction)) and not isinstance(other, bool):
            return Cyclo.const(self.N, other)
        return NotImplemented

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.c[0]

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, Cyclo) and other.N != self.N:
            if self.is_rational() and other.is_rational():
                return self.c[0] == other.c[0]
            return False
        o = self._coerce(other)
        if o is NotImplemented or o is None:
            return False
        return self.c == o.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.N, self.c))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return other + self.c[0]
        return Cyclo._raw(self.N, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclo._raw(self.N, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self.c[0] - other
        return Cyclo._raw(self.N, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return other * self.c[0]
        a, b = self.c, o.c
        if len(a) == 1:
            return Cyclo._raw(self.N, (a[0] * b[0],))
        prod = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Cyclo._raw(self.N, _reduce_mod_phi(prod, self.N))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclo":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        if self.is_rational():
            return Cyclo._raw(self.N, (1 / self.c[0],) + self.c[1:])
        phi = UniPoly([mpq(x) for x in cyclotomic_poly(self.N)], "t")
        a = UniPoly(self.c, "t")
        g, s, _ = poly_xgcd(a, phi)
        # g is a nonzero constant because Phi_N is irreducible
        s = s * (1 / g.c[0])
        return Cyclo(self.N, s.c)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self.c[0] / other
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyclo.const(self.N, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        terms = []
        for i, x in enumerate(self.c):
            if x:
                terms.append(qstr(x) + ("" if i == 0 else f"*z{self.N}^{i}"))
        return "Cyclo(" + (" + ".join(terms) or "0") + ")"


def cyclo_field(N: int) -> "CycloField":
    if N < 1:
        raise ValueError("N must be >= 1")
    return CycloField(N)


class CycloField:
    """Handle for Q(zeta_N); ``zeta`` satisfies Phi_N(zeta) = 0."""

    def __init__(self, N: int):
        self.N = N
        self.degree = euler_phi(N)
        self.zeta = Cyclo.zeta(N)

    def __call__(self, v) -> Cyclo:
        return Cyclo.const(self.N, v)

    def one(self) -> Cyclo:
        return Cyclo.const(self.N, 1)

    def zero(self) -> Cyclo:
        return Cyclo.const(self.N, 0)

    def root_of_unity(self, k: int) -> Cyclo:
        return Cyclo.zeta(self.N, k)

    def __repr__(self):
        return f"CycloField(N={self.N})"


def as_scalar(v):
    """Collapse rational Cyclo values to mpq; leave other values alone."""
    if isinstance(v, Cyclo) and v.is_rational():
        return v.c[0]
    if isinstance(v, int) and not isinstance(v, bool):
        return mpq(v)
    if isinstance(v, Fraction):
        return Q(v)
    return v


# ---------------------------------------------------------------------------
# univariate polynomials

def _trim(c: list) -> tuple:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


class UniPoly:
    """Dense polynomial, coefficients low degree first.

    The variable name is cosmetic; equality compares coefficients only.
    The zero polynomial has degree -1.
    """

    __slots__ = ("c", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        c = []
        for x in coeffs:
            if isinstance(x, (int, Fraction, str)) and not isinstance(x, bool):
                x = Q(x)
            c.append(x)
        self.c = _trim(c)
        self.var = var

    @classmethod
    def _raw(cls, c: tuple, var: str) -> "UniPoly":
        obj = object.__new__(cls)
        obj.c = c
        obj.var = var
        return obj

    @classmethod
    def monomial(cls, k: int, coeff=_ONE, var: str = "x") -> "UniPoly":
        coeff = as_scalar(coeff)
        if not coeff:
            return cls._raw((), var)
        return cls._raw((_ZERO,) * k + (coeff,), var)

    @classmethod
    def const(cls, v, var: str = "x") -> "UniPoly":
        return cls.monomial(0, v, var)

    @classmethod
    def gen(cls, var: str = "x") -> "UniPoly":
        return cls._raw((_ZERO, _ONE), var)

    def deg(self) -> int:
        return len(self.c) - 1

    def lc(self):
        return self.c[-1] if self.c else _ZERO

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def is_const(self) -> bool:
        return len(self.c) <= 1

    def coeff(self, k: int):
        return self.c[k] if 0 <= k < len(self.c) else _ZERO

    def low_order(self) -> int:
        """Exponent of the lowest nonzero term (-1 for zero)."""
        for i, x in enumerate(self.c):
            if x:
                return i
        return -1

    def xpow_degree(self) -> int:
        """k if the polynomial is exactly x^k (monic monomial), else -1."""
        c = self.c
        if not c or c[-1] != 1:
            return -1
        for x in c[:-1]:
            if x:
                return -1
        return len(c) - 1

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.c == other.c
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return self.c == UniPoly.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(other, self.var)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = out[i] + y
        return UniPoly._raw(_trim(out), self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly._raw(tuple(-x for x in self.c), self.var)

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(other, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "UniPoly":
        s = as_scalar(s)
        if not s:
            return UniPoly._raw((), self.var)
        return UniPoly._raw(tuple(x * s for x in self.c), self.var)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            if isinstance(other, (int, Rational, Fraction, Cyclo)):
                return self.scale(other)
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return UniPoly._raw((), self.var)
        if len(a) == 1:
            return other.scale(a[0]).with_var(self.var)
        if len(b) == 1:
            return self.scale(b[0])
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
        return UniPoly._raw(_trim(out), self.var)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = UniPoly.const(1, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def with_var(self, var: str) -> "UniPoly":
        return UniPoly._raw(self.c, var)

    def divmod(self, other: "UniPoly"):
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        b = other.c
        db = len(b) - 1
        inv = 1 / b[-1]
        r = list(self.c)
        if len(r) <= db:
            return UniPoly._raw((), self.var), self
        q = [_ZERO] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            t = r[k]
            if t:
                t = t * inv
                q[k - db] = t
                for i in range(db):
                    if b[i]:
                        r[k - db + i] = r[k - db + i] - t * b[i]
                r[k] = _ZERO
        return UniPoly._raw(_trim(q), self.var), UniPoly._raw(_trim(r[:db]), self.var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if r.c:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "UniPoly":
        if not self.c:
            return self
        lc = self.c[-1]
        if lc == 1:
            return self
        return self.scale(1 / lc)

    def derivative(self) -> "UniPoly":
        return UniPoly._raw(tuple(self.c[i] * i for i in range(1, len(self.c))), self.var)

    def __call__(self, v):
        """Horner evaluation at any ring element supporting + and *."""
        out = None
        for x in reversed(self.c):
            out = x if out is None else out * v + x
        if out is None:
            return _ZERO
        return out

    def compose(self, other: "UniPoly") -> "UniPoly":
        out = UniPoly._raw((), other.var)
        for x in reversed(self.c):
            out = out * other + x
        return out

    def subs_power(self, k: int) -> "UniPoly":
        """p(x) -> p(x^k)."""
        if k == 1 or len(self.c) <= 1:
            return self
        out = [_ZERO] * ((len(self.c) - 1) * k + 1)
        for i, x in enumerate(self.c):
            out[i * k] = x
        return UniPoly._raw(tuple(out), self.var)

    def scale_var(self, s) -> "UniPoly":
        """p(x) -> p(s x)."""
        s = as_scalar(s)
        out = []
        pw = _ONE
        for x in self.c:
            out.append(x * pw)
            pw = pw * s
        return UniPoly._raw(_trim(out), self.var)

    def shift(self, k: int) -> "UniPoly":
        """Multiply by x^k (k >= 0) or divide exactly by x^{-k}."""
        if not self.c or k == 0:
            return self
        if k > 0:
            return UniPoly._raw((_ZERO,) * k + self.c, self.var)
        if any(self.c[:-k]):
            raise ArithmeticError("shift leaves a remainder")
        return UniPoly._raw(self.c[-k:], self.var)

    def contract_power(self, k: int) -> "UniPoly":
        """Inverse of subs_power: p(x^k) -> p(x); requires exponents in kZ."""
        if k == 1:
            return self
        for i, x in enumerate(self.c):
            if x and i % k:
                raise ValueError("exponent not divisible")
        return UniPoly._raw(self.c[::k], self.var)

    def is_rational(self) -> bool:
        return all(is_rational_scalar(x) for x in self.c)

    def rationalize(self) -> "UniPoly":
        return UniPoly._raw(tuple(as_scalar(x) for x in self.c), self.var)

    def __repr__(self):
        return f"UniPoly({self.to_str()})"

    def to_str(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for i in range(len(self.c) - 1, -1, -1):
            x = self.c[i]
            if not x:
                continue
            coef = qstr(x) if is_rational_scalar(x) else repr(x)
            if i == 0:
                parts.append(coef)
            else:
                mon = self.var if i == 1 else f"{self.var}^{i}"
                if coef == "1":
                    parts.append(mon)
                elif coef == "-1":
                    parts.append("-" + mon)
                else:
                    parts.append(f"{coef}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


_PRIME = (1 << 61) - 1


def _mod_p(c: tuple):
    """Coefficients reduced mod a prime, or None if a denominator vanishes."""
    out = []
    for x in c:
        if isinstance(x, Cyclo):
            return None
        x = mpq(x)
        den = int(x.denominator) % _PRIME
        if not den:
            return None
        out.append(int(x.numerator) * pow(den, -1, _PRIME) % _PRIME)
    return out


def _coprime_mod_p(a: tuple, b: tuple) -> bool:
    """True when a and b are certainly coprime over Q.

    If neither leading coefficient vanishes mod p, the gcd mod p is divisible
    by the reduction of the rational gcd, so degree 0 mod p proves coprimality.
    """
    pa, pb = _mod_p(a), _mod_p(b)
    if pa is None or pb is None or not pa[-1] or not pb[-1]:
        return False
    p = _PRIME
    while pb and pb[-1] == 0:
        pb.pop()
    while pb:
        inv = pow(pb[-1], -1, p)
        db = len(pb) - 1
        r = pa
        while len(r) - 1 >= db and r:
            t = r[-1] * inv % p
            off = len(r) - 1 - db
            if t:
                for i in range(db + 1):
                    r[off + i] = (r[off + i] - t * pb[i]) % p
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        pa, pb = pb, r
    return len(pa) == 1


def _integer_coeffs(c: tuple):
    """Primitive integer multiple of a rational coefficient list (None for Cyclo)."""
    if any(isinstance(x, Cyclo) for x in c):
        return None
    den = 1
    for x in c:
        den = lcm(den, int(mpq(x).denominator))
    ints = [int(mpq(x) * den) for x in c]
    return _primitive(ints)


def _primitive(c: list) -> list:
    g = 0
    for x in c:
        g = igcd(g, x)
        if g == 1:
            return c
    return [x // g for x in c] if g > 1 else c


def _primitive_gcd(a: list, b: list) -> list:
    """gcd of integer polynomials by the primitive pseudo-remainder sequence."""
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        r = list(a)
        lb, db = b[-1], len(b) - 1
        while len(r) - 1 >= db and r:
            t = r[-1]
            off = len(r) - 1 - db
            r = [x * lb for x in r]
            for i in range(db + 1):
                r[off + i] -= t * b[i]
            r.pop()
            while r and r[-1] == 0:
                r.pop()
            if r:
                r = _primitive(r)
        if not r:
            return b
        a, b = b, r
    return [1] if b else a


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials")
    if a.deg() < b.deg():
        a, b = b, a
    if b.is_zero():
        return a.monic()
    if b.deg() == 0:
        return UniPoly.const(1, a.var)
    # fast path: powers of x
    ka, kb = a.low_order(), b.low_order()
    if a.xpow_degree() >= 0 or b.xpow_degree() >= 0:
        return UniPoly.monomial(min(ka, kb), 1, a.var)
    m = min(ka, kb)
    if ka or kb:
        # split off the power of x first; the rest has nonzero constant term
        rest = poly_gcd(UniPoly._raw(a.c[ka:], a.var), UniPoly._raw(b.c[kb:], a.var))
        return rest.shift(m) if m else rest
    if _coprime_mod_p(a.c, b.c):
        return UniPoly.const(1, a.var)
    ia, ib = _integer_coeffs(a.c), _integer_coeffs(b.c)
    if ia is None or ib is None:
        while not b.is_zero():
            a, b = b, (a % b).monic() if not (a % b).is_zero() else a % b
            if b.deg() == 0:
                return UniPoly.const(1, a.var)
        return a.monic()
    return UniPoly(_primitive_gcd(ia, ib), a.var).monic()


def poly_xgcd(a: UniPoly, b: UniPoly):
    """Return (g, s, t) with s a + t b = g (g not normalised)."""
    r0, r1 = a, b
    s0, s1 = UniPoly.const(1, a.var), UniPoly((), a.var)
    t0, t1 = UniPoly((), a.var), UniPoly.const(1, a.var)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def poly_lcm(a: UniPoly, b: UniPoly) -> UniPoly:
    if a.is_zero() or b.is_zero():
        return UniPoly((), a.var)
    return (a * b.exact_div(poly_gcd(a, b))).monic()


# ---------------------------------------------------------------------------
# rational functions

class RatFun:
    """Reduced fraction num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, UniPoly):
            num = UniPoly.const(num)
        if den is None:
            den = UniPoly.const(1, num.var)
        elif not isinstance(den, UniPoly):
            den = UniPoly.const(den, num.var)
        n, d = _normalize(num, den)
        self.num = n
        self.den = d

    @classmethod
    def _raw(cls, num: UniPoly, den: UniPoly) -> "RatFun":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def const(cls, v, var: str = "x") -> "RatFun":
        return cls._raw(UniPoly.const(v, var), UniPoly.const(1, var))

    @classmethod
    def zero(cls, var: str = "x") -> "RatFun":
        return cls._raw(UniPoly((), var), UniPoly.const(1, var))

    @classmethod
    def one(cls, var: str = "x") -> "RatFun":
        return cls.const(1, var)

    @classmethod
    def x_power(cls, k: int, coeff=_ONE, var: str = "x") -> "RatFun":
        if k >= 0 or not coeff:
            return cls._raw(UniPoly.monomial(k, coeff, var), UniPoly.const(1, var))
        return cls._raw(UniPoly.const(coeff, var), UniPoly.monomial(-k, 1, var))

    @property
    def var(self) -> str:
        return self.num.var

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.deg() == 0

    def is_const(self) -> bool:
        return self.den.deg() == 0 and self.num.deg() <= 0

    def const_value(self):
        if not self.is_const():
            raise ValueError("not a constant")
        return self.num.coeff(0)

    def is_rational(self) -> bool:
        return self.num.is_rational() and self.den.is_rational()

    def rationalize(self) -> "RatFun":
        return RatFun._raw(self.num.rationalize(), self.den.rationalize())

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num.c == other.num.c and self.den.c == other.den.c
        if isinstance(other, UniPoly):
            return self.den.deg() == 0 and self.num.c == other.c
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return self.den.deg() == 0 and self.num.c == UniPoly.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash((self.num.c, self.den.c))

    def _lift(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, UniPoly):
            return RatFun._raw(other, UniPoly.const(1, other.var))
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return RatFun.const(other, self.var)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if a.is_zero():
            return o
        if c.is_zero():
            return self
        if b.deg() == 0 and d.deg() == 0:
            return RatFun._raw(a + c, b)
        kb, kd = b.xpow_degree(), d.xpow_degree()
        if kb >= 0 and kd >= 0:
            m = max(kb, kd)
            num = a.shift(m - kb) + c.shift(m - kd)
            return _strip_xpow(num, m)
        if b == d:
            num = a + c
            return RatFun._raw(*_reduce_by(num, b))
        g = poly_gcd(b, d)
        if g.deg() == 0:
            return RatFun._raw(a * d + c * b, b * d)
        b1 = b.exact_div(g)
        d1 = d.exact_div(g)
        num = a * d1 + c * b1
        den = b1 * d
        if num.is_zero():
            return RatFun.zero(self.var)
        h = poly_gcd(num, g)
        if h.deg() > 0:
            num = num.exact_div(h)
            den = den.exact_div(h)
        return RatFun._raw(num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "RatFun":
        s = as_scalar(s)
        if not s:
            return RatFun.zero(self.var)
        return RatFun._raw(self.num.scale(s), self.den)

    def __mul__(self, other):
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return self.scale(other)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if a.is_zero() or c.is_zero():
            return RatFun.zero(self.var)
        if b.deg() == 0 and d.deg() == 0:
            return RatFun._raw(a * c, b)
        kb, kd = b.xpow_degree(), d.xpow_degree()
        if kb >= 0 and kd >= 0:
            return _strip_xpow(a * c, kb + kd)
        g1 = poly_gcd(a, d) if d.deg() > 0 else None
        g2 = poly_gcd(c, b) if b.deg() > 0 else None
        if g1 is not None and g1.deg() > 0:
            a = a.exact_div(g1)
            d = d.exact_div(g1)
        if g2 is not None and g2.deg() > 0:
            c = c.exact_div(g2)
            b = b.exact_div(g2)
        return RatFun._raw(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        lc = self.num.lc()
        return RatFun._raw(self.den.scale(1 / lc), self.num.scale(1 / lc))

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, Fraction, Cyclo)):
            return self.scale(1 / as_scalar(other))
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFun._raw(self.num ** k, self.den ** k)

    def derivative(self) -> "RatFun":
        a, b = self.num, self.den
        if b.deg() == 0:
            return RatFun._raw(a.derivative(), b)
        kb = b.xpow_degree()
        if kb >= 0:
            # (a x^{-k})' = (a' x - k a) x^{-k-1}
            num = a.derivative().shift(1) - a.scale(kb)
            return _strip_xpow(num, kb + 1)
        # with g = gcd(b, b'), (a/b)' = (a' (b/g) - a (b'/g)) / (b (b/g)); each pole
        # order rises by exactly one, so this fraction is already reduced
        rad, dq = _radical_parts(b)
        num = a.derivative() * rad - a * dq
        return RatFun._raw(num, b * rad)

    def __call__(self, v):
        d = self.den(v)
        if not d:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(v) / d

    def subs_power(self, k: int) -> "RatFun":
        return RatFun._raw(self.num.subs_power(k), self.den.subs_power(k))

    def scale_var(self, s) -> "RatFun":
        """f(x) -> f(s x)."""
        return RatFun(self.num.scale_var(s), self.den.scale_var(s))

    def compose_poly(self, p: UniPoly) -> "RatFun":
        return RatFun(self.num.compose(p), self.den.compose(p))

    def with_var(self, var: str) -> "RatFun":
        return RatFun._raw(self.num.with_var(var), self.den.with_var(var))

    def __repr__(self):
        return f"RatFun({self.to_str()})"

    def to_str(self) -> str:
        if self.den.deg() == 0:
            return self.num.to_str()
        return f"({self.num.to_str()})/({self.den.to_str()})"


_RADICAL_CACHE: Dict[Tuple, Tuple["UniPoly", "UniPoly"]] = {}


def _radical_parts(b: "UniPoly"):
    """(b/g, b'/g) with g = gcd(b, b') for a monic b."""
    key = (b.var, b.c)
    hit = _RADICAL_CACHE.get(key)
    if hit is None:
        db = b.derivative()
        g = poly_gcd(b, db)
        hit = (b.exact_div(g), db.exact_div(g))
        if len(_RADICAL_CACHE) > 4096:
            _RADICAL_CACHE.clear()
        _RADICAL_CACHE[key] = hit
    return hit


def _strip_xpow(num: UniPoly, m: int) -> RatFun:
    """num / x^m reduced."""
    var = num.var
    if num.is_zero():
        return RatFun.zero(var)
    lo = num.low_order()
    s = min(lo, m)
    if s:
        num = UniPoly._raw(num.c[s:], var)
        m -= s
    return RatFun._raw(num, UniPoly.monomial(m, 1, var))


def _reduce_by(num: UniPoly, den: UniPoly):
    if num.is_zero():
        return UniPoly((), num.var), UniPoly.const(1, num.var)
    g = poly_gcd(num, den)
    if g.deg() > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    return num, den


def _normalize(num: UniPoly, den: UniPoly):
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return UniPoly((), num.var), UniPoly.const(1, num.var)
    if den.deg() > 0:
        g = poly_gcd(num, den)
        if g.deg() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lc = den.lc()
    if lc != 1:
        inv = 1 / lc
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def ratfun_normalize(num: UniPoly, den: UniPoly) -> RatFun:
    """Reduced fraction with monic denominator."""
    return RatFun(num, den)


def x_ratfun(var: str = "x") -> RatFun:
    return RatFun._raw(UniPoly.gen(var), UniPoly.const(1, var))


# ---------------------------------------------------------------------------
# bivariate values for the identity checker

class BiRatFun:
    """Value  (sum_k c_k(x) z^k) / den(z)  with c_k rational in x.

    Negative k are allowed (Laurent in z).  Only the x-coefficients are
    reduced; the z-denominator is never reduced, so zero testing inspects
    the numerator only.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Dict[int, RatFun] = None, den: UniPoly = None):
        self.num = {k: v for k, v in (num or {}).items() if not v.is_zero()}
        self.den = den if den is not None else UniPoly.const(1, "z")

    @classmethod
    def from_x(cls, f: RatFun, zpow: int = 0) -> "BiRatFun":
        return cls({zpow: f})

    @classmethod
    def from_z(cls, p: UniPoly) -> "BiRatFun":
        return cls({k: RatFun.const(c) for k, c in enumerate(p.c) if c})

    def is_zero(self) -> bool:
        return not self.num

    def _same_den(self, other: "BiRatFun"):
        if self.den == other.den:
            return self.num, other.num, self.den
        a = _zmul(self.num, other.den)
        b = _zmul(other.num, self.den)
        return a, b, self.den * other.den

    def __add__(self, other: "BiRatFun") -> "BiRatFun":
        a, b, den = self._same_den(other)
        out = dict(a)
        for k, v in b.items():
            out[k] = out[k] + v if k in out else v
        return BiRatFun(out, den)

    def __neg__(self):
        return BiRatFun({k: -v for k, v in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "BiRatFun") -> "BiRatFun":
        out: Dict[int, RatFun] = {}
        for i, u in self.num.items():
            for j, v in other.num.items():
                k = i + j
                w = u * v
                out[k] = out[k] + w if k in out else w
        return BiRatFun(out, self.den * other.den)

    def mul_x(self, f: RatFun) -> "BiRatFun":
        return BiRatFun({k: v * f for k, v in self.num.items()}, self.den)

    def mul_zpow(self, k: int) -> "BiRatFun":
        return BiRatFun({i + k: v for i, v in self.num.items()}, self.den)

    def mul_zpoly(self, p: UniPoly) -> "BiRatFun":
        return BiRatFun(_zmul(self.num, p), self.den)

    def dx(self) -> "BiRatFun":
        return BiRatFun({k: v.derivative() for k, v in self.num.items()}, self.den)

    def dz(self) -> "BiRatFun":
        dnum = {k - 1: v.scale(k) for k, v in self.num.items() if k}
        if self.den.deg() <= 0:
            return BiRatFun(dnum, self.den)
        # (n/d)' = (n' d - n d') / d^2
        part1 = _zmul(dnum, self.den)
        part2 = _zmul(self.num, self.den.derivative())
        out = dict(part1)
        for k, v in part2.items():
            out[k] = out[k] - v if k in out else -v
        return BiRatFun(out, self.den * self.den)

    def terms(self):
        return sorted(self.num.items())

    def __repr__(self):
        body = " + ".join(f"({v.to_str()})*z^{k}" for k, v in self.terms()) or "0"
        if self.den.deg() > 0:
            return f"BiRatFun([{body}] / ({self.den.to_str()}))"
        return f"BiRatFun({body})"


def _zmul(num: Dict[int, RatFun], p: UniPoly) -> Dict[int, RatFun]:
    out: Dict[int, RatFun] = {}
    for k, v in num.items():
        for j, c in enumerate(p.c):
            if c:
                w = v.scale(c)
                out[k + j] = out[k + j] + w if (k + j) in out else w
    return out


ScalarLike = Union[int, Fraction, "Rational", Cyclo]


def scalars(values: Sequence) -> list:
    return [Q(v) for v in values]
