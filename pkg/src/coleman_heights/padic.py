"""Capped absolute precision arithmetic in Q_p.

A nonzero :class:`PadicNumber` is ``p**valuation * unit + O(p**absprec)`` with
``unit`` a residue coprime to ``p`` known modulo ``p**(absprec - valuation)``.
Two zero states exist: the exact zero (no error term) and the inexact zero
``O(p**k)``.  Precision is propagated by the usual rules, so every digit
that is printed is a certified digit.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import NonSimpleRootError, PrecisionError

INF = math.inf


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation_int(n: int, p: int) -> float | int:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation_rational(q, p: int) -> float | int:
    q = Fraction(q)
    if q == 0:
        return INF
    return valuation_int(q.numerator, p) - valuation_int(q.denominator, p)


class PadicNumber:
    __slots__ = ("p", "_v", "_u", "_n")

    def __init__(self, p: int, valuation, unit: int, absprec):
        # Raw constructor; `unit` need not be reduced or coprime to p.
        self.p = p
        if absprec is None or absprec == INF:
            if unit != 0:
                raise ValueError("only zero can be exact")
            self._v, self._u, self._n = INF, 0, INF
            return
        if unit == 0 or valuation >= absprec:
            self._v, self._u, self._n = absprec, 0, absprec
            return
        while unit % p == 0:
            unit //= p
            valuation += 1
            if valuation >= absprec:
                self._v, self._u, self._n = absprec, 0, absprec
                return
        self._v = valuation
        self._n = absprec
        self._u = unit % p ** (absprec - valuation)

    @classmethod
    def _make(cls, p, v, u, n):
        # Trusted constructor: u already a reduced unit, v < n.
        obj = object.__new__(cls)
        obj.p, obj._v, obj._u, obj._n = p, v, u, n
        return obj

    @classmethod
    def exact_zero(cls, p: int) -> "PadicNumber":
        return cls._make(p, INF, 0, INF)

    @classmethod
    def from_rational(cls, p: int, q, absprec: int) -> "PadicNumber":
        if isinstance(q, int):
            if q == 0:
                return cls._make(p, absprec, 0, absprec)
            return cls(p, 0, q, absprec)
        q = Fraction(q)
        num, den = q.numerator, q.denominator
        if num == 0:
            return cls._make(p, absprec, 0, absprec)
        v = 0
        while den % p == 0:
            den //= p
            v -= 1
        while num % p == 0:
            num //= p
            v += 1
        if v >= absprec:
            return cls._make(p, absprec, 0, absprec)
        mod = p ** (absprec - v)
        return cls._make(p, v, num * pow(den, -1, mod) % mod, absprec)

    # -- accessors -------------------------------------------------------
    @property
    def valuation(self):
        return self._v

    @property
    def unit(self) -> int:
        return self._u

    @property
    def absprec(self):
        return self._n

    @property
    def relprec(self):
        if self._u == 0:
            return 0
        return self._n - self._v

    def is_exact_zero(self) -> bool:
        return self._n == INF

    def is_zero(self) -> bool:
        """True for both the exact zero and an inexact zero ``O(p^k)``."""
        return self._u == 0

    def is_unit(self) -> bool:
        return self._u != 0 and self._v == 0

    # -- coercion --------------------------------------------------------
    def _coerce_add(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Rational)):
            if self._n == INF:
                if other == 0:
                    return PadicNumber.exact_zero(self.p)
                raise TypeError("exact zero needs a precision to absorb a rational")
            return PadicNumber.from_rational(self.p, other, self._n)
        return NotImplemented

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        b = self._coerce_add(other)
        if b is NotImplemented:
            return NotImplemented
        a = self
        p = a.p
        if a._n == INF:
            return b
        if b._n == INF:
            return a
        n = a._n if a._n < b._n else b._n
        if a._u == 0:
            if b._u == 0 or b._v >= n:
                return PadicNumber._make(p, n, 0, n)
            return PadicNumber(p, b._v, b._u, n)
        if b._u == 0:
            if a._v >= n:
                return PadicNumber._make(p, n, 0, n)
            return PadicNumber(p, a._v, a._u, n)
        va, vb = a._v, b._v
        if va == vb:
            return PadicNumber(p, va, a._u + b._u, n)
        if va < vb:
            if va >= n:
                return PadicNumber._make(p, n, 0, n)
            # sum of unit and multiple of p stays a unit
            mod = p ** (n - va)
            return PadicNumber._make(p, va, (a._u + b._u * p ** (vb - va)) % mod, n)
        if vb >= n:
            return PadicNumber._make(p, n, 0, n)
        mod = p ** (n - vb)
        return PadicNumber._make(p, vb, (b._u + a._u * p ** (va - vb)) % mod, n)

    __radd__ = __add__

    def __neg__(self):
        if self._u == 0:
            return self
        mod = self.p ** (self._n - self._v)
        return PadicNumber._make(self.p, self._v, (-self._u) % mod, self._n)

    def __sub__(self, other):
        b = self._coerce_add(other)
        if b is NotImplemented:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        p = self.p
        if isinstance(other, int):
            if other == 0:
                return self._times_zero()
            if self._u == 0:
                if self._n == INF:
                    return self
                return PadicNumber._make(p, self._n + valuation_int(other, p),
                                         0, self._n + valuation_int(other, p))
            vo = 0
            while other % p == 0:
                other //= p
                vo += 1
            rel = self._n - self._v
            return PadicNumber._make(p, self._v + vo, self._u * other % p ** rel,
                                     self._n + vo)
        if isinstance(other, Rational):
            other = Fraction(other)
            if other == 0:
                return self._times_zero()
            if self._u == 0:
                if self._n == INF:
                    return self
                k = self._n + valuation_rational(other, p)
                return PadicNumber._make(p, k, 0, k)
            vo = valuation_rational(other, p)
            rel = self._n - self._v
            o = PadicNumber.from_rational(p, other, vo + rel)
            return self * o
        if not isinstance(other, PadicNumber):
            return NotImplemented
        a, b = self, other
        if a._n == INF or b._n == INF:
            return PadicNumber.exact_zero(p)
        if a._u == 0 or b._u == 0:
            # precision of a zero product: the best bound from both factors
            k = min(a._v + b._n, b._v + a._n)
            return PadicNumber._make(p, k, 0, k)
        ra = a._n - a._v
        rb = b._n - b._v
        r = ra if ra < rb else rb
        v = a._v + b._v
        return PadicNumber._make(p, v, a._u * b._u % p ** r, v + r)

    __rmul__ = __mul__

    def _times_zero(self) -> "PadicNumber":
        # x * 0 keeps x's precision so it can still absorb rationals
        if self._n == INF:
            return self
        return PadicNumber._make(self.p, self._n, 0, self._n)

    def inverse(self) -> "PadicNumber":
        if self._u == 0:
            if self._n == INF:
                raise ZeroDivisionError("division by exact zero")
            raise PrecisionError(f"insufficient precision: divisor is O({self.p}^{self._n})")
        r = self._n - self._v
        return PadicNumber._make(self.p, -self._v, pow(self._u, -1, self.p ** r),
                                 r - self._v)

    def __truediv__(self, other):
        p = self.p
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, PadicNumber):
            return NotImplemented
        if other._u == 0:
            return self * other.inverse()  # raises
        if self._u == 0:
            if self._n == INF:
                return self
            k = self._n - other._v
            return PadicNumber._make(p, k, 0, k)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e == 0:
            if self._u == 0:
                raise PrecisionError("0^0 is not defined here")
            return PadicNumber._make(self.p, 0, 1, self.relprec)
        if e < 0:
            return self.inverse() ** (-e)
        if self._u == 0:
            if self._n == INF:
                return self
            k = self._v * e
            return PadicNumber._make(self.p, k, 0, k)
        r = self._n - self._v
        v = self._v * e
        return PadicNumber._make(self.p, v, pow(self._u, e, self.p ** r), v + r)

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        try:
            d = self - other
        except TypeError:
            return NotImplemented
        if d is NotImplemented:
            return NotImplemented
        return d.is_zero()

    __hash__ = None

    def agrees_with(self, other: "PadicNumber", digits=None) -> bool:
        """Equality on the digits both values certify (optionally capped)."""
        d = self - other
        if d.is_zero():
            return True
        return digits is not None and d.valuation >= digits

    # -- precision helpers -----------------------------------------------
    def add_bigoh(self, k) -> "PadicNumber":
        if k >= self._n:
            return self
        if self._u == 0 or self._v >= k:
            return PadicNumber._make(self.p, k, 0, k)
        return PadicNumber._make(self.p, self._v, self._u % self.p ** (k - self._v), k)

    def lift(self):
        """Integer (or p-power-denominator rational) representative."""
        if self._u == 0:
            return 0
        if self._v >= 0:
            return self._u * self.p ** self._v
        return Fraction(self._u, self.p ** (-self._v))

    def residue(self) -> int:
        """Reduction mod p of an integral value."""
        if self._v < 0:
            raise ValueError("not integral")
        if self._n < 1:
            raise PrecisionError("no digits known")
        return self.lift() % self.p

    def digits(self) -> list[tuple[int, int]]:
        """(exponent, digit) pairs for every nonzero certified digit."""
        out = []
        if self._u == 0:
            return out
        u, k = self._u, self._v
        while u:
            u, d = divmod(u, self.p)
            if d:
                out.append((k, d))
            k += 1
        return out

    def __str__(self):
        p = self.p
        if self._n == INF:
            return "0"
        terms = []
        for k, d in self.digits():
            if k == 0:
                terms.append(str(d))
            else:
                base = f"{p}" if k == 1 else f"{p}^{k}"
                terms.append(base if d == 1 else f"{d}*{base}")
        terms.append(f"O({p}^{self._n})")
        return " + ".join(terms)

    __repr__ = __str__

    # -- analytic helpers ------------------------------------------------
    def sqrt(self, residue: int | None = None) -> "PadicNumber":
        return padic_sqrt(self, residue)

    def log(self) -> "PadicNumber":
        return iwasawa_log(self)

    def teichmuller(self) -> "PadicNumber":
        return teichmuller(self)


class PadicContext:
    """A prime ``p`` and a default working precision ``N`` (digits)."""

    def __init__(self, p: int, N: int = 12):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if N < 1:
            raise ValueError("precision must be positive")
        self.p = p
        self.N = N

    def __call__(self, value, absprec=None) -> PadicNumber:
        if isinstance(value, PadicNumber):
            return value if absprec is None else value.add_bigoh(absprec)
        if isinstance(value, str):
            value = Fraction(value)
        return PadicNumber.from_rational(self.p, value, self.N if absprec is None else absprec)

    def zero(self) -> PadicNumber:
        return PadicNumber.exact_zero(self.p)

    def O(self, k: int) -> PadicNumber:
        return PadicNumber._make(self.p, k, 0, k)

    def with_precision(self, N: int) -> "PadicContext":
        return PadicContext(self.p, N)

    def __repr__(self):
        return f"PadicContext(p={self.p}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, PadicContext) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self):
        return hash((self.p, self.N))


def arithmetic(a: PadicNumber, b: PadicNumber, op: str) -> PadicNumber:
    ops = {"add": lambda: a + b, "sub": lambda: a - b,
           "mul": lambda: a * b, "div": lambda: a / b}
    return ops[op]()


def teichmuller(x: PadicNumber) -> PadicNumber:
    """The (p-1)-st root of unity congruent to the unit ``x`` mod p."""
    if not x.is_unit():
        raise ValueError("teichmuller lift needs a unit")
    p, n = x.p, x.absprec
    if n == INF:
        raise PrecisionError("unbounded precision")
    mod = p ** n
    return PadicNumber(p, 0, pow(x.unit % p, p ** (n - 1), mod), n)


def _log_one_unit_int(z: int, p: int, prec: int) -> int:
    """log(z) mod p^prec for an integer z = 1 mod p known mod p^prec.

    Raises z to p^k first so the series converges fast, then divides by p^k.
    """
    k = max(1, math.isqrt(prec))
    work = prec + k
    z = pow(z, p ** k, p ** work)
    w = (z - 1) % p ** work
    if w == 0:
        return 0
    vw = valuation_int(w, p)
    # terms w^n/n with n*vw - v_p(n) >= work vanish
    nmax = 1
    while True:
        nn = nmax + 1
        if nn * vw - math.log(nn, p) >= work + 1:
            break
        nmax = nn
    extra = int(math.log(nmax, p)) + 1
    mod = p ** (work + extra)
    total = 0
    wn = 1
    for n in range(1, nmax + 1):
        wn = wn * w % mod
        e = valuation_int(n, p)
        term = (wn // p ** e) * pow(n // p ** e, -1, mod)
        total += term if n % 2 else -term
    total %= p ** work
    # exact division by p^k: the log of a p^k-th power is divisible by p^k
    return total // p ** k


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """Branch of the p-adic logarithm with log(p) = 0."""
    if x.is_zero():
        raise PrecisionError("log of zero")
    p = x.p
    r = x.relprec
    if r < 2:
        raise PrecisionError("insufficient precision: 1-unit part has no known digits")
    mod = p ** r
    z = pow(x.unit, p - 1, mod)
    if z == 1:
        return PadicNumber._make(p, r, 0, r)
    val = _log_one_unit_int(z, p, r) * pow(p - 1, -1, mod) % mod
    return PadicNumber(p, 0, val, r)


def padic_sqrt(a: PadicNumber, residue: int | None = None) -> PadicNumber:
    """Square root of a nonzero square; ``residue`` picks the branch mod p."""
    p = a.p
    if a.is_zero():
        raise PrecisionError("square root of zero is not supported")
    if a.valuation % 2:
        raise ValueError("odd valuation: not a square")
    u0 = a.unit % p
    roots = [r for r in range(1, p) if r * r % p == u0]
    if not roots:
        raise ValueError("not a square mod p")
    if residue is None:
        r = roots[0]
    else:
        residue %= p
        if residue not in roots:
            raise ValueError("requested branch is not a square root mod p")
        r = residue
    rel = a.relprec
    k = 1
    while k < rel:
        k = min(2 * k, rel)
        mod = p ** k
        r = (r + a.unit * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    half = a.valuation // 2
    return PadicNumber(p, half, r, half + rel)


# -- polynomials over Q_p (coefficient lists, constant term first) ----------

def poly_eval(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_deriv(coeffs):
    return [c * i for i, c in enumerate(coeffs)][1:] or [0]


def canonical_key(r: PadicNumber):
    """Order by the digit string read from the lowest power upward.

    Unlike comparing integer lifts, this order does not change when the
    same values are computed to a different precision.
    """
    p = r.p
    if r.is_zero():
        return (0, 0, ())
    ds = [0] * r.valuation if r.valuation >= 0 else []
    u = r.unit
    for _ in range(r.relprec):
        ds.append(u % p)
        u //= p
    return (1 if r.valuation < 0 else 0, -r.valuation if r.valuation < 0 else 0, tuple(ds))


_root_sort_key = canonical_key


def hensel_roots(coeffs, ctx: PadicContext) -> list[PadicNumber]:
    """All simple roots in Q_p of a polynomial, lifted by Newton iteration.

    Roots outside Z_p are found as inverses of roots in pZ_p of the
    reversed polynomial.  A residue root where the derivative vanishes mod
    p raises :class:`NonSimpleRootError`.
    """
    p = ctx.p
    cs = [ctx(c) if not isinstance(c, PadicNumber) else c for c in coeffs]
    while cs and cs[-1].is_exact_zero():
        cs.pop()
    if not cs or all(c.is_zero() for c in cs):
        raise ValueError("zero polynomial")
    vmin = min(c.valuation for c in cs if not c.is_zero())
    cs = [c / Fraction(p) ** vmin for c in cs]
    prec = min(c.absprec for c in cs)
    prec = min(prec, ctx.N)
    if prec < 1:
        raise PrecisionError("polynomial known to no digits")
    mod = p ** prec
    ints = [int(c.lift()) % mod for c in cs]

    def lift_roots(poly, only_zero=False):
        deg = len(poly) - 1
        found = []
        dpoly = [i * poly[i] for i in range(1, deg + 1)]
        cands = [0] if only_zero else range(p)
        for r in cands:
            if sum(c * r ** i for i, c in enumerate(poly)) % p:
                continue
            if sum(c * r ** i for i, c in enumerate(dpoly)) % p == 0:
                raise NonSimpleRootError(f"non-simple root {r} mod {p} - not supported")
            x, k = r, 1
            while k < prec:
                k = min(2 * k, prec)
                m = p ** k
                fx = sum(c * pow(x, i, m) for i, c in enumerate(poly)) % m
                dfx = sum(c * pow(x, i, m) for i, c in enumerate(dpoly)) % m
                x = (x - fx * pow(dfx, -1, m)) % m
            found.append(x)
        return found

    roots = [PadicNumber(p, 0, r, prec) for r in lift_roots(ints)]
    if ints[-1] % p == 0:
        rev = list(reversed(ints))
        while rev and rev[-1] % mod == 0:
            rev.pop()
        for rho in lift_roots(rev, only_zero=True):
            if rho == 0:
                continue
            roots.append(PadicNumber(p, 0, rho, prec).inverse())
    roots.sort(key=_root_sort_key)
    return roots
