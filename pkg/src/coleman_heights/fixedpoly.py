"""Polynomials over Q_p stored as integer vectors with a shared p-power denominator.

A value ``(c, e)`` means ``sum c[i] x^i / p^e``; coefficients are kept
modulo ``p^(W+e)``, i.e. every value is rounded at absolute precision p^W.
This is the fast representation used by the cohomology reductions.
"""

from __future__ import annotations

from fractions import Fraction

from .padic import PadicNumber, valuation_int


class FixedRing:
    def __init__(self, p: int, W: int):
        self.p = p
        self.W = W
        self._pows = [1]

    def pw(self, k: int) -> int:
        pows = self._pows
        while len(pows) <= k:
            pows.append(pows[-1] * self.p)
        return pows[k]

    def mod(self, e: int) -> int:
        return self.pw(self.W + e)

    # -- conversions -----------------------------------------------------
    def from_fraction(self, q) -> int:
        """A p-integral rational as an integer mod p^W."""
        q = Fraction(q)
        m = self.mod(0)
        return q.numerator * pow(q.denominator, -1, m) % m

    def from_fractions(self, qs) -> list[int]:
        return [self.from_fraction(q) for q in qs]

    def reduce(self, c, e):
        m = self.mod(e)
        c = [x % m for x in c]
        while c and c[-1] == 0:
            c.pop()
        return c, e

    def normalize(self, c, e):
        p = self.p
        while e > 0 and all(x % p == 0 for x in c):
            c = [x // p for x in c]
            e -= 1
        return self.reduce(c, e)

    def to_padic(self, c, e, absprec: int) -> list[PadicNumber]:
        p = self.p
        out = []
        for x in c:
            if x == 0:
                out.append(PadicNumber._make(p, absprec, 0, absprec))
            else:
                out.append(PadicNumber(p, -e, x, absprec))
        return out

    def scalar_to_padic(self, x: int, e: int, absprec: int) -> PadicNumber:
        if x % self.mod(e) == 0:
            return PadicNumber._make(self.p, absprec, 0, absprec)
        return PadicNumber(self.p, -e, x, absprec)

    # -- arithmetic ------------------------------------------------------
    def add(self, a, b):
        (ca, ea), (cb, eb) = a, b
        if ea < eb:
            ca, ea, cb, eb = cb, eb, ca, ea
        s = self.pw(ea - eb)
        n = max(len(ca), len(cb))
        out = list(ca) + [0] * (n - len(ca))
        for i, x in enumerate(cb):
            out[i] += x * s
        return self.reduce(out, ea)

    def scale(self, a, q):
        """Multiply by a rational (or int) scalar."""
        c, e = a
        q = Fraction(q)
        if q == 0:
            return [], 0
        v = valuation_int(q.numerator, self.p) - valuation_int(q.denominator, self.p)
        num = q.numerator // self.pw(max(v, 0)) if v > 0 else q.numerator
        den = q.denominator // self.pw(-v) if v < 0 else q.denominator
        if v >= 0:
            m = self.mod(e)
            f = num * self.pw(v) * pow(den, -1, m) % m
            return self.reduce([x * f for x in c], e)
        e2 = e - v
        m = self.mod(e2)
        f = num * pow(den, -1, m) % m
        return self.reduce([x * f for x in c], e2)

    def mul(self, a, b):
        (ca, ea), (cb, eb) = a, b
        return self.reduce(mul_int_polys(ca, cb), ea + eb)

    def valuation(self, a):
        """Least valuation among the coefficients (inf for zero)."""
        c, e = a
        best = None
        for x in c:
            if x:
                v = valuation_int(x, self.p)
                if best is None or v < best:
                    best = v
        return float("inf") if best is None else best - e

    def mul_int(self, a, poly: list[int]):
        """Product with a p-integral polynomial given by integers mod p^W."""
        c, e = a
        return self.reduce(mul_int_polys(c, poly), e)


def mul_int_polys(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def divmod_monic(a: list[int], q: list[int], m: int):
    """Quotient and remainder of a by the monic polynomial q, modulo m."""
    a = list(a)
    dq = len(q) - 1
    if len(a) <= dq:
        return [], a
    quo = [0] * (len(a) - dq)
    for i in range(len(a) - 1, dq - 1, -1):
        c = a[i] % m
        if c:
            quo[i - dq] = c
            for j in range(dq):
                a[i - dq + j] -= c * q[j]
        a[i] = 0
    rem = [x % m for x in a[:dq]]
    return quo, rem


def deriv_int(a: list[int]) -> list[int]:
    return [i * a[i] for i in range(1, len(a))]


def poly_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def bezout_fractions(Q: list[Fraction], Qp: list[Fraction]):
    """U, V with U*Q + V*Q' = 1 over Q (exact extended Euclid)."""

    def trim(a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def pdivmod(a, b):
        a = trim(a)
        b = trim(b)
        if len(a) < len(b):
            return [], a
        quo = [Fraction(0)] * (len(a) - len(b) + 1)
        a = list(a)
        for i in range(len(a) - len(b), -1, -1):
            c = a[i + len(b) - 1] / b[-1]
            quo[i] = c
            for j, y in enumerate(b):
                a[i + j] -= c * y
        return quo, trim(a[: len(b) - 1])

    def sub(a, b):
        return trim(poly_add(a, [-x for x in b]))

    def mul(a, b):
        if not a or not b:
            return []
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out

    r0, r1 = trim(Q), trim(Qp)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        quo, rem = pdivmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    if len(r0) != 1:
        raise ValueError("polynomials are not coprime")
    g = r0[0]
    return [x / g for x in s0], [x / g for x in t0]
