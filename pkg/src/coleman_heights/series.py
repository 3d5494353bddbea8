"""Truncated Laurent series with p-adic (or exact rational) coefficients."""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import SeriesError
from .padic import INF, PadicNumber


def _is_zero(c) -> bool:
    if isinstance(c, PadicNumber):
        return c.is_zero()
    return c == 0


class PadicSeries:
    """``sum c[i] t^(start+i) + O(t^prec)``; ``prec=None`` means exact.

    Coefficients are :class:`PadicNumber` values, or plain rationals for
    exact series built over Q (they combine freely with PadicNumbers).
    """

    __slots__ = ("coeffs", "start", "prec", "var")

    def __init__(self, coeffs, start: int = 0, prec: int | None = None, var: str = "t"):
        coeffs = list(coeffs)
        if prec is not None:
            coeffs = coeffs[: max(0, prec - start)]
        # strip leading zeros that are exact
        while coeffs and _is_zero(coeffs[0]) and not _inexact(coeffs[0]):
            coeffs.pop(0)
            start += 1
        while coeffs and _is_zero(coeffs[-1]) and not _inexact(coeffs[-1]):
            coeffs.pop()
        if not coeffs and prec is not None:
            start = min(start, prec)
        self.coeffs = coeffs
        self.start = start
        self.prec = prec
        self.var = var

    # -- basic access ----------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict, prec=None, var="t"):
        if not d:
            return cls([], 0, prec, var)
        lo, hi = min(d), max(d)
        return cls([d.get(k, 0) for k in range(lo, hi + 1)], lo, prec, var)

    def __getitem__(self, n: int):
        i = n - self.start
        if self.prec is not None and n >= self.prec:
            raise SeriesError(f"coefficient t^{n} beyond truncation order {self.prec}")
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def items(self):
        for i, c in enumerate(self.coeffs):
            if not (_is_zero(c) and not _inexact(c)):
                yield self.start + i, c

    def valuation(self):
        """Lowest exponent with a coefficient not known to be zero."""
        for n, c in self.items():
            if not _is_zero(c):
                return n
        return self.prec if self.prec is not None else INF

    def degree(self):
        return self.start + len(self.coeffs) - 1

    def truncate(self, prec: int) -> "PadicSeries":
        if self.prec is not None and prec > self.prec:
            prec = self.prec
        return PadicSeries(self.coeffs, self.start, prec, self.var)

    def __repr__(self):
        terms = []
        for n, c in self.items():
            if _is_zero(c):
                continue
            terms.append(f"({c})*{self.var}^{n}")
        if self.prec is not None:
            terms.append(f"O({self.var}^{self.prec})")
        return " + ".join(terms) if terms else "0"

    # -- ring operations -------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PadicSeries):
            return other
        return PadicSeries([other], 0, None, self.var)

    def __add__(self, other):
        b = self._coerce(other)
        a = self
        prec = _min_prec(a.prec, b.prec)
        d = {}
        for n, c in a.items():
            if prec is None or n < prec:
                d[n] = c
        for n, c in b.items():
            if prec is None or n < prec:
                d[n] = d[n] + c if n in d else c
        return PadicSeries.from_dict(d, prec, self.var)

    __radd__ = __add__

    def __neg__(self):
        return PadicSeries([-c for c in self.coeffs], self.start, self.prec, self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PadicSeries):
            return PadicSeries([c * other for c in self.coeffs], self.start, self.prec, self.var)
        a, b = self, other
        va, vb = a.valuation(), b.valuation()
        if va == INF or vb == INF:
            return PadicSeries([], 0, None, self.var)
        cands = []
        if a.prec is not None:
            cands.append(a.prec + vb)
        if b.prec is not None:
            cands.append(b.prec + va)
        prec = min(cands) if cands else None
        ca, cb = a.coeffs, b.coeffs
        sa, sb = a.start, b.start
        n_out = len(ca) + len(cb) - 1
        if prec is not None:
            n_out = min(n_out, prec - sa - sb)
        out = [0] * max(n_out, 0)
        for i, x in enumerate(ca):
            if _is_zero(x) and not _inexact(x):
                continue
            lim = min(len(cb), n_out - i)
            for j in range(lim):
                y = cb[j]
                if _is_zero(y) and not _inexact(y):
                    continue
                out[i + j] = out[i + j] + x * y
        return PadicSeries(out, sa + sb, prec, self.var)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, PadicSeries):
            return self * other.inverse()
        return PadicSeries([c / other for c in self.coeffs], self.start, self.prec, self.var)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicSeries([1], 0, None, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, k: int) -> "PadicSeries":
        """Multiply by t^k."""
        return PadicSeries(self.coeffs, self.start + k,
                           None if self.prec is None else self.prec + k, self.var)

    # -- analytic operations ---------------------------------------------
    def inverse(self, prec: int | None = None) -> "PadicSeries":
        """Inverse of a series whose lowest coefficient is invertible."""
        v = self.valuation()
        if v == INF:
            raise SeriesError("inverse of zero series")
        rel = None if self.prec is None else self.prec - v
        if rel is None:
            if prec is None:
                raise SeriesError("exact series needs an explicit target order")
            rel = prec + v
        elif prec is not None:
            rel = min(rel, prec + v)
        u = [self[v + i] if (self.prec is None or v + i < self.prec) else 0 for i in range(rel)]
        c0 = u[0]
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out = [inv0]
        for n in range(1, rel):
            acc = 0
            for k in range(1, n + 1):
                if k < len(u) and not (_is_zero(u[k]) and not _inexact(u[k])):
                    acc = acc + u[k] * out[n - k]
            out.append(-acc * inv0)
        return PadicSeries(out, -v, rel - v, self.var)

    def differentiate(self) -> "PadicSeries":
        d = {}
        for n, c in self.items():
            if n != 0:
                d[n - 1] = c * n
        return PadicSeries.from_dict(d, None if self.prec is None else self.prec - 1, self.var)

    def integrate(self) -> "PadicSeries":
        """Primitive with zero constant term; the t^-1 coefficient must vanish."""
        d = {}
        for n, c in self.items():
            if n == -1:
                if not _is_zero(c):
                    raise SeriesError(f"nonzero residue {c}: form is not of the second kind")
                continue
            d[n + 1] = c / (n + 1) if isinstance(c, PadicNumber) else Fraction(c) / (n + 1)
        return PadicSeries.from_dict(d, None if self.prec is None else self.prec + 1, self.var)

    integrate_dt = integrate

    def residue(self):
        return self[-1]

    def compose(self, inner: "PadicSeries") -> "PadicSeries":
        """self(inner(t)); ``inner`` must have positive valuation."""
        vi = inner.valuation()
        if vi == INF or vi < 1:
            raise SeriesError("composition needs an inner series with positive valuation")
        if self.prec is None:
            bound = None
        else:
            bound = self.prec * vi
        if inner.prec is not None:
            s = self.valuation()
            lead = (s - 1) if s != 0 else 0
            b2 = inner.prec + lead * vi
            bound = b2 if bound is None else min(bound, b2)
        if bound is None:
            raise SeriesError("exact composition needs a truncation")
        result = PadicSeries([], 0, bound, self.var)
        pos = PadicSeries([1], 0, None, self.var)
        neg = None
        cur = 0
        for n, c in sorted(self.items()):
            if n >= 0:
                while cur < n:
                    pos = (pos * inner).truncate(bound)
                    cur += 1
                result = result + pos * c
            else:
                if neg is None:
                    neg = inner.inverse(prec=bound)
                result = result + (neg ** (-n)).truncate(bound) * c
        return result

    def exp(self) -> "PadicSeries":
        v = self.valuation()
        if v < 1:
            raise SeriesError("exp needs a series with positive valuation")
        T = self.prec
        if T is None:
            raise SeriesError("exp of an exact series needs a truncation")
        f = [self[k] if k >= self.start else 0 for k in range(T)]
        g = [1]
        for n in range(1, T):
            acc = 0
            for k in range(1, n + 1):
                if not (_is_zero(f[k]) and not _inexact(f[k])):
                    acc = acc + f[k] * g[n - k] * k
            g.append(acc / n if isinstance(acc, PadicNumber) else Fraction(acc) / n)
        return PadicSeries(g, 0, T, self.var)

    def log(self) -> "PadicSeries":
        c0 = self[0]
        if self.valuation() != 0 or not (c0 == 1):
            raise SeriesError("log needs leading term 1")
        return (self.differentiate() * self.inverse()).integrate()

    def evaluate(self, z, tail=0):
        """Sum at ``z`` (valuation >= 1) plus a certified error term.

        ``tail`` bounds the valuation of the omitted coefficients: an int,
        or a callable n -> int.
        """
        if not isinstance(z, PadicNumber):
            raise SeriesError("evaluation point must be p-adic")
        vz = z.valuation
        if z.is_zero() and self.valuation() < 0:
            raise SeriesError("pole at the evaluation point")
        if vz < 1:
            raise SeriesError("evaluation point outside the residue disc")
        p = z.p
        acc = None
        const = 0
        zi = None
        for n, c in self.items():
            if n == 0:
                const = c
                continue
            if n > 0:
                term = c * (z ** n)
            else:
                if zi is None:
                    zi = z.inverse()
                term = c * (zi ** (-n))
            acc = term if acc is None else acc + term
        if acc is None:
            acc = PadicNumber.from_rational(p, 0, z.absprec) if not isinstance(const, PadicNumber) \
                else PadicNumber.exact_zero(p)
        acc = acc + const
        if self.prec is not None:
            tb = tail if callable(tail) else (lambda n, t=tail: t)
            err = min(n * vz + tb(n) for n in range(self.prec, 2 * self.prec + p + 8))
            if err < INF:
                err = math.floor(err)
                acc = acc + PadicNumber._make(p, err, 0, err)
        return acc


def _inexact(c) -> bool:
    return isinstance(c, PadicNumber) and not c.is_exact_zero()


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def integrated_tail(p: int):
    """Valuation bound -log_p(n) for coefficients of a primitive of an integral series."""
    return lambda n: -int(math.log(max(n, 1), p) + 1e-9)


def series_ops(a: PadicSeries, b, op: str):
    """Dispatcher mirroring the operation table of the padic-core module."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "compose":
        return a.compose(b)
    if op == "invert_unit":
        return a.inverse()
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    if op == "differentiate":
        return a.differentiate()
    if op == "integrate_dt":
        return a.integrate()
    if op == "evaluate":
        return a.evaluate(b)
    raise ValueError(f"unknown series operation {op!r}")
