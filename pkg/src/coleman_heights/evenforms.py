"""Coleman integrals of differentials R(x) dx, R rational with poles at the roots of f0.

Products of Frobenius corrections with omega, eta or with each other's
differentials are even in y0, hence of this shape.  They are reduced to
``poly dx + d(exact) + r(x)/f0(x) dx`` and the last piece is integrated as a
trace of logarithms over the etale algebra Z_p[theta]/(f0).
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .fixedpoly import FixedRing, bezout_fractions, deriv_int, divmod_monic, mul_int_polys
from .padic import PadicNumber


class EtaleCubic:
    """Arithmetic in Z_p[theta]/(f0) for a monic cubic f0 with unit discriminant."""

    def __init__(self, f0: list[PadicNumber]):
        self.q = f0  # constant term first, f0[3] == 1
        self.p = f0[0].p
        q0, q1, q2 = f0[0], f0[1], f0[2]
        # traces of theta and theta^2 (Newton sums); the trace of 1 is 3
        self.tr1 = -q2
        self.tr2 = q2 * q2 - 2 * q1

    def mul(self, a, b):
        prod = [None] * 5
        for i in range(3):
            for j in range(3):
                t = a[i] * b[j]
                prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
        q0, q1, q2 = self.q[0], self.q[1], self.q[2]
        for k in (4, 3):
            c = prod[k]
            # theta^k = theta^(k-3) * (-q2 theta^2 - q1 theta - q0)
            prod[k - 1] = prod[k - 1] - c * q2
            prod[k - 2] = prod[k - 2] - c * q1
            prod[k - 3] = prod[k - 3] - c * q0
        return prod[:3]

    def power(self, a, n: int):
        one = PadicNumber.from_rational(self.p, 1, a[0].absprec)
        zero = PadicNumber.from_rational(self.p, 0, a[0].absprec)
        result = [one, zero, zero]
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def trace(self, a) -> PadicNumber:
        return a[0] * 3 + a[1] * self.tr1 + a[2] * self.tr2

    def log_unit(self, a):
        """Iwasawa-type log of a unit of the algebra (kills roots of unity)."""
        p = self.p
        L = lcm(p - 1, p * p - 1, p ** 3 - 1)
        u = self.power(a, L)
        z = [u[0] - 1, u[1], u[2]]
        prec = min(c.absprec for c in a)
        vz = min(c.valuation for c in z)
        if vz >= prec:
            return [PadicNumber._make(p, prec, 0, prec)] * 3
        if vz < 1:
            raise ValueError("element is not a unit of the algebra")
        total = list(z)
        zk = z
        k = 1
        while True:
            k += 1
            # terms z^k/k have valuation >= k*vz - log_p(k)
            if k * vz - _flog(k, p) >= prec + 1:
                break
            zk = self.mul(zk, z)
            sign = 1 if k % 2 else -1
            total = [t + zk_i * Fraction(sign, k) for t, zk_i in zip(total, zk)]
        return [t / L for t in total]


def _flog(n: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


class ReducedForm:
    """poly dx + d(sum H_k / f0^k) + r(x)/f0(x) dx, with fixed-point data."""

    def __init__(self, prim, exact, log_r):
        self.prim = prim      # primitive of the polynomial part
        self.exact = exact    # {k: H_k}
        self.log_r = log_r    # remainder r(x), degree <= 2


class EvenFormIntegrator:
    """Reduces and integrates the even forms attached to a FrobeniusData."""

    def __init__(self, fd):
        self.fd = fd
        self.p = fd.p
        self.R = R = FixedRing(fd.p, fd.W)
        self.W = fd.W
        self.cap = fd.prec - fd.even_loss
        f0 = list(fd.f0)
        self.Q = R.from_fractions(f0)
        self.Qd = deriv_int(self.Q)
        _, V = bezout_fractions(f0, [i * f0[i] for i in range(1, 4)])
        self.V = R.from_fractions(V)
        wp = fd.W
        self.alg = EtaleCubic([PadicNumber.from_rational(fd.p, c, wp) for c in f0])
        self.Vpad = [PadicNumber.from_rational(fd.p, c, wp) for c in V] + \
            [PadicNumber.from_rational(fd.p, 0, wp)] * (3 - len(V))
        self._reduced: dict = {}

    # -- building the forms ------------------------------------------------
    def _dg_terms(self, i):
        """d g_i = sum_m B_m(x) y0^(-m) dx over odd m >= 1."""
        R, Q, Qd = self.R, self.Q, self.Qd
        Gc, Ge = self.fd.G_fixed[i]
        B: dict[int, tuple] = {}
        if Gc:
            t1 = R.mul_int((deriv_int(Gc), Ge), Q)
            t2 = R.scale(R.mul_int((Gc, Ge), Qd), Fraction(1, 2))
            B[1] = R.add(t1, t2)
        for n, (Sc, Se) in self.fd.S_fixed[i].items():
            t1 = R.mul_int((deriv_int(Sc), Se), Q)
            t2 = R.scale(R.mul_int((Sc, Se), Qd), Fraction(-n, 2))
            val = R.add(t1, t2)
            B[n + 2] = R.add(B[n + 2], val) if n + 2 in B else val
        return B

    def _g_terms(self, j):
        """g_j as {-1: G_j} (coefficient of y0) plus {n: S_n} (coefficient of y0^-n)."""
        out = {}
        Gc, Ge = self.fd.G_fixed[j]
        if Gc:
            out[-1] = (Gc, Ge)
        out.update(self.fd.S_fixed[j])
        return out

    def _accumulate(self, levels, k, val):
        if val[0]:
            levels[k] = self.R.add(levels[k], val) if k in levels else val

    def form_g_omega(self, j, k):
        """g_j * omega_k = g_j x^k dx / (2 y0)."""
        R = self.R
        levels: dict[int, tuple] = {}
        xk = [0] * k + [1]
        for n, val in self._g_terms(j).items():
            v = R.scale(R.mul_int(val, xk), Fraction(1, 2))
            self._accumulate(levels, (n + 1) // 2, v)
        return levels

    def form_g_dg(self, j, i):
        """g_j * d g_i."""
        R, W = self.R, self.W
        levels: dict[int, tuple] = {}
        g = self._g_terms(j)
        B = self._dg_terms(i)
        gv = {n: R.valuation(v) for n, v in g.items()}
        bv = {m: R.valuation(v) for m, v in B.items()}
        for n, gval in g.items():
            for m, bval in B.items():
                if gv[n] + bv[m] >= W:
                    continue
                self._accumulate(levels, (n + m) // 2, R.mul(gval, bval))
        return levels

    # -- reduction -----------------------------------------------------------
    def reduce(self, levels) -> ReducedForm:
        R, Q, Qd, V = self.R, self.Q, self.Qd, self.V
        levels = dict(levels)
        exact: dict[int, tuple] = {}
        kmax = max(levels) if levels else 0
        for k in range(kmax, 1, -1):
            A = levels.pop(k, None)
            if A is None or not A[0]:
                continue
            c, e = R.normalize(*A)
            m = R.mod(e)
            _, Ar = divmod_monic(c, Q, m)
            _, S = divmod_monic(mul_int_polys(Ar, V), Q, m)
            SQd = mul_int_polys(S, Qd)
            T = [(c[t] if t < len(c) else 0) - (SQd[t] if t < len(SQd) else 0)
                 for t in range(max(len(c), len(SQd)))]
            Rq, _ = divmod_monic(T, Q, m)
            new = R.add(R.reduce(Rq, e), R.scale((deriv_int(S), e), Fraction(1, k - 1)))
            self._accumulate(levels, k - 1, new)
            if any(S):
                exact[k - 1] = R.normalize(*R.scale((S, e), Fraction(-1, k - 1)))
        log_r = ([], 0)
        A = levels.pop(1, None)
        if A is not None and A[0]:
            c, e = A
            quo, rem = divmod_monic(c, Q, R.mod(e))
            log_r = R.reduce(rem, e)
            self._accumulate(levels, 0, R.reduce(quo, e))
        P = levels.pop(0, ([], 0))
        prim = ([], 0)
        for t, coef in enumerate(P[0]):
            if coef:
                mono = R.scale(([0] * (t + 1) + [coef], P[1]), Fraction(1, t + 1))
                prim = R.add(prim, mono)
        return ReducedForm(prim, exact, log_r)

    def reduced(self, kind: str, a: int, b: int) -> ReducedForm:
        key = (kind, a, b)
        if key not in self._reduced:
            levels = self.form_g_omega(a, b) if kind == "gw" else self.form_g_dg(a, b)
            self._reduced[key] = self.reduce(levels)
        return self._reduced[key]

    # -- evaluation --------------------------------------------------------
    def _padic_poly(self, fixed):
        c, e = fixed
        return self.R.to_padic(c, e, self.W)

    def integrate(self, form: ReducedForm, xa: PadicNumber, xb: PadicNumber) -> PadicNumber:
        """Integral of the reduced form between points with x-coordinates xa, xb.

        Both points must lie in non-Weierstrass residue discs with integral x.
        """
        prim = self._padic_poly(form.prim)
        total = _horner(prim, xb) - _horner(prim, xa)
        if form.exact:
            f0 = [PadicNumber.from_rational(self.p, c, self.W) for c in self.fd.f0]
            for x, sign in ((xb, 1), (xa, -1)):
                qinv = _horner(f0, x).inverse()
                acc = None
                for k in range(max(form.exact), 0, -1):
                    if acc is not None:
                        acc = acc * qinv
                    if k in form.exact:
                        h = _horner(self._padic_poly(form.exact[k]), x)
                        acc = h if acc is None else acc + h
                acc = acc * qinv
                total = total + acc if sign > 0 else total - acc
        if form.log_r[0]:
            r = self._padic_poly(form.log_r)
            zero = PadicNumber.from_rational(self.p, 0, self.W)
            r = r + [zero] * (3 - len(r))
            alg = self.alg
            coef = alg.mul(r, self.Vpad)  # r(theta) / f0'(theta)
            minus_one = PadicNumber.from_rational(self.p, -1, self.W)
            lb = alg.log_unit([xb, minus_one, zero])  # x_b - theta
            la = alg.log_unit([xa, minus_one, zero])
            diff = [u - v for u, v in zip(lb, la)]
            total = total + alg.trace(alg.mul(coef, diff))
        return total.add_bigoh(self.cap) if total.absprec > self.cap else total


def _horner(coeffs, x):
    if not coeffs:
        return PadicNumber.exact_zero(x.p)
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc
