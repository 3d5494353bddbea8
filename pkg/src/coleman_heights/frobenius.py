"""Frobenius on the de Rham cohomology of an elliptic curve at a good prime.

The curve is put in the completed-square form y0^2 = f0(x) with the basis
omega = dx/(2 y0), eta = x dx/(2 y0).  The Frobenius lift is x -> x^p,
y0 -> y0^p (1 + (f0(x^p) - f0(x)^p)/y0^(2p))^(1/2), and pullbacks are reduced
to the basis with the usual Monsky-Washnitzer rewriting rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .curve import FormalExpansion, WeierstrassCurve, formal_expansions
from .errors import BadReductionError, PrecisionError, SupersingularError
from .fixedpoly import (FixedRing, bezout_fractions, deriv_int, divmod_monic,
                        mul_int_polys)
from .padic import PadicContext, PadicNumber

FORMAT_TAG = "coleman-frobenius v1"


@dataclass(frozen=True)
class ShortModel:
    curve: WeierstrassCurve
    p: int
    f0: tuple[Fraction, ...]  # constant term first, monic cubic

    def y0_of(self, x, y):
        c = self.curve
        return y + (c.a1 * x + c.a3) / 2

    def y_of(self, x, y0):
        c = self.curve
        return y0 - (c.a1 * x + c.a3) / 2


def to_short_model(curve: WeierstrassCurve, ctx: PadicContext) -> ShortModel:
    p = ctx.p
    if p == 2:
        raise BadReductionError("p = 2 is not supported")
    if not curve.is_integral_at(p):
        raise BadReductionError(f"model is not integral at {p}")
    if curve.disc.numerator % p == 0:
        raise BadReductionError(f"{curve} has bad reduction at {p}")
    return ShortModel(curve, p, tuple(curve.f0_coeffs()))


def _binom_half(k: int) -> Fraction:
    """binomial(-1/2, k)."""
    return Fraction((-1) ** k * math.comb(2 * k, k), 4 ** k)


def _flog(n: int, p: int) -> int:
    """floor(log_p(n)) for n >= 1."""
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


def _reduction_loss(p: int, n_max: int, deg1: int) -> int:
    # denominators from dividing by odd levels and by 2j+3, plus one guard digit
    return _flog(max(n_max, 1), p) + _flog(2 * deg1 + 3, p) + 1


def _truncation_bound(p: int, k: int, deg1: int) -> int:
    """Valuation lower bound for the reduced k-th term of the Frobenius expansion."""
    return k + 1 - _flog(p * (2 * k + 1), p) - _flog(2 * deg1 + 3, p)


@dataclass
class FrobeniusData:
    """Matrix of Frobenius on {omega, eta} plus the exactness corrections.

    ``phi^* omega_i = sum_j M[i][j] omega_j + d g_i`` where
    ``g_i = y0 * G_i(x) + sum_n S_i[n](x) y0^(-n)``.  Internally the data is
    kept as fixed-point integer vectors (see :mod:`fixedpoly`).
    """

    p: int
    ainvs: tuple[Fraction, ...]
    f0: tuple[Fraction, ...]
    W: int
    prec: int
    even_loss: int  # extra digits reserved for reducing products of corrections
    M_fixed: list  # [[(int, e), (int, e)], [...]]
    G_fixed: list  # per basis form: (coeffs, e)
    S_fixed: list  # per basis form: {n: (coeffs, e)}
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ring(self) -> FixedRing:
        return FixedRing(self.p, self.W)

    @property
    def M(self) -> list[list[PadicNumber]]:
        if "M" not in self._cache:
            R = self.ring
            self._cache["M"] = [[R.scalar_to_padic(x, e, self.prec) for x, e in row]
                                for row in self.M_fixed]
        return self._cache["M"]

    def trace(self) -> PadicNumber:
        M = self.M
        return M[0][0] + M[1][1]

    def det(self) -> PadicNumber:
        M = self.M
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]

    def correction_padic(self, i: int):
        """(G, {n: S_n}) for basis form i as PadicNumber coefficient lists."""
        key = ("g", i)
        if key not in self._cache:
            R = self.ring
            c, e = self.G_fixed[i]
            G = R.to_padic(c, e, self.prec)
            S = {n: R.to_padic(cs, es, self.prec) for n, (cs, es) in self.S_fixed[i].items()}
            self._cache[key] = (G, S)
        return self._cache[key]

    def correction_value(self, i: int, x: PadicNumber, y0: PadicNumber) -> PadicNumber:
        """g_i at a point of y0^2 = f0(x) with y0 a unit."""
        G, S = self.correction_padic(i)
        acc = _horner(G, x) * y0
        if S:
            yinv = y0.inverse()
            yinv2 = yinv * yinv
            top = max(S)
            # sum over odd n of S_n(x) yinv^n, Horner in yinv^2
            total = None
            for n in range(top, 0, -2):
                term = _horner(S[n], x) if n in S else None
                if total is None:
                    total = term
                else:
                    total = total * yinv2
                    if term is not None:
                        total = total + term
            acc = acc + total * yinv
        return acc.add_bigoh(self.prec) if acc.absprec > self.prec else acc

    # -- serialization ---------------------------------------------------
    def to_text(self) -> str:
        lines = [FORMAT_TAG, f"p {self.p}",
                 "ainvs " + " ".join(str(a) for a in self.ainvs),
                 "f0 " + " ".join(str(a) for a in self.f0),
                 f"W {self.W}", f"prec {self.prec}", f"even_loss {self.even_loss}"]
        for i in range(2):
            lines.append(f"M{i} " + " ".join(f"{x}/{e}" for x, e in self.M_fixed[i]))
        for i in range(2):
            c, e = self.G_fixed[i]
            lines.append(f"G{i} {e} " + " ".join(map(str, c)))
            for n in sorted(self.S_fixed[i]):
                cs, es = self.S_fixed[i][n]
                lines.append(f"S{i} {n} {es} " + " ".join(map(str, cs)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FrobeniusData":
        lines = text.splitlines()
        if not lines or lines[0] != FORMAT_TAG:
            raise ValueError("unknown Frobenius data format")
        kv: dict = {}
        G = [None, None]
        S: list[dict] = [{}, {}]
        M = [None, None]
        for line in lines[1:]:
            head, _, rest = line.partition(" ")
            parts = rest.split()
            if head in ("M0", "M1"):
                M[int(head[1])] = [tuple(int(t) for t in x.split("/")) for x in parts]
            elif head in ("G0", "G1"):
                G[int(head[1])] = ([int(t) for t in parts[1:]], int(parts[0]))
            elif head in ("S0", "S1"):
                S[int(head[1])][int(parts[0])] = ([int(t) for t in parts[2:]], int(parts[1]))
            else:
                kv[head] = parts
        return cls(p=int(kv["p"][0]),
                   ainvs=tuple(Fraction(a) for a in kv["ainvs"]),
                   f0=tuple(Fraction(a) for a in kv["f0"]),
                   W=int(kv["W"][0]), prec=int(kv["prec"][0]),
                   even_loss=int(kv["even_loss"][0]),
                   M_fixed=M, G_fixed=G, S_fixed=S)


def _horner(coeffs, x):
    if not coeffs:
        return PadicNumber.exact_zero(x.p)
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def frobenius_matrix(short: ShortModel, ctx: PadicContext, digits: int | None = None) -> FrobeniusData:
    """Frobenius matrix and corrections, certified to at least ``digits`` digits."""
    p = short.p
    if p < 5:
        raise BadReductionError("p must be at least 5")
    N = digits if digits is not None else ctx.N
    deg1 = 2 * p + 4  # generous bound on degrees met at level y0^-1
    K = 1
    while any(_truncation_bound(p, k, deg1) < N for k in range(K, K + 3 * p)):
        K += 1
    n_max = p * (2 * K - 1)
    even_loss = _flog(n_max, p) + _flog(4 * p + 8, p) + 1
    N_frob = N + even_loss
    while any(_truncation_bound(p, k, deg1) < N_frob for k in range(K, K + 3 * p)):
        K += 1
    n_max = p * (2 * K - 1)
    W = N_frob + _reduction_loss(p, n_max, deg1)
    R = FixedRing(p, W)
    m0 = R.mod(0)

    Qf = list(short.f0)
    Q = R.from_fractions(Qf)
    Qd = deriv_int(Q)
    U, V = bezout_fractions(Qf, [i * Qf[i] for i in range(1, 4)])
    Vi = R.from_fractions(V)

    # E = f0(x^p) - f0(x)^p and its powers, all divisible by p
    Qp = [0] * (3 * p + 1)
    for i, c in enumerate(Q):
        Qp[i * p] = c
    Qpow = [1]
    for _ in range(p):
        Qpow = [x % m0 for x in mul_int_polys(Qpow, Q)]
    E = [(a - b) % m0 for a, b in zip(Qp, Qpow)]
    while E and E[-1] == 0:
        E.pop()
    Epow = [[1]]
    for _ in range(1, K):
        Epow.append([x % m0 for x in mul_int_polys(Epow[-1], E)])

    M_fixed, G_fixed, S_fixed = [], [], []
    for i in range(2):
        levels: dict[int, tuple] = {}
        for k in range(K):
            shift = p * (i + 1) - 1
            poly = [0] * shift + Epow[k]
            val = R.scale((poly, 0), p * _binom_half(k))
            n = p * (2 * k + 1)
            levels[n] = R.add(levels[n], val) if n in levels else val
        g_levels: dict[int, tuple] = {}
        n = n_max
        while n >= 3:
            A = levels.pop(n, None)
            if A is not None and A[0]:
                A = R.normalize(*A)
                c, e = A
                m = R.mod(e)
                _, Ar = divmod_monic(c, Q, m)
                _, S = divmod_monic(mul_int_polys(Ar, Vi), Q, m)
                SQd = mul_int_polys(S, Qd)
                T = [(c[j] if j < len(c) else 0) - (SQd[j] if j < len(SQd) else 0)
                     for j in range(max(len(c), len(SQd)))]
                Rq, rem = divmod_monic(T, Q, m)
                if any(rem):
                    raise PrecisionError("cohomology reduction lost exactness")
                new = R.add(R.reduce(Rq, e), R.scale((deriv_int(S), e), Fraction(2, n - 2)))
                levels[n - 2] = R.add(levels[n - 2], new) if n - 2 in levels else new
                g_levels[n - 2] = R.normalize(*R.scale((S, e), Fraction(-2, n - 2)))
            n -= 2
        # level y0^-1: lower the degree with d(x^j y0)
        A = R.normalize(*levels.get(1, ([], 0)))
        G = ([], 0)
        while len(A[0]) > 2:
            c, e = A
            d = len(c) - 1
            j = d - 2
            lam = R.scale(([c[d]], e), Fraction(1, 2 * j + 3))
            Bj = [0] * (j + 4)
            for t, q in enumerate(Q):
                if j > 0:
                    Bj[t + j - 1] += 2 * j * q
            for t, q in enumerate(Qd):
                Bj[t + j] += q
            sub = R.mul_int((lam[0], lam[1]), Bj)
            A = R.add(A, ([-x for x in sub[0]], sub[1]))
            c, e = A
            if len(c) > d:
                c = c[:d]
            A = R.normalize(c, e)
            gj = ([0] * j + [2 * lam[0][0]] if lam[0] else [], lam[1])
            G = R.add(G, gj)
        c, e = A
        c = list(c) + [0] * (2 - len(c))
        M_fixed.append([(c[0], e), (c[1], e)])
        # halve the corrections: the basis forms are dx/(2y0), x dx/(2y0)
        G_fixed.append(R.normalize(*R.scale(G, Fraction(1, 2))))
        S_fixed.append({n: R.normalize(*R.scale(v, Fraction(1, 2)))
                        for n, v in g_levels.items() if v[0]})

    prec = W - _reduction_loss(p, n_max, deg1)
    prec = min(prec, min(_truncation_bound(p, k, deg1) for k in range(K, K + 3 * p)))
    return FrobeniusData(p=p, ainvs=short.curve.ainvs, f0=short.f0, W=W, prec=prec,
                         even_loss=even_loss,
                         M_fixed=M_fixed, G_fixed=G_fixed, S_fixed=S_fixed)


def unit_root_vector(fd: FrobeniusData, ctx: PadicContext | None = None, start=(1, 1)):
    """Coordinates (alpha, beta) of the unit-root eigenvector of Frobenius on classes.

    Classes are column vectors in the {omega, eta} basis; Frobenius acts by
    M^T.  The vector is normalized so its coordinate of least valuation is 1.
    """
    p = fd.p
    M = fd.M
    tr = fd.trace()
    if tr.is_zero() or tr.valuation > 0:
        raise SupersingularError(
            f"trace of Frobenius is divisible by {p}: no unit root subspace")
    prec = fd.prec
    v = [PadicNumber.from_rational(p, start[0], prec), PadicNumber.from_rational(p, start[1], prec)]
    last = None
    for _ in range(4 * prec + 8):
        w0 = M[0][0] * v[0] + M[1][0] * v[1]
        w1 = M[0][1] * v[0] + M[1][1] * v[1]
        v = _projective_normalize([w0, w1])
        if last is not None and all((a - b).is_zero() for a, b in zip(v, last)):
            break
        last = v
    return v


def _projective_normalize(v):
    a, b = v
    if not b.is_zero() and (a.is_zero() or b.valuation <= a.valuation):
        return [a / b, PadicNumber.from_rational(b.p, 1, (a / b).absprec)]
    return [PadicNumber.from_rational(a.p, 1, (b / a).absprec), b / a]


def c_constant(fd: FrobeniusData) -> PadicNumber:
    """The c with eta + c*omega spanning the unit root subspace."""
    alpha, beta = unit_root_vector(fd)
    if beta.is_zero():
        raise PrecisionError("unit root subspace is the omega line to working precision")
    return alpha / beta


def e2_of_data(curve: WeierstrassCurve, fd: FrobeniusData) -> PadicNumber:
    """E2 = 12 (eta0 . u)/(omega . u) with eta0 = (x + b2/12) omega and [eta].[omega] = 1."""
    c = c_constant(fd)
    return -12 * c + curve.b2


def e2_of(curve: WeierstrassCurve, ctx: PadicContext) -> PadicNumber:
    return e2_of_data(curve, frobenius_matrix(to_short_model(curve, ctx), ctx))


@dataclass
class HeightContext:
    curve: WeierstrassCurve
    ctx: PadicContext
    fd: FrobeniusData
    E2: PadicNumber
    c: PadicNumber
    formal: FormalExpansion
    # model whose invariant differential fixes the tangent vector at the origin
    tangent_model: tuple | None = None  # (WeierstrassCurve, ModelIso from curve to it)
    _sigma: object = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def prec(self) -> int:
        return self.fd.prec

    @property
    def sigma(self):
        if self._sigma is None:
            from .heights import sigma_series
            self._sigma = sigma_series(self)
        return self._sigma


def height_context(curve: WeierstrassCurve, ctx: PadicContext, fd: FrobeniusData | None = None,
                   tangent_model=None, series_order: int | None = None) -> HeightContext:
    if fd is None:
        fd = frobenius_matrix(to_short_model(curve, ctx), ctx)
    E2 = e2_of_data(curve, fd)
    c = curve.b2 / 12 - E2 / 12
    T = series_order or 2 * ctx.N + 8
    return HeightContext(curve, ctx, fd, E2, c, formal_expansions(curve, T),
                         tangent_model=tangent_model)
