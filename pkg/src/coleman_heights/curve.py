"""Weierstrass models over Q, points, isomorphisms and local expansions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import (NotIsomorphicError, PrecisionError, SingularModelError,
                     WeierstrassDiscError)
from .padic import PadicContext, PadicNumber, canonical_key, hensel_roots, is_prime
from .series import PadicSeries


def _Q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def factor_int(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q."""

    def __init__(self, a, label: str | None = None, minimal: bool = False):
        if len(a) != 5:
            raise ValueError("need five a-invariants")
        self.a1, self.a2, self.a3, self.a4, self.a6 = (_Q(c) for c in a)
        self.label = label
        self.minimal = minimal
        a1, a2, a3, a4, a6 = self.ainvs
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        self.c4 = b2 * b2 - 24 * b4
        self.c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
        self.disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if self.disc == 0:
            raise SingularModelError(f"singular model {list(self.ainvs)}: discriminant 0")

    @property
    def ainvs(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __repr__(self):
        name = f" ({self.label})" if self.label else ""
        return f"WeierstrassCurve({[str(c) for c in self.ainvs]}){name}"

    def __eq__(self, other):
        return isinstance(other, WeierstrassCurve) and self.ainvs == other.ainvs

    def __hash__(self):
        return hash(self.ainvs)

    # -- polynomials -----------------------------------------------------
    def f_coeffs(self) -> list[Fraction]:
        """x^3 + a2 x^2 + a4 x + a6, constant term first."""
        return [self.a6, self.a4, self.a2, Fraction(1)]

    def f0_coeffs(self) -> list[Fraction]:
        """Completed-square cubic f + (a1 x + a3)^2 / 4."""
        a1, a2, a3, a4, a6 = self.ainvs
        return [a6 + a3 * a3 / 4, a4 + a1 * a3 / 2, a2 + a1 * a1 / 4, Fraction(1)]

    def division_poly3(self) -> list[Fraction]:
        return [self.b8, 3 * self.b6, 3 * self.b4, self.b2, Fraction(3)]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.ainvs)

    def is_integral_at(self, q: int) -> bool:
        return all(c.denominator % q for c in self.ainvs)

    def bad_primes(self) -> list[int]:
        d = self.disc
        ps = set(factor_int(d.numerator)) | set(factor_int(d.denominator))
        for c in self.ainvs:
            ps |= set(factor_int(c.denominator))
        return sorted(ps)

    def good_primes(self, start: int = 3):
        q = start
        bad = set(self.bad_primes())
        while True:
            if is_prime(q) and q not in bad:
                yield q
            q += 1

    # -- points ----------------------------------------------------------
    def point(self, x, y) -> "CurvePoint":
        P = CurvePoint(self, x if isinstance(x, PadicNumber) else _Q(x),
                       y if isinstance(y, PadicNumber) else _Q(y))
        if not self.is_on(P):
            raise ValueError(f"({x}, {y}) is not on {self}")
        return P

    def infinity(self) -> "CurvePoint":
        return CurvePoint(self, None, None)

    def equation_residual(self, x, y):
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)

    def is_on(self, P: "CurvePoint") -> bool:
        if P.is_infinity():
            return True
        r = self.equation_residual(P.x, P.y)
        if isinstance(r, PadicNumber):
            return r.is_zero()
        return r == 0

    def count_points_mod(self, q: int) -> int:
        """#E(F_q) by enumeration (model integral at q, good reduction)."""
        a = [int(c.numerator * pow(c.denominator, -1, q)) % q for c in self.ainvs]
        a1, a2, a3, a4, a6 = a
        count = 1
        for x in range(q):
            rhs = (x * x * x + a2 * x * x + a4 * x + a6) % q
            for y in range(q):
                if (y * y + a1 * x * y + a3 * y - rhs) % q == 0:
                    count += 1
        return count

    def ap(self, q: int) -> int:
        return q + 1 - self.count_points_mod(q)


@dataclass(frozen=True, eq=False)
class CurvePoint:
    curve: WeierstrassCurve
    x: object = None
    y: object = None

    def is_infinity(self) -> bool:
        return self.x is None

    def is_padic(self) -> bool:
        return isinstance(self.x, PadicNumber) or isinstance(self.y, PadicNumber)

    def __repr__(self):
        if self.is_infinity():
            return "infinity"
        return f"({self.x}, {self.y})"

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.is_infinity() or other.is_infinity():
            return self.is_infinity() and other.is_infinity()
        return _coord_eq(self.x, other.x) and _coord_eq(self.y, other.y)

    __hash__ = None

    def __add__(self, other):
        return point_add(self, other)

    def __neg__(self):
        return point_neg(self)

    def __sub__(self, other):
        return point_add(self, point_neg(other))

    def __rmul__(self, n: int):
        return point_mul(n, self)

    def to_padic(self, ctx: PadicContext, absprec=None) -> "CurvePoint":
        if self.is_infinity() or self.is_padic():
            return self
        return CurvePoint(self.curve, ctx(self.x, absprec), ctx(self.y, absprec))

    def y0(self):
        """Coordinate of the completed-square model, y + (a1 x + a3)/2."""
        c = self.curve
        return self.y + (c.a1 * self.x + c.a3) / 2


def _coord_eq(a, b) -> bool:
    if isinstance(a, PadicNumber) or isinstance(b, PadicNumber):
        d = a - b if isinstance(a, PadicNumber) else -(b - a)
        return d.is_zero()
    return a == b


def _is_zero(v) -> bool:
    return v.is_zero() if isinstance(v, PadicNumber) else v == 0


def point_neg(P: CurvePoint) -> CurvePoint:
    if P.is_infinity():
        return P
    c = P.curve
    return CurvePoint(c, P.x, -P.y - c.a1 * P.x - c.a3)


def point_add(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.curve != Q.curve:
        raise ValueError("points on different curves")
    if P.is_infinity():
        return Q
    if Q.is_infinity():
        return P
    E = P.curve
    a1, a2, a3, a4, a6 = E.ainvs
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if _is_zero(x1 - x2):
        if _is_zero(y1 + y2 + a1 * x2 + a3):
            return E.infinity()
        den = 2 * y1 + a1 * x1 + a3
        if _is_zero(den):
            raise PrecisionError("tangent slope lost all digits")
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        den = x2 - x1
        lam = (y2 - y1) / den
        nu = (y1 * x2 - y2 * x1) / den
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(E, x3, y3)


def point_mul(n: int, P: CurvePoint) -> CurvePoint:
    if n < 0:
        return point_mul(-n, point_neg(P))
    R = P.curve.infinity()
    A = P
    while n:
        if n & 1:
            R = point_add(R, A)
        n >>= 1
        if n:
            A = point_add(A, A)
    return R


# -- rational-point invariants ----------------------------------------------

def denominator_d(P: CurvePoint) -> int:
    """The d >= 1 with x = a/d^2, y = b/d^3."""
    if P.is_infinity() or P.is_padic():
        raise ValueError("denominator_d needs an affine rational point")
    dx = P.x.denominator
    d = isqrt(dx)
    if d * d != dx or P.y.denominator != d ** 3:
        raise ValueError(f"{P} does not have the shape (a/d^2, b/d^3)")
    return d


def reduction_type(curve: WeierstrassCurve, q: int) -> str:
    if not curve.is_integral_at(q):
        raise ValueError(f"model is not integral at {q}")
    return "good" if curve.disc.numerator % q else "bad"


def is_nonsingular_reduction(P: CurvePoint, q: int) -> bool:
    E = P.curve
    if reduction_type(E, q) == "good" or P.is_infinity():
        return True
    if P.x.denominator % q == 0:
        return True  # reduces to the point at infinity
    a1, a2, a3, a4, a6 = E.ainvs
    x, y = P.x, P.y
    fy = 2 * y + a1 * x + a3
    fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
    return not (_zero_mod(fy, q) and _zero_mod(fx, q))


def _zero_mod(v: Fraction, q: int) -> bool:
    return v.numerator % q == 0


def torsion_bound(curve: WeierstrassCurve) -> int:
    """gcd of #E(F_q) over the two smallest good odd primes of an integral model.

    Torsion injects into E(F_q) for good q >= 3, so a torsion point is
    killed by this number.
    """
    qs = []
    for q in curve.good_primes(3):
        if curve.is_integral_at(q):
            qs.append(q)
        if len(qs) == 2:
            break
    n1, n2 = (curve.count_points_mod(q) for q in qs)
    return gcd(n1, n2)


def is_torsion(P: CurvePoint) -> bool:
    if P.is_infinity():
        return True
    return point_mul(torsion_bound(P.curve), P).is_infinity()


def is_good_point(P: CurvePoint, curve: WeierstrassCurve | None = None, minimal=None) -> bool:
    """Integral, non-torsion, and nonsingular modulo every bad prime.

    ``minimal`` is an optional (model, iso) pair: the fiber conditions are
    then checked on that model, which matters when P's own model is not
    minimal at some prime.
    """
    curve = curve or P.curve
    if P.is_infinity() or P.is_padic():
        return False
    if P.x.denominator != 1 or P.y.denominator != 1:
        return False
    if is_torsion(P):
        return False
    if minimal is not None:
        model, iso = minimal
        P = apply_iso(iso, P, model)
        curve = model
        if P.x.denominator != 1 or P.y.denominator != 1:
            return False
    return all(is_nonsingular_reduction(P, q) for q in curve.bad_primes()
               if curve.is_integral_at(q))


# -- torsion over Q_p ---------------------------------------------------------

def _exact_or_padic(root: PadicNumber, poly: list[Fraction]):
    """Return the integer the root equals when it is an exact integer root."""
    if root.valuation < 0 or root.is_zero() and root.absprec < 1:
        return root
    mod = root.p ** root.absprec
    r = root.lift() % mod
    if r > mod // 2:
        r -= mod
    if sum(c * r ** i for i, c in enumerate(poly)) == 0:
        return Fraction(r)
    return root


def _check_good(curve: WeierstrassCurve, p: int):
    if not curve.is_integral_at(p) or curve.disc.numerator % p == 0:
        from .errors import BadReductionError
        raise BadReductionError(f"{curve} does not have good reduction at {p}")


def two_torsion_points(curve: WeierstrassCurve, ctx: PadicContext) -> list[CurvePoint]:
    _check_good(curve, ctx.p)
    f0 = curve.f0_coeffs()
    out = []
    for r in hensel_roots(f0, ctx):
        x = _exact_or_padic(r, f0)
        y = -(curve.a1 * x + curve.a3) / 2
        if isinstance(x, PadicNumber) and not isinstance(y, PadicNumber):
            y = ctx(y)
        out.append(CurvePoint(curve, x, y))
    return out


def three_torsion_points(curve: WeierstrassCurve, ctx: PadicContext) -> list[CurvePoint]:
    _check_good(curve, ctx.p)
    p = ctx.p
    out = []
    f0 = curve.f0_coeffs()
    for A in hensel_roots(curve.division_poly3(), ctx):
        val = sum((c * A ** i for i, c in enumerate(f0) if i), ctx(f0[0]))
        if val.is_zero() or val.valuation % 2 or pow(val.unit % p, (p - 1) // 2, p) != 1:
            continue
        y0 = val.sqrt()
        shift = (A * curve.a1 + curve.a3) / 2
        for s in (y0, -y0):
            out.append(CurvePoint(curve, A, s - shift))
    out.sort(key=lambda P: (canonical_key(P.x), canonical_key(P.y)))
    return out


# -- model isomorphisms -------------------------------------------------------

@dataclass(frozen=True)
class ModelIso:
    """x = u^2 x' + r, y = u^3 y' + s u^2 x' + t from a source to a target model.

    The target's invariant differential is u times the source's.
    """

    u: Fraction
    r: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    t: Fraction = Fraction(0)

    def __post_init__(self):
        if self.u == 0:
            raise ValueError("u must be nonzero")

    def transform(self, curve: WeierstrassCurve, label=None, minimal=False) -> WeierstrassCurve:
        u, r, s, t = (Fraction(v) for v in (self.u, self.r, self.s, self.t))
        a1, a2, a3, a4, a6 = curve.ainvs
        b1 = (a1 + 2 * s) / u
        b2 = (a2 - s * a1 + 3 * r - s * s) / u ** 2
        b3 = (a3 + r * a1 + 2 * t) / u ** 3
        b4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u ** 4
        b6 = (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1) / u ** 6
        return WeierstrassCurve([b1, b2, b3, b4, b6], label=label, minimal=minimal)

    def inverse(self) -> "ModelIso":
        u, r, s, t = self.u, self.r, self.s, self.t
        return ModelIso(1 / u, -r / u ** 2, -s / u, (r * s - t) / u ** 3)

    def compose(self, other: "ModelIso") -> "ModelIso":
        """Apply self, then other."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return ModelIso(u1 * u2, r1 + u1 * u1 * r2, s1 + u1 * s2,
                        t1 + u1 ** 2 * s1 * r2 + u1 ** 3 * t2)


def apply_iso(iso: ModelIso, P: CurvePoint, target: WeierstrassCurve) -> CurvePoint:
    if P.is_infinity():
        return target.infinity()
    u, r, s, t = iso.u, iso.r, iso.s, iso.t
    xp = (P.x - r) / (u * u)
    yp = (P.y - s * (P.x - r) - t) / (u ** 3)
    return CurvePoint(target, xp, yp)


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def find_iso(source: WeierstrassCurve, target: WeierstrassCurve) -> ModelIso:
    """A Q-isomorphism from source to target (positive u preferred)."""
    c4, c6, d4, d6 = source.c4, source.c6, target.c4, target.c6
    cands = []
    if c4 != 0 and c6 != 0:
        if d4 == 0 or d6 == 0:
            raise NotIsomorphicError("j-invariants differ")
        u2 = c6 * d4 / (c4 * d6)
        u = _rational_sqrt(u2)
        if u is not None:
            cands = [u]
    elif c6 == 0:
        if d6 != 0:
            raise NotIsomorphicError("j-invariants differ")
        # u^4 = c4/d4
        q = c4 / d4
        r2 = _rational_sqrt(q)
        u = _rational_sqrt(r2) if r2 is not None else None
        if u is not None:
            cands = [u]
    else:
        if d4 != 0:
            raise NotIsomorphicError("j-invariants differ")
        q = c6 / d6
        # u^6 = q: try integer/rational cube root of a square root
        r2 = _rational_sqrt(q)
        if r2 is not None:
            n = round(abs(r2.numerator) ** (1 / 3))
            d = round(r2.denominator ** (1 / 3))
            for nn in (n - 1, n, n + 1):
                for dd in (d - 1, d, d + 1):
                    if dd > 0 and nn > 0 and Fraction(nn, dd) ** 3 == r2:
                        cands = [Fraction(nn, dd)]
    a1, a2, a3 = source.a1, source.a2, source.a3
    for u in cands + [-u for u in cands]:
        s = (u * target.a1 - a1) / 2
        r = (u * u * target.a2 - a2 + s * a1 + s * s) / 3
        t = (u ** 3 * target.a3 - a3 - r * a1) / 2
        iso = ModelIso(u, r, s, t)
        if iso.transform(source).ainvs == target.ainvs:
            return iso
    raise NotIsomorphicError(f"{source} and {target} are not isomorphic over Q")


# -- local expansions ---------------------------------------------------------

@dataclass
class FormalExpansion:
    """x(t), y(t) and omega = w(t) dt in the parameter t = -x/y at the origin.

    Coefficients are exact rationals; ``eta`` is x(t) w(t) dt.
    """

    curve: WeierstrassCurve
    order: int
    x: PadicSeries
    y: PadicSeries
    w: PadicSeries
    eta: PadicSeries = field(init=False)

    def __post_init__(self):
        self.eta = (self.x * self.w).truncate(self.order - 2)


def formal_expansions(curve: WeierstrassCurve, T: int = 20) -> FormalExpansion:
    """Solve the curve equation in t = -x/y by fixed-point iteration."""
    if T < 5:
        raise ValueError("need T >= 5")
    a1, a2, a3, a4, a6 = curve.ainvs
    L = T + 6
    # w = -1/y satisfies w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3
    w = [Fraction(0)] * L
    w[3] = Fraction(1)

    def mul(a, b):
        out = [Fraction(0)] * L
        for i, ai in enumerate(a):
            if ai:
                for j in range(L - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return out

    for _ in range(L):
        w2 = mul(w, w)
        w3 = mul(w2, w)
        new = [Fraction(0)] * L
        new[3] += 1
        for n in range(L):
            acc = a3 * w2[n] + a6 * w3[n]
            if n >= 1:
                acc += a1 * w[n - 1] + a4 * w2[n - 1]
            if n >= 2:
                acc += a2 * w[n - 2]
            new[n] += acc
        if new == w:
            break
        w = new
    ws = PadicSeries(w, 0, L)
    winv = ws.inverse()
    x = (winv.shift(1)).truncate(T)
    y = (-winv).truncate(T)
    xfull = winv.shift(1)
    yfull = -winv
    den = yfull * 2 + xfull * a1 + a3
    omega = (xfull.differentiate() * den.inverse()).truncate(T)
    return FormalExpansion(curve, T, x, y, omega)


def local_coordinates_at(P: CurvePoint, ctx: PadicContext, T: int):
    """Expansions of omega and eta in s = x - x(P) at a non-Weierstrass point.

    Works on the completed-square model y0^2 = f0(x); omega = ds / (2 y0(s)).
    Returns (omega_series, eta_series, y0_series) with p-adic coefficients.
    """
    E = P.curve
    if P.is_infinity():
        raise ValueError("use the formal expansion at the origin")
    x0 = ctx(P.x)
    y0 = ctx(P.y0())
    if y0.valuation != 0 or x0.valuation < 0:
        if x0.valuation < 0:
            raise ValueError("point lies in the residue disc of the origin")
        raise WeierstrassDiscError(f"{P} lies in a Weierstrass residue disc")
    f0 = [ctx(c) for c in E.f0_coeffs()]
    # f0(x0 + s) as a polynomial in s
    F = [f0[0] + f0[1] * x0 + f0[2] * x0 * x0 + x0 ** 3,
         f0[1] + 2 * f0[2] * x0 + 3 * x0 * x0,
         f0[2] + 3 * x0,
         ctx(1)]
    ys = [y0]
    inv2y = (2 * y0).inverse()
    for n in range(1, T):
        acc = F[n] if n < 4 else 0
        for i in range(1, n):
            acc = acc - ys[i] * ys[n - i]
        ys.append(acc * inv2y)
    yser = PadicSeries(ys, 0, T, "s")
    omega = (yser * 2).inverse()
    xs = PadicSeries([x0, ctx(1)], 0, None, "s")
    eta = (omega * xs).truncate(T)
    return omega, eta, yser
