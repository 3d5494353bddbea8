"""The p-adic sigma function, local heights above p and the Kim invariant ratio."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coleman import (ColemanValue, _cap, _pt, double_from_tangential, padic_point,
                      single_from_tangential_value, work_ctx)
from .curve import (CurvePoint, apply_iso, denominator_d, is_good_point, is_nonsingular_reduction,
                    is_torsion, point_mul)
from .errors import ColemanError, NoTorsionPointError, PrecisionError, SeriesError, TorsionPointError
from .padic import PadicNumber, iwasawa_log
from .series import PadicSeries, integrated_tail

DEFAULT_N_BOUND = 10 ** 4


@dataclass
class SigmaSeries:
    """sigma(t) = t exp(s(t)) in the parameter t = -x/y."""

    s: PadicSeries
    order: int
    hc: object = field(repr=False)

    def sigma(self) -> PadicSeries:
        return self.s.exp().shift(1)

    def coefficients(self, terms: int):
        sig = self.sigma()
        return [sig[n] for n in range(1, min(terms, sig.prec) + 1)]

    def ode_residual(self) -> PadicSeries:
        """x + c + (1/w) d/dt((1/w) sigma'/sigma); vanishes up to truncation."""
        hc = self.hc
        fe = hc.formal
        winv = fe.w.inverse()
        # sigma'/sigma = 1/t + s'
        dlog = self.s.differentiate() + PadicSeries([1], -1, None)
        inner = (dlog * winv).differentiate() * winv
        return fe.x + hc.c + inner


def sigma_series(hc, T: int | None = None) -> SigmaSeries:
    fe = hc.formal
    T = T or fe.order
    w = fe.w.truncate(T)
    x = fe.x.truncate(T - 2)
    eta1 = (x + hc.c) * w
    try:
        F = eta1.integrate()
    except SeriesError as exc:
        raise SeriesError(f"eta + c*omega has a residue, E2 and c disagree: {exc}") from exc
    # the constant a1/2 makes int(eta) odd under the formal inverse, so sigma is odd
    F = F + hc.curve.a1 / 2
    R = w * F + PadicSeries([1], -1, None)
    if not (R[-1] == 0):
        raise SeriesError("log term of omega * int(eta') is not exactly 1/t")
    s = -R.integrate()
    return SigmaSeries(s, T, hc)


def _sigma_of(hc, T=None) -> SigmaSeries:
    return hc.sigma if T is None else sigma_series(hc, T)


def tau_at(P: CurvePoint, hc) -> PadicNumber:
    """tau = -2 log sigma at a point of the formal group at p."""
    Pp = padic_point(P, hc)
    if Pp.is_infinity():
        raise ValueError("tau has a logarithmic pole at the origin")
    if Pp.x.is_zero() or Pp.x.valuation >= 0:
        raise ValueError(f"{_pt(P)} is not in the formal group at {hc.p}")
    t = -(Pp.x / Pp.y)
    if t.is_zero() or t.valuation < 1:
        raise ValueError(f"{_pt(P)} is not in the formal group at {hc.p}")
    sig = hc.sigma
    s_val = sig.s.evaluate(t, integrated_tail(hc.p))
    return _cap(-2 * (iwasawa_log(t) + s_val), hc.prec)


@dataclass
class HeightValue:
    point: CurvePoint
    n: int
    tau_part: PadicNumber
    log_d_part: PadicNumber
    h: PadicNumber
    p: int

    @property
    def mazur_tate(self) -> PadicNumber:
        return -self.h / (2 * self.p)

    def record(self) -> dict:
        return {"point": _pt(self.point), "n": self.n, "tau_part": str(self.tau_part),
                "log_d_part": str(self.log_d_part), "h_cg": str(self.h),
                "h_mt": str(self.mazur_tate), "precision": self.h.absprec}


def _in_formal_group(P: CurvePoint, p: int) -> bool:
    return P.is_infinity() or P.x.denominator % p == 0


def height_multiple(P: CurvePoint, p: int, bound: int = DEFAULT_N_BOUND):
    """Least n with nP in the formal group at p and nonsingular at every bad prime."""
    E = P.curve
    bad = [q for q in E.bad_primes() if E.is_integral_at(q)]
    Q = P
    for n in range(1, bound + 1):
        if n > 1:
            Q = Q + P
        if Q.is_infinity():
            raise TorsionPointError(f"{_pt(P)} is a torsion point")
        if _in_formal_group(Q, p) and all(is_nonsingular_reduction(Q, q) for q in bad):
            return n, Q
    raise ColemanError(f"no multiple n <= {bound} of {_pt(P)} is in the formal group "
                       f"and nonsingular at the bad primes")


def cg_height(P: CurvePoint, hc, n_bound: int = DEFAULT_N_BOUND, n: int | None = None) -> HeightValue:
    """(tau(nP) + 2 log_p d(nP)) / n^2 for a rational point P."""
    if P.is_padic():
        raise ValueError("heights need a rational point")
    if is_torsion(P):
        raise TorsionPointError(f"{_pt(P)} is a torsion point")
    if n is None:
        n, Q = height_multiple(P, hc.p, n_bound)
    else:
        Q = point_mul(n, P)
        if not _in_formal_group(Q, hc.p):
            raise ValueError(f"{n}*{_pt(P)} is not in the formal group at {hc.p}")
    tau = tau_at(Q, hc)
    d = denominator_d(Q)
    logd = 2 * iwasawa_log(work_ctx(hc)(d))
    h = _cap((tau + logd) / (n * n), hc.prec)
    return HeightValue(P, n, tau, logd, h, hc.p)


def mazur_tate_height(P: CurvePoint, hc, n_bound: int = DEFAULT_N_BOUND) -> PadicNumber:
    return cg_height(P, hc, n_bound).mazur_tate


# -- Kim's ratio -----------------------------------------------------------------

def _tangent_height_context(hc):
    """HeightContext on the tangent model, built once and cached on hc."""
    if hc.tangent_model is None:
        return hc, None
    cache = hc.__dict__.setdefault("_engine_cache", {})
    if "tangent_hc" not in cache:
        from .frobenius import height_context
        model, iso = hc.tangent_model
        cache["tangent_hc"] = height_context(model, hc.ctx, series_order=hc.formal.order)
    return cache["tangent_hc"], hc.tangent_model[1]


def tangential_double(P: CurvePoint, hc) -> ColemanValue:
    """int_v^P omega*eta, through a 3-torsion point when one exists over Q_p.

    Otherwise P must be rational and nonsingular at the bad primes of the
    tangent model; then omega*(eta + c omega) from v integrates to h(P)/2,
    which determines the double integral from the height.
    """
    try:
        return double_from_tangential(P, hc)
    except NoTorsionPointError:
        if P.is_padic():
            raise
    thc, iso = _tangent_height_context(hc)
    Pm = apply_iso(iso, P, thc.curve) if iso is not None else P
    h = cg_height(Pm, thc).h
    w = single_from_tangential_value("omega", P, hc)
    val = (h - hc.c * w * w) / 2
    return ColemanValue(_cap(val, hc.prec), f"v -> {_pt(P)}", "omega*eta")


def kim_ratio(P: CurvePoint, hc) -> PadicNumber:
    D = tangential_double(P, hc).value
    w = single_from_tangential_value("omega", P, hc)
    if w.is_zero():
        raise PrecisionError(f"int_0^P omega vanishes at {_pt(P)} (torsion point?)")
    return D / (w * w)


@dataclass
class KimReport:
    value: PadicNumber | None
    ratios: dict
    rejected: list
    discrepancy: float
    certified: int
    passed: bool

    def record(self) -> dict:
        return {"common_value": str(self.value), "ratios": {k: str(v) for k, v in self.ratios.items()},
                "rejected": self.rejected, "discrepancy_valuation": self.discrepancy,
                "certified": self.certified, "pass": self.passed}


def kim_check(curve, hc, points, minimal=None) -> KimReport:
    """Evaluate the Kim ratio at every good point and test that it is constant."""
    good, rejected = [], []
    for P in points:
        if P.curve != curve:
            P = curve.point(P.x, P.y)
        (good if is_good_point(P, minimal=minimal) else rejected).append(P)
    if len(good) < 2:
        raise ValueError(f"need at least 2 good points, got {len(good)}")
    ratios = {_pt(P): kim_ratio(P, hc) for P in good}
    vals = list(ratios.values())
    certified = min(v.absprec for v in vals)
    disc = float("inf")
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            d = vals[i] - vals[j]
            if not d.is_zero():
                disc = min(disc, d.valuation)
    return KimReport(vals[0], ratios, [_pt(P) for P in rejected], disc, certified, disc >= certified)


def search_integral_points(curve, bound: int):
    """Affine integral points with |x| <= bound (naive search)."""
    from math import isqrt
    a1, a2, a3, a4, a6 = curve.ainvs
    out = []
    for x in range(-bound, bound + 1):
        # y^2 + (a1 x + a3) y - f(x) = 0
        b = a1 * x + a3
        rhs = x ** 3 + a2 * x * x + a4 * x + a6
        disc = b * b + 4 * rhs
        if disc < 0 or disc.denominator != 1:
            continue
        r = isqrt(int(disc))
        if r * r != disc:
            continue
        for y in sorted({(-b + r) / 2, (-b - r) / 2}):
            if Fraction(y).denominator == 1:
                out.append(curve.point(x, y))
    return out
