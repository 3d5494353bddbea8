"""General identities checked numerically; each suite returns a list of failure strings."""

import random

from coleman_heights.catalog import CATALOG, lookup, tangent_model
from coleman_heights.coleman import (double_from_tangential, double_integral, single_from_tangential_value,
                                     single_integral, work_ctx)
from coleman_heights.curve import CurvePoint, apply_iso, point_mul, three_torsion_points
from coleman_heights.frobenius import e2_of, frobenius_matrix, height_context, to_short_model
from coleman_heights.heights import cg_height, height_multiple, tau_at
from coleman_heights.padic import PadicContext

from helpers import random_point

SUITE_N = 10
LABELS = sorted(CATALOG)


def _zero_to(v, prec) -> bool:
    """v vanishes to absolute precision prec (or to its own precision, if lower)."""
    return v.is_zero() or v.valuation >= min(prec, v.absprec)


def _ctx_hc(label, p, N=SUITE_N, tangent=False):
    e = lookup(label)
    return height_context(e.curve(), PadicContext(p, N),
                          tangent_model=tangent_model(e) if tangent else None)


def shuffle_suite(p=7, paths=20, seed=11):
    bad = []
    rng = random.Random(seed)
    for label in LABELS:
        hc = _ctx_hc(label, p)
        E, ctx = hc.curve, PadicContext(p, SUITE_N)
        for _ in range(paths):
            P, Q = random_point(E, ctx, rng), random_point(E, ctx, rng)
            we = double_integral("omega", "eta", P, Q, hc).value
            ew = double_integral("eta", "omega", P, Q, hc).value
            w = single_integral("omega", P, Q, hc).value
            n = single_integral("eta", P, Q, hc).value
            d = we + ew - w * n
            if not _zero_to(d, min(we.absprec, ew.absprec)):
                bad.append(f"{label}: shuffle defect {d}")
    return bad


def composition_suite(p=7, triples=10, seed=12):
    bad = []
    rng = random.Random(seed)
    for label in LABELS:
        hc = _ctx_hc(label, p)
        E, ctx = hc.curve, PadicContext(p, SUITE_N)
        for _ in range(triples):
            P, Q, R = (random_point(E, ctx, rng) for _ in range(3))
            for form in ("omega", "eta"):
                a = single_integral(form, P, R, hc).value
                b = single_integral(form, P, Q, hc).value + single_integral(form, Q, R, hc).value
                if not _zero_to(a - b, min(a.absprec, b.absprec)):
                    bad.append(f"{label}: single {form} composition defect {a - b}")
            lhs = double_integral("omega", "eta", P, R, hc).value
            rhs = (double_integral("omega", "eta", P, Q, hc).value
                   + double_integral("omega", "eta", Q, R, hc).value
                   + single_integral("omega", Q, R, hc).value * single_integral("eta", P, Q, hc).value)
            if not _zero_to(lhs - rhs, min(lhs.absprec, rhs.absprec)):
                bad.append(f"{label}: double composition defect {lhs - rhs}")
    return bad


def torsion_log_suite(primes=(7, 13)):
    """int_0^T omega = 0 at every Q_p-rational 3-torsion point (2-torsion sits in Weierstrass discs)."""
    bad, located = [], 0
    for label in LABELS:
        for p in primes:
            hc = _ctx_hc(label, p)
            for T in three_torsion_points(hc.curve, work_ctx(hc)):
                located += 1
                v = single_from_tangential_value("omega", T, hc)
                if not _zero_to(v, hc.prec):
                    bad.append(f"{label} p={p}: int_0^T omega = {v}")
    if located == 0:
        bad.append("no torsion points located")
    return bad


def frobenius_suite(primes=(5, 7, 11, 13, 17)):
    """det M = p and trace M = a_p from point counting, for every catalog model and good prime."""
    bad = []
    for label in LABELS:
        E = lookup(label).curve()
        for p in primes:
            if E.disc.numerator % p == 0:
                continue
            ctx = PadicContext(p, SUITE_N)
            fd = frobenius_matrix(to_short_model(E, ctx), ctx)
            if not _zero_to(fd.det() - p, fd.prec - 1):
                bad.append(f"{label} p={p}: det = {fd.det()}")
            if not _zero_to(fd.trace() - E.ap(p), fd.prec - 1):
                bad.append(f"{label} p={p}: trace = {fd.trace()}, a_p = {E.ap(p)}")
    return bad


def _formal_points(hc, count):
    """Formal-group points: multiples of a rational point when one is known, else from t."""
    e = lookup(hc.curve.label)
    if "P" in e.points:
        P = e.point("P")
        n, _ = height_multiple(P, hc.p)
        return [point_mul(k * n, P) for k in range(1, count + 1)]
    ctx = work_ctx(hc)
    fe = hc.formal
    out = []
    for k in range(1, count + 1):
        t = ctx(hc.p * (k + 1))
        x = fe.x.evaluate(t)
        y = fe.y.evaluate(t)
        out.append(CurvePoint(hc.curve, x, y))
    return out


def heights_suite(p=7, count=3):
    """h(2P) = 4 h(P), and tau = 2 D + c (int omega)^2 at formal-group points."""
    bad = []
    for label in LABELS:
        e = lookup(label)
        hc = _ctx_hc(label, p)
        for R in _formal_points(hc, count):
            tau = tau_at(R, hc)
            D = double_from_tangential(R, hc).value
            w = single_from_tangential_value("omega", R, hc)
            d = tau - (2 * D + hc.c * w * w)
            if not _zero_to(d, min(tau.absprec, D.absprec)):
                bad.append(f"{label}: cross-identity defect {d}")
        if "P" in e.points:
            P = e.point("P")
            hmodel, iso = (e.curve(), None) if e.minimal else tangent_model(e)
            hh = hc if e.minimal else _ctx_hc(CATALOG[e.tangent].label, p)
            Pm = P if iso is None else apply_iso(iso, P, hmodel)
            h1 = cg_height(Pm, hh).h
            h2 = cg_height(point_mul(2, Pm), hh).h
            if not _zero_to(h2 - 4 * h1, min(h1.absprec, h2.absprec)):
                bad.append(f"{label}: h(2P) - 4h(P) = {h2 - 4 * h1}")
    return bad


def e2_scaling_suite(primes=(7, 13)):
    """E2 has weight -2: E2 on the image model is u^-2 times E2 on the source."""
    bad = []
    for label in ("37a-short", "53a-short", "480f1-short"):
        e = lookup(label)
        model, iso = tangent_model(e)
        for p in primes:
            ctx = PadicContext(p, SUITE_N)
            a, b = e2_of(e.curve(), ctx), e2_of(model, ctx)
            d = b - a / (iso.u ** 2)
            if not _zero_to(d, min(a.absprec, b.absprec) - 2):
                bad.append(f"{label} p={p}: E2 scaling defect {d}")
    return bad


SUITES = {
    "shuffle": shuffle_suite,
    "composition": composition_suite,
    "torsion-log": torsion_log_suite,
    "frobenius": frobenius_suite,
    "heights": heights_suite,
    "e2-weight": e2_scaling_suite,
}
