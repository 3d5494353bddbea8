"""Command-line front end: ``coleman <command> --curve ... --p ...``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import replace
from fractions import Fraction

from . import coleman as eng
from . import heights
from .cache import cached_frobenius
from .catalog import parse_point, resolve_curve, tangent_model
from .curve import (CurvePoint, apply_iso, three_torsion_points, two_torsion_points)
from .errors import CatalogError, ColemanError, NoTorsionPointError
from .frobenius import height_context
from .padic import PadicContext, PadicNumber


class UsageError(Exception):
    pass


# -- helpers -------------------------------------------------------------------

def _fmt(v, ctx: PadicContext | None = None) -> str:
    if isinstance(v, PadicNumber):
        return str(v)
    if v == 0:
        return "0"
    return str(ctx(Fraction(v))) if ctx is not None else str(v)


def _pt(P) -> str:
    return eng._pt(P)


class Session:
    """Curve, catalog entry and lazily built contexts for one invocation."""

    def __init__(self, args):
        self.args = args
        try:
            self.curve, self.entry = resolve_curve(args.curve)
        except CatalogError as exc:
            raise UsageError(str(exc)) from None
        if args.p is None:
            raise UsageError("--p is required")
        self.ctx = PadicContext(args.p, args.prec)
        self.tangent = tangent_model(self.entry) if self.entry else None
        self._hc = None

    @property
    def hc(self):
        if self._hc is None:
            fd = cached_frobenius(self.curve, self.ctx, self.args.cache_dir)
            order = getattr(self.args, "terms", None)
            order = order if order and order > 2 * self.ctx.N + 8 else None
            self._hc = height_context(self.curve, self.ctx, fd=fd, tangent_model=self.tangent,
                                      series_order=order)
        return self._hc

    def point(self, text: str):
        t = text.strip()
        if re.fullmatch(r"T\d*", t) and not (self.entry and t in self.entry.points):
            return self.torsion_point(int(t[1:] or 1))
        try:
            return parse_point(text, self.curve, self.entry)
        except CatalogError as exc:
            raise UsageError(str(exc)) from None

    def torsion_point(self, i: int) -> CurvePoint:
        """The i-th Q_p-rational 3-torsion point in canonical order."""
        pts = three_torsion_points(self.curve, eng.work_ctx(self.hc))
        if not pts:
            raise NoTorsionPointError(f"no Q_{self.ctx.p}-rational 3-torsion point on {self.curve}")
        if not 1 <= i <= len(pts):
            raise UsageError(f"T{i}: there are {len(pts)} rational 3-torsion points")
        return pts[i - 1]

    def rational_point(self, text: str) -> CurvePoint:
        P = self.point(text)
        if P == "v":
            raise UsageError("the tangential base point v is only allowed as --from")
        return P


def _label(text: str, P) -> str:
    """Named points keep their name in path descriptors; coordinates are normalized."""
    if P == "v":
        return "v"
    if isinstance(P, CurvePoint) and P.is_padic():
        return text.strip()
    return _pt(P)


def _emit(args, human: list[str], record: dict) -> None:
    if args.json:
        print(json.dumps(record, indent=None, sort_keys=True))
    else:
        for line in human:
            print(line)


# -- commands --------------------------------------------------------------------

def cmd_integrate(args) -> None:
    s = Session(args)
    Q = s.rational_point(args.to)
    P = s.point(getattr(args, "from"))
    if P == "v":
        val = eng.single_from_tangential(args.form, Q, s.hc)
    elif P == Q:
        val = eng.ColemanValue(PadicNumber.exact_zero(s.ctx.p), f"{_pt(P)} -> {_pt(Q)}", args.form)
    else:
        val = eng.single_integral(args.form, P, Q, s.hc)
    val = replace(val, path=f"{_label(getattr(args, 'from'), P)} -> {_label(args.to, Q)}")
    _emit(args, [val.describe()], {"integral": args.form, "path": val.path,
                                   "value": str(val.value), "precision": val.precision})


def cmd_double_integrate(args) -> None:
    s = Session(args)
    first, _, second = args.form.partition("*")
    if first not in ("omega", "eta") or second not in ("omega", "eta"):
        raise UsageError(f"--form must be one of omega*eta, eta*omega, omega*omega, eta*eta")
    Q = s.rational_point(args.to)
    P = s.point(getattr(args, "from"))
    if P == "v":
        if args.form != "omega*eta":
            raise UsageError("from the tangential base point only omega*eta is supported")
        val = heights.tangential_double(Q, s.hc)
    else:
        val = eng.double_integral(first, second, P, Q, s.hc)
    val = replace(val, path=f"{_label(getattr(args, 'from'), P)} -> {_label(args.to, Q)}")
    _emit(args, [val.describe()], {"integral": val.form, "path": val.path,
                                   "value": str(val.value), "precision": val.precision})


def cmd_sigma(args) -> None:
    s = Session(args)
    sig = s.hc.sigma
    coeffs = sig.coefficients(args.terms)
    pctx = PadicContext(s.ctx.p, s.hc.prec)
    lines = [f"sigma(t) on {s.curve}, c = {s.hc.c}"]
    lines += [f"t^{k}: {_fmt(c, pctx)}" for k, c in enumerate(coeffs, start=1)]
    _emit(args, lines, {"curve": str(s.curve), "c": str(s.hc.c),
                        "coefficients": [_fmt(c, pctx) for c in coeffs]})


def _height_model(s: Session, P: CurvePoint):
    """Heights are computed on a minimal model; transport P if needed."""
    if s.curve.minimal or s.tangent is None:
        return P, s.hc
    thc, iso = heights._tangent_height_context(s.hc)
    return apply_iso(iso, P, thc.curve), thc


def cmd_height(args) -> None:
    s = Session(args)
    P = s.rational_point(args.point)
    Pm, hc = _height_model(s, P)
    hv = heights.cg_height(Pm, hc, n_bound=args.n_bound)
    rec = hv.record()
    rec["model"] = str(hc.curve)
    lines = [f"point {_pt(P)} on {hc.curve}: n = {hv.n}",
             f"tau(nP)       = {hv.tau_part}",
             f"2 log_p(d)    = {hv.log_d_part}",
             f"h_cg          = {hv.h}",
             f"h_mt          = {hv.mazur_tate}"]
    _emit(args, lines, rec)


def cmd_kim_ratio(args) -> None:
    s = Session(args)
    P = s.rational_point(args.point)
    r = heights.kim_ratio(P, s.hc)
    _emit(args, [f"D/(int omega)^2 at {_pt(P)} = {r}"],
          {"point": _pt(P), "ratio": str(r), "precision": r.absprec})


def cmd_kim_check(args) -> None:
    s = Session(args)
    if args.points:
        pts = [s.rational_point(t) for t in args.points]
    else:
        if s.tangent is not None:
            model, iso = s.tangent
            inv = iso.inverse()
            pts = [apply_iso(inv, P, s.curve)
                   for P in heights.search_integral_points(model, args.search_bound)]
            pts = [P for P in pts if P.x.denominator == 1 and P.y.denominator == 1]
        else:
            pts = heights.search_integral_points(s.curve, args.search_bound)
    try:
        rep = heights.kim_check(s.curve, s.hc, pts, minimal=s.tangent)
    except ValueError as exc:
        raise ColemanError(str(exc)) from None
    lines = [f"ratio at {k}: {v}" for k, v in rep.ratios.items()]
    lines += [f"rejected (not in E_good): {', '.join(rep.rejected) or 'none'}",
              f"common value: {rep.value}",
              f"discrepancy valuation: {rep.discrepancy}, certified: {rep.certified}",
              "PASS" if rep.passed else "FAIL"]
    _emit(args, lines, rep.record())
    if not rep.passed:
        sys.exit(1)


def cmd_torsion(args) -> None:
    s = Session(args)
    ctx = PadicContext(s.ctx.p, s.ctx.N)
    pts = two_torsion_points(s.curve, ctx) if args.order == 2 else three_torsion_points(s.curve, ctx)
    lines, recs = [], []
    values = {}
    for i, T in enumerate(pts, start=1):
        v = eng.torsion_double_formula(T, ctx=ctx).value
        values[_pt(T)] = v
        lines.append(f"T{i} = {_pt(T)}")
        lines.append(f"  int_v^T omega*eta = {v}")
        recs.append({"point": _pt(T), "value": str(v)})
    rec = {"order": args.order, "points": recs}
    if getattr(args, "from") or args.to:
        if not (getattr(args, "from") and args.to):
            raise UsageError("--from and --to must be given together")
        A, B = s.rational_point(getattr(args, "from")), s.rational_point(args.to)
        va = eng.torsion_double_formula(A, ctx=ctx).value
        vb = eng.torsion_double_formula(B, ctx=ctx).value
        diff = vb - va
        lines.append(f"difference {_pt(B)} - {_pt(A)} = {diff}")
        rec["difference"] = str(diff)
    if not pts:
        lines.append(f"no Q_{ctx.p}-rational points of order {args.order}")
    _emit(args, lines, rec)


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coleman", description="Coleman integrals and p-adic heights "
                                     "on elliptic curves over Q")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--curve", required=True, help="catalog label or curve record file")
        p.add_argument("--p", type=int, required=True, help="prime of good ordinary reduction")
        p.add_argument("--prec", type=int, default=12, help="p-adic working digits (default 12)")
        p.add_argument("--cache-dir", default=None, help="directory for cached Frobenius data")
        p.add_argument("--json", action="store_true", help="emit a JSON record")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    p = common(sub.add_parser("integrate", help="single integral of omega or eta"))
    p.add_argument("--form", choices=["omega", "eta"], default="omega")
    p.add_argument("--from", default="v")
    p.add_argument("--to", required=True)
    p.set_defaults(func=cmd_integrate)

    p = common(sub.add_parser("double-integrate", help="iterated integral, outer form first"))
    p.add_argument("--form", default="omega*eta")
    p.add_argument("--from", default="v")
    p.add_argument("--to", required=True)
    p.set_defaults(func=cmd_double_integrate)

    p = common(sub.add_parser("sigma", help="coefficients of the p-adic sigma function"))
    p.add_argument("--terms", type=int, default=8)
    p.set_defaults(func=cmd_sigma)

    p = common(sub.add_parser("height", help="Coleman-Gross and Mazur-Tate heights"))
    p.add_argument("--point", required=True)
    p.add_argument("--n-bound", type=int, default=heights.DEFAULT_N_BOUND)
    p.set_defaults(func=cmd_height)

    p = common(sub.add_parser("kim-ratio", help="D(P)/(int_0^P omega)^2 at one point"))
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_kim_ratio)

    p = common(sub.add_parser("kim-check", help="constancy of the Kim ratio on integral points"))
    p.add_argument("--search-bound", type=int, default=100)
    p.add_argument("--points", nargs="*", default=None)
    p.set_defaults(func=cmd_kim_check)

    p = common(sub.add_parser("torsion", help="2- or 3-torsion points and their closed-form values"))
    p.add_argument("--order", type=int, choices=[2, 3], default=3)
    p.add_argument("--from", default=None)
    p.add_argument("--to", default=None)
    p.set_defaults(func=cmd_torsion)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.prec < 2:
        parser.error("--prec must be at least 2")
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ColemanError as exc:
        print(f"error [{exc.module}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
