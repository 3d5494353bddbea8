"""Single and double Coleman integrals of omega and eta.

Integrals between non-Weierstrass points are computed by moving each endpoint
to the Teichmueller point of its residue disc with a local power series,
then using Frobenius equivariance between Teichmueller points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curve import (CurvePoint, apply_iso, local_coordinates_at, point_neg,
                    three_torsion_points)
from .errors import (DiscMismatchError, NoTorsionPointError, PrecisionError,
                     TorsionPointError, WeierstrassDiscError)
from .evenforms import EvenFormIntegrator
from .padic import PadicContext, PadicNumber, iwasawa_log, teichmuller
from .series import PadicSeries, integrated_tail

FORM_NAMES = {"omega": 0, "eta": 1, "w": 0, "n": 1}


@dataclass(frozen=True)
class ColemanValue:
    value: PadicNumber
    path: str
    form: str

    @property
    def precision(self):
        return self.value.absprec

    def __str__(self):
        return str(self.value)

    def describe(self) -> str:
        return f"int({self.form}; {self.path}) = {self.value}"


def _form_coeffs(form):
    """A form given by name or as a coefficient pair over (omega, eta)."""
    if isinstance(form, str):
        idx = FORM_NAMES.get(form)
        if idx is None:
            raise ValueError(f"unknown form {form!r}")
        return (1, 0) if idx == 0 else (0, 1)
    a, b = form
    return (a, b)


def _form_name(form) -> str:
    if isinstance(form, str):
        return form
    return f"{form[0]}*omega+{form[1]}*eta"


def _pt(P) -> str:
    if isinstance(P, str):
        return P
    if P.is_infinity():
        return "O"
    return f"({P.x}, {P.y})"


# -- disc bookkeeping ---------------------------------------------------------

def work_ctx(hc) -> PadicContext:
    return PadicContext(hc.p, hc.fd.W)


def padic_point(P: CurvePoint, hc) -> CurvePoint:
    return P.to_padic(work_ctx(hc))


def disc_kind(P: CurvePoint, p: int) -> str:
    if P.is_infinity():
        return "origin"
    x = P.x
    v = x.valuation if isinstance(x, PadicNumber) else _val_q(x, p)
    if v < 0:
        return "origin"
    y0 = P.y0()
    vy = y0.valuation if isinstance(y0, PadicNumber) else _val_q(y0, p)
    if vy > 0:
        return "weierstrass"
    return "regular"


def _val_q(q, p):
    from .padic import valuation_rational
    return valuation_rational(q, p)


def same_disc(P: CurvePoint, Q: CurvePoint, p: int) -> bool:
    kp, kq = disc_kind(P, p), disc_kind(Q, p)
    if kp != kq:
        return False
    if kp == "origin":
        return True
    dx = P.x - Q.x
    dy = P.y0() - Q.y0()
    return _val(dx) >= 1 and _val(dy) >= 1


def _val(v):
    if isinstance(v, PadicNumber):
        return v.valuation if not v.is_zero() else v.absprec
    return math.inf if v == 0 else 0


def _check_regular(P, p):
    k = disc_kind(P, p)
    if k == "weierstrass":
        raise WeierstrassDiscError(f"{_pt(P)} lies in a Weierstrass residue disc")
    return k


def _cap(v: PadicNumber, prec) -> PadicNumber:
    return v.add_bigoh(prec) if v.absprec > prec else v


def _zero(p, prec):
    return PadicNumber._make(p, prec, 0, prec)


def _series_order(p: int, target: int, v: int = 1) -> int:
    T = 2
    while T * v - math.log(T, p) - 2 * math.log(T + 1, p) < target + 2:
        T += 1
    return T


# -- teichmueller points ------------------------------------------------------

def teichmuller_point(P: CurvePoint, hc) -> CurvePoint:
    """The Frobenius-fixed point in the residue disc of P (x -> x^p lift)."""
    p = hc.p
    wctx = work_ctx(hc)
    P = P.to_padic(wctx)
    if _check_regular(P, p) != "regular":
        raise ValueError("Teichmueller points exist only in finite residue discs")
    curve = P.curve
    if P.x.valuation >= 1:
        x = _zero(p, wctx.N)
    else:
        x = teichmuller(P.x.add_bigoh(wctx.N) if P.x.absprec > wctx.N else P.x)
    f0 = [wctx(c) for c in curve.f0_coeffs()]
    val = ((x + f0[2]) * x + f0[1]) * x + f0[0]
    y0 = val.sqrt(residue=P.y0().lift() % p)
    y = y0 - (x * curve.a1 + curve.a3) / 2
    return CurvePoint(curve, x, y)


# -- tiny integrals -----------------------------------------------------------

def _origin_primitives(hc):
    key = "_origin_prims"
    cache = hc.__dict__.setdefault("_engine_cache", {})
    if key not in cache:
        fe = hc.formal
        cache[key] = (fe.w.integrate(), fe.eta.integrate())
    return cache[key]


def t_parameter(P: CurvePoint, hc) -> PadicNumber:
    P = padic_point(P, hc)
    return -(P.x / P.y)


def _origin_value(form, P: CurvePoint, hc) -> PadicNumber:
    """Primitive with zero constant term (tangential normalization) at P in the origin disc."""
    a, b = _form_coeffs(form)
    Fw, Fe = _origin_primitives(hc)
    t = t_parameter(P, hc)
    tail = integrated_tail(hc.p)
    total = None
    if a:
        total = Fw.evaluate(t, tail) * a
    if b:
        if t.is_zero():
            raise PrecisionError("eta has a pole at the origin")
        v = Fe.evaluate(t, tail) * b
        total = v if total is None else total + v
    return total


def _local_series(P: CurvePoint, hc, T: int):
    key = ("local", _pt(P), T)
    cache = hc.__dict__.setdefault("_engine_cache", {})
    if key not in cache:
        cache[key] = local_coordinates_at(P, work_ctx(hc), T)
    return cache[key]


def tiny_integral(form, P: CurvePoint, Q: CurvePoint, hc) -> ColemanValue:
    p = hc.p
    path = f"{_pt(P)} -> {_pt(Q)}"
    P, Q = padic_point(P, hc), padic_point(Q, hc)
    kp = _check_regular(P, p)
    _check_regular(Q, p)
    if not same_disc(P, Q, p):
        raise DiscMismatchError(f"{_pt(P)} and {_pt(Q)} are in different residue discs")
    val = _tiny_value(form, P, Q, hc, kp)
    return ColemanValue(_cap(val, hc.prec), path, _form_name(form))


def _tiny_value(form, P, Q, hc, kind=None) -> PadicNumber:
    p = hc.p
    kind = kind or disc_kind(P, p)
    if kind == "origin":
        return _origin_value(form, Q, hc) - _origin_value(form, P, hc)
    s = Q.x - P.x
    if s.is_zero():
        return _zero(p, min(s.absprec, hc.fd.W))
    a, b = _form_coeffs(form)
    T = _series_order(p, hc.fd.W, s.valuation)
    om, eta, _ = _local_series(P, hc, T)
    tail = integrated_tail(p)
    total = None
    if a:
        total = om.integrate().evaluate(s, tail) * a
    if b:
        v = eta.integrate().evaluate(s, tail) * b
        total = v if total is None else total + v
    return total


# -- Frobenius step -------------------------------------------------------------

def _solve(A, b):
    """Gaussian elimination over Q_p with valuation pivoting."""
    n = len(A)
    A = [list(row) + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = min(range(col, n), key=lambda r: (A[r][col].valuation if not A[r][col].is_zero()
                                                else math.inf))
        if A[piv][col].is_zero():
            raise PrecisionError("singular Frobenius equivariance system at working precision")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        for r in range(n):
            if r != col and not A[r][col].is_exact_zero():
                f = A[r][col] * inv
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def _teich_singles(a: CurvePoint, b: CurvePoint, hc):
    """(int_a^b omega, int_a^b eta) between Teichmueller points."""
    fd = hc.fd
    M = fd.M
    dg = [fd.correction_value(i, b.x, b.y0()) - fd.correction_value(i, a.x, a.y0())
          for i in range(2)]
    one = PadicNumber.from_rational(hc.p, 1, fd.prec)
    A = [[(one if i == j else 0) - M[i][j] for j in range(2)] for i in range(2)]
    A = [[x if isinstance(x, PadicNumber) else PadicNumber.from_rational(hc.p, x, fd.prec)
          for x in row] for row in A]
    return _solve(A, dg)


def _singles_vector(P: CurvePoint, Q: CurvePoint, hc):
    """[int_P^Q omega, int_P^Q eta] for P, Q in regular or origin discs."""
    p = hc.p
    P, Q = padic_point(P, hc), padic_point(Q, hc)
    kp, kq = _check_regular(P, p), _check_regular(Q, p)
    if same_disc(P, Q, p):
        return [_tiny_value("omega", P, Q, hc), _tiny_value("eta", P, Q, hc)]
    if kp == "origin" or kq == "origin":
        # route through the tangential base point at the origin
        vq = [single_from_tangential_value(f, Q, hc) for f in ("omega", "eta")]
        vp = [single_from_tangential_value(f, P, hc) for f in ("omega", "eta")]
        return [x - y for x, y in zip(vq, vp)]
    a, b = teichmuller_point(P, hc), teichmuller_point(Q, hc)
    X = _teich_singles(a, b, hc)
    out = []
    for i, f in enumerate(("omega", "eta")):
        out.append(_tiny_value(f, P, a, hc) + X[i] + _tiny_value(f, b, Q, hc))
    return out


def single_integral(form, P: CurvePoint, Q: CurvePoint, hc) -> ColemanValue:
    a, b = _form_coeffs(form)
    vals = _singles_vector(P, Q, hc)
    total = vals[0] * a + vals[1] * b
    return ColemanValue(_cap(total, hc.prec), f"{_pt(P)} -> {_pt(Q)}", _form_name(form))


def single_from_tangential_value(form, P: CurvePoint, hc) -> PadicNumber:
    p = hc.p
    if disc_kind(P, p) == "weierstrass" and torsion_order(P) == 2:
        # W = -W: the log of a torsion point and the odd-normalized eta integral both vanish
        return _zero(p, hc.prec)
    P = padic_point(P, hc)
    kind = _check_regular(P, p)
    if kind == "origin":
        return _origin_value(form, P, hc)
    mP = point_neg(P)
    if same_disc(P, mP, p):
        raise WeierstrassDiscError(f"{_pt(P)} and its negative share a disc")
    vals = _singles_vector(mP, P, hc)
    a, b = _form_coeffs(form)
    return (vals[0] * a + vals[1] * b) / 2


def single_from_tangential(form, P: CurvePoint, hc) -> ColemanValue:
    """int_v^P of omega (basepoint 0) or of eta (antisymmetric normalization)."""
    val = single_from_tangential_value(form, P, hc)
    return ColemanValue(_cap(val, hc.prec), f"v -> {_pt(P)}", _form_name(form))


# -- double integrals -----------------------------------------------------------

def _even(hc) -> EvenFormIntegrator:
    cache = hc.__dict__.setdefault("_engine_cache", {})
    if "even" not in cache:
        cache["even"] = EvenFormIntegrator(hc.fd)
    return cache["even"]


def _tiny_double(P: CurvePoint, Q: CurvePoint, hc):
    """4x4 table Y[i][j] = int_P^Q omega_i omega_j (outer i) within one disc."""
    p = hc.p
    s = Q.x - P.x
    if s.is_zero():
        z = _zero(p, min(s.absprec, hc.fd.W))
        return [[z, z], [z, z]]
    T = _series_order(p, hc.fd.W, s.valuation) + 2
    om, eta, _ = _local_series(P, hc, T)
    forms = [om, eta]
    prims = [f.integrate() for f in forms]

    def tail(n):
        return -2 * int(math.log(max(n, 1), p) + 1e-9) - 1

    return [[(forms[i] * prims[j]).truncate(T).integrate().evaluate(s, tail) for j in range(2)]
            for i in range(2)]


def _teich_doubles(a: CurvePoint, b: CurvePoint, hc, X=None):
    """Y[i][j] = int_a^b omega_i omega_j between Teichmueller points."""
    fd = hc.fd
    M = fd.M
    ev = _even(hc)
    if X is None:
        X = _teich_singles(a, b, hc)
    ga = [fd.correction_value(i, a.x, a.y0()) for i in range(2)]
    gb = [fd.correction_value(i, b.x, b.y0()) for i in range(2)]
    gw = [[ev.integrate(ev.reduced("gw", j, k), a.x, b.x) for k in range(2)] for j in range(2)]
    gdg = [[ev.integrate(ev.reduced("gdg", j, i), a.x, b.x) for i in range(2)] for j in range(2)]
    MX = [M[i][0] * X[0] + M[i][1] * X[1] for i in range(2)]
    rhs = []
    for i in range(2):
        for j in range(2):
            c = gdg[j][i] - ga[j] * (gb[i] - ga[i])
            c = c + gb[i] * MX[j] - ga[j] * MX[i]
            for l in range(2):
                c = c - M[j][l] * gw[i][l] + M[i][l] * gw[j][l]
            rhs.append(c)
    one = PadicNumber.from_rational(hc.p, 1, fd.prec)
    A = []
    for i in range(2):
        for j in range(2):
            row = []
            for k in range(2):
                for l in range(2):
                    v = -(M[i][k] * M[j][l])
                    if (i, j) == (k, l):
                        v = v + one
                    row.append(v)
            A.append(row)
    Y = _solve(A, rhs)
    return [[Y[0], Y[1]], [Y[2], Y[3]]]


def _compose(Y1, S1, Y2, S2):
    """Doubles over a path then a second path: Y = Y1 + Y2 + S2 (outer) * S1 (inner)."""
    return [[Y1[i][j] + Y2[i][j] + S2[i] * S1[j] for j in range(2)] for i in range(2)]


def _doubles_and_singles(P: CurvePoint, Q: CurvePoint, hc):
    p = hc.p
    P, Q = padic_point(P, hc), padic_point(Q, hc)
    kp, kq = _check_regular(P, p), _check_regular(Q, p)
    if kp == "origin" or kq == "origin":
        raise ValueError("double integrals need endpoints outside the origin disc")
    if same_disc(P, Q, p):
        return _tiny_double(P, Q, hc), [_tiny_value(f, P, Q, hc) for f in ("omega", "eta")]
    a, b = teichmuller_point(P, hc), teichmuller_point(Q, hc)
    S1 = [_tiny_value(f, P, a, hc) for f in ("omega", "eta")]
    Y1 = _tiny_double(P, a, hc)
    X = _teich_singles(a, b, hc)
    Y2 = _teich_doubles(a, b, hc, X)
    S3 = [_tiny_value(f, b, Q, hc) for f in ("omega", "eta")]
    Y3 = _tiny_double(b, Q, hc)
    Y12 = _compose(Y1, S1, Y2, X)
    S12 = [S1[i] + X[i] for i in range(2)]
    Y = _compose(Y12, S12, Y3, S3)
    S = [S12[i] + S3[i] for i in range(2)]
    return Y, S


def double_integral(first, second, P: CurvePoint, Q: CurvePoint, hc) -> ColemanValue:
    """int_P^Q first * second, i.e. int first(z) int_P^z second (outer form first)."""
    i, j = FORM_NAMES[first], FORM_NAMES[second]
    Y, _ = _doubles_and_singles(P, Q, hc)
    cap = hc.prec - hc.fd.even_loss
    return ColemanValue(_cap(Y[i][j], cap), f"{_pt(P)} -> {_pt(Q)}", f"{first}*{second}")


# -- torsion closed forms -----------------------------------------------------

def torsion_order(T: CurvePoint) -> int:
    """2 or 3 when T is a point of that order to working precision, else 0."""
    if T.is_infinity():
        return 0
    E = T.curve
    y0 = T.y0()
    if _val(y0) >= _prec_of(y0):
        return 2
    A = T.x
    psi = sum((c * A ** i for i, c in enumerate(E.division_poly3()) if i), E.b8)
    if _val(psi) >= _prec_of(psi) or (not isinstance(psi, PadicNumber) and psi == 0):
        return 3
    return 0


def _prec_of(v):
    return v.absprec if isinstance(v, PadicNumber) else math.inf


def torsion_double_formula(T: CurvePoint, hc=None, ctx: PadicContext | None = None) -> ColemanValue:
    """int_v^T omega*eta for T of order 2 or 3 on its own model.

    Needs no Frobenius data: a rational T only needs a p-adic context.
    """
    E = T.curve
    order = torsion_order(T)
    A, B = T.x, T.y
    if order == 2:
        arg = 3 * A * A + 2 * E.a2 * A + E.a4 - E.a1 * B
        k = 4
    elif order == 3:
        arg = 2 * B + E.a1 * A + E.a3
        k = 3
    else:
        raise TorsionPointError(f"{_pt(T)} is not a point of order 2 or 3")
    if not isinstance(arg, PadicNumber):
        if hc is None and ctx is None:
            raise ValueError("a rational torsion point needs a p-adic context")
        arg = (ctx or work_ctx(hc))(arg)
    if arg.is_zero():
        raise PrecisionError("logarithm argument vanishes at working precision")
    val = iwasawa_log(arg) / k
    if hc is not None:
        val = _cap(val, hc.prec)
    return ColemanValue(val, f"v -> {_pt(T)}", "omega*eta")


def tangent_torsion_value(T: CurvePoint, hc) -> PadicNumber:
    """int_v^T omega*eta with v dual to the invariant differential of the tangent model."""
    if hc.tangent_model is not None:
        model, iso = hc.tangent_model
        T = apply_iso(iso, T, model)
    return torsion_double_formula(T, hc).value


def default_torsion_point(hc) -> CurvePoint:
    pts = three_torsion_points(hc.curve, work_ctx(hc))
    if not pts:
        raise NoTorsionPointError(
            f"no Q_{hc.p}-rational 3-torsion point: the tangential double integral "
            "would need Weierstrass endpoints over a ramified extension")
    return pts[0]


def _origin_double(P: CurvePoint, hc) -> PadicNumber:
    """int_v^P omega*eta for P in the origin disc, from the t-expansions.

    omega * int(eta) has the term -dt/t; its primitive is normalized by the
    tangent vector, so a tangent model with scale u shifts it by -log u.
    """
    cache = hc.__dict__.setdefault("_engine_cache", {})
    if "origin_double" not in cache:
        Fw, Fe = _origin_primitives(hc)
        # antisymmetric primitive of eta, matching the tangential single integral
        G = hc.formal.w * (Fe + hc.curve.a1 / 2) + PadicSeries([1], -1, None)
        cache["origin_double"] = G.integrate()
    t = t_parameter(P, hc)
    if t.is_zero():
        raise PrecisionError("omega*eta has a logarithmic singularity at the origin")
    val = cache["origin_double"].evaluate(t, integrated_tail(hc.p)) - iwasawa_log(t)
    if hc.tangent_model is not None:
        u = hc.tangent_model[1].u
        val = val - iwasawa_log(work_ctx(hc)(u))
    return val


def double_from_tangential(P: CurvePoint, hc, second: str = "eta",
                           T: CurvePoint | None = None) -> ColemanValue:
    """int_v^P omega*eta assembled through an auxiliary 3-torsion point T."""
    if second not in ("eta", "eta0"):
        raise ValueError("second form must be eta")
    cap = hc.prec - hc.fd.even_loss
    path = f"v -> {_pt(P)}"
    if disc_kind(P, hc.p) == "origin":
        return ColemanValue(_cap(_origin_double(P, hc), cap), path, "omega*eta")
    if T is None:
        T = default_torsion_point(hc)
    P = padic_point(P, hc)
    base = tangent_torsion_value(T, hc)
    if same_disc(P, T, hc.p) and all((u - v).is_zero() for u, v in ((P.x, T.x), (P.y, T.y))):
        val = base
    else:
        Y, S = _doubles_and_singles(T, P, hc)
        eta_vT = single_from_tangential_value("eta", T, hc)
        val = Y[0][1] + S[0] * eta_vT + base
    return ColemanValue(_cap(val, cap), path, "omega*eta")
