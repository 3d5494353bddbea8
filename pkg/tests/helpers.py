"""Shared test helpers: expansion parsing, CLI runner, contexts, random points."""

import contextlib
import io
import random
import re
import subprocess
import sys

from coleman_heights.catalog import lookup, tangent_model
from coleman_heights.cli import main as cli_main
from coleman_heights.curve import CurvePoint
from coleman_heights.frobenius import height_context
from coleman_heights.padic import PadicContext

ACCEPTANCE_LINES: list[str] = []


# -- p-adic expansions as text ---------------------------------------------------

def parse_expansion(text: str):
    """'d*p^k + ... + O(p^n)' -> (p, {k: d}, n); n is None when no O-term is printed.

    Accepts both the CLI display format and LaTeX-style '\\cdot' and '^{k}'.
    """
    text = text.replace("\\cdot", "*").replace(" ", "").replace("{", "").replace("}", "")
    terms = [t for t in text.split("+") if t]
    p = big_o = None
    for t in terms:
        m = re.fullmatch(r"O\((\d+)\^(-?\d+)\)", t) or re.fullmatch(r"(?:\d+\*)?(\d+)\^(-?\d+)", t)
        if m:
            p = int(m.group(1))
            if t.startswith("O("):
                big_o = int(m.group(2))
    digits = {}
    for t in terms:
        if t.startswith("O("):
            continue
        m = re.fullmatch(r"(?:(\d+)\*)?(\d+)(?:\^(-?\d+))?", t)
        if not m:
            raise ValueError(f"cannot parse term {t!r}")
        coef, base, exp = m.groups()
        if exp is None and coef is None and int(base) != p:
            digits[0] = int(base)
        else:
            digits[int(exp) if exp is not None else 1] = int(coef or 1)
    return p, digits, big_o


def matches_reference(ours: str, expected: str, p: int):
    """Every printed digit agrees and our certified precision reaches the printed O-term.

    Returns (ok, reason).
    """
    _, pd, po = parse_expansion(expected)
    _, od, oo = parse_expansion(ours)
    if po is None:
        po = max(pd) + 1
    if oo is not None and oo < po:
        return False, f"certified O({p}^{oo}) below the printed O({p}^{po})"
    lo = min(list(pd) + list(od) + [0])
    for k in range(lo, po):
        if pd.get(k, 0) != od.get(k, 0):
            return False, f"digit of {p}^{k}: ours {od.get(k, 0)}, printed {pd.get(k, 0)}"
    return True, "ok"


def agree_on_certified(a: str, b: str):
    """Two expansions agree below the smaller of their O-terms."""
    _, da, oa = parse_expansion(a)
    _, db, ob = parse_expansion(b)
    top = min(x for x in (oa, ob) if x is not None) if (oa or ob) is not None else None
    keys = set(da) | set(db)
    if top is None:
        return da == db
    return all(da.get(k, 0) == db.get(k, 0) for k in keys if k < top)


# -- running the CLI ---------------------------------------------------------------

def run_cli(*args):
    """Run the CLI in process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = 0
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = cli_main([str(a) for a in args])
        except SystemExit as exc:
            code = exc.code if isinstance(exc.code, int) else 1
    return code, out.getvalue(), err.getvalue()


def run_cli_subprocess(*args, env=None):
    proc = subprocess.run([sys.executable, "-m", "coleman_heights.cli", *map(str, args)],
                          capture_output=True, text=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


def value_of(line: str) -> str:
    return line.rsplit("= ", 1)[-1].strip()


# -- contexts and random points ------------------------------------------------------

_HC = {}


def catalog_context(label: str, p: int, N: int = 12):
    key = (label, p, N)
    if key not in _HC:
        e = lookup(label)
        _HC[key] = height_context(e.curve(), PadicContext(p, N), tangent_model=tangent_model(e))
    return _HC[key]


def random_point(E, ctx: PadicContext, rng: random.Random) -> CurvePoint:
    """A random Q_p-point in a non-Weierstrass disc with integral x."""
    p = ctx.p
    f0 = E.f0_coeffs()
    while True:
        x = ctx(rng.randrange(p ** ctx.N))
        v = sum((c * x ** i for i, c in enumerate(f0)), ctx(0))
        r = v.lift() % p
        if r and pow(r, (p - 1) // 2, p) == 1:
            y0 = v.sqrt()
            if rng.random() < 0.5:
                y0 = -y0
            return CurvePoint(E, x, y0 - (x * E.a1 + E.a3) / 2)
