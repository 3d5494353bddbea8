"""Built-in curve models, their isomorphisms, and parsing of curve/point input."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .curve import CurvePoint, ModelIso, WeierstrassCurve, find_iso
from .errors import CatalogError


@dataclass
class CatalogEntry:
    label: str
    ainvs: tuple
    minimal: bool
    points: dict = field(default_factory=dict)   # name -> (x, y)
    tangent: str | None = None                   # label of the model fixing the tangent vector
    related: dict = field(default_factory=dict)  # label -> ModelIso from this model

    def curve(self) -> WeierstrassCurve:
        return WeierstrassCurve(self.ainvs, label=self.label, minimal=self.minimal)

    def point(self, name: str) -> CurvePoint:
        x, y = self.points[name]
        return self.curve().point(x, y)


_RAW = [
    ("37a-short", (0, 0, 0, -16, 16), False, {"P": (0, 4)}, "37a1-minimal"),
    ("37a1-minimal", (0, 0, 1, -1, 0), True, {"P": (0, 0)}, None),
    ("480f1-short", (0, 8, 0, -9, 0), False, {"W1": (1, 0), "W2": (0, 0)}, "480f1-minimal"),
    ("480f1-minimal", (0, -1, 0, -30, 72), True, {}, None),
    ("53a-short", (0, 0, 0, 405, 16038), False, {"P": (-9, 108)}, "53a1-minimal"),
    ("53a1-minimal", (1, -1, 1, 0, 0), True, {"P": (0, 0)}, None),
]

ALIASES = {
    "37a": "37a-short", "37a1": "37a-short", "37a1-short": "37a-short",
    "37a-minimal": "37a1-minimal", "37a-min": "37a1-minimal",
    "480f1": "480f1-short",
    "53a": "53a-short", "53a1": "53a-short", "53a1-short": "53a-short",
    "53a-minimal": "53a1-minimal", "53a-min": "53a1-minimal",
}


def _build():
    entries = {lab: CatalogEntry(lab, tuple(Fraction(a) for a in ainv), mini, pts, tan)
               for lab, ainv, mini, pts, tan in _RAW}
    for e in entries.values():
        if e.tangent:
            other = entries[e.tangent]
            iso = find_iso(e.curve(), other.curve())
            e.related[other.label] = iso
            other.related[e.label] = iso.inverse()
    return entries


CATALOG = _build()


def lookup(label: str) -> CatalogEntry:
    key = ALIASES.get(label, label)
    if key not in CATALOG:
        raise CatalogError(f"unknown curve label {label!r}; known: {', '.join(sorted(CATALOG))}")
    return CATALOG[key]


def tangent_model(entry: CatalogEntry):
    """(model, iso) for the minimal model fixing the tangent vector, or None."""
    if not entry.tangent:
        return None
    other = CATALOG[entry.tangent]
    return other.curve(), entry.related[other.label]


def validate(entry: CatalogEntry) -> None:
    """Every stored iso must carry this model onto the related one and keep the points on the curve."""
    E = entry.curve()
    for lab, iso in entry.related.items():
        if iso.transform(E).ainvs != CATALOG[lab].ainvs:
            raise CatalogError(f"stored iso {entry.label} -> {lab} does not validate")
    for name, (x, y) in entry.points.items():
        if not E.is_on(E.point(x, y)):
            raise CatalogError(f"point {name} is not on {entry.label}")


# -- textual input ---------------------------------------------------------------

def parse_rational(text, where: str = "value") -> Fraction:
    if isinstance(text, bool):
        raise CatalogError(f"{where}: expected a rational, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str) and re.fullmatch(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*", text):
        try:
            return Fraction(text.replace(" ", ""))
        except ZeroDivisionError:
            pass
    raise CatalogError(f"{where}: expected an integer or fraction string, got {text!r}")


def parse_curve_record(text: str, source: str = "<record>") -> WeierstrassCurve:
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(rec, dict):
        raise CatalogError(f"{source}: expected an object with fields label, a, minimal")
    a = rec.get("a")
    if not isinstance(a, list) or len(a) != 5:
        raise CatalogError(f"{source}: field 'a' must list five coefficients [a1,a2,a3,a4,a6]")
    coeffs = [parse_rational(v, f"{source}: a[{i}]") for i, v in enumerate(a)]
    minimal = rec.get("minimal", False)
    if not isinstance(minimal, bool):
        raise CatalogError(f"{source}: field 'minimal' must be true or false")
    label = rec.get("label")
    if label is not None and not isinstance(label, str):
        raise CatalogError(f"{source}: field 'label' must be a string")
    return WeierstrassCurve(coeffs, label=label, minimal=minimal)


def ingest_curve(path) -> WeierstrassCurve:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read curve record {path}: {exc.strerror}") from None
    return parse_curve_record(text, str(path))


def resolve_curve(spec: str):
    """A catalog label or a record file; returns (curve, entry or None)."""
    key = ALIASES.get(spec, spec)
    if key in CATALOG:
        entry = CATALOG[key]
        return entry.curve(), entry
    if Path(spec).is_file():
        return ingest_curve(spec), None
    raise CatalogError(f"{spec!r} is neither a catalog label nor a curve record file")


_POINT_RE = re.compile(r"^\s*[\(\[]\s*([^,\s]+)\s*,\s*([^,\s\)\]]+)\s*[\)\]]\s*$")


def parse_point(text: str, curve: WeierstrassCurve, entry: CatalogEntry | None = None):
    """'v', 'infinity', '(x,y)', '[x, y]' or the name of a catalog point."""
    t = text.strip()
    if t == "v":
        return "v"
    if t in ("infinity", "O"):
        return curve.infinity()
    if entry is not None and t in entry.points:
        return entry.point(t)
    m = _POINT_RE.match(t)
    if not m:
        raise CatalogError(f"malformed point {text!r}: expected (x,y) with fraction entries")
    x = parse_rational(m.group(1), "point x")
    y = parse_rational(m.group(2), "point y")
    P = CurvePoint(curve, x, y)
    if not curve.is_on(P):
        raise CatalogError(f"point {text} is not on the curve {curve}")
    return P


def model_iso(source: str, target: str) -> ModelIso:
    return lookup(source).related[lookup(target).label]
