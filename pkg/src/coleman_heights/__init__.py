"""Coleman integration and p-adic heights on elliptic curves over Q."""

from .coleman import (ColemanValue, double_from_tangential, double_integral, single_from_tangential,
                      single_integral, tiny_integral, torsion_double_formula)
from .curve import CurvePoint, ModelIso, WeierstrassCurve, apply_iso, find_iso
from .frobenius import HeightContext, frobenius_matrix, height_context, to_short_model
from .heights import cg_height, kim_check, kim_ratio, mazur_tate_height, sigma_series, tau_at
from .padic import PadicContext, PadicNumber

__version__ = "0.1.0"
