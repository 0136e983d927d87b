from .curves import CurveReport, Provenance, RDCurve, RDPoint, curve_check
from .gradcheck import GradcheckReport, finite_difference_check, perturb_gates, relative_error
from .sweep import active_units, analytic_curve, log_spaced_betas, rd_point, rd_sweep
from .theorem1 import (
    LIMITING_BIAS,
    RDConstruction,
    Theorem1Construction,
    Theorem1Errors,
    rd_construct,
    rd_construct_verify,
    theorem1_construct,
    theorem1_verify,
)

__all__ = [
    "CurveReport",
    "Provenance",
    "RDCurve",
    "RDPoint",
    "curve_check",
    "GradcheckReport",
    "finite_difference_check",
    "perturb_gates",
    "relative_error",
    "active_units",
    "analytic_curve",
    "log_spaced_betas",
    "rd_point",
    "rd_sweep",
    "LIMITING_BIAS",
    "RDConstruction",
    "rd_construct",
    "rd_construct_verify",
    "Theorem1Construction",
    "Theorem1Errors",
    "theorem1_construct",
    "theorem1_verify",
]
