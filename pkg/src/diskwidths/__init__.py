"""Widths of the unit disk and near-circular ellipses from stationary networks and algebraic sweepouts."""

from .certify import WidthCertificate, certify, enumerate_candidates, ls_lower_bound, polygon_exclusion
from .conics import ConicCoeffs, classify, disk_length, line_hits, maximize_parabola, parabola_L, sign_expr
from .crofton import crofton_length, local_mass_bound, no_concentration_scan
from .domains import Domain
from .networks import GeodesicNetwork, mass, mass_via_forces
from .sweepouts import ProjectiveClass, evaluate, sup_length, sup_table

__version__ = "0.1.0"

__all__ = [
    "ConicCoeffs", "Domain", "GeodesicNetwork", "ProjectiveClass", "WidthCertificate", "certify", "classify",
    "crofton_length", "disk_length", "enumerate_candidates", "evaluate", "line_hits", "local_mass_bound",
    "ls_lower_bound", "mass", "mass_via_forces", "maximize_parabola", "no_concentration_scan", "parabola_L",
    "polygon_exclusion", "sign_expr", "sup_length", "sup_table",
]
