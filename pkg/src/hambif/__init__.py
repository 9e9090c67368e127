"""Detecting functions, index computations and branch counts for bifurcations
of periodic solutions of Hamiltonian systems depending on several parameters."""

from .polyalg import MultiPoly, PolyMatrix, parse_poly, poly_det, jacobian2
from .detect import HessianModel, load_model, detecting_poly, candidate_js

__version__ = "0.1.0"

__all__ = [
    "MultiPoly",
    "PolyMatrix",
    "parse_poly",
    "poly_det",
    "jacobian2",
    "HessianModel",
    "load_model",
    "detecting_poly",
    "candidate_js",
]
