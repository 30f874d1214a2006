"""Carathéodory–Fejér problems in one and two variables, with the matrix
and operator tools they rest on."""
from .cf import (CFProblem1D, CFProblem2D, TruncatedMultOp, cf1_construct, cf1_feasible,
                 cf2_extend, cf2_necessary, cf2_sufficient_class, extremal_value)
from .errors import CFLabError
from .hankel import hankel_norm, nehari_gap
from .linalg import DEFAULT_TOL, Tolerance, operator_norm
from .parrott import ParrottData, parrott_solve, toeplitz_extend_step
from .poly import MultiPoly, format_poly, parse_poly, sup_norm_torus

__version__ = "0.1.0"

__all__ = [
    "CFLabError", "CFProblem1D", "CFProblem2D", "DEFAULT_TOL", "MultiPoly", "ParrottData",
    "Tolerance", "TruncatedMultOp", "cf1_construct", "cf1_feasible", "cf2_extend",
    "cf2_necessary", "cf2_sufficient_class", "extremal_value", "format_poly", "hankel_norm",
    "nehari_gap", "operator_norm", "parrott_solve", "parse_poly", "sup_norm_torus",
    "toeplitz_extend_step",
]
