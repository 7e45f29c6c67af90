"""Igusa local zeta functions of two-variable polynomials over Q_p."""

from .algebra import DenFactor, PolyQT, SeriesT, ZetaRat, floor_sum, geometric_sum, zr_reduce, zr_series
from .engine import ZetaResult, assemble_zeta, theorem_containment
from .oracle import count_solutions, predicted_counts, verify
from .poly import Poly2, SQHDecomposition, parse_input

__version__ = "0.1.0"

__all__ = [
    "DenFactor", "PolyQT", "SeriesT", "ZetaRat", "floor_sum", "geometric_sum", "zr_reduce",
    "zr_series", "ZetaResult", "assemble_zeta", "theorem_containment", "count_solutions",
    "predicted_counts", "verify", "Poly2", "SQHDecomposition", "parse_input",
]
