"""Exact computations on the generalised affine Stiefel variety GSV(r, s)."""

__version__ = "0.1.0"

from .atlas import certify_canonical_trivial, gluing_factor, transition
from .repthy import GroupElement, act, base_point, canonical_weight, orbit_witness, tangent_weights
from .symalg import LocalizedElement, Polynomial, Variable, parse_poly, x, y
from .variety import GSVSpec, Point, build_chart, chart_atlas, dimension

__all__ = [
    "__version__",
    "GSVSpec", "Point", "Polynomial", "LocalizedElement", "Variable", "GroupElement",
    "x", "y", "parse_poly", "build_chart", "chart_atlas", "dimension",
    "transition", "gluing_factor", "certify_canonical_trivial",
    "act", "base_point", "orbit_witness", "tangent_weights", "canonical_weight",
]
