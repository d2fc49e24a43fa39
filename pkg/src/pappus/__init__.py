"""Exact computations for morphed Pappus marked-box orbits and their duality curves."""

from .boxes import MarkedBox, PappusParams, initial_box, op_b, op_i, op_t
from .duality import PSI, build_psi, solve_duality_a, solve_polarity
from .errors import PappusError
from .kernel import HomLine, HomPoint, ProjMap
from .morph import MorphParams, generate_orbit, morph_box
from .poly import MultiPoly, parse

__all__ = [
    "MarkedBox", "PappusParams", "initial_box", "op_b", "op_i", "op_t",
    "PSI", "build_psi", "solve_duality_a", "solve_polarity", "PappusError",
    "HomLine", "HomPoint", "ProjMap", "MorphParams", "generate_orbit", "morph_box",
    "MultiPoly", "parse",
]
