"""Exact Mal'cev-Neumann series over Magnus-ordered free groups, with a
companion cyclic-algebra module and a batch command line."""

from .coeffield import Field, FieldAut, Quad, TwistSpec
from .cyclicalg import AlgebraElement, CyclicAlgebra, Subfield, preset
from .freegroup import Order, Word, compare, normal_closure_ball
from .mnseries import Series, SeriesRing, invert, self_invariance_probe, valuation

__all__ = [
    "AlgebraElement",
    "CyclicAlgebra",
    "Field",
    "FieldAut",
    "Order",
    "Quad",
    "Series",
    "SeriesRing",
    "Subfield",
    "TwistSpec",
    "Word",
    "compare",
    "invert",
    "normal_closure_ball",
    "preset",
    "self_invariance_probe",
    "valuation",
]

__version__ = "0.1.0"
