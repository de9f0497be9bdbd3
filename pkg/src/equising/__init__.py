"""Exact decision and certification of equisingular approximations for toric
weights ``log sum |z_i|^{a_i}`` with exponents in multiquadratic fields."""

from .approximation import ApproxSequence, build_sequence, verify_sequence
from .caps import Caps, use_caps
from .decision import Outcome, Verdict, analytic_witness, classify_maximal, decide, unit_solutions
from .numbers import SurdNumber, parse_surd
from .staircase import (
    Staircase,
    WeightSpec,
    contains,
    epsilon0,
    generators,
    ideal_equal,
    lct,
    nonmembers,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxSequence",
    "Caps",
    "Outcome",
    "Staircase",
    "SurdNumber",
    "Verdict",
    "WeightSpec",
    "analytic_witness",
    "build_sequence",
    "classify_maximal",
    "contains",
    "decide",
    "epsilon0",
    "generators",
    "ideal_equal",
    "lct",
    "nonmembers",
    "parse_surd",
    "unit_solutions",
    "use_caps",
    "verify_sequence",
]
