"""Exact computations with multiloop algebras over cyclotomic fields."""

from .exactla import CycNum, ExactMatrix, Span, cyclotomic_polynomial, format_cyc, parse_cyc
from .algcore import (AlgEndo, AlgebraError, FinAlg, SigmaError, SigmaTuple, centroid_basis,
                      derivations_of_A, is_central, is_perfect, load_algebra, validate_sigma_tuple)
from .laurent import LaurentDerivation, LaurentPoly, apply_derivation, derivation_bracket
from .multiloop import LoopElement, Multiloop, Window, eigenspaces
from .descent import cocycle_from_sigma, compare_with_multiloop, fixed_points
from .dermod import (Homothety, HypothesisError, WindowedMap, ad, decompose, eta, rho,
                     verify_theorem, windowed_centroid, windowed_derivations)

__all__ = [
    "CycNum", "ExactMatrix", "Span", "cyclotomic_polynomial", "format_cyc", "parse_cyc",
    "AlgEndo", "AlgebraError", "FinAlg", "SigmaError", "SigmaTuple", "centroid_basis",
    "derivations_of_A", "is_central", "is_perfect", "load_algebra", "validate_sigma_tuple",
    "LaurentDerivation", "LaurentPoly", "apply_derivation", "derivation_bracket",
    "LoopElement", "Multiloop", "Window", "eigenspaces",
    "cocycle_from_sigma", "compare_with_multiloop", "fixed_points",
    "Homothety", "HypothesisError", "WindowedMap", "ad", "decompose", "eta", "rho",
    "verify_theorem", "windowed_centroid", "windowed_derivations",
]
