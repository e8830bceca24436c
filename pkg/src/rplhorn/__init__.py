"""Fuzzy Horn clauses over Rational Pavelka predicate logic."""
from .algebra import rational01
from .parser import parse_formula, parse_structure, parse_theory, print_formula
from .semantics import FiniteStructure, eval_formula, truth_value
from .syntax import Signature, classify_horn
from .term_model import solve

__all__ = [
    "FiniteStructure",
    "Signature",
    "classify_horn",
    "eval_formula",
    "parse_formula",
    "parse_structure",
    "parse_theory",
    "print_formula",
    "rational01",
    "solve",
    "truth_value",
]
__version__ = "0.1.0"
