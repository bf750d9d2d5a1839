"""Finite universal algebra and tree-language workbench."""
from .algebra import Congruence, FiniteAlgebra, Homomorphism
from .boolean import SetBooleanAlgebra
from .errors import DomainError
from .terms import Signature, Term, VariableSet, parse_polish, to_polish

__version__ = "0.1.0"

__all__ = [
    "Congruence",
    "DomainError",
    "FiniteAlgebra",
    "Homomorphism",
    "SetBooleanAlgebra",
    "Signature",
    "Term",
    "VariableSet",
    "parse_polish",
    "to_polish",
]
