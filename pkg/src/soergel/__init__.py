"""Exact Soergel calculus: Coxeter groups, Kazhdan-Lusztig polynomials,
Bott-Samelson bimodules, light leaves and the graded cellular structure of
their endomorphism algebras."""

__version__ = "0.1.0"

from .arith import LaurentPoly, Poly, Scalar
from .coxeter import ChoiceLedger, CoxeterSystem, GroupUniverse
from .context import Session
from .errors import IdentityFailure, InputError, SoergelError
from .hecke import HeckeElt, KLTable, product_of_kl_generators

__all__ = [
    "ChoiceLedger",
    "CoxeterSystem",
    "GroupUniverse",
    "HeckeElt",
    "IdentityFailure",
    "InputError",
    "KLTable",
    "LaurentPoly",
    "Poly",
    "Scalar",
    "Session",
    "SoergelError",
    "product_of_kl_generators",
]
