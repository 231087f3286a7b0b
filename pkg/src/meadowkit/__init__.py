"""Exact computation in meadows: commutative rings with a total inverse."""

from .meadows import (
    ExtensionMeadow,
    Meadow,
    MeadowError,
    ModMeadow,
    ProductMeadow,
    RationalMeadow,
    generated_subalgebra,
    make_meadow,
)
from .modelcheck import check_equation, check_il, check_theory, eval_term
from .numeric import NotSquarefreeError, weak_inverse_mod
from .term import Equation, Theory, parse_equation, parse_term

__all__ = [
    "Equation",
    "ExtensionMeadow",
    "Meadow",
    "MeadowError",
    "ModMeadow",
    "NotSquarefreeError",
    "ProductMeadow",
    "RationalMeadow",
    "Theory",
    "check_equation",
    "check_il",
    "check_theory",
    "eval_term",
    "generated_subalgebra",
    "make_meadow",
    "parse_equation",
    "parse_term",
    "weak_inverse_mod",
]
