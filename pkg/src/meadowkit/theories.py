"""Named equational theories over the meadow signature and its expansions."""

from __future__ import annotations

from .numeric import primes_upto
from .term import (
    ONE,
    ZERO,
    Add,
    Equation,
    Mul,
    Theory,
    Var,
    numeral,
    parse_equation,
    zero_of,
)

MD_AXIOMS = (
    "(x + y) + z = x + (y + z)",
    "x + y = y + x",
    "x + 0 = x",
    "x + -x = 0",
    "(x * y) * z = x * (y * z)",
    "x * y = y * x",
    "1 * x = x",
    "x * (y + z) = x * y + x * z",
    "(x^-1)^-1 = x",
    "x * (x * x^-1) = x",
)

SIGNS_AXIOMS = (
    "s(1_(x)) = 1_(x)",
    "s(0_(x)) = 0_(x)",
    "s(-1) = -1",
    "s(x^-1) = s(x)",
    "s(x * y) = s(x) * s(y)",
    "0_(s(x) - s(y)) * (s(x + y) - s(x)) = 0",
)

SR_SYMBOLS = {"s": 1, "sqrt": 1}

SR_AXIOMS = (
    "sqrt(x^-1) = sqrt(x)^-1",
    "sqrt(x * y) = sqrt(x) * sqrt(y)",
    "sqrt(x * x * s(x)) = x",
    "s(sqrt(x) - sqrt(y)) = s(x - y)",
)


def md() -> Theory:
    return Theory("Md", tuple(parse_equation(a) for a in MD_AXIOMS))


def inv_p(bound: int) -> Theory:
    """p * p^-1 = 1 for every prime p <= bound."""
    eqs = tuple(
        Equation(Mul(numeral(p), numeral(p).inv()), ONE) for p in primes_upto(bound)
    )
    return Theory(f"Inv_P<={bound}", eqs, bound=bound)


def signs() -> Theory:
    return Theory("Signs", tuple(parse_equation(a) for a in SIGNS_AXIOMS), symbols={"s": 1})


def sum_of_squares(n: int) -> Add | Mul:
    t = Mul(Var("x0"), Var("x0"))
    for i in range(1, n + 1):
        x = Var(f"x{i}")
        t = Add(t, Mul(x, x))
    return t


def efr_instance(n: int) -> Equation:
    """0_(x0^2 + ... + xn^2) * x0 = 0."""
    return Equation(Mul(zero_of(sum_of_squares(n)), Var("x0")), ZERO)


def efr(bound: int) -> Theory:
    if bound < 0:
        raise ValueError("EFR bound must be >= 0")
    return Theory(f"EFR<={bound}", tuple(efr_instance(n) for n in range(bound + 1)), bound=bound)


def sr() -> Theory:
    """Signed square root axioms; kept for display, never model-checked."""
    return Theory(
        "SR", tuple(parse_equation(a, SR_SYMBOLS) for a in SR_AXIOMS), symbols=SR_SYMBOLS
    )


def by_name(spec: str) -> Theory:
    """Resolve ``md``, ``inv:<B>``, ``signs``, ``efr:<N>`` or ``sr``."""
    key, _, arg = spec.partition(":")
    if key == "md" and not arg:
        return md()
    if key == "inv" and arg.isdigit():
        return inv_p(int(arg))
    if key == "signs" and not arg:
        return signs()
    if key == "efr" and arg.isdigit():
        return efr(int(arg))
    if key == "sr" and not arg:
        return sr()
    raise ValueError(f"unknown theory {spec!r}")
