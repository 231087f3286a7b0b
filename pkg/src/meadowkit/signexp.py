"""Sign expansions of ordered meadows and the eq-expanded product example."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import congruence
from .meadows import Expansion, Meadow, MeadowError, ModMeadow, ProductMeadow, RationalMeadow
from .modelcheck import (
    FAILS,
    HOLDS_EXHAUSTIVE,
    Mode,
    Verdict,
    check_equation,
    check_il,
    equation_names,
    eval_term,
    grid,
    sample,
)
from .poly import Poly, has_rational_root
from .term import Equation, Theory, parse_equation
from .theories import efr, signs, sr

DEFAULT_GRID = tuple(Fraction(v) for v in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))
# past this many grid assignments a law is sampled instead
GRID_CAP = 200_000


def _ordered(m: Meadow) -> bool:
    if isinstance(m, RationalMeadow):
        return True
    if isinstance(m, ProductMeadow):
        return all(_ordered(f) for f in m.factors)
    return False


def _sign_rational(a: Fraction) -> Fraction:
    return Fraction((a > 0) - (a < 0))


class SignedMeadow(Expansion):
    """Q0 or a finite product of copies of Q0 with the sign function ``s``."""

    def __init__(self, base: Meadow):
        if not _ordered(base):
            raise MeadowError(
                f"{base} is not formally real; signs need Q0 or a product of Q0"
            )
        super().__init__(base, {"s": 1})

    def __reduce__(self):
        return (SignedMeadow, (self.base,))

    def sign(self, x):
        return self._sign(self.base, self.check(x))

    def _sign(self, m: Meadow, x):
        if isinstance(m, ProductMeadow):
            return tuple(self._sign(f, a) for f, a in zip(m.factors, x))
        return _sign_rational(x)

    def apply(self, symbol, args):
        if symbol != "s" or len(args) != 1:
            return super().apply(symbol, args)
        return self._sign(self.base, args[0])


def sign(m: SignedMeadow | Meadow, x):
    if not isinstance(m, SignedMeadow):
        m = SignedMeadow(m)
    return m.sign(x)


def default_grid(m: Meadow, values: Sequence = DEFAULT_GRID) -> list:
    """Grid points of ``m``: the rational list itself, or its tuples on products."""
    if isinstance(m, Expansion):
        m = m.base
    if isinstance(m, ProductMeadow):
        return [tuple(p) for p in itertools.product(*(default_grid(f, values) for f in m.factors))]
    return [Fraction(v) for v in values]


def _grid_or_sample(m: Meadow, eq: Equation, points: list, samples: int, seed: int, workers: int) -> list[Verdict]:
    k = len(equation_names(eq))
    out = []
    if len(points) ** k <= GRID_CAP:
        out.append(check_equation(m, eq, grid(points, workers)))
    if samples:
        out.append(check_equation(m, eq, sample(samples, seed)))
    return out


@dataclass
class LawResult:
    """A law checked on a grid and by seeded sampling."""

    name: str
    verdicts: list[Verdict]

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "axiom": self.name,
            "holds": self.holds,
            "checks": [v.to_json() for v in self.verdicts],
        }


def check_signs(
    m: SignedMeadow,
    values: Sequence = DEFAULT_GRID,
    samples: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> list[LawResult]:
    """S1-S6 on every grid point and on seeded samples."""
    points = default_grid(m, values)
    return [
        LawResult(f"S{i}", _grid_or_sample(m, eq, points, samples, seed, workers))
        for i, eq in enumerate(signs(), 1)
    ]


ORDER_AXIOMS = (
    ("OF1", "x != 0 -> x < 0 or 0 < x", 1),
    ("OF2", "x < y -> not (y < x or x = y)", 2),
    ("OF3", "x < y -> x + z < y + z", 3),
    ("OF4", "x < y and 0 < z -> x * z < y * z", 3),
)


def check_order_axioms(values: Sequence = DEFAULT_GRID) -> list[Verdict]:
    """OF1-OF4 on Q0 with x < y read as s(y - x) = 1."""
    m = SignedMeadow(RationalMeadow())
    one = m.one

    def lt(a, b):
        return m.sign(m.sub(b, a)) == one

    laws = {
        "OF1": lambda x: x == 0 or lt(x, 0) or lt(0, x),
        "OF2": lambda x, y: not lt(x, y) or not (lt(y, x) or x == y),
        "OF3": lambda x, y, z: not lt(x, y) or lt(x + z, y + z),
        "OF4": lambda x, y, z: not (lt(x, y) and lt(0, z)) or lt(x * z, y * z),
    }
    points = [Fraction(v) for v in values]
    out = []
    for name, text, k in ORDER_AXIOMS:
        law = laws[name]
        names = ("x", "y", "z")[:k]
        verdict = Verdict(f"{name}: {text}", HOLDS_EXHAUSTIVE, len(points) ** k)
        for i, v in enumerate(itertools.product(points, repeat=k)):
            if not law(*v):
                verdict = Verdict(
                    verdict.subject,
                    FAILS,
                    i + 1,
                    {"assignment": {n: m.fmt(a) for n, a in zip(names, v)}},
                )
                break
        out.append(verdict)
    return out


def check_efr(
    m: Meadow,
    bound: int,
    values: Sequence = DEFAULT_GRID,
    samples: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> list[LawResult]:
    """EFR instances n = 0..bound: exhaustive on finite meadows, grid plus samples otherwise."""
    out = []
    for n, eq in enumerate(efr(bound)):
        if m.finite:
            vs = [check_equation(m, eq, Mode("exhaustive", workers=workers))]
        else:
            vs = _grid_or_sample(m, eq, default_grid(m, values), samples, seed, workers)
        out.append(LawResult(f"EFR{n}", vs))
    return out


# ------------------------------------------------------------ eq expansion


class EqMeadow(Expansion):
    """(Z/2Z)0 x (Z/3Z)0 with eq(x, y) = 1 if x = y and 0 otherwise."""

    def __init__(self):
        super().__init__(ProductMeadow([ModMeadow(2, prime=True), ModMeadow(3, prime=True)]), {"eq": 2})

    def __reduce__(self):
        return (EqMeadow, ())

    def apply(self, symbol, args):
        if symbol != "eq" or len(args) != 2:
            return super().apply(symbol, args)
        return self.one if args[0] == args[1] else self.zero


EQ_SYMBOLS = {"eq": 2}
EQ_COUNTEREXAMPLE = "eq(x * x^-1, 1) = x * x^-1"


def eq_equations() -> Theory:
    """eq(x, x) = 1 and eq(i, j) = 0 for distinct numerals 0 <= i, j <= 5."""
    eqs = [parse_equation("eq(x, x) = 1", EQ_SYMBOLS)]
    for i, j in itertools.permutations(range(6), 2):
        eqs.append(parse_equation(f"eq({i}, {j}) = 0", EQ_SYMBOLS))
    return Theory("E", tuple(eqs), symbols=EQ_SYMBOLS)


def eq_meadow_checks() -> dict:
    """Defining equations, the failing equation, congruence counts and IL."""
    m = EqMeadow()
    defining = [check_equation(m, eq) for eq in eq_equations()]
    counter_eq = parse_equation(EQ_COUNTEREXAMPLE, EQ_SYMBOLS)
    counter = check_equation(m, counter_eq)
    x = (1, 0)
    env = {"x": x}
    lhs, rhs = eval_term(counter_eq.lhs, m, env), eval_term(counter_eq.rhs, m, env)
    expanded = congruence.all_congruences(m)
    reduct = congruence.all_congruences(m, reduct=True)
    x_inv = m.inv(x)
    il = check_il(m)
    checks = {
        "defining_equations": all(v.holds for v in defining),
        "counterexample_fails": not counter.holds and lhs != rhs,
        "stated_witness_values": m.fmt(lhs) == "<0,0>" and m.fmt(rhs) == "<1,0>",
        "expanded_congruences": len(expanded) == 2,
        "reduct_congruences": len(reduct) == 4,
        "inverse_of_idempotent": x_inv == x,
        "inverse_law_fails": not il.holds,
    }
    return {
        "operation": "eq-example",
        "meadow": str(m),
        "defining_equations": [v.to_json() for v in defining],
        "counterexample": counter.to_json(),
        "stated_witness": {
            "assignment": {"x": m.fmt(x)},
            "lhs": m.fmt(lhs),
            "rhs": m.fmt(rhs),
        },
        "congruences_expanded": len(expanded),
        "congruences_reduct": len(reduct),
        "reduct_lattice": [c.render(congruence.FiniteAlgebra.from_meadow(m, True).labels) for c in reduct],
        "inverse": {"x": m.fmt(x), "x^-1": m.fmt(x_inv)},
        "inverse_law": il.to_json(),
        "checks": checks,
        "passed": all(checks.values()),
    }


# ---------------------------------------------------------- square roots


def sqrt_theory() -> Theory:
    return sr()


def no_rational_sqrt(n: int = 2) -> dict:
    """Q0 has no square root of n when x^2 - n has no rational root."""
    f = Poly((-n, 0, 1))
    r = has_rational_root(f)
    return {
        "polynomial": str(f),
        "rational_root": None if r is None else str(r),
        "expandable": r is not None,
    }
