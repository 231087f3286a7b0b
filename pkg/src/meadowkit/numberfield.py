"""Normal forms in Q0(c) and the quadratic-residue specification checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .meadows import ExtensionMeadow, RationalMeadow
from .modelcheck import (
    CLOSED,
    _pool_map,
    check_equation,
    equation_names,
    eval_term,
    sample,
)
from .numeric import is_prime, legendre, primes_upto
from .poly import (
    Poly,
    ReducibleModulusError,
    ext_reduce,
    has_rational_root,
    parse_poly,
    poly_ext_gcd,
    roots_mod_p,
)
from .term import (
    ONE,
    ZERO,
    Add,
    App,
    Const,
    Equation,
    Inv,
    Mul,
    Neg,
    One,
    Term,
    Var,
    Zero,
    constants_of,
    numeral,
    numeral_value,
    parse_equations,
)

__all__ = [
    "Poly",
    "ReducibleModulusError",
    "has_rational_root",
    "parse_poly",
    "poly_ext_gcd",
    "roots_mod_p",
    "ext_normal_form",
    "single_spec_poly",
    "single_spec_term",
    "spec_equation",
    "verify_single_spec",
    "Presentation",
    "gaussian_presentation",
    "verify_presentation",
    "random_closed_term",
]


def ext_normal_form(t: Term, g: Poly, const: str = "c") -> tuple[Fraction, ...]:
    """Coefficients (a_0, ..., a_{n-1}) of the normal form of a closed term over c.

    Ring operations reduce powers of c modulo g; a nonzero p(c) is inverted
    through the Bezout identity h*g + h2*p = 1, and 0^-1 is 0.
    """

    def nf(u: Term) -> Poly:
        if isinstance(u, Zero):
            return Poly()
        if isinstance(u, One):
            return Poly((1,))
        if isinstance(u, Const):
            if u.name != const:
                raise ValueError(f"unknown constant {u.name!r}, expected {const!r}")
            return Poly.x() % g
        if isinstance(u, Var):
            raise ValueError(f"normal forms need closed terms, found variable {u.name!r}")
        if isinstance(u, Add):
            n = numeral_value(u)
            if n is not None:
                return Poly((n,))
            return nf(u.left) + nf(u.right)
        if isinstance(u, Neg):
            return -nf(u.arg)
        if isinstance(u, Mul):
            return (nf(u.left) * nf(u.right)) % g
        if isinstance(u, Inv):
            p = nf(u.arg)
            if not p:
                return p
            d, _, h2 = poly_ext_gcd(p, g)
            if d.degree > 0:
                raise ReducibleModulusError(g, d)
            return h2 % g
        if isinstance(u, App):
            raise ValueError(f"symbol {u.symbol!r} has no meaning in Q0(c)")
        raise TypeError(f"not a term: {u!r}")

    return ext_reduce(nf(t), g)


# ----------------------------------------------------- single equation spec


def single_spec_poly(p0: int, p1: int, lead: int = 2) -> Poly:
    """lead * (x^2 - p0)(x^2 - p1)(x^2 - p0*p1)."""
    x2 = Poly((0, 0, 1))
    return Poly((lead,)) * (x2 - Poly((p0,))) * (x2 - Poly((p1,))) * (x2 - Poly((p0 * p1,)))


def poly_term(f: Poly, x: Term) -> Term:
    """A term for f(x) with integer coefficients, as a sum of c_k * x^k."""
    if any(c.denominator != 1 for c in f.coeffs):
        raise ValueError("poly_term expects integer coefficients")
    out: Term | None = None
    for k, c in enumerate(f.coeffs):
        if not c:
            continue
        mono: Term | None = numeral(abs(int(c))) if abs(c) != 1 or k == 0 else None
        for _ in range(k):
            mono = x if mono is None else Mul(mono, x)
        if c < 0:
            mono = Neg(mono)
        out = mono if out is None else Add(out, mono)
    return out if out is not None else ZERO


def spec_equation(f: Poly | Term, var: str = "x") -> Equation:
    """f(x) * f(x)^-1 = 1."""
    ft = poly_term(f, Var(var)) if isinstance(f, Poly) else f
    return Equation(Mul(ft, Inv(ft)), ONE)


def single_spec_term(p0: int, p1: int, lead: int = 2, var: str = "x") -> Term:
    """The factored term lead * (x*x - p0) * (x*x - p1) * (x*x - p0*p1)."""
    x = Var(var)
    out: Term | None = numeral(lead) if lead != 1 else None
    for q in (p0, p1, p0 * p1):
        fac = Add(Mul(x, x), Neg(numeral(q)))
        out = fac if out is None else Mul(out, fac)
    return out


@dataclass
class _PrimeRootJob:
    f: Poly
    p0: int
    p1: int

    def __call__(self, p: int) -> dict:
        roots = roots_mod_p(self.f, p)
        row = {"p": p, "has_root": bool(roots), "least_root": roots[0] if roots else None}
        if p != 2:
            a, b, c = (legendre(v, p) for v in (self.p0, self.p1, self.p0 * self.p1))
            row["legendre"] = [a, b, c]
            # 0 or a residue among p0, p1, p0*p1 gives a root of a quadratic factor
            row["predicted"] = any(v >= 0 for v in (a, b, c))
            row["multiplicative"] = (c == a * b) or 0 in (a, b)
        return row


def verify_single_spec(
    p0: int, p1: int, prime_bound: int, workers: int = 1, detail: bool = False
) -> dict:
    """Check that f(x) * f(x)^-1 = 1 holds in Q0 and fails in every (Z/pZ)0 up to the bound."""
    if p0 == p1:
        raise ValueError("p0 and p1 must be distinct primes")
    for q in (p0, p1):
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    f = single_spec_poly(p0, p1)
    rational_root = has_rational_root(f)
    rows = _pool_map(_PrimeRootJob(f, p0, p1), primes_upto(prime_bound), workers)
    no_root = [r["p"] for r in rows if not r["has_root"]]
    discrepancies = [
        r["p"]
        for r in rows
        if r["p"] != 2
        and (r["predicted"] != r["has_root"] or not r["multiplicative"] or not r["predicted"])
    ]
    out = {
        "operation": "single-spec",
        "p0": p0,
        "p1": p1,
        "polynomial": str(f),
        "equation": str(spec_equation(single_spec_term(p0, p1))),
        "prime_bound": prime_bound,
        "rational_root": None if rational_root is None else str(rational_root),
        "primes_checked": len(rows),
        "primes_without_root": no_root,
        "legendre_checked": sum(1 for r in rows if r["p"] != 2),
        "legendre_discrepancies": discrepancies,
    }
    if detail:
        out["primes"] = rows
    out["passed"] = rational_root is None and not no_root and not discrepancies
    return out


# ------------------------------------------------------------- presentations


@dataclass
class Presentation:
    """Fresh constants and closed (or variable-carrying) relations over them."""

    constants: list[str]
    relations: list[Equation] = field(default_factory=list)

    def __post_init__(self):
        declared = set(self.constants)
        for eq in self.relations:
            extra = (constants_of(eq.lhs) | constants_of(eq.rhs)) - declared
            if extra:
                raise ValueError(f"relation {eq} uses undeclared constants {sorted(extra)}")

    @classmethod
    def parse(cls, text: str) -> Presentation:
        consts, eqs = parse_equations(text)
        return cls(consts, eqs)


GAUSSIAN_F = single_spec_poly(2, 3, lead=1)


def gaussian_presentation() -> Presentation:
    """({i}, {f(x) * f(x)^-1 = 1, i^2 + 1 = 0}) with f = (x^2-2)(x^2-3)(x^2-6)."""
    i = Const("i")
    return Presentation(["i"], [spec_equation(single_spec_term(2, 3, lead=1)), Equation(Add(Mul(i, i), ONE), ZERO)])


DEFAULT_WEIGHTS = {"add": 3, "mul": 3, "neg": 2, "inv": 2, "leaf": 4}


def random_closed_term(
    rng: random.Random,
    const: str | None = "c",
    depth: int = 12,
    weights: dict[str, int] | None = None,
) -> Term:
    """Random closed term over one constant; leaves are 0, 1, c and small numerals."""
    w = weights or DEFAULT_WEIGHTS
    kinds = list(w)
    leaves: list[Term] = [ZERO, ONE, numeral(2), numeral(3), numeral(5)]
    if const is not None:
        leaves.append(Const(const))

    def go(d: int) -> Term:
        kind = "leaf" if d == 0 else rng.choices(kinds, [w[k] for k in kinds])[0]
        if kind == "leaf":
            return rng.choice(leaves)
        if kind == "add":
            return Add(go(d - 1), go(d - 1))
        if kind == "mul":
            return Mul(go(d - 1), go(d - 1))
        if kind == "neg":
            return Neg(go(d - 1))
        return Inv(go(d - 1))

    return go(depth)


def verify_presentation(
    P: Presentation,
    g: Poly | None,
    trials: int = 1000,
    seed: int = 0,
    samples: int = 200,
    depth: int = 12,
) -> dict:
    """Check that Q0(c) satisfies the relations and that closed terms normalize.

    Relations with variables are sampled over Q0(c) (probes include c itself);
    closed relations are checked exactly.  Each trial term t gets a normal form
    of length deg g, and nf(t) * nf(t^-1) = 1 whenever nf(t) is nonzero.
    """
    if len(P.constants) > 1:
        raise ValueError("only single-generator presentations are supported")
    if P.constants:
        if g is None:
            raise ValueError("a minimal polynomial is required")
        const = P.constants[0]
        m = ExtensionMeadow(g, const)
    else:
        const, g = None, Poly.x()
        m = RationalMeadow()
    rel_rows = []
    for eq in P.relations:
        mode = sample(samples, seed) if equation_names(eq) else CLOSED
        v = check_equation(m, eq, mode)
        rel_rows.append(v.to_json())
    n = g.degree
    bad_shape, bad_roundtrip, bad_eval = [], [], []
    for k in range(trials):
        rng = random.Random(f"{seed}:{k}")
        t = random_closed_term(rng, const, depth)
        v = ext_normal_form(t, g, const or "c")
        if len(v) != n:
            bad_shape.append(k)
        via_meadow = eval_term(t, m)
        if (via_meadow if const else (via_meadow,)) != v:
            bad_eval.append(k)
        if any(v):
            w = ext_normal_form(Inv(t), g, const or "c")
            prod = ext_reduce(Poly(v) * Poly(w), g)
            if prod != (Fraction(1),) + (Fraction(0),) * (n - 1):
                bad_roundtrip.append(k)
    passed = (
        all(r["status"] != "fails" for r in rel_rows)
        and not bad_shape
        and not bad_roundtrip
        and not bad_eval
    )
    return {
        "operation": "presentation",
        "constants": list(P.constants),
        "minimal_polynomial": str(g) if P.constants else None,
        "relations": rel_rows,
        "seed": seed,
        "trials": trials,
        "normal_form_failures": bad_shape,
        "evaluation_mismatches": bad_eval,
        "roundtrip_failures": bad_roundtrip,
        "passed": passed,
    }
