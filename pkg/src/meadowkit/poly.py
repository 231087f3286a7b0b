"""Univariate polynomials with exact rational coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .numeric import divisors, is_prime


def _strip(cs: Iterable) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in cs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Poly:
    """Coefficients low degree first; the zero polynomial has no coefficients."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> Poly:
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly | int | Fraction) -> Poly:
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        out = Poly((1,))
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        q = [Fraction(0)] * max(len(r) - dq, 0)
        for k in range(len(r) - 1 - dq, -1, -1):
            c = r[k + dq] / lead
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
        return Poly(q), Poly(r[:dq] if dq > 0 else ())

    __divmod__ = divmod

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def monic(self) -> Poly:
        return self * (1 / self.lead) if self else self

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def integer_coeffs(self) -> list[int]:
        """Coefficients scaled by the lcm of denominators (content not removed)."""
        den = math.lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1
        return [int(c * den) for c in self.coeffs]

    def padded(self, n: int) -> tuple[Fraction, ...]:
        if len(self.coeffs) > n:
            raise ValueError(f"degree {self.degree} does not fit in {n} coefficients")
        return self.coeffs + (Fraction(0),) * (n - len(self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        out = ""
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else "x" if i == 1 else f"x^{i}"
            mag = abs(c)
            body = str(mag) if i == 0 else mono if mag == 1 else f"{mag}*{mono}"
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def poly_ext_gcd(p: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(d, h, h2)`` with ``h*g + h2*p == d`` and ``d`` the monic gcd."""
    if not p and not g:
        raise ValueError("gcd of two zero polynomials is undefined")
    # invariants: r0 = s0*g + t0*p, r1 = s1*g + t1*p
    r0, s0, t0 = g, Poly((1,)), Poly()
    r1, s1, t1 = p, Poly(), Poly((1,))
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    scale = 1 / r0.lead
    return r0 * scale, s0 * scale, t0 * scale


def has_rational_root(f: Poly) -> Fraction | None:
    """Least rational root of ``f`` by the rational root theorem, or None."""
    if not f:
        raise ValueError("the zero polynomial has every rational as a root")
    cs = f.integer_coeffs()
    # strip a power of x: 0 is a root
    if cs[0] == 0:
        return min([Fraction(0)] + _nonzero_roots(cs))
    roots = _nonzero_roots(cs)
    return min(roots) if roots else None


def _nonzero_roots(cs: Sequence[int]) -> list[Fraction]:
    k = 0
    while cs[k] == 0:
        k += 1
    cs = list(cs[k:])
    if len(cs) == 1:
        return []
    f = Poly(cs)
    cands = {
        Fraction(sign * a, b)
        for a in divisors(abs(cs[0]))
        for b in divisors(abs(cs[-1]))
        for sign in (1, -1)
    }
    return sorted(c for c in cands if f(c) == 0)


def reduce_mod_p(f: Poly, p: int) -> list[int]:
    out = []
    for c in f.coeffs:
        if c.denominator % p == 0:
            raise ValueError(f"coefficient {c} has no image mod {p}")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return out


def roots_mod_p(f: Poly, p: int) -> list[int]:
    """All x in [0, p) with f(x) = 0 mod p, by exhaustive scan."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    cs = reduce_mod_p(f, p)
    if p >= NUMPY_PRIME_LIMIT:
        return [x for x in range(p) if _horner_mod(cs, x, p) == 0]
    roots: list[int] = []
    for start in range(0, p, _CHUNK):
        xs = np.arange(start, min(start + _CHUNK, p), dtype=np.int64)
        acc = np.zeros(len(xs), dtype=np.int64)
        for c in reversed(cs):
            acc = (acc * xs + c) % p
        roots += (np.flatnonzero(acc == 0) + start).tolist()
    return roots


# products of two residues stay below 2**63
NUMPY_PRIME_LIMIT = 3_037_000_499
_CHUNK = 1 << 20


def _horner_mod(cs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(cs):
        acc = (acc * x + c) % p
    return acc


def rational_root_free_upto_degree3(g: Poly) -> bool:
    """Irreducibility over Q for degree <= 3 (no rational root)."""
    if g.degree > 3:
        raise ValueError("rational-root irreducibility test only covers degree <= 3")
    return g.degree == 1 or has_rational_root(g) is None


class ReducibleModulusError(ArithmeticError):
    """A supposed minimal polynomial turned out to have a proper factor."""

    def __init__(self, g: Poly, factor: Poly):
        self.g = g
        self.factor = factor
        super().__init__(f"{g} is reducible over Q: it has the factor {factor}")


def ext_reduce(p: Poly, g: Poly) -> tuple[Fraction, ...]:
    return (p % g).padded(g.degree)


def ext_mul(a: Sequence[Fraction], b: Sequence[Fraction], g: Poly) -> tuple[Fraction, ...]:
    return ext_reduce(Poly(a) * Poly(b), g)


def ext_inverse(a: Sequence[Fraction], g: Poly) -> tuple[Fraction, ...]:
    """Total inverse in Q[x]/(g): 0 for 0, else h2 with h*g + h2*a = 1."""
    p = Poly(a)
    if not p:
        return (Fraction(0),) * g.degree
    d, _, h2 = poly_ext_gcd(p, g)
    if d.degree > 0:
        raise ReducibleModulusError(g, d)
    return ext_reduce(h2, g)


def term_to_poly(t, var: str | None = None) -> Poly:
    """Interpret a one-variable term as a polynomial over Q.

    Inversion is only allowed on constant subterms (0^-1 = 0).
    """
    from .term import Add, Inv, Mul, Neg, One, Var, Zero, free_vars, numeral_value

    names = free_vars(t)
    if var is None and len(names) > 1:
        raise ValueError(f"polynomial has more than one variable: {sorted(names)}")
    if var is not None and names - {var}:
        raise ValueError(f"unexpected variables {sorted(names - {var})}")

    def go(u) -> Poly:
        if isinstance(u, Zero):
            return Poly()
        if isinstance(u, One):
            return Poly((1,))
        if isinstance(u, Var):
            return Poly.x()
        if isinstance(u, Add):
            n = numeral_value(u)
            if n is not None:
                return Poly((n,))
            return go(u.left) + go(u.right)
        if isinstance(u, Mul):
            return go(u.left) * go(u.right)
        if isinstance(u, Neg):
            return -go(u.arg)
        if isinstance(u, Inv):
            p = go(u.arg)
            if p.degree > 0:
                raise ValueError("cannot invert a non-constant polynomial")
            return Poly((1 / p.coeffs[0],)) if p else Poly()
        raise ValueError(f"not a polynomial term: {u}")

    return go(t)


def parse_poly(text: str) -> Poly:
    from .term import parse_term

    return term_to_poly(parse_term(text, symbols={}))
