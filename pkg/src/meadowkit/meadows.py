"""Concrete meadows behind a single algebra interface.

Values are plain Python objects: ``int`` residues for Z/nZ, ``Fraction`` for
Q0, coefficient tuples of ``Fraction`` for Q0(c) and tuples of component
values for direct products.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Sequence

from . import numeric
from .numeric import NotSquarefreeError, is_prime, squarefree_witness, weak_inverse_mod
from .poly import (
    Poly,
    ReducibleModulusError,
    ext_inverse,
    ext_mul,
    has_rational_root,
    parse_poly,
)

Value = Any

RATIONAL_PROBES = tuple(Fraction(v) for v in ("0", "1", "-1", "1/2", "-1/2", "2", "-2"))
TABLE_CAP = 512


class MeadowError(ValueError):
    pass


class InfiniteCarrierError(MeadowError):
    pass


class ForeignValueError(MeadowError):
    pass


@dataclass
class Tables:
    """Operation tables of a finite algebra over element indices."""

    elements: list
    index: dict
    add: list[list[int]]
    mul: list[list[int]]
    neg: list[int]
    inv: list[int]
    extra: dict[str, Any]
    zero: int
    one: int


class Meadow:
    """Common interface; subclasses fill in the arithmetic."""

    descriptor: str = "?"
    finite: bool = False
    extra_ops: dict[str, int] = {}
    constants: dict[str, Value] = {}

    zero: Value
    one: Value

    def add(self, x, y): raise NotImplementedError
    def neg(self, x): raise NotImplementedError
    def mul(self, x, y): raise NotImplementedError
    def inv(self, x): raise NotImplementedError
    def contains(self, x) -> bool: raise NotImplementedError
    def fmt(self, x) -> str: raise NotImplementedError
    def parse_value(self, text: str) -> Value: raise NotImplementedError
    def random_element(self, rng: random.Random) -> Value: raise NotImplementedError

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def eq(self, x, y) -> bool:
        return x == y

    def apply(self, symbol: str, args: Sequence[Value]) -> Value:
        raise MeadowError(f"symbol {symbol!r} is not interpreted in {self.descriptor}")

    def from_int(self, n: int) -> Value:
        """Image of the integer n (numeral n, or its negation)."""
        acc, base = self.zero, self.one
        k = abs(n)
        while k:
            if k & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            k >>= 1
        return self.neg(acc) if n < 0 else acc

    def elements(self) -> list:
        raise InfiniteCarrierError(f"{self.descriptor} is infinite and cannot be enumerated")

    @property
    def size(self) -> int:
        return len(self.elements())

    def probes(self) -> list:
        return [self.zero, self.one]

    def check(self, x) -> Value:
        if not self.contains(x):
            raise ForeignValueError(f"{x!r} is not an element of {self.descriptor}")
        return x

    @cached_property
    def tables(self) -> Tables | None:
        if not self.finite or self.size > TABLE_CAP:
            return None
        elems = self.elements()
        idx = {x: i for i, x in enumerate(elems)}
        extra = {}
        for sym, arity in self.extra_ops.items():
            extra[sym] = _tabulate(elems, idx, arity, lambda *a, s=sym: self.apply(s, a))
        return Tables(
            elements=elems,
            index=idx,
            add=[[idx[self.add(x, y)] for y in elems] for x in elems],
            mul=[[idx[self.mul(x, y)] for y in elems] for x in elems],
            neg=[idx[self.neg(x)] for x in elems],
            inv=[idx[self.inv(x)] for x in elems],
            extra=extra,
            zero=idx[self.zero],
            one=idx[self.one],
        )

    def __repr__(self) -> str:
        return f"<meadow {self.descriptor}>"

    def __str__(self) -> str:
        return self.descriptor


def _tabulate(elems, idx, arity, fn):
    if arity == 1:
        return [idx[fn(x)] for x in elems]
    if arity == 2:
        return [[idx[fn(x, y)] for y in elems] for x in elems]
    raise MeadowError("only unary and binary extra symbols can be tabulated")


class ModMeadow(Meadow):
    """Z/nZ for squarefree n, with weak inverses as total inversion."""

    finite = True

    def __init__(self, n: int, prime: bool = False):
        if n < 1 or n > numeric.MAX_MODULUS:
            raise MeadowError(f"modulus {n} out of range [1, 2^64]")
        if prime and not is_prime(n):
            raise MeadowError(f"{n} is not prime")
        w = squarefree_witness(n)
        if w is not None:
            raise NotSquarefreeError(n, *w)
        self.n = n
        self.prime = prime
        self.descriptor = f"zp:{n}" if prime else f"zsf:{n}"
        self.zero = 0
        self.one = 1 % n
        self._inv_cache: dict[int, int] = {}

    def __reduce__(self):
        return (ModMeadow, (self.n, self.prime))

    def add(self, x, y):
        return (x + y) % self.n

    def neg(self, x):
        return -x % self.n

    def mul(self, x, y):
        return x * y % self.n

    def inv(self, x):
        try:
            return self._inv_cache[x]
        except KeyError:
            if self.prime:
                y = pow(x, -1, self.n) if x else 0
            else:
                y = weak_inverse_mod(x, self.n)
            self._inv_cache[x] = y
            return y

    def from_int(self, n):
        return n % self.n

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.n

    def elements(self):
        return list(range(self.n))

    @property
    def size(self):
        return self.n

    def fmt(self, x):
        return str(x)

    def parse_value(self, text):
        try:
            return int(text.strip()) % self.n
        except ValueError:
            raise MeadowError(f"bad residue {text!r}") from None

    def random_element(self, rng):
        return rng.randrange(self.n)

    def probes(self):
        return sorted({0, 1 % self.n, self.n - 1, 2 % self.n})


class RationalMeadow(Meadow):
    """Q0: the rationals with 0^-1 = 0."""

    descriptor = "q0"
    zero = Fraction(0)
    one = Fraction(1)
    sample_bound = 100

    def __reduce__(self):
        return (RationalMeadow, ())

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return 1 / x if x else self.zero

    def from_int(self, n):
        return Fraction(n)

    def contains(self, x):
        return isinstance(x, Fraction)

    def fmt(self, x):
        return str(x)

    def parse_value(self, text):
        try:
            return Fraction(text.strip())
        except ValueError:
            raise MeadowError(f"bad rational {text!r}") from None

    def random_element(self, rng):
        b = self.sample_bound
        return Fraction(rng.randint(-b, b), rng.randint(1, b))

    def probes(self):
        return list(RATIONAL_PROBES)


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside of (), [] and <> nesting."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([<":
            depth += 1
        elif ch in ")]>":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


class ProductMeadow(Meadow):
    """Direct product; every operation acts componentwise."""

    def __init__(self, factors: Sequence[Meadow]):
        if not factors:
            raise MeadowError("a product needs at least one factor")
        self.factors = tuple(factors)
        self.finite = all(f.finite for f in self.factors)
        self.descriptor = "prod:[" + ",".join(f.descriptor for f in self.factors) + "]"
        self.zero = tuple(f.zero for f in self.factors)
        self.one = tuple(f.one for f in self.factors)

    def __reduce__(self):
        return (ProductMeadow, (self.factors,))

    def add(self, x, y):
        return tuple(f.add(a, b) for f, a, b in zip(self.factors, x, y))

    def neg(self, x):
        return tuple(f.neg(a) for f, a in zip(self.factors, x))

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def inv(self, x):
        return tuple(f.inv(a) for f, a in zip(self.factors, x))

    def from_int(self, n):
        return tuple(f.from_int(n) for f in self.factors)

    def project(self, i: int, x):
        return x[i]

    def contains(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == len(self.factors)
            and all(f.contains(a) for f, a in zip(self.factors, x))
        )

    def elements(self):
        if not self.finite:
            return super().elements()
        return list(itertools.product(*(f.elements() for f in self.factors)))

    @property
    def size(self):
        out = 1
        for f in self.factors:
            out *= f.size
        return out

    def fmt(self, x):
        return "<" + ",".join(f.fmt(a) for f, a in zip(self.factors, x)) + ">"

    def parse_value(self, text):
        text = text.strip()
        if not (text.startswith("<") and text.endswith(">")):
            raise MeadowError(f"product values are written <a,b,...>, got {text!r}")
        parts = _split_top(text[1:-1])
        if len(parts) != len(self.factors):
            raise MeadowError(f"expected {len(self.factors)} components in {text!r}")
        return tuple(f.parse_value(p) for f, p in zip(self.factors, parts))

    def random_element(self, rng):
        return tuple(f.random_element(rng) for f in self.factors)

    def unit_vectors(self) -> list:
        out = []
        for i in range(len(self.factors)):
            out.append(
                tuple(f.one if j == i else f.zero for j, f in enumerate(self.factors))
            )
        return out

    def probes(self):
        # idempotent unit vectors first: they are where cancellation breaks
        seen, out = set(), []
        cands = self.unit_vectors()
        if self.size_hint_small():
            cands += list(itertools.product(*(f.probes() for f in self.factors)))
        else:
            cands += [tuple(p) for p in zip(*(f.probes() for f in self.factors))]
        for c in cands:
            if c not in seen:
                seen.add(c)
                out.append(c)
        return out

    def size_hint_small(self) -> bool:
        n = 1
        for f in self.factors:
            n *= len(f.probes())
        return n <= 2401


class ExtensionMeadow(Meadow):
    """Q0(c) = Q[x]/(g) with total inversion, for a monic irreducible g."""

    def __init__(self, g: Poly, name: str = "c"):
        if not g or g.degree < 1:
            raise MeadowError("minimal polynomial must have degree >= 1")
        if g.lead != 1:
            raise MeadowError(f"minimal polynomial {g} is not monic")
        self.g = g
        self.n = g.degree
        self.name = name
        self.assumed_irreducible = self.n > 3
        if self.n <= 3 and self.n > 1:
            r = has_rational_root(g)
            if r is not None:
                raise ReducibleModulusError(g, Poly((-r, 1)))
        self.descriptor = f"ext:[{g}]" if name == "c" else f"ext:[{g},{name}]"
        self.zero = (Fraction(0),) * self.n
        self.one = (Fraction(1),) + (Fraction(0),) * (self.n - 1)
        gen = [Fraction(0)] * self.n
        if self.n == 1:
            gen[0] = -g.coeffs[0]
        else:
            gen[1] = Fraction(1)
        self.generator = tuple(gen)
        self.constants = {name: self.generator}

    def __reduce__(self):
        return (ExtensionMeadow, (self.g, self.name))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def mul(self, x, y):
        return ext_mul(x, y, self.g)

    def inv(self, x):
        return ext_inverse(x, self.g)

    def from_int(self, n):
        return (Fraction(n),) + (Fraction(0),) * (self.n - 1)

    def contains(self, x):
        return (
            isinstance(x, tuple) and len(x) == self.n and all(isinstance(a, Fraction) for a in x)
        )

    def fmt(self, x):
        return "[" + ",".join(str(a) for a in x) + "]"

    def parse_value(self, text):
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise MeadowError(f"extension values are coefficient lists [a0,a1,...], got {text!r}")
        parts = _split_top(text[1:-1])
        if len(parts) != self.n:
            raise MeadowError(f"expected {self.n} coefficients in {text!r}")
        try:
            return tuple(Fraction(p) for p in parts)
        except ValueError:
            raise MeadowError(f"bad coefficient in {text!r}") from None

    def random_element(self, rng):
        b = RationalMeadow.sample_bound
        return tuple(Fraction(rng.randint(-b, b), rng.randint(1, b)) for _ in range(self.n))

    def probes(self):
        out = [(p,) + (Fraction(0),) * (self.n - 1) for p in RATIONAL_PROBES]
        for j in range(1, self.n):
            for s in (1, -1):
                v = [Fraction(0)] * self.n
                v[j] = Fraction(s)
                out.append(tuple(v))
        if self.n > 1:
            out.append(self.add(self.one, self.generator))
        return out


class SubMeadow(Meadow):
    """A subalgebra given by an explicit closed carrier inside a parent."""

    def __init__(self, parent: Meadow, carrier: Iterable, gens: Sequence = ()):
        self.parent = parent
        self.carrier = list(carrier)
        self._members = set(self.carrier)
        self.gens = tuple(gens)
        self.finite = True
        g = ";".join(parent.fmt(x) for x in self.gens)
        self.descriptor = f"gen:[{parent.descriptor}" + (f";{g}" if g else "") + "]"
        self.zero = parent.zero
        self.one = parent.one
        self.extra_ops = {}

    def __reduce__(self):
        return (SubMeadow, (self.parent, self.carrier, self.gens))

    def add(self, x, y):
        return self.parent.add(x, y)

    def neg(self, x):
        return self.parent.neg(x)

    def mul(self, x, y):
        return self.parent.mul(x, y)

    def inv(self, x):
        return self.parent.inv(x)

    def from_int(self, n):
        return self.parent.from_int(n)

    def contains(self, x):
        return x in self._members

    def elements(self):
        return list(self.carrier)

    @property
    def size(self):
        return len(self.carrier)

    def fmt(self, x):
        return self.parent.fmt(x)

    def parse_value(self, text):
        x = self.parent.parse_value(text)
        return self.check(x)

    def random_element(self, rng):
        return rng.choice(self.carrier)

    def probes(self):
        return [x for x in self.parent.probes() if x in self._members] or [self.zero]


class Expansion(Meadow):
    """A meadow with extra interpreted function symbols."""

    def __init__(self, base: Meadow, ops: dict[str, int]):
        self.base = base
        self.extra_ops = dict(ops)
        self.finite = base.finite
        self.zero = base.zero
        self.one = base.one
        self.constants = base.constants
        self.descriptor = base.descriptor + "+{" + ",".join(ops) + "}"

    def add(self, x, y): return self.base.add(x, y)
    def neg(self, x): return self.base.neg(x)
    def mul(self, x, y): return self.base.mul(x, y)
    def inv(self, x): return self.base.inv(x)
    def from_int(self, n): return self.base.from_int(n)
    def contains(self, x): return self.base.contains(x)
    def elements(self): return self.base.elements()
    def fmt(self, x): return self.base.fmt(x)
    def parse_value(self, text): return self.base.parse_value(text)
    def random_element(self, rng): return self.base.random_element(rng)
    def probes(self): return self.base.probes()

    @property
    def size(self):
        return self.base.size


def ring_op(m: Meadow, op: str, *args) -> Value:
    """Checked entry point for add/neg/mul/sub/inv on values of ``m``."""
    fn: Callable = {"add": m.add, "neg": m.neg, "mul": m.mul, "sub": m.sub, "inv": m.inv}[op]
    for a in args:
        m.check(a)
    return fn(*args)


# ------------------------------------------------------------- constructions


class ClosureBoundExceeded(MeadowError):
    pass


def generated_subalgebra(m: Meadow, gens: Sequence = (), max_size: int | None = None) -> SubMeadow:
    """Least subset containing 0, 1 and ``gens`` closed under + - * and ^-1.

    Over an infinite parent a ``max_size`` bound is mandatory; exceeding it
    raises :class:`ClosureBoundExceeded`.
    """
    if not m.finite and max_size is None:
        raise MeadowError(f"closure inside infinite {m.descriptor} needs a size bound")
    for g in gens:
        m.check(g)
    seen: dict = {}
    order: list = []

    def push(x):
        if x not in seen:
            seen[x] = len(order)
            order.append(x)
            if max_size is not None and len(order) > max_size:
                raise ClosureBoundExceeded(
                    f"closure exceeded {max_size} elements inside {m.descriptor}"
                )

    for x in (m.zero, m.one, *gens):
        push(x)
    i = 0
    while i < len(order):
        x = order[i]
        push(m.neg(x))
        push(m.inv(x))
        for j in range(i + 1):
            y = order[j]
            push(m.add(x, y))
            push(m.mul(x, y))
        i += 1
    if m.finite:
        pos = {x: k for k, x in enumerate(m.elements())}
        order.sort(key=pos.__getitem__)
    return SubMeadow(m, order, gens)


@dataclass
class CRTIso:
    """Z/nZ with n squarefree, matched with the product of its prime fields."""

    n: int
    ring: ModMeadow
    product: ProductMeadow
    to_product: dict[int, tuple]
    from_product: dict[tuple, int]

    def forward(self, a: int) -> tuple:
        return self.to_product[a]

    def backward(self, t: tuple) -> int:
        return self.from_product[t]


def crt_iso(n: int) -> CRTIso:
    ring = ModMeadow(n)
    if n < 2:
        raise MeadowError("crt_iso needs n >= 2")
    primes = list(numeric.factorize(n))
    prod = ProductMeadow([ModMeadow(p, prime=True) for p in primes])
    fwd = {a: tuple(a % p for p in primes) for a in range(n)}
    bwd = {t: numeric.crt(list(t), primes) for t in prod.elements()}
    return CRTIso(n, ring, prod, fwd, bwd)


# ---------------------------------------------------------------- descriptors


def make_meadow(desc: str) -> Meadow:
    """Build a meadow from its descriptor string.

    ``q0``, ``zp:7``, ``zsf:30``, ``prod:[zp:2,zp:3]``, ``ext:[x^2+1]`` or
    ``ext:[x^2+1,i]`` (naming the adjoined constant), and
    ``gen:[<parent>;<gen>;...;bound=N]``.
    """
    desc = desc.strip()
    head, _, rest = desc.partition(":")
    if desc == "q0":
        return RationalMeadow()
    if head in ("zp", "zsf"):
        try:
            n = int(rest)
        except ValueError:
            raise MeadowError(f"bad modulus in {desc!r}") from None
        return ModMeadow(n, prime=head == "zp")
    if head in ("prod", "ext", "gen"):
        if not (rest.startswith("[") and rest.endswith("]")):
            raise MeadowError(f"{head} descriptor needs [...]: {desc!r}")
        inner = rest[1:-1]
        if head == "prod":
            return ProductMeadow([make_meadow(p) for p in _split_top(inner)])
        if head == "ext":
            parts = _split_top(inner)
            name = parts[1] if len(parts) > 1 else "c"
            return ExtensionMeadow(parse_poly(parts[0]), name)
        parts = _split_top(inner, ";")
        parent = make_meadow(parts[0])
        bound = None
        gens = []
        for p in parts[1:]:
            if p.startswith("bound="):
                bound = int(p[6:])
            elif p:
                gens.append(parent.parse_value(p))
        return generated_subalgebra(parent, gens, bound)
    raise MeadowError(f"unknown meadow descriptor {desc!r}")
