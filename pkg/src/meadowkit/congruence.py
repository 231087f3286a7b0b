"""Congruences of finite algebras over the meadow signature and expansions.

Congruences are computed on element indices.  Every operation of the
(possibly expanded) signature takes part, so adding a symbol such as ``eq``
can only shrink the congruence lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .meadows import Meadow, MeadowError

CARRIER_CAP = 64
ORACLE_CAP = 7


class CarrierTooLarge(MeadowError):
    pass


@dataclass
class FiniteAlgebra:
    """Element labels plus operation tables ``(name, arity, table)``."""

    labels: list[str]
    ops: list[tuple[str, int, list]]

    @property
    def size(self) -> int:
        return len(self.labels)

    @classmethod
    def from_meadow(cls, m: Meadow, reduct: bool = False) -> FiniteAlgebra:
        if not m.finite:
            raise MeadowError(f"{m} is infinite; congruences need a finite carrier")
        tb = m.tables
        if tb is None:
            raise CarrierTooLarge(f"{m} has {m.size} elements")
        ops = [("+", 2, tb.add), ("*", 2, tb.mul), ("-", 1, tb.neg), ("^-1", 1, tb.inv)]
        if not reduct:
            for sym, arity in sorted(m.extra_ops.items()):
                ops.append((sym, arity, tb.extra[sym]))
        return cls([m.fmt(x) for x in tb.elements], ops)


def _algebra(a: Meadow | FiniteAlgebra, reduct: bool = False) -> FiniteAlgebra:
    return a if isinstance(a, FiniteAlgebra) else FiniteAlgebra.from_meadow(a, reduct)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            rx, ry = ry, rx
        self.parent[rx] = ry
        return True


@dataclass(frozen=True)
class Congruence:
    """A partition of ``range(n)``, blocks sorted by least element."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Congruence:
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(tuple(sorted(tuple(g) for g in groups.values())))

    @classmethod
    def diagonal(cls, n: int) -> Congruence:
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def total(cls, n: int) -> Congruence:
        return cls((tuple(range(n)),) if n else ())

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self) -> list[int]:
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for i in b:
                out[i] = k
        return out

    def is_diagonal(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def is_total(self) -> bool:
        return len(self.blocks) <= 1

    def related(self, a: int, b: int) -> bool:
        lab = self.block_of()
        return lab[a] == lab[b]

    def meet(self, other: Congruence) -> Congruence:
        a, b = self.block_of(), other.block_of()
        return Congruence.from_labels([(x, y) for x, y in zip(a, b)])

    def __le__(self, other: Congruence) -> bool:
        lab = other.block_of()
        return all(len({lab[i] for i in b}) == 1 for b in self.blocks)

    def render(self, labels: Sequence[str]) -> str:
        return " | ".join("{" + ", ".join(labels[i] for i in b) + "}" for b in self.blocks)


def generate(alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing ``pairs`` (union-find closure under translations)."""
    n = alg.size
    uf = _UnionFind(n)
    pending = list(pairs)
    while pending:
        x, y = pending.pop()
        if not uf.union(x, y):
            continue
        find = uf.find
        for _, arity, T in alg.ops:
            if arity == 1:
                pending.append((T[x], T[y]))
            else:
                Tx, Ty = T[x], T[y]
                for z in range(n):
                    u, v = Tx[z], Ty[z]
                    if u != v and find(u) != find(v):
                        pending.append((u, v))
                    Tz = T[z]
                    u, v = Tz[x], Tz[y]
                    if u != v and find(u) != find(v):
                        pending.append((u, v))
    return Congruence.from_labels([uf.find(i) for i in range(n)])


def _index(m: Meadow | FiniteAlgebra, v) -> int:
    if isinstance(m, FiniteAlgebra):
        return v
    return m.tables.index[m.check(v)]


def principal_congruence(m: Meadow | FiniteAlgebra, a, b, reduct: bool = False) -> Congruence:
    alg = _algebra(m, reduct)
    return generate(alg, [(_index(m, a), _index(m, b))])


def _check_cap(alg: FiniteAlgebra, cap: int):
    if alg.size > cap:
        raise CarrierTooLarge(f"carrier of size {alg.size} exceeds the cap of {cap}")


def principal_congruences(alg: FiniteAlgebra) -> dict[tuple[int, int], Congruence]:
    return {
        (a, b): generate(alg, [(a, b)])
        for a, b in itertools.combinations(range(alg.size), 2)
    }


def join(alg: FiniteAlgebra, x: Congruence, y: Congruence) -> Congruence:
    pairs = [(b[0], i) for c in (x, y) for b in c.blocks for i in b[1:]]
    return generate(alg, pairs)


def all_congruences(
    m: Meadow | FiniteAlgebra, reduct: bool = False, cap: int = CARRIER_CAP
) -> list[Congruence]:
    """Whole congruence lattice: Δ plus joins of principal congruences."""
    alg = _algebra(m, reduct)
    _check_cap(alg, cap)
    principal = set(principal_congruences(alg).values())
    found = {Congruence.diagonal(alg.size)} | principal
    frontier = set(principal)
    while frontier:
        new = set()
        for c in frontier:
            for p in principal:
                j = join(alg, c, p)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return sorted(found, key=lambda c: (-len(c.blocks), c.blocks))


def is_compatible(alg: FiniteAlgebra, c: Congruence) -> bool:
    """Direct check of the substitution property, argument tuples in full."""
    lab = c.block_of()
    rel = [(x, y) for b in c.blocks for x in b for y in b]
    for _, arity, T in alg.ops:
        if arity == 1:
            if any(lab[T[x]] != lab[T[y]] for x, y in rel):
                return False
        else:
            for x, x2 in rel:
                for y, y2 in rel:
                    if lab[T[x][y]] != lab[T[x2][y2]]:
                        return False
    return True


def set_partitions(n: int) -> Iterator[list[int]]:
    """All partitions of range(n) as restricted growth strings."""
    if n == 0:
        yield []
        return
    a = [0] * n

    def rec(i: int, mx: int):
        if i == n:
            yield list(a)
            return
        for v in range(mx + 2):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    a[0] = 0
    yield from rec(1, 0)


def brute_force_congruences(m: Meadow | FiniteAlgebra, reduct: bool = False) -> list[Congruence]:
    """Independent oracle: filter every set partition by compatibility."""
    alg = _algebra(m, reduct)
    _check_cap(alg, ORACLE_CAP)
    out = []
    for rgs in set_partitions(alg.size):
        c = Congruence.from_labels(rgs)
        if is_compatible(alg, c):
            out.append(c)
    return sorted(out, key=lambda c: (-len(c.blocks), c.blocks))


def is_simple(m: Meadow | FiniteAlgebra, reduct: bool = False) -> bool:
    # the one-element algebra counts as simple
    return all(c.is_diagonal() or c.is_total() for c in all_congruences(m, reduct))


def is_subdirectly_irreducible(
    m: Meadow | FiniteAlgebra, reduct: bool = False
) -> tuple[bool, Congruence | None]:
    """SI test; the monolith is the meet of all nontrivial principal congruences."""
    alg = _algebra(m, reduct)
    _check_cap(alg, CARRIER_CAP)
    princ = [c for c in principal_congruences(alg).values() if not c.is_diagonal()]
    if not princ:
        return False, None
    mono = princ[0]
    for c in princ[1:]:
        mono = mono.meet(c)
    if mono.is_diagonal():
        return False, None
    return True, mono


def quotient(alg: FiniteAlgebra, c: Congruence) -> FiniteAlgebra:
    lab = c.block_of()
    reps = [b[0] for b in c.blocks]
    ops = []
    for name, arity, T in alg.ops:
        if arity == 1:
            ops.append((name, 1, [lab[T[r]] for r in reps]))
        else:
            ops.append((name, 2, [[lab[T[r][s]] for s in reps] for r in reps]))
    labels = ["{" + ",".join(alg.labels[i] for i in b) + "}" for b in c.blocks]
    return FiniteAlgebra(labels, ops)


@dataclass
class Decomposition:
    congruences: list[Congruence]
    quotients: list[FiniteAlgebra]
    embedding: list[tuple[int, ...]]
    injective: bool
    homomorphism: bool
    surjective_projections: bool
    factors_si: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.homomorphism and self.surjective_projections and self.factors_si


def _upper_covers(c: Congruence, lattice: list[Congruence]) -> list[Congruence]:
    above = [d for d in lattice if d != c and c <= d]
    return [d for d in above if not any(e != d and e <= d for e in above)]


def subdirect_decompose(m: Meadow | FiniteAlgebra, reduct: bool = False) -> Decomposition:
    """Embed a finite algebra into a product of subdirectly irreducible quotients."""
    alg = _algebra(m, reduct)
    lattice = all_congruences(alg)
    n = alg.size
    # a quotient is SI iff its kernel has exactly one upper cover
    chosen = [c for c in lattice if not c.is_total() and len(_upper_covers(c, lattice)) == 1]
    for c in list(chosen):
        rest = [d for d in chosen if d != c]
        if rest and _meet_all(rest, n).is_diagonal():
            chosen = rest
    chosen.sort(key=lambda c: (len(c.blocks), c.blocks))
    quots = [quotient(alg, c) for c in chosen]
    labs = [c.block_of() for c in chosen]
    emb = [tuple(l[i] for l in labs) for i in range(n)]
    injective = len(set(emb)) == n
    hom = True
    for k, (name, arity, T) in enumerate(alg.ops):
        for args in itertools.product(range(n), repeat=arity):
            img = emb[T[args[0]] if arity == 1 else T[args[0]][args[1]]]
            for j, q in enumerate(quots):
                Q = q.ops[k][2]
                comp = Q[emb[args[0]][j]] if arity == 1 else Q[emb[args[0]][j]][emb[args[1]][j]]
                if comp != img[j]:
                    hom = False
    surj = all({e[j] for e in emb} == set(range(q.size)) for j, q in enumerate(quots))
    si = all(is_subdirectly_irreducible(q)[0] for q in quots)
    return Decomposition(chosen, quots, emb, injective, hom, surj, si)


def _meet_all(cs: Sequence[Congruence], n: int) -> Congruence:
    out = Congruence.total(n)
    for c in cs:
        out = out.meet(c)
    return out
