"""Exact integer and modular arithmetic used throughout the package.

Rationals are plain :class:`fractions.Fraction` values; residues are plain
ints in ``[0, n)`` interpreted against a modulus held by the caller.
"""

from __future__ import annotations

import math
from fractions import Fraction

Rational = Fraction

MAX_MODULUS = 2**64

# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class NotSquarefreeError(ValueError):
    """Raised when total inversion is requested modulo a non-squarefree n."""

    def __init__(self, n: int, witness: int, prime: int):
        self.n = n
        self.witness = witness
        self.prime = prime
        super().__init__(
            f"{n} is not squarefree ({prime}^2 divides it): "
            f"{witness} has no weak inverse mod {n}"
        )


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def _pollard_brent(n: int) -> int:
    # n is odd and composite; returns a nontrivial factor
    for c in range(1, n):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"no factor found for {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``, sorted by prime."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_brent(m)
        stack.extend((d, m // d))
    return dict(sorted(factors.items()))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def squarefree_witness(n: int) -> tuple[int, int] | None:
    """Least element of Z/nZ without a weak inverse, with the offending prime.

    Returns None when ``n`` is squarefree.  An element ``a`` lacks a weak
    inverse iff for some ``p^k || n`` with ``k >= 2`` it is neither zero nor a
    unit modulo ``p^k``; the smallest such ``p`` bounds the search.
    """
    bad = [(p, p**e) for p, e in factorize(n).items() if e >= 2]
    if not bad:
        return None
    for a in range(1, min(p for p, _ in bad) + 1):
        for p, q in bad:
            if a % q != 0 and a % p == 0:
                return a, p
    raise AssertionError("unreachable: p itself is a witness")


def mod_inverse(a: int, n: int) -> int:
    return pow(a, -1, n)


def crt(residues: list[int], moduli: list[int]) -> int:
    """Solve x = r_i mod m_i for pairwise coprime moduli; result in [0, prod m_i)."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        t = (r - x) * mod_inverse(m % mi, mi) % mi if mi > 1 else 0
        x += m * t
        m *= mi
    return x % m


def legendre(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"legendre symbol needs an odd prime, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def weak_inverse_mod(a: int, n: int) -> int:
    """The unique y with a*y*a = a and y*a*y = y mod a squarefree n.

    Computed per prime factor: field inverse where a is a unit, 0 where p | a.
    """
    w = squarefree_witness(n)
    if w is not None:
        raise NotSquarefreeError(n, *w)
    if n == 1:
        return 0
    primes = list(factorize(n))
    comps = [pow(a % p, -1, p) if a % p else 0 for p in primes]
    return crt(comps, primes)


def divisors(n: int) -> list[int]:
    """Positive divisors of n >= 1, ascending."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)
