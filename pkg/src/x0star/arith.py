"""Elementary arithmetic for square-free levels.

Factorization, the multiplicative functions mu and psi, Legendre symbols at
odd primes, and a validated container for square-free levels.  Everything
here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

_SIEVE_LIMIT = 1 << 16
_SPF = None  # smallest prime factor table, built lazily


def _spf_table():
    global _SPF
    if _SPF is None:
        spf = list(range(_SIEVE_LIMIT))
        for p in range(2, isqrt(_SIEVE_LIMIT - 1) + 1):
            if spf[p] == p:
                for m in range(p * p, _SIEVE_LIMIT, p):
                    if spf[m] == m:
                        spf[m] = p
        _SPF = spf
    return _SPF


def factorize(n: int) -> dict:
    """Prime factorization of n >= 1 as {p: exponent}."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict = {}
    if n < _SIEVE_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out[d] = e
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> tuple:
    """Distinct prime factors of n, increasing."""
    return tuple(sorted(factorize(n)))


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def dedekind_psi(n: int) -> int:
    """psi(n) = n * prod_{p | n} (1 + 1/p), the index of Gamma0(n)."""
    out = n
    for p in prime_factors(n):
        out = out // p * (p + 1)
    return out


def divisors(n: int) -> list:
    """All positive divisors of n, increasing."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def v_p(n: int, p: int) -> int:
    """p-adic valuation of n != 0."""
    if n == 0:
        raise ValueError("v_p(0) is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    if p == 2 or p < 2:
        raise ValueError("legendre needs an odd prime")
    a %= p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


@dataclass(frozen=True)
class SquarefreeLevel:
    """A square-free level N >= 2 together with its prime support."""

    value: int
    primes: tuple

    @classmethod
    def of(cls, n: int) -> "SquarefreeLevel":
        if n < 2:
            raise ValueError(f"level must be >= 2, got {n}")
        f = factorize(n)
        if any(e > 1 for e in f.values()):
            raise ValueError(f"level must be square-free, got {n}")
        return cls(n, tuple(sorted(f)))

    @property
    def omega(self) -> int:
        return len(self.primes)

    @property
    def is_even(self) -> bool:
        return self.value % 2 == 0

    @property
    def odd_part(self) -> int:
        return self.value // 2 if self.is_even else self.value

    @property
    def odd_primes(self) -> tuple:
        return tuple(p for p in self.primes if p != 2)

    def __int__(self) -> int:
        return self.value


def squarefree_odd_range(lo: int, hi: int):
    """Yield odd square-free integers in [lo, hi]."""
    n = lo + (1 - lo % 2)
    while n <= hi:
        if is_squarefree(n):
            yield n
        n += 2


def _coprime_part_primes(n: int, d: int) -> tuple:
    """Primes of n not dividing d."""
    return tuple(p for p in prime_factors(n) if d % p != 0)
