"""Class numbers of imaginary quadratic orders and Atkin-Lehner fixed points.

h(D) counts reduced primitive positive definite binary quadratic forms of
discriminant D < 0.  On X0(M) with M square-free the involution w_d has
nu(M, d) fixed points; the counts reduce to class numbers of the orders of
discriminant -4d, -8d and -d through classical formulas of Fricke-Ogg type,
with an Euler product over the primes of M/d.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt, log, pi, sqrt

from .arith import legendre, prime_factors


# discriminant -> h(D); seedable from a persisted cache file
_MEMO: dict = {}


def class_number(D: int) -> int:
    """h(D) for a discriminant D < 0 (D = 0 or 1 mod 4).

    Counts forms ax^2 + bxy + cy^2 with b^2 - 4ac = D, gcd(a, b, c) = 1,
    |b| <= a <= c, and b >= 0 whenever |b| = a or a = c.
    """
    got = _MEMO.get(D)
    if got is not None:
        return got
    out = _class_number_direct(D)
    _MEMO[D] = out
    return out


def _class_number_direct(D: int) -> int:
    if D >= 0:
        raise ValueError("discriminant must be negative")
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant")
    count = 0
    a = 1
    while 4 * a * a <= -D + a * a:  # a <= sqrt(|D|/3) is implied by c >= a
        for b in range(-a + 1, a + 1):
            if (b - D) % 2 != 0:
                continue
            num = b * b - D
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            if b < 0 and (a == -b or a == c):
                continue
            count += 1
        a += 1
    return count


def class_number_bound(D: int) -> float:
    """Upper bound |D|^(1/2) log|D| / pi, valid for all D < -4."""
    return sqrt(-D) * log(-D) / pi


def export_cache() -> dict:
    """Snapshot of the h(D) memo keyed by str(D) for JSON transport."""
    return {str(D): h for D, h in sorted(_MEMO.items())}


def seed_cache(data: dict) -> None:
    for key, h in data.items():
        _MEMO[int(key)] = int(h)


def clear_cache() -> None:
    _MEMO.clear()
    nu.cache_clear()


def _fixed_points_self(d: int, twisted: bool) -> int:
    """Fixed points of w_d on X0(d) (twisted: on X0(2d)) for odd d >= 5.

    nu(d, d)  = h(-4d), plus h(-d) when d = 3 mod 4.
    nu(2d, d) = h(-4d), plus 3 h(-d) when d = 3 mod 4.
    """
    out = class_number(-4 * d)
    if d % 4 == 3:
        out += (3 if twisted else 1) * class_number(-d)
    return out


def _fixed_points_fricke_even(two_d: int) -> int:
    """Fixed points of the full involution w_{2d'} on X0(2d'), d' odd."""
    return class_number(-4 * two_d)


@lru_cache(maxsize=None)
def nu(M: int, d: int) -> int:
    """Number of fixed points of w_d on X0(M), M square-free, 1 < d | M."""
    if d <= 1 or M % d != 0:
        raise ValueError(f"need 1 < d | M, got d={d}, M={M}")
    cof = M // d
    odd_cof_primes = tuple(p for p in prime_factors(cof) if p != 2)
    if d == 2:
        a = 1
        b = 1
        for p in odd_cof_primes:
            a *= 1 + legendre(-1, p)
            b *= 1 + legendre(-2, p)
        return a + b
    if d == 3:
        out = 2
        for p in odd_cof_primes:
            out *= 1 + legendre(-3, p)
        return out
    if d % 2 == 1:
        out = _fixed_points_self(d, twisted=(cof % 2 == 0))
        for p in odd_cof_primes:
            out *= 1 + legendre(-d, p)
        return out
    # even d = 2 d' with d' odd >= 3: the only order is Z[sqrt(-d)], of
    # discriminant -4d, so each odd p | M/d splits or not according to (-d/p)
    out = _fixed_points_fricke_even(d)
    for p in odd_cof_primes:
        out *= 1 + legendre(-d, p)
    return out


def cox_consistent(d: int) -> bool:
    """Check h(-4d) = h(-d) for d = 7 mod 8 and h(-4d) = 3 h(-d) for d = 3 mod 8."""
    if d % 8 == 7:
        return class_number(-4 * d) == class_number(-d)
    if d % 8 == 3:
        return class_number(-4 * d) == 3 * class_number(-d)
    raise ValueError("relation applies to d = 3 mod 4 only")
