"""Genus of X0(N) and of the Atkin-Lehner quotient X0*(N) = X0(N)/B(N).

For square-free N (odd, or twice an odd number) the genus of X0(N) has a
closed form in psi(N) and the elliptic-point counts, and the quotient genus
follows by Riemann-Hurwitz from the fixed-point counts nu(N, d) of the
Atkin-Lehner involutions.  On top of the two formulas this module provides
the classification of the defect delta(N) = g*(2N) - 2 g*(N) for odd N, a
certified tail bound showing delta < -1 for all large configurations, and
the candidate enumerations driven by the gonality bounds psi(N) <= 348*2^n
and psi(N) <= 108*2^n.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .arith import (
    dedekind_psi,
    divisors,
    is_squarefree,
    prime_factors,
    squarefree_odd_range,
)
from .classnum import nu


def _nu2(odd_primes: tuple, n: int) -> int:
    """Number of elliptic points of order 2: 0 unless every p = 1 mod 4."""
    if any(p % 4 == 3 for p in odd_primes):
        return 0
    return 2**n


def _nu3(primes: tuple, n: int, has3: bool) -> int:
    """Number of elliptic points of order 3: 0 unless no p = 2 mod 3."""
    if any(p % 3 == 2 for p in primes):
        return 0
    return 2 ** (n - 1) if has3 else 2**n


@lru_cache(maxsize=None)
def genus_x0(M: int) -> int:
    """Genus of X0(M) for square-free M, odd or twice odd."""
    if M < 2 or not is_squarefree(M):
        raise ValueError(f"need square-free M >= 2, got {M}")
    primes = prime_factors(M)
    if M % 2 == 0:
        odd = M // 2
        odd_primes = tuple(p for p in primes if p != 2)
        n = len(odd_primes)
        g = (
            1
            + Fraction(dedekind_psi(odd), 4)
            - Fraction(_nu2(odd_primes, n), 4)
            - 2**n
        )
    else:
        n = len(primes)
        g = (
            1
            + Fraction(dedekind_psi(M), 12)
            - Fraction(_nu2(primes, n), 4)
            - Fraction(_nu3(primes, n, M % 3 == 0), 3)
            - 2 ** (n - 1)
        )
    if g.denominator != 1 or g < 0:
        raise ArithmeticError(f"genus formula gave {g} for M={M}")
    return int(g)


@lru_cache(maxsize=None)
def genus_x0_star(M: int) -> int:
    """Genus of X0*(M) = X0(M)/B(M) for square-free M, odd or twice odd."""
    g = genus_x0(M)
    n = len(prime_factors(M))
    total = sum(nu(M, d) for d in divisors(M) if d > 1)
    gs = 1 + Fraction(g - 1, 2**n) - Fraction(total, 2 ** (n + 1))
    if gs.denominator != 1 or gs < 0:
        raise ArithmeticError(f"quotient genus formula gave {gs} for M={M}")
    return int(gs)


def delta_2n(N: int) -> int:
    """delta(N) = g*(2N) - 2 g*(N) for odd square-free N >= 3."""
    if N % 2 == 0:
        raise ValueError("delta is defined for odd N")
    return genus_x0_star(2 * N) - 2 * genus_x0_star(N)


def delta_lists(limit: int = 3000) -> dict:
    """Classify odd square-free N <= limit with g*(N) > 2 by delta(N).

    Returns {delta: sorted list of N} for delta in {-1, 0, 1, 2}; every other
    qualifying N has delta < -1 (checked).
    """
    out = {-1: [], 0: [], 1: [], 2: []}
    for N in squarefree_odd_range(3, limit):
        if genus_x0_star(N) <= 2:
            continue
        d = delta_2n(N)
        if d > 2:
            raise ArithmeticError(f"delta({N}) = {d} exceeds 2")
        if d >= -1:
            out[d].append(N)
    return out


def genus_window(g_star: int, odd_level: bool) -> range:
    """Admissible quotient genera for an involution of X0*(N), g* = g_star.

    Hurwitz gives g_u <= (g*+1)/2; quotients of genus 0 or 1 are excluded in
    scope (the curve is neither hyperelliptic nor bielliptic there); for odd
    N the new part of the quotient also forces g_u >= (g*-5)/2.
    """
    hi = (g_star + 1) // 2
    lo = 2
    if odd_level:
        lo = max(lo, -((5 - g_star) // 2))  # ceil((g*-5)/2)
    return range(lo, hi + 1)


# ---------------------------------------------------------------------------
# certified tail bound: delta(N) < -1 once the prime configuration is large
# ---------------------------------------------------------------------------

_PI_LO = Fraction(3141592653589793, 10**15)
_PI_HI = Fraction(3141592653589794, 10**15)


def _sqrt_lo(x: Fraction, bits: int) -> Fraction:
    n = (x.numerator << (2 * bits)) // x.denominator
    return Fraction(isqrt(n), 1 << bits)


def _sqrt_hi(x: Fraction, bits: int) -> Fraction:
    n = -((-x.numerator << (2 * bits)) // x.denominator)  # ceil
    return Fraction(isqrt(n) + 1, 1 << bits)


class Interval:
    """Closed rational interval with outward rounding; enough for the bound."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = Fraction(lo)
        self.hi = Fraction(lo if hi is None else hi)
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other):
        other = _as_interval(other)
        prods = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains 0")
        inv = Interval(1 / other.hi, 1 / other.lo)
        return self * inv

    def width(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self):
        return f"Interval({float(self.lo):.9g}, {float(self.hi):.9g})"


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(x)


def _sqrt_interval(x: Interval, bits: int) -> Interval:
    return Interval(_sqrt_lo(x.lo, bits), _sqrt_hi(x.hi, bits))


def tail_expression(primes, bits: int = 48) -> Interval:
    """Enclosure of (10/(3 pi)) (prod (2+p^(3/4))/(1+p)
    + 3 prod (2+p^(1/2))/(1+p)) - 1/12 over the given primes."""
    pi = Interval(_PI_LO, _PI_HI)
    t34 = Interval(1)
    t12 = Interval(1)
    for p in primes:
        sq = _sqrt_interval(Interval(p), bits)
        p34 = _sqrt_interval(_sqrt_interval(Interval(p**3), bits), bits)
        t34 = t34 * ((p34 + 2) / Interval(1 + p))
        t12 = t12 * ((sq + 2) / Interval(1 + p))
    return (Interval(10) / (Interval(3) * pi)) * (t34 + Interval(3) * t12) - Interval(
        Fraction(1, 12)
    )


def tail_negative(primes) -> bool:
    """Certified sign of the tail expression for a prime configuration."""
    for bits in (48, 96, 192):
        iv = tail_expression(primes, bits)
        if iv.hi < 0:
            return True
        if iv.lo > 0:
            return False
    raise ArithmeticError(f"tail bound undecided at {primes}")


# One certified boundary configuration per clause; any N whose prime tuple
# dominates a clause dominates its boundary, where the expression is negative.
_TAIL_CLAUSES = (
    (8, None, None),
    (7, 5, 73),
    (6, 7, 569),
    (5, 13, 3373),
    (4, 23, 16573),
    (3, 53, 37993),
    (2, 269, 63737),
    (1, None, 54277),
)


def tail_certificate(N: int) -> bool:
    """True when the prime configuration of odd square-free N satisfies one
    of the monotone clauses guaranteeing delta(N) < -1."""
    ps = prime_factors(N)
    n = len(ps)
    for omega, p1_min, plast_min in _TAIL_CLAUSES:
        if n > 8 and omega == 8:
            return True
        if n != omega:
            continue
        if omega == 8:
            return True
        if p1_min is not None and ps[0] >= p1_min:
            return True
        if plast_min is not None and ps[-1] > plast_min:
            return True
    return False


# ---------------------------------------------------------------------------
# candidate enumerations from the gonality bounds
# ---------------------------------------------------------------------------


def gonality_pool() -> list:
    """Odd square-free N >= 3 with psi(N) <= 348 * 2^omega(N).

    These are the levels where X0*(N) can have gonality <= 4; with eight or
    more prime factors the smallest N already exceeds 348 * 2^8.
    """
    out = []
    for N in squarefree_odd_range(3, 348 * 2**7):
        if dedekind_psi(N) <= 348 * 2 ** len(prime_factors(N)):
            out.append(N)
    return out


def classification_candidates() -> list:
    """Composite members of the gonality pool with g*(N) > 3."""
    return [
        N
        for N in gonality_pool()
        if len(prime_factors(N)) > 1 and genus_x0_star(N) > 3
    ]


def char2_candidates() -> list:
    """Odd square-free N with psi(N) <= 108 * 2^omega(N) and g*(N) > 2.

    Candidate levels for X0*(N) hyperelliptic over F_2 by the Ogg count.
    """
    out = []
    for N in squarefree_odd_range(3, 108 * 2**4):
        if dedekind_psi(N) <= 108 * 2 ** len(prime_factors(N)) and genus_x0_star(N) > 2:
            out.append(N)
    return out
