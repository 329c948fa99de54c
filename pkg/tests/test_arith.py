import math

import pytest

from x0star.arith import (
    SquarefreeLevel,
    dedekind_psi,
    divisors,
    factorize,
    is_squarefree,
    legendre,
    moebius,
    prime_factors,
    squarefree_odd_range,
    v_p,
)


def test_factorize_small():
    assert factorize(1) == {}
    assert factorize(2) == {2: 1}
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1378) == {2: 1, 13: 1, 53: 1}
    # beyond the sieve limit, trial division must still work
    big = 65537 * 65539
    assert factorize(big) == {65537: 1, 65539: 1}


def test_factorize_rejects_nonpositive():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(-6)


def test_prime_factors_sorted():
    assert prime_factors(645) == (3, 5, 43)
    assert prime_factors(1) == ()


def test_moebius_sum_over_divisors():
    # sum_{d | n} mu(d) = [n == 1]
    for n in range(1, 2001):
        total = sum(moebius(d) for d in divisors(n))
        assert total == (1 if n == 1 else 0), n


def test_moebius_matches_squarefree_sign():
    for n in range(1, 1001):
        if is_squarefree(n):
            assert moebius(n) == (-1) ** len(prime_factors(n))
        else:
            assert moebius(n) == 0


def test_dedekind_psi_values():
    assert dedekind_psi(1) == 1
    assert dedekind_psi(2) == 3
    assert dedekind_psi(30) == 72
    assert dedekind_psi(210) == 576
    assert dedekind_psi(97) == 98


def test_dedekind_psi_multiplicative():
    for m in range(1, 60):
        for n in range(1, 60):
            if math.gcd(m, n) == 1:
                assert dedekind_psi(m * n) == dedekind_psi(m) * dedekind_psi(n)


def test_divisors():
    assert divisors(1) == [1]
    assert divisors(30) == [1, 2, 3, 5, 6, 10, 15, 30]
    for d in divisors(645):
        assert 645 % d == 0


def test_v_p():
    assert v_p(48, 2) == 4
    assert v_p(48, 3) == 1
    assert v_p(5, 3) == 0
    with pytest.raises(ValueError):
        v_p(0, 2)


def test_legendre_euler_criterion():
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        for a in range(-p, p + 1):
            e = pow(a % p, (p - 1) // 2, p)
            want = 0 if a % p == 0 else (1 if e == 1 else -1)
            assert legendre(a, p) == want, (a, p)


def test_legendre_rejects_two():
    with pytest.raises(ValueError):
        legendre(3, 2)


def test_squarefree_level():
    lvl = SquarefreeLevel.of(366)
    assert int(lvl) == 366
    assert lvl.omega == 3
    assert lvl.is_even
    assert lvl.odd_part == 183
    assert lvl.odd_primes == (3, 61)

    odd = SquarefreeLevel.of(645)
    assert not odd.is_even
    assert odd.odd_part == 645


def test_squarefree_level_rejects():
    with pytest.raises(ValueError):
        SquarefreeLevel.of(12)
    with pytest.raises(ValueError):
        SquarefreeLevel.of(1)


def test_squarefree_odd_range_inclusive():
    got = list(squarefree_odd_range(3, 30))
    assert got == [3, 5, 7, 11, 13, 15, 17, 19, 21, 23, 29]
    assert 3000 not in list(squarefree_odd_range(2999, 3000))
    assert list(squarefree_odd_range(3003, 3003)) == [3003]
