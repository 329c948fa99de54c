import math

import pytest

from x0star.classnum import class_number, class_number_bound, cox_consistent, nu


def _h_brute(D):
    # count reduced primitive forms (a, b, c), b^2 - 4ac = D, directly
    count = 0
    a = 1
    while a * a <= -D / 3:
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(a, math.gcd(abs(b), c)) == 1:
                count += 1
        a += 1
    return count


def test_matches_brute_force_up_to_500():
    for D in range(-3, -501, -1):
        if D % 4 in (0, 1):
            assert class_number(D) == _h_brute(D), D


def test_pinned_values():
    pinned = {
        -3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -20: 2, -23: 3, -44: 3,
        -47: 5, -104: 6, -183: 8, -212: 6, -296: 10, -488: 10, -732: 8,
        -740: 16, -1480: 12, -2756: 40, -5512: 20,
    }
    for D, h in pinned.items():
        assert class_number(D) == h, D


def test_rejects_bad_discriminant():
    with pytest.raises(ValueError):
        class_number(5)
    with pytest.raises(ValueError):
        class_number(-5)
    with pytest.raises(ValueError):
        class_number(-6)


def test_cox_relation_up_to_1000():
    # h(-4d) = h(-d) for d = 7 mod 8, = 3 h(-d) for d = 3 mod 8 (d > 3)
    for d in range(7, 1001, 4):
        assert cox_consistent(d), d


def test_cox_relation_needs_3_mod_4():
    with pytest.raises(ValueError):
        cox_consistent(5)


def test_class_number_bound():
    # the analytic bound holds for D < -4
    for D in range(-7, -1001, -1):
        if D % 4 in (0, 1):
            assert class_number(D) <= class_number_bound(D), D


def test_fixed_point_counts_pinned():
    assert nu(14, 7) == 4
    assert nu(22, 11) == 6
    assert nu(26, 13) == 2
    assert nu(10, 5) == 2
    assert nu(10, 2) == 2
    assert sum(nu(30, d) for d in (2, 3, 5, 6, 10, 15, 30)) == 20


def test_fixed_point_counts_composite_level():
    want = {2: 4, 13: 4, 26: 0, 53: 12, 106: 0, 689: 40, 1378: 20}
    for d, value in want.items():
        assert nu(1378, d) == value, d


def test_fixed_point_counts_reject_bad_divisor():
    with pytest.raises(ValueError):
        nu(30, 4)
    with pytest.raises(ValueError):
        nu(30, 1)
