"""Frobenius characteristic polynomials and point counts.

For a curve with Jacobian isogenous to a product of orbit varieties,
the Frobenius charpoly at a good prime p is the product over orbits of
Res_y(ap_charpoly(y), x^2 - y*x + p).  Point counts over F_{p^n} then
come from Newton power sums; everything is exact integer arithmetic.
"""

import sympy

_x, _y = sympy.symbols("x y")

_MEMO = {}


class BadReductionError(Exception):
    """Point counts requested at a prime dividing an orbit level."""


def _orbit_frob(orbit, p):
    if int(orbit.level) % p == 0:
        raise BadReductionError(f"p={p} divides level {int(orbit.level)}")
    if p not in orbit.ap_charpoly:
        raise KeyError(f"orbit {orbit.key} has no a_{p} data")
    f = sympy.Poly(list(reversed(orbit.ap_charpoly[p])), _y)
    g = sympy.Poly(_x ** 2 - _y * _x + p, _y, _x)
    res = sympy.resultant(f, g, _y)
    coeffs = [int(c) for c in reversed(sympy.Poly(res, _x).all_coeffs())]
    return coeffs


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def frob_charpoly(orbits, p):
    """Ascending integer coefficients, degree 2 * sum of orbit dims."""
    key = (tuple(o.key for o in orbits), p)
    if key not in _MEMO:
        poly = [1]
        for o in orbits:
            poly = _poly_mul(poly, _orbit_frob(o, p))
        _MEMO[key] = poly
    return _MEMO[key]


def power_sums(coeffs, kmax):
    """Newton power sums s_1..s_kmax of the roots of a monic integer
    polynomial given by ascending coefficients."""
    d = len(coeffs) - 1
    if coeffs[-1] != 1:
        raise ValueError("polynomial is not monic")
    # e_k with sign: e[k] = (-1)^k * coefficient of x^(d-k)
    e = [(-1) ** k * coeffs[d - k] for k in range(d + 1)]
    s = [0] * (kmax + 1)
    for k in range(1, kmax + 1):
        acc = (-1) ** (k - 1) * k * e[k] if k <= d else 0
        for i in range(1, min(k, d + 1)):
            acc += (-1) ** (i - 1) * e[i] * s[k - i]
        s[k] = acc
    return s[1:]


def point_count(orbits, p, n):
    """|X(F_{p^n})| for the curve carrying the given orbit product."""
    poly = frob_charpoly(orbits, p)
    if len(poly) == 1:
        return p ** n + 1    # genus 0
    s = power_sums(poly, n)
    count = p ** n + 1 - s[n - 1]
    if count < 0:
        raise ArithmeticError(f"negative point count at p^{n}")
    return count


def weil_gap(coeffs, p):
    """max | |root| - sqrt(p) | over the roots; diagnostic only."""
    import numpy as np

    if len(coeffs) == 1:
        return 0.0
    roots = np.roots(list(reversed(coeffs)))
    return float(max(abs(abs(r) - p ** 0.5) for r in roots))


def functional_equation_ok(coeffs, p):
    """x^(2g) P(p/x) == p^g P(x) for the Frobenius charpoly."""
    d = len(coeffs) - 1
    if d % 2:
        return False
    g = d // 2
    return all(coeffs[d - i] * p ** (d - i) == coeffs[i] * p ** g
               for i in range(d + 1))


def clear_cache():
    _MEMO.clear()


def export_cache():
    return {f"{'/'.join(f'{a}.{b}' for a, b in k[0])}|{k[1]}": v
            for k, v in _MEMO.items()}


def seed_cache(data):
    for key, poly in data.items():
        head, p = key.rsplit("|", 1)
        orbits = tuple(tuple(int(t) for t in part.split("."))
                       for part in head.split("/")) if head else ()
        _MEMO[(orbits, int(p))] = [int(c) for c in poly]
