"""Hyperelliptic tests over finite fields and exact genus-2 models.

For an odd prime p of good reduction the question is decided on
q-expansions: echelonize an integral basis of the weight-2 space mod p
and read the gap sequence at the infinity cusp off the pivot exponents.
A hyperelliptic reduction forces the gaps (1, ..., g) or
(1, 3, ..., 2g-1), and then x = f_{g-1}/f_g together with
y = q(dx/dq)/f_g must satisfy y^2 = P(x) for a square-free P of degree
2g+2 or 2g+1.  Fitting P is exact linear algebra on Laurent
coefficients, so an inconsistent system certifies the reduction is not
hyperelliptic, while a consistent fit exhibits the model.

The same construction over the rationals extracts the exact model of a
genus-2 quotient curve from the two pulled-back differentials.

Characteristic 2 needs a different route: candidate levels must pass an
Ogg-style bound psi(N) <= 108 * 2^omega(N), and are then screened by
point counts over F_{2^m} and by the odd-degree place parity criterion.
"""

import math
from fractions import Fraction

import sympy

from . import criteria, frobenius, genus, nfdata
from .petri import PrecisionError

__all__ = [
    "hyp_test_modp", "star_hyperelliptic_modp", "genus2_model",
    "a_value", "char2_screen",
]

MOD2_SURVIVORS = (183, 185, 187, 203, 335, 345, 385)


class _PrimeField:
    """Entries stored as ints reduced mod p."""

    def __init__(self, p):
        self.p = p
        self.zero = 0
        self.one = 1

    def of(self, a):
        if isinstance(a, Fraction):
            if a.denominator % self.p == 0:
                raise ArithmeticError(f"{a} is not {self.p}-integral")
            return a.numerator * pow(a.denominator, -1, self.p) % self.p
        return a % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a == 0


class _Rationals:
    """Fraction arithmetic behind the same adapter protocol."""

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def of(self, a):
        return Fraction(a)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def is_zero(self, a):
        return a == 0


def _echelon(F, rows):
    """Reduced row echelon form with unit pivots.

    Returns (rows, pivot column indices); dependent rows are dropped.
    """
    rows = [list(r) for r in rows]
    ncols = min(len(r) for r in rows)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows))
                    if not F.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, a) for a in rows[r]]
        for i in range(len(rows)):
            if i != r and not F.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [F.sub(a, F.mul(f, b))
                           for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


class _Laurent:
    """Truncated Laurent series.

    coeffs[i] is the q^(val+i) coefficient and the expansion is exact
    through q^hi; every operation tracks how far the result stays
    exact, so reading a coefficient never silently uses a truncated
    tail.
    """

    __slots__ = ("F", "val", "coeffs")

    def __init__(self, F, val, coeffs):
        i = 0
        while i < len(coeffs) and F.is_zero(coeffs[i]):
            i += 1
        if i == len(coeffs):
            raise PrecisionError("series vanishes to working precision")
        self.F = F
        self.val = val + i
        self.coeffs = list(coeffs[i:])

    @property
    def hi(self):
        return self.val + len(self.coeffs) - 1

    def coeff(self, e):
        if e < self.val:
            return self.F.zero
        if e > self.hi:
            raise PrecisionError(f"coefficient q^{e} beyond precision")
        return self.coeffs[e - self.val]

    def mul(self, other):
        F = self.F
        val = self.val + other.val
        hi = min(self.hi + other.val, other.hi + self.val)
        out = [F.zero] * (hi - val + 1)
        for i, a in enumerate(self.coeffs):
            if F.is_zero(a):
                continue
            base = self.val + i + other.val
            if base > hi:
                break
            for j, b in enumerate(other.coeffs):
                e = base + j
                if e > hi:
                    break
                out[e - val] = F.add(out[e - val], F.mul(a, b))
        return _Laurent(F, val, out)

    def inv(self):
        # leading coefficient must be a unit; keeps as many terms as self
        F = self.F
        n = len(self.coeffs)
        g0 = F.inv(self.coeffs[0])
        out = [F.zero] * n
        out[0] = g0
        for k in range(1, n):
            s = F.zero
            for j in range(1, k + 1):
                s = F.add(s, F.mul(self.coeffs[j], out[k - j]))
            out[k] = F.sub(F.zero, F.mul(g0, s))
        return _Laurent(F, -self.val, out)

    def qdq(self):
        """q d/dq: multiplies the q^e term by e."""
        F = self.F
        out = [F.mul(F.of(self.val + i), c)
               for i, c in enumerate(self.coeffs)]
        return _Laurent(F, self.val, out)


def _integral_row(row):
    """Scale a row by the lcm of its denominators (a rational unit)."""
    if all(isinstance(c, int) for c in row):
        return list(row)
    dens = [Fraction(c).denominator for c in row]
    scale = math.lcm(*dens)
    return [int(Fraction(c) * scale) for c in row]


def _saturate_modp(rows, p):
    """p-saturate an integer row lattice.

    While the reduction mod p drops rank, some integer combination of
    the rows is divisible by p entrywise; dividing it out enlarges the
    lattice by index p without moving the rational span.  Returns rows
    whose reduction has full rank.
    """
    F = _PrimeField(p)
    rows = [_integral_row(r) for r in rows]
    g = len(rows)
    for _ in range(64):
        width = min(len(r) for r in rows)
        # eliminate on [A | I] so zero rows expose the combination
        aug = [[F.of(c) for c in rows[i][:width]] +
               [F.one if j == i else F.zero for j in range(g)]
               for i in range(g)]
        ech, piv = _echelon(F, [r[:width] for r in aug])
        if len(piv) == g:
            return rows
        red, _ = _echelon(F, aug)
        comb = None
        for r in red:
            if all(F.is_zero(c) for c in r[:width]):
                comb = r[width:]
                break
        if comb is None:
            # full augmented elimination never drops a row; rank gap
            # in the A-part guarantees a zero block row
            raise ArithmeticError("saturation bookkeeping failed")
        new_row = [sum(comb[i] * rows[i][j] for i in range(g))
                   for j in range(width)]
        if any(c % p for c in new_row):
            raise ArithmeticError("kernel combination not divisible")
        j = max(i for i in range(g) if not F.is_zero(comb[i]))
        rows[j] = [c // p for c in new_row]
    raise ArithmeticError(f"lattice index at {p} too deep to saturate")


def _fit_even_square(x, y, deg):
    """Exact solve of y^2 = sum_k c_k x^k on every known coefficient.

    Returns (coeffs ascending, number of equations) or None when the
    system is inconsistent.  Underdetermined systems raise
    PrecisionError: more q-expansion terms are needed, the answer is
    not in doubt.
    """
    F = x.F
    powers = [None]
    acc = x
    for _ in range(deg - 1):
        powers.append(acc)
        acc = acc.mul(x)
    powers.append(acc)
    square = y.mul(y)
    lo = min(square.val, powers[deg].val)
    hi = min(square.hi, min(p.hi for p in powers[1:]))
    if hi < max(0, lo) + deg + 1:
        raise PrecisionError("too few terms to pin down the model")
    eqs = []
    for e in range(lo, hi + 1):
        row = []
        for k in range(deg + 1):
            if k == 0:
                row.append(F.one if e == 0 else F.zero)
            else:
                pk = powers[k]
                row.append(pk.coeff(e) if pk.val <= e <= pk.hi else F.zero)
        row.append(square.coeff(e) if square.val <= e <= square.hi
                   else F.zero)
        eqs.append(row)
    ech, piv = _echelon(F, eqs)
    if deg + 1 in piv:
        return None
    if len(piv) < deg + 1:
        raise PrecisionError("model fit is underdetermined")
    return [row[-1] for row in ech], len(eqs)


def _is_squarefree_poly(coeffs, p=None):
    X = sympy.Symbol("X")
    if p is None:
        poly = sympy.Poly(list(reversed(coeffs)), X, domain="QQ")
    else:
        poly = sympy.Poly([int(c) for c in reversed(coeffs)], X, modulus=p)
    return poly.gcd(poly.diff(X)).degree() == 0


def hyp_test_modp(rows, p):
    """Hyperelliptic verdict for the reduction mod an odd prime.

    rows is an integral basis of the weight-2 space, entry j holding
    the q^(j+1) coefficient.  The verdict dict carries the gap
    sequence, the model when one exists, and the refusal reason when
    none does.
    """
    if p == 2:
        raise ValueError("the q-expansion test needs an odd prime")
    g = len(rows)
    if g < 3:
        raise ValueError("test applies to genus > 2 only")
    F = _PrimeField(p)
    rows = _saturate_modp(rows, p)
    ech, piv = _echelon(F, [[F.of(c) for c in row] for row in rows])
    if len(ech) < g:
        raise ArithmeticError(f"differential basis degenerates mod {p}")
    gaps = [c + 1 for c in piv]
    verdict = {"p": p, "genus": g, "gaps": gaps, "hyperelliptic": False,
               "model": None, "reason": None, "terms_checked": 0}
    if gaps == list(range(1, g + 1)):
        deg, winf = 2 * g + 2, False
    elif gaps == list(range(1, 2 * g, 2)):
        deg, winf = 2 * g + 1, True
    else:
        verdict["reason"] = "gap sequence at infinity fits no degree-2 map"
        return verdict
    f_top = _Laurent(F, 1, ech[g - 2])
    f_bot = _Laurent(F, 1, ech[g - 1])
    x = f_top.mul(f_bot.inv())
    y = x.qdq().mul(f_bot.inv())
    fit = _fit_even_square(x, y, deg)
    if fit is None:
        verdict["reason"] = "no polynomial relation y^2 = P(x)"
        return verdict
    poly, n_eq = fit
    verdict["terms_checked"] = n_eq
    if F.is_zero(poly[-1]):
        verdict["reason"] = f"relation drops below degree {deg}"
        return verdict
    if not _is_squarefree_poly(poly, p):
        verdict["reason"] = "P(x) is not square-free"
        return verdict
    verdict["hyperelliptic"] = True
    verdict["model"] = {"poly": [int(c) for c in poly], "degree": deg,
                        "weierstrass_at_infinity": winf}
    return verdict


def star_hyperelliptic_modp(N, p, source=None):
    """Verdict for the star curve at level N over F_p, p odd, p + N.

    Runs the q-expansion test and cross-checks it against the point
    bound |X(F_{p^n})| <= 2 p^n + 2 that any degree-2 cover of the
    line must satisfy; a disagreement raises.
    """
    N = int(N)
    if N % p == 0:
        raise ValueError(f"{p} divides {N}: bad reduction")
    sb = nfdata.star_basis(N, source=source)
    orbits = [orb for orb, _ in sb.blocks]
    verdict = hyp_test_modp(sb.series, p)
    verdict["level"] = N
    violations = []
    for n in (1, 2):
        cnt = frobenius.point_count(orbits, p, n)
        if cnt > 2 * p ** n + 2:
            violations.append({"n": n, "count": cnt,
                               "bound": 2 * p ** n + 2})
    verdict["point_bound_violations"] = violations
    if violations and verdict["hyperelliptic"]:
        raise ArithmeticError(
            f"N={N} mod {p}: point counts contradict the series model")
    return verdict


def genus2_model(rows):
    """Exact y^2 = P(x) model of a genus-2 quotient over the rationals.

    rows are the two pulled-back differentials as integer (or
    rational) q-expansions.  Raises ArithmeticError when the rows do
    not satisfy any hyperelliptic relation, which refutes the claimed
    quotient.
    """
    if len(rows) != 2:
        raise ValueError("expected exactly two differential rows")
    F = _Rationals()
    ech, piv = _echelon(F, [[F.of(c) for c in r] for r in rows])
    if len(ech) < 2:
        raise ArithmeticError("differential rows are linearly dependent")
    gaps = [c + 1 for c in piv]
    if gaps == [1, 2]:
        deg, winf = 6, False
    elif gaps == [1, 3]:
        deg, winf = 5, True
    else:
        raise ArithmeticError(f"gap sequence {gaps} is not genus-2")
    f_top = _Laurent(F, 1, ech[0])
    f_bot = _Laurent(F, 1, ech[1])
    x = f_top.mul(f_bot.inv())
    y = x.qdq().mul(f_bot.inv())
    fit = _fit_even_square(x, y, deg)
    if fit is None:
        raise ArithmeticError("series satisfy no hyperelliptic relation")
    poly, n_eq = fit
    if poly[-1] == 0 or not _is_squarefree_poly(poly):
        raise ArithmeticError("extracted model is degenerate")
    out = [int(c) if c.denominator == 1 else c for c in poly]
    return {"poly": out, "degree": deg, "weierstrass_at_infinity": winf,
            "terms_checked": n_eq}


def a_value(N, m, source=None):
    """A_{N,m} = |X(F_{2^m})| - 2(2^m + 1); positive refutes a
    degree-2 map to the line in characteristic 2."""
    orbits = nfdata.load_orbits(source, N)
    return frobenius.point_count(orbits, 2, m) - 2 * (2 ** m + 1)


def char2_screen(source=None, max_m=3):
    """Run the full characteristic-2 screen.

    Candidates failing no point bound are passed to the parity
    criterion at p=2; whatever survives both is returned.
    """
    cands = genus.char2_candidates()
    point_discards = {}
    for N in cands:
        for m in range(1, max_m + 1):
            a = a_value(N, m, source=source)
            if a > 0:
                point_discards[N] = {"m": m, "value": a}
                break
    parity_discards = []
    survivors = []
    for N in cands:
        if N in point_discards:
            continue
        if criteria.lemma1_parity(N, 2, source=source):
            parity_discards.append(N)
        else:
            survivors.append(N)
    return {"candidates": cands, "point_discards": point_discards,
            "parity_discards": parity_discards, "survivors": survivors}
