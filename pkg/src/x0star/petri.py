"""Quadrics through the canonical model and diagonal involution search.

The star basis gives integer q-expansions of a canonical-embedding
basis.  Homogeneous forms of degree i vanishing on the image span the
kernel of the monomial/coefficient matrix once the column cutoff
exceeds i*(2g-2): a section of the i-th power of the canonical bundle
vanishing to higher order at infinity than its divisor degree is zero,
so the computed kernel is certified complete.
"""

from fractions import Fraction
from itertools import combinations_with_replacement, product

import sympy

from .qlinalg import nullspace, rref

FIXED_POINT_CAP_ODD = 12


class PrecisionError(Exception):
    """Not enough q-expansion coefficients for a certified kernel."""


class SignResolutionError(Exception):
    """Both or neither orientation of a pattern survived the checks."""


def monomials(g, degree):
    """Degree-d monomials in g variables as sorted index tuples.

    Ordered by combinations_with_replacement, i.e. lexicographically on
    the index tuples; deterministic so bases are reproducible.
    """
    return list(combinations_with_replacement(range(g), degree))


def _mono_product(rows, mono, cutoff):
    """Coefficients of q^1..q^cutoff of the product of basis rows."""
    acc = None
    for i in mono:
        row = rows[i]
        if acc is None:
            acc = list(row[:cutoff])
            continue
        out = [0] * cutoff
        # exponents are 1-based: entry j holds the q^(j+1) coefficient
        for a, x in enumerate(acc):
            if x:
                top = cutoff - a - 2
                for b in range(min(len(row), top + 1)):
                    if row[b]:
                        out[a + b + 1] += x * row[b]
        acc = out
    return acc


class QuadricSpace:
    """Reduced-echelon basis of degree-d forms vanishing on the curve."""

    def __init__(self, g, degree, monos, basis):
        self.g = g
        self.degree = degree
        self.monos = monos
        self.basis = basis          # RREF rows of Fractions over monos

    @property
    def dim(self):
        return len(self.basis)

    def reduce(self, vec):
        """Residual of vec after reduction by the basis."""
        vec = list(vec)
        for row in self.basis:
            lead = next(j for j, x in enumerate(row) if x)
            if vec[lead]:
                c = vec[lead] / row[lead]
                vec = [v - c * r for v, r in zip(vec, row)]
        return vec

    def contains(self, vec):
        return not any(self.reduce(vec))

    def poly(self, idx, names="x"):
        """Sympy polynomial for basis vector idx, variables 1-based."""
        xs = sympy.symbols(f"{names}1:{self.g + 1}")
        expr = sympy.Integer(0)
        for mono, c in zip(self.monos, self.basis[idx]):
            if c:
                term = sympy.Rational(c.numerator, c.denominator)
                for i in mono:
                    term *= xs[i]
                expr += term
        return expr


def vanishing_forms(basis, degree=2):
    """All degree-d homogeneous forms vanishing on the canonical image.

    basis needs attributes series (integer coefficient rows), genus and
    prec.  Raises PrecisionError when the certificate cutoff
    degree*(2g-2)+1 exceeds the available coefficients.
    """
    g = basis.genus
    cutoff = degree * (2 * g - 2) + 1
    if basis.prec < cutoff:
        raise PrecisionError(f"need {cutoff} coefficients, have "
                             f"{basis.prec}")
    return _vanishing_with_cutoff(basis, degree, cutoff)


def nonsquare_subspace(space):
    """Subspace of forms with no square monomial, used by the parity
    trick: Q(eps x) lies in L2 iff Q - Q(eps x) lies here."""
    if space.degree != 2:
        raise ValueError("nonsquare subspace is defined for degree 2")
    sq_cols = [j for j, m in enumerate(space.monos) if m[0] == m[1]]
    if not space.basis:
        return QuadricSpace(space.g, 2, space.monos, [])
    mat = [[row[j] for row in space.basis] for j in sq_cols]
    combos = nullspace(mat)
    vecs = []
    for c in combos:
        vec = [sum(ci * row[j] for ci, row in zip(c, space.basis))
               for j in range(len(space.monos))]
        vecs.append(vec)
    red, _ = rref(vecs)
    return QuadricSpace(space.g, 2, space.monos, red)


def _mono_sign(mono, signs):
    s = 1
    for i in mono:
        s *= signs[i]
    return s


def apply_signs(space, vec, signs):
    """Coefficients of Q(eps_1 x_1, ..., eps_g x_g)."""
    return [c * _mono_sign(m, signs) for c, m in zip(vec, space.monos)]


def space_invariant(space, signs):
    """Whether the diagonal sign action maps the space into itself."""
    return all(space.contains(apply_signs(space, row, signs))
               for row in space.basis)


class SignPattern:
    """Block-constant diagonal involution candidate.

    signs has one entry per orbit block in basis order; the first block
    carries +1 (a pattern and its global negation act identically on
    homogeneous forms).  plus_dim/minus_dim are the eigenspace
    dimensions; which one is the quotient genus is settled later by
    resolve_orientation.
    """

    def __init__(self, signs, block_dims):
        self.signs = tuple(signs)
        self.block_dims = tuple(block_dims)
        self.plus_dim = sum(d for s, d in zip(signs, block_dims) if s > 0)
        self.minus_dim = sum(self.block_dims) - self.plus_dim

    def variable_signs(self):
        out = []
        for s, d in zip(self.signs, self.block_dims):
            out.extend([s] * d)
        return out

    def plus_blocks(self):
        return tuple(i for i, s in enumerate(self.signs) if s > 0)

    def minus_blocks(self):
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    def __repr__(self):
        body = ",".join("+" if s > 0 else "-" for s in self.signs)
        return f"<pattern {body} dims {self.block_dims}>"


def sign_pattern_search(spaces, block_dims, window, pattern_ok=None):
    """Block-constant sign patterns leaving every given space invariant.

    window is the set of admissible quotient genera; a pattern is kept
    when either eigenspace dimension is admissible (the orientation is
    resolved separately).  pattern_ok, when given, prunes candidates
    before the quadric test (restriction constraints from lower
    levels).
    """
    window = set(window)
    r = len(block_dims)
    found = []
    for tail in product((1, -1), repeat=r - 1):
        signs = (1,) + tail
        if all(s == 1 for s in signs):
            continue
        pat = SignPattern(signs, block_dims)
        if pat.plus_dim not in window and pat.minus_dim not in window:
            continue
        if pattern_ok is not None and not pattern_ok(pat):
            continue
        if all(space_invariant(S, pat.variable_signs()) for S in spaces):
            found.append(pat)
    return found


def quotient_probe(rows, ambient_genus, prec, quotient_genus):
    """Dimension test for a candidate pullback basis (no full search).

    rows are the candidate quotient differentials as series on the
    ambient curve, so kernel completeness uses the ambient genus for
    the cutoff.  A genuine quotient of genus >3 yields at least
    (g_u-2)(g_u-3)/2 independent quadrics; genus 3 yields a quartic.
    Returns (computed_dim, expected_dim, degree).
    """
    if quotient_genus != len(rows):
        raise ValueError("row count must equal the candidate genus")
    if quotient_genus > 3:
        degree = 2
        expected = (quotient_genus - 2) * (quotient_genus - 3) // 2
    elif quotient_genus == 3:
        degree, expected = 4, 1
    else:
        raise ValueError("probe needs quotient genus >= 3")
    cutoff = degree * (2 * ambient_genus - 2) + 1
    if prec < cutoff:
        raise PrecisionError(f"need {cutoff} coefficients, have {prec}")

    class _View:
        pass

    view = _View()
    view.series = rows
    view.prec = min(prec, cutoff + 4)
    # the probe rows live on the ambient curve, but the kernel matrix
    # is indexed by monomials in the candidate variables only
    view.genus = quotient_genus
    space = _vanishing_with_cutoff(view, degree, cutoff)
    return space.dim, expected, degree


def _vanishing_with_cutoff(view, degree, cutoff):
    monos = monomials(view.genus, degree)
    extra = min(view.prec, cutoff + 4)
    rows = [_mono_product(view.series, m, extra) for m in monos]
    mat = [[Fraction(rows[i][c]) for i in range(len(monos))]
           for c in range(cutoff)]
    kernel = nullspace(mat)
    red, _ = rref(kernel)
    for vec in red:
        for c in range(cutoff, extra):
            if sum(v * rows[i][c] for i, v in enumerate(vec) if v):
                raise ArithmeticError("kernel vector fails beyond the "
                                      "certified cutoff")
    return QuadricSpace(view.genus, degree, monos, red)


def subspace_point_count(space, variables):
    """Distinct geometric points of the quadric system on a coordinate
    subspace; None when the subspace has more than three variables.

    Supported up to projective dimension 2.  Intersections there are
    counted via Groebner bases; a non-reduced intersection would
    overcount, which the caller detects by mismatch with the Hurwitz
    number and treats as inconclusive.
    """
    variables = sorted(variables)
    k = len(variables)
    if k == 0:
        return 0
    if k > 3:
        return None
    pos = {v: i for i, v in enumerate(variables)}
    xs = sympy.symbols(f"t0:{k}")
    forms = []
    for row in space.basis:
        expr = sympy.Integer(0)
        for mono, c in zip(space.monos, row):
            if c and all(i in pos for i in mono):
                term = sympy.Rational(c.numerator, c.denominator)
                for i in mono:
                    term *= xs[pos[i]]
                expr += term
        expr = sympy.expand(expr)
        if expr != 0:
            forms.append(expr)
    if not forms:
        # no constraint: entire subspace would lie on the curve
        return 1 if k == 1 else None
    if k == 1:
        return 0
    if k == 2:
        gcd = forms[0]
        for f in forms[1:]:
            gcd = sympy.gcd(gcd, f)
        if gcd.is_constant():
            return 0
        part = sympy.sqf_part(gcd.as_poly(*xs))
        return part.total_degree()
    # k == 3: two affine charts cover all candidate points
    total = 0
    for chart in range(k):
        subs = {xs[chart]: 1}
        for j in range(chart):
            subs[xs[j]] = 0
        affine = [sympy.expand(f.subs(subs)) for f in forms]
        affine = [f for f in affine if f != 0]
        rest = [xs[j] for j in range(chart + 1, k)]
        if any(f.is_constant() and f != 0 for f in affine):
            continue
        if not rest:
            total += 0 if affine else 1
            continue
        if not affine:
            return None
        gb = sympy.groebner(affine, *rest, order="lex")
        if any(p.is_ground for p in gb.polys):
            continue               # unit ideal: no points in this chart
        if gb.is_zero_dimensional:
            total += _quotient_dim(gb, rest)
        else:
            return None
    return total


def _quotient_dim(gb, gens):
    """Vector-space dimension of the quotient by a zero-dim lex ideal."""
    lead_exp = [p.monoms(order="lex")[0] for p in gb.polys]
    bounds = []
    for i in range(len(gens)):
        pure = [e[i] for e in lead_exp
                if all(e[j] == 0 for j in range(len(gens)) if j != i)]
        bounds.append(min(pure))
    count = 0
    for expo in product(*[range(b) for b in bounds]):
        if not any(all(expo[i] >= e[i] for i in range(len(gens)))
                   for e in lead_exp):
            count += 1
    return count


def resolve_orientation(pattern, space, genus, odd_level,
                        dominance_check=None):
    """Decide which eigenspace of an accepted pattern is the quotient.

    Counts the fixed points of the diagonal action (the curve meets the
    two coordinate subspaces) and matches the total against the Hurwitz
    number 2g + 2 - 4 g_u for g_u in {plus_dim, minus_dim}; for odd
    levels the count must also respect the 12-fixed-point cap.  An
    optional dominance_check(candidate_blocks) may veto an orientation
    first.  Exactly one orientation must survive.
    """
    signs = pattern.variable_signs()
    plus_vars = [i for i, s in enumerate(signs) if s > 0]
    minus_vars = [i for i, s in enumerate(signs) if s < 0]
    options = []
    for g_u, blocks in ((pattern.plus_dim, pattern.plus_blocks()),
                        (pattern.minus_dim, pattern.minus_blocks())):
        fix = 2 * genus + 2 - 4 * g_u
        if fix < 0:
            continue
        if odd_level and fix > FIXED_POINT_CAP_ODD:
            continue
        if dominance_check is not None and dominance_check(blocks):
            continue
        options.append((g_u, blocks, fix))
    if len(options) > 1 and genus >= 5:
        # the quadrics cut out the canonical curve only for genus >= 5
        # (nontrigonal), so zero-locus counts are exact only there
        counts = [subspace_point_count(space, plus_vars),
                  subspace_point_count(space, minus_vars)]
        if None not in counts:
            total = counts[0] + counts[1]
            options = [o for o in options if o[2] == total]
    if len(options) != 1:
        raise SignResolutionError(f"{len(options)} orientations remain "
                                  f"for {pattern}")
    g_u, blocks, fix = options[0]
    return {"quotient_genus": g_u, "quotient_blocks": blocks,
            "fixed_points": fix}
