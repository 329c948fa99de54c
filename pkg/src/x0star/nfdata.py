"""Newform Galois-orbit eigendata and the block basis of the star space.

Orbits are read from line-oriented JSON fixture files, one file per
level, one orbit per line:

    {"level": M, "dim": n, "al": {"43": 1, ...},
     "ap": {"2": [c0, ..., cn], ...}, "qexp": [[...], ...], "prec": P}

The ap values are monic integer characteristic polynomials of the
Hecke eigenvalue on the orbit, ascending coefficients.  The qexp rows
are an integral basis of the orbit's rational cusp-form span, column
j holding the coefficient of q^(j+1).
"""

import json
import os
from math import isqrt
from pathlib import Path

from .arith import SquarefreeLevel, divisors, prime_factors
from .genus import genus_x0_star
from .qlinalg import echelon_int_rows, rank

ORBIT_DIR_ENV = "X0STAR_ORBIT_DIR"

_RANK_CHECK_PRIMES = (1000003, 999983)


def default_orbit_dir():
    env = os.environ.get(ORBIT_DIR_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "data" / "orbits"


class FixtureError(Exception):
    """Missing or malformed fixture data."""


class OrbitInvariantError(Exception):
    """Fixture parsed but violates an orbit invariant."""


class NewformOrbit:
    """One Galois orbit of newforms with all Atkin-Lehner signs +1."""

    def __init__(self, level, dim, al_signs, ap_charpoly, q_basis, prec,
                 ordinal=0):
        self.level = SquarefreeLevel.of(level)
        self.dim = dim
        self.al_signs = al_signs
        self.ap_charpoly = ap_charpoly   # prime -> ascending coefficients
        self.q_basis = q_basis           # dim rows, prec columns
        self.prec = prec
        self.ordinal = ordinal

    @property
    def key(self):
        return (int(self.level), self.ordinal)

    def __repr__(self):
        return f"NewformOrbit(level={int(self.level)}, dim={self.dim})"

    def trace_ap(self, p):
        """Sum of a_p over the orbit's conjugate newforms."""
        poly = self.ap_charpoly[p]
        return -poly[self.dim - 1]


def _weil_violation(poly, p):
    """Largest |root| - 2*sqrt(p) over the roots of poly, numerically."""
    import numpy as np

    roots = np.roots(list(reversed(poly)))
    return float(max(abs(r) for r in roots)) - 2 * p ** 0.5


def _validate(rec, path, lineno):
    where = f"{path}:{lineno}"
    for field in ("level", "dim", "al", "ap", "qexp", "prec"):
        if field not in rec:
            raise FixtureError(f"{where}: missing field {field!r}")
    level, dim, prec = rec["level"], rec["dim"], rec["prec"]
    al = {int(q): s for q, s in rec["al"].items()}
    if sorted(al) != list(prime_factors(level)):
        raise OrbitInvariantError(f"{where}: al keys are not the primes "
                                  f"of {level}")
    if any(s != 1 for s in al.values()):
        raise OrbitInvariantError(f"{where}: non-+1 Atkin-Lehner sign")
    ap = {int(p): coeffs for p, coeffs in rec["ap"].items()}
    for p, coeffs in ap.items():
        if len(coeffs) != dim + 1 or coeffs[-1] != 1:
            raise OrbitInvariantError(f"{where}: a_{p} charpoly is not "
                                      f"monic of degree {dim}")
        if level % p and _weil_violation(coeffs, p) > 1e-6:
            raise OrbitInvariantError(f"{where}: a_{p} roots violate the "
                                      f"Weil bound")
    rows = rec["qexp"]
    if len(rows) != dim or any(len(r) != prec for r in rows):
        raise OrbitInvariantError(f"{where}: qexp is not {dim} x {prec}")
    basis = echelon_int_rows(rows)
    if len(basis) != dim:
        raise OrbitInvariantError(f"{where}: qexp rows are dependent")
    for q in _RANK_CHECK_PRIMES:
        mod_rows = [[x % q for x in r] for r in basis]
        if rank(mod_rows) == dim:
            break
    else:
        raise OrbitInvariantError(f"{where}: basis drops rank mod "
                                  f"{_RANK_CHECK_PRIMES}")
    return NewformOrbit(level, dim, al, ap, basis, prec)


def _read_level_file(source, M):
    path = Path(source) / f"N={M}.jsonl"
    if not path.exists():
        raise FixtureError(f"no fixture file for level {M}: {path}")
    orbits = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec["level"] != M:
                raise FixtureError(f"{path}:{lineno}: record level "
                                   f"{rec['level']} in file for {M}")
            orb = _validate(rec, path, lineno)
            orb.ordinal = len(orbits)
            orbits.append(orb)
    return orbits


def load_orbits(source, N):
    """All orbits of New*_M for every M | N, M > 1.

    Ordered by ascending level, then file order within a level.  For a
    dim-1 orbit the q-expansion coefficient at a prime is cross-checked
    against the stored characteristic polynomial.
    """
    if source is None:
        source = default_orbit_dir()
    N = SquarefreeLevel.of(N)
    out = []
    for M in divisors(int(N)):
        if M == 1:
            continue
        out.extend(_read_level_file(source, M))
    for orb in out:
        if orb.dim == 1:
            for p, coeffs in orb.ap_charpoly.items():
                if p <= orb.prec and orb.q_basis[0][p - 1] != -coeffs[0]:
                    raise OrbitInvariantError(
                        f"orbit {orb.key}: a_{p} disagrees between qexp "
                        f"and charpoly")
    total = sum(orb.dim for orb in out)
    g = genus_x0_star(int(N))
    if total != g:
        raise OrbitInvariantError(f"level {int(N)}: orbit dims sum to "
                                  f"{total}, genus is {g}")
    return out


def splitting_signature(N, source=None):
    """Multiset of (level, dim) pairs of the Jacobian decomposition."""
    return [(int(o.level), o.dim) for o in load_orbits(source, N)]


def lift_to_star(orbit, N, prec):
    """Block of q-expansions of sum_{d | N/M} d*f(q^d), rows as in the
    orbit basis, truncated to prec coefficients."""
    M = int(orbit.level)
    if N % M:
        raise ValueError(f"{M} does not divide {N}")
    if orbit.prec < prec:
        raise FixtureError(f"orbit {orbit.key}: precision {orbit.prec} "
                           f"< requested {prec}")
    block = []
    for row in orbit.q_basis:
        lifted = [0] * prec
        for d in divisors(N // M):
            for j in range(1, prec // d + 1):
                lifted[d * j - 1] += d * row[j - 1]
        block.append(lifted)
    return block


class StarBasis:
    """Ordered block basis of the star differentials at level N."""

    def __init__(self, level, blocks, series, prec):
        self.level = SquarefreeLevel.of(level)
        self.blocks = blocks     # list of (orbit, row range) pairs
        self.series = series     # genus x prec integer matrix
        self.prec = prec

    @property
    def genus(self):
        return len(self.series)

    def block_dims(self):
        return [orb.dim for orb, _ in self.blocks]

    def block_levels(self):
        return [int(orb.level) for orb, _ in self.blocks]


def star_basis(N, source=None, prec=None):
    """Basis of the star cusp forms at N as lifted orbit blocks.

    By default uses every coefficient the fixtures provide; consumers
    (quadric kernels, model fitting) enforce their own cutoffs.
    """
    N = int(SquarefreeLevel.of(N))
    orbits = load_orbits(source, N)
    if prec is None:
        prec = min(orb.prec for orb in orbits)
    blocks = []
    series = []
    for orb in orbits:
        start = len(series)
        series.extend(lift_to_star(orb, N, prec))
        blocks.append((orb, range(start, start + orb.dim)))
    return StarBasis(N, blocks, series, prec)
