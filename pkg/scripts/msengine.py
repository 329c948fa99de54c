"""Modular symbol engine: newform Galois orbits on the Atkin-Lehner +1 part.

For square-free N this computes, over several word-size primes, the weight-2
Manin symbol space of Gamma0(N), the projector onto the subspace where every
Atkin-Lehner involution acts as +1, and the Hecke action on that subspace.
Galois orbits of newforms (dimension, a_p characteristic polynomials, integer
q-expansion trace basis) are recovered exactly by CRT with stabilization
checks, and every level is self-certified against independently computed
dimension data:

  dim M2          == 2 g0(N) + #cusps - 1
  dim (+1 part)   == 2 g*(N)
  sum of new dims == Moebius transform of g* over divisors

The output is one JSON line per orbit, in the fixture format consumed by the
x0star package.
"""

import json
import sys
from fractions import Fraction
from math import gcd, isqrt

import numpy as np
import sympy

sys.path.insert(0, "src")

from x0star.arith import divisors, prime_factors  # noqa: E402
from x0star.genus import genus_x0, genus_x0_star  # noqa: E402

# 21-bit primes: p^2 * dim < 2^53 keeps float64 BLAS matmuls exact
PRIMES = (2097143, 2097133, 2097131, 2097097, 2097091, 2097083, 2097047,
          2097041, 2097031, 2097023, 2096993)


def new_star_dim(N: int) -> int:
    """dim New*_N by Moebius inversion of g* = sum of new dims over divisors."""
    total = genus_x0_star(N) if N > 1 else 0
    for d in divisors(N):
        if 1 < d < N:
            total -= new_star_dim(d)
    return total


# ---------------------------------------------------------------------------
# P^1(Z/N) for square-free N
# ---------------------------------------------------------------------------

def _crt(a, m, b, n):
    # x = a mod m, x = b mod n, gcd(m, n) = 1
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)


def p1_normalize(N, c, d):
    c %= N
    d %= N
    g = gcd(c, N)
    if g == N:
        return (0, 1)
    Ng = N // g
    if g == 1:
        u = pow(c, -1, N)
        return (1, d * u % N)
    # unit u with u*c = g mod N; N square-free makes g, N/g coprime
    u = _crt(pow(c // g % Ng, -1, Ng), Ng, 1, g)
    d2 = d * u % N
    best = d2
    for k in range(1, g):
        t = (1 + k * Ng) % N
        if gcd(t, N) == 1:
            v = d2 * t % N
            if v < best:
                best = v
    return (g, best)


def build_p1(N):
    """Return (symbols, index) with symbols a list of canonical (c, d)."""
    seen = set()
    for g in divisors(N):
        if g == N:
            seen.add((0, 1))
        elif g == 1:
            for d in range(N):
                seen.add((1, d))
        else:
            for d in range(N):
                if gcd(gcd(g, d), N) == 1:
                    seen.add(p1_normalize(N, g, d))
    syms = sorted(seen)
    index = {s: i for i, s in enumerate(syms)}
    return syms, index


def p1_index(N, index, c, d):
    return index[p1_normalize(N, c, d)]


# ---------------------------------------------------------------------------
# Manin symbol space mod p0: sigma/tau relations
# ---------------------------------------------------------------------------

def manin_reduction(N, p0, syms, index):
    """Solve the 2- and 3-term relations.

    Returns (red, dim): red is a len(syms) x dim int64 matrix over GF(p0)
    giving the coordinates of every Manin symbol on the chosen free basis.
    """
    n = len(syms)

    def act_sigma(i):
        c, d = syms[i]
        return p1_index(N, index, d, -c)

    def act_tau(i):
        c, d = syms[i]
        return p1_index(N, index, d, -c - d)

    # sigma pairing: x + x.sigma = 0
    cls = [-1] * n          # symbol -> sigma-class id, -1 = killed
    sgn = [0] * n
    classes = []
    for i in range(n):
        if sgn[i]:
            continue
        j = act_sigma(i)
        if j == i:
            sgn[i] = 9      # marker: killed (2x = 0)
            cls[i] = -1
            continue
        cid = len(classes)
        classes.append(i)
        cls[i] = cid
        sgn[i] = 1
        cls[j] = cid
        sgn[j] = -1
    killed = {i for i in range(n) if sgn[i] == 9}
    ncls = len(classes)

    # tau relations: x + x.tau + x.tau^2 = 0, one row per tau-orbit
    rows = []
    visited = [False] * n
    for i in range(n):
        if visited[i]:
            continue
        j = act_tau(i)
        k = act_tau(j)
        visited[i] = visited[j] = visited[k] = True
        row = {}
        for t in (i, j, k):
            if t in killed:
                continue
            row[cls[t]] = (row.get(cls[t], 0) + sgn[t]) % p0
        row = {c: v for c, v in row.items() if v}
        if row:
            rows.append(row)

    # sparse elimination; every column sits in at most two rows, which stays
    # true as rows merge, so fill-in is bounded
    col_rows = {}
    rows = {rid: r for rid, r in enumerate(rows)}
    for rid, r in rows.items():
        for c in r:
            col_rows.setdefault(c, set()).add(rid)
    next_rid = len(rows)
    order = []          # (col, expr) in elimination order
    exprs = {}

    def pick_col():
        best, bestdeg = None, 3
        for c, rs in col_rows.items():
            deg = len(rs)
            if deg == 1:
                return c
            if deg and deg < bestdeg:
                best, bestdeg = c, deg
        return best

    while col_rows:
        c = pick_col()
        if c is None:
            break
        rids = sorted(col_rows.pop(c))
        r1 = rows.pop(rids[0])
        a1 = r1.pop(c)
        inv = pow(a1, p0 - 2, p0)
        expr = {d: (-v * inv) % p0 for d, v in r1.items()}
        exprs[c] = expr
        order.append(c)
        for d in r1:
            col_rows[d].discard(rids[0])
        if len(rids) == 2:
            r2 = rows.pop(rids[1])
            a2 = r2.pop(c)
            for d in r2:
                col_rows[d].discard(rids[1])
            # substitute c = expr into r2
            merged = dict(r2)
            for d, v in expr.items():
                merged[d] = (merged.get(d, 0) + a2 * v) % p0
            merged = {d: v for d, v in merged.items() if v}
            if merged:
                rid = next_rid
                next_rid += 1
                rows[rid] = merged
                for d in merged:
                    col_rows.setdefault(d, set()).add(rid)
        for d in list(col_rows):
            if not col_rows[d]:
                del col_rows[d]

    free = sorted(set(range(ncls)) - set(exprs))
    dim = len(free)
    slot = {c: i for i, c in enumerate(free)}
    dense = np.zeros((ncls, dim), dtype=np.int64)
    for c in free:
        dense[c, slot[c]] = 1
    for c in reversed(order):
        acc = np.zeros(dim, dtype=np.int64)
        for d, v in exprs[c].items():
            acc = (acc + v * dense[d]) % p0
        dense[c] = acc

    red = np.zeros((n, dim), dtype=np.int64)
    for i in range(n):
        if i not in killed:
            red[i] = (sgn[i] * dense[cls[i]]) % p0
    return red, dim


# ---------------------------------------------------------------------------
# paths -> Manin symbols (continued fractions), Atkin-Lehner operators
# ---------------------------------------------------------------------------

def _path0(N, index, p, q, out, s):
    """Append Manin symbols of {0, p/q} (q = 0 means infinity) with sign s."""
    out.append((p1_index(N, index, 0, 1), s))
    if q == 0:
        return
    qk_prev, qk = 1, 0       # q_{-2}, q_{-1}
    sign = 1                 # (-1)^(k-1) at k = 0 is -1 -> track as we go
    k = 0
    a, b = p, q
    while b:
        ak = a // b
        a, b = b, a - ak * b
        qk_prev, qk = qk, ak * qk + qk_prev
        sg = -1 if k % 2 == 0 else 1     # (-1)^(k-1)
        out.append((p1_index(N, index, sg * qk, qk_prev), s))
        k += 1


def path_symbols(N, index, a1, b1, a2, b2):
    """Manin symbol expansion of the modular path {a1/b1, a2/b2}."""
    out = []
    _path0(N, index, a2, b2, out, 1)
    _path0(N, index, a1, b1, out, -1)
    return out


def _moebius(m, a, b):
    # image of a/b (b = 0: infinity) under integer matrix m, reduced
    p = m[0][0] * a + m[0][1] * b
    q = m[1][0] * a + m[1][1] * b
    if q == 0:
        return (1, 0)
    g = gcd(p, q)
    if g:
        p //= g
        q //= g
    if q < 0:
        p, q = -p, -q
    return (p, q)


def sl2_lift(N, c, d):
    """Integer matrix [[a, b], [c', d']] of det 1 with (c', d') = (c, d) mod N."""
    if c == 0 and d == 1:
        return ((1, 0), (0, 1))
    c0 = c
    for k in range(200):
        d0 = d + k * N
        if gcd(c0, d0) == 1:
            break
    else:
        raise ArithmeticError("no coprime lift")
    # a*d0 - b*c0 = 1
    g, x, y = _xgcd(d0, c0)
    assert g == 1
    return ((x, -y), (c0, d0))


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def al_matrix(N, Q):
    """Integer matrix of determinant Q for the involution w_Q, Q || N."""
    g, x, y = _xgcd(Q, N // Q)
    assert g == 1
    # x*Q - (-y)*(N/Q) = 1 ; W = [[Q*x, y], [-N*?, ...]] pick signs to match
    # det(W) = Q^2*x*w - y*N*z = Q  with  Q*x*w - y*(N/Q)*z = 1
    return ((Q * x, -y), (N, Q))


class LevelSpace:
    """Everything needed at one level over one prime p0."""

    def __init__(self, N, p0):
        self.N = N
        self.p0 = p0
        self.syms, self.index = build_p1(N)
        self.red, self.dim = manin_reduction(N, p0, self.syms, self.index)
        c = 2 ** len(prime_factors(N))
        want = 2 * genus_x0(N) + c - 1
        if self.dim != want:
            raise ArithmeticError(
                f"dim M2({N}) = {self.dim} mod {p0}, expected {want}")
        self._basis_syms = None
        self._wq = {}
        self._tp = {}

    # -- basis symbols: pick one P1 symbol carrying each free coordinate
    def basis_symbols(self):
        if self._basis_syms is None:
            found = {}
            for i, row in enumerate(self.red):
                nz = np.nonzero(row)[0]
                if len(nz) == 1 and row[nz[0]] == 1 and nz[0] not in found:
                    found[nz[0]] = i
            if len(found) != self.dim:
                # fall back: solve for a spanning set
                raise ArithmeticError(f"no unit basis rows at {self.N}")
            self._basis_syms = [found[j] for j in range(self.dim)]
        return self._basis_syms

    def _columns_from_paths(self, path_of_symbol):
        cols = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j, i in enumerate(self.basis_symbols()):
            acc = np.zeros(self.dim, dtype=np.int64)
            for idx, s in path_of_symbol(i):
                acc = (acc + s * self.red[idx]) % self.p0
            cols[:, j] = acc
        return cols % self.p0

    def w_matrix(self, Q):
        if Q in self._wq:
            return self._wq[Q]
        W = al_matrix(self.N, Q)

        def images(i):
            c, d = self.syms[i]
            (a, b), (cc, dd) = sl2_lift(self.N, c, d)
            a1, b1 = _moebius(W, b, dd)
            a2, b2 = _moebius(W, a, cc)
            return path_symbols(self.N, self.index, a1, b1, a2, b2)

        M = self._columns_from_paths(images)
        M2 = _matmul_mod(M, M, self.p0)
        if not _is_identity(M2, self.p0):
            raise ArithmeticError(f"W_{Q}^2 != 1 at level {self.N}")
        self._wq[Q] = M
        return M

    def t_matrix(self, p):
        """Hecke T_p for p not dividing N, via Heilbronn-Merel matrices."""
        if p in self._tp:
            return self._tp[p]
        if self.N % p == 0:
            raise ValueError("T_p needs p coprime to the level")
        H = heilbronn(p)
        basis = self.basis_symbols()
        gather = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j, i in enumerate(basis):
            c, d = self.syms[i]
            acc = np.zeros(self.dim, dtype=np.int64)
            for (a, b, cc, dd) in H:
                c2 = c * a + d * cc
                d2 = c * b + d * dd
                acc = acc + self.red[p1_index(self.N, self.index, c2, d2)]
            gather[:, j] = acc % self.p0
        self._tp[p] = gather
        return gather

    def star_basis(self):
        """Columns spanning the +1 eigenspace of all Atkin-Lehner involutions."""
        P = np.eye(self.dim, dtype=np.int64)
        inv2 = pow(2, self.p0 - 2, self.p0)
        for q in prime_factors(self.N):
            W = self.w_matrix(q)
            P = _matmul_mod((W + np.eye(self.dim, dtype=np.int64)) % self.p0,
                            P, self.p0)
            P = (P * inv2) % self.p0
        cols = _column_space(P, self.p0)
        want = 2 * genus_x0_star(self.N)
        if cols.shape[1] != want:
            raise ArithmeticError(
                f"dim V*({self.N}) = {cols.shape[1]} mod {self.p0}, "
                f"expected {want}")
        return cols

    def restrict(self, M, B):
        """X with M @ B = B @ X (columns of B independent)."""
        MB = _matmul_mod(M, B, self.p0)
        X, ok = _solve_mod(B, MB, self.p0)
        if not ok:
            raise ArithmeticError(f"restriction failed at level {self.N}")
        return X


def heilbronn(p):
    """Matrices of determinant p with a > b >= 0, d > c >= 0 (Merel's family)."""
    out = [(1, 0, c, p) for c in range(p)] + [(p, 0, 0, 1)]
    for b in range(1, p + 1):
        for a in range(b + 1, p + b + 1):
            for c in range(0, p // (a - b) + 1):
                num = p + b * c
                if num % a:
                    continue
                d = num // a
                if d > c:
                    out.append((a, b, c, d))
    return out


# ---------------------------------------------------------------------------
# GF(p) linear algebra on int64 numpy arrays (float64 BLAS products)
# ---------------------------------------------------------------------------

def _matmul_mod(A, B, p0):
    C = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    return C % p0


def _is_identity(M, p0):
    return np.array_equal(M % p0, np.eye(M.shape[0], dtype=np.int64))


def _rref_mod(A, p0):
    """Row-reduce in place (copy), return (R, pivot columns)."""
    R = A.copy() % p0
    rows, cols = R.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = (R[r] * pow(int(R[r, c]), p0 - 2, p0)) % p0
        other = np.nonzero(R[:, c])[0]
        other = other[other != r]
        if len(other):
            R[other] = (R[other] - np.outer(R[other, c], R[r])) % p0
        piv.append(c)
        r += 1
    return R, piv


def _column_space(A, p0):
    # row space of A^T = column space of A
    R, piv = _rref_mod(A.T % p0, p0)
    return (R[:len(piv)].T % p0).copy()


def _solve_mod(B, Y, p0):
    """Solve B X = Y for X where B has full column rank; (X, ok)."""
    n, k = B.shape
    aug = np.concatenate([B, Y], axis=1) % p0
    R, piv = _rref_mod(aug, p0)
    if piv[:k] != list(range(k)) or len(piv) != k:
        return None, False
    return R[:k, k:] % p0, True


def _nullspace_mod(A, p0):
    R, piv = _rref_mod(A % p0, p0)
    n = A.shape[1]
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for j, c in enumerate(free):
        basis[c, j] = 1
        for r, pc in enumerate(piv):
            basis[pc, j] = (-R[r, c]) % p0
    return basis % p0


def charpoly_mod(M, p0):
    """Characteristic polynomial mod p0, ascending coefficients, monic."""
    A = M.copy() % p0
    n = A.shape[0]
    # Hessenberg reduction
    for j in range(n - 2):
        nz = None
        for i in range(j + 1, n):
            if A[i, j]:
                nz = i
                break
        if nz is None:
            continue
        if nz != j + 1:
            A[[j + 1, nz]] = A[[nz, j + 1]]
            A[:, [j + 1, nz]] = A[:, [nz, j + 1]]
        inv = pow(int(A[j + 1, j]), p0 - 2, p0)
        for i in range(j + 2, n):
            if A[i, j]:
                f = int(A[i, j]) * inv % p0
                A[i] = (A[i] - f * A[j + 1]) % p0
                A[:, j + 1] = (A[:, j + 1] + f * A[:, i]) % p0
    # charpoly recurrence on Hessenberg form
    polys = [np.array([1], dtype=object)]     # p_0 = 1
    for m in range(1, n + 1):
        # p_m(x) = (x - A[m-1,m-1]) p_{m-1}(x)
        #          - sum_{i=1..m-1} A[m-1-i, m-1] (prod subdiag) p_{m-1-i}(x)
        prev = polys[m - 1]
        pm = np.zeros(m + 1, dtype=object)
        pm[1:] += prev
        pm[:-1] = (pm[:-1] + (-int(A[m - 1, m - 1])) * prev) % p0
        pm[-1] %= p0
        beta = 1
        for i in range(1, m):
            beta = beta * int(A[m - i, m - i - 1]) % p0
            coef = int(A[m - 1 - i, m - 1]) * beta % p0
            if coef:
                picked = polys[m - 1 - i]
                pm[:len(picked)] = (pm[:len(picked)] - coef * picked) % p0
        polys.append(pm % p0)
    return [int(c) for c in polys[n]]


# ---------------------------------------------------------------------------
# CRT with stabilization
# ---------------------------------------------------------------------------

def crt_ints(residues, primes):
    """Symmetric-range CRT lift of residues mod primes."""
    x, m = 0, 1
    for r, p in zip(residues, primes):
        t = (r - x) * pow(m % p, -1, p) % p
        x += m * t
        m *= p
    if x > m // 2:
        x -= m
    return x


def stabilized(seq_by_prime, primes):
    """CRT using increasing prefixes; value accepted when two prefixes agree."""
    prev = None
    for k in range(1, len(primes) + 1):
        cur = crt_ints(seq_by_prime[:k], primes[:k])
        if prev is not None and cur == prev:
            return cur, True
        prev = cur
    return prev, False


class UnluckyPrime(Exception):
    pass


def stabilized_vec(fn, primes=PRIMES):
    """Exact integer vector from per-prime residues, by prefix agreement.

    fn(p0) -> list of residues mod p0; may raise UnluckyPrime to drop p0.
    Accepted once two successive prime-prefixes give the same lift.
    """
    vals, used, prev = [], [], None
    for p0 in primes:
        try:
            vals.append(fn(p0))
        except UnluckyPrime:
            continue
        used.append(p0)
        cur = [crt_ints([v[i] for v in vals], used) for i in range(len(vals[0]))]
        if prev is not None and cur == prev:
            return cur
        prev = cur
    raise ArithmeticError("CRT did not stabilize")


_x = sympy.symbols("x")


def _poly(coeffs):
    return sympy.Poly(list(reversed(coeffs)), _x)


def _ascending(P):
    return [int(c) for c in reversed(P.all_coeffs())]


def factor_pairs(coeffs):
    """[(ascending coeffs of irreducible factor, multiplicity)] over Q."""
    const, pairs = _poly(coeffs).factor_list()
    if const != 1:
        raise ArithmeticError("charpoly not monic over Z")
    return [(tuple(_ascending(f)), int(e)) for f, e in pairs]


def poly_sqrt(coeffs):
    """g with g^2 equal to the given polynomial (exact, monic)."""
    g = sympy.Poly(1, _x)
    for f, e in factor_pairs(coeffs):
        if e % 2:
            raise ArithmeticError("polynomial is not a square")
        g = g * _poly(list(f)) ** (e // 2)
    return _ascending(g)


def poly_eval_matrix(coeffs, T, p0):
    n = T.shape[0]
    R = np.zeros_like(T)
    eye = np.eye(n, dtype=np.int64)
    for c in reversed(coeffs):
        R = (_matmul_mod(R, T, p0) + (c % p0) * eye) % p0
    return R


# ---------------------------------------------------------------------------
# level space cache, star-restricted operators
# ---------------------------------------------------------------------------

_SPACES = {}
_BYTE_BUDGET = 400 * 1024 * 1024


def _space_bytes(sp):
    total = sp.red.nbytes
    for name in ("_B", "_tstar", "_tm"):
        obj = getattr(sp, name, None)
        if isinstance(obj, np.ndarray):
            total += obj.nbytes
        elif isinstance(obj, dict):
            total += sum(m.nbytes for m in obj.values())
    return total


def get_space(N, p0):
    """LRU cache of level spaces, bounded by approximate memory use."""
    key = (N, p0)
    if key in _SPACES:
        _SPACES[key] = _SPACES.pop(key)    # move to end
        return _SPACES[key]
    sp = LevelSpace(N, p0)
    _SPACES[key] = sp
    while len(_SPACES) > 1:
        if sum(_space_bytes(s) for s in _SPACES.values()) <= _BYTE_BUDGET:
            break
        _SPACES.pop(next(iter(_SPACES)))
    return _SPACES[key]


def _init_star(sp):
    if not hasattr(sp, "_B"):
        sp._B = sp.star_basis()
        sp._tstar = {}
        sp._tm = {}
    return sp._B


def t_star(sp, p):
    B = _init_star(sp)
    if p not in sp._tstar:
        sp._tstar[p] = sp.restrict(sp.t_matrix(p), B)
    return sp._tstar[p]


def op_star(sp, spec):
    """spec: tuple of (p, coefficient) pairs for sum coef * T_p."""
    M = None
    for p, c in spec:
        term = (c * t_star(sp, p)) % sp.p0
        M = term if M is None else (M + term) % sp.p0
    return M


def tm_star(sp, m):
    """T_m restricted to the star subspace, m coprime to the level."""
    _init_star(sp)
    if m in sp._tm:
        return sp._tm[m]
    if m == 1:
        r = np.eye(sp._B.shape[1], dtype=np.int64)
    else:
        p = prime_factors(m)[0]
        if m % (p * p) == 0:
            # split off the full p-power part
            e = 0
            mm = m
            while mm % p == 0:
                mm //= p
                e += 1
            if mm > 1:
                r = _matmul_mod(tm_star(sp, p ** e), tm_star(sp, mm), sp.p0)
            else:
                # T_{p^e} = T_p T_{p^{e-1}} - p T_{p^{e-2}}
                r = (_matmul_mod(t_star(sp, p), tm_star(sp, p ** (e - 1)), sp.p0)
                     - p * tm_star(sp, p ** (e - 2))) % sp.p0
        else:
            mm = m // p
            if mm == 1:
                r = t_star(sp, p)
            else:
                r = _matmul_mod(t_star(sp, p), tm_star(sp, mm), sp.p0)
    sp._tm[m] = r
    return r


def sep_candidates(N):
    ps = [p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37) if N % p]
    for p in ps[:8]:
        yield ((p, 1),)
    for i in range(1, 6):
        for c in (1, 2, 3):
            yield ((ps[0], 1), (ps[i], c))


def _charpoly_of_op(N, spec):
    def fn(p0):
        sp = get_space(N, p0)
        return charpoly_mod(op_star(sp, spec), p0)
    return stabilized_vec(fn)


AP_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)


def _restrict_to_block(sp, M, Bblock):
    X, ok = _solve_mod(Bblock, _matmul_mod(M, Bblock, sp.p0), sp.p0)
    if not ok:
        raise UnluckyPrime
    return X


def _block_basis(sp, spec, fcoeffs, n):
    T = op_star(sp, spec)
    K = poly_eval_matrix(fcoeffs, T, sp.p0)
    B = _nullspace_mod(K, sp.p0)
    if B.shape[1] != 2 * n:
        raise UnluckyPrime
    return B


def extract_orbit(N, spec, fcoeffs, prec, ap_primes=AP_PRIMES):
    """Fixture record for the orbit with separator minimal polynomial f."""
    n = len(fcoeffs) - 1
    record = {"level": N, "dim": n}

    # Atkin-Lehner: +1 at every prime of N by construction of the star space
    record["al"] = {str(q): 1 for q in prime_factors(N)}

    # a_p characteristic polynomials
    ap = {}
    for p in ap_primes:
        if N % p == 0:
            g = _ascending(_poly([1, 1]) ** n)     # a_q = -1, q | N
        else:
            def fn(p0, p=p):
                sp = get_space(N, p0)
                Bb = _block_basis(sp, spec, fcoeffs, n)
                return charpoly_mod(_restrict_to_block(sp, t_star(sp, p), Bb),
                                    p0)
            g = poly_sqrt(stabilized_vec(fn))
        ap[str(p)] = g
    record["ap"] = ap

    # q-expansion trace basis: row i, column m-1 = Tr(S^i T_m)/2 on the block
    npart = {}
    for m in range(1, prec + 1):
        s, mm = 1, m
        for q in prime_factors(gcd(m, N)):
            while mm % q == 0:
                mm //= q
                s = -s
        npart[m] = (s, mm)

    def tr_fn(p0):
        sp = get_space(N, p0)
        Bb = _block_basis(sp, spec, fcoeffs, n)
        S = _restrict_to_block(sp, op_star(sp, spec), Bb)
        tm = {}
        for m in range(1, prec + 1):
            _, mm = npart[m]
            if mm not in tm:
                tm[mm] = _restrict_to_block(sp, tm_star(sp, mm), Bb)
        out = []
        Si = np.eye(2 * n, dtype=np.int64)
        for i in range(n):
            for m in range(1, prec + 1):
                s, mm = npart[m]
                v = int(np.trace(_matmul_mod(Si, tm[mm], p0)) % p0)
                out.append(s * v % p0)
            Si = _matmul_mod(Si, S, p0)
        return out

    flat = stabilized_vec(tr_fn)
    rows = []
    for i in range(n):
        row = []
        for m in range(prec):
            t = flat[i * prec + m]
            if t % 2:
                raise ArithmeticError(f"odd trace at level {N}")
            row.append(t // 2)
        rows.append(row)
    record["qexp"] = rows
    record["prec"] = prec

    # cross-check: trace of a_p from the q-expansion row vs the charpoly
    for p in ap_primes:
        if p <= prec:
            g = ap[str(p)]
            if rows[0][p - 1] != -g[n - 1]:
                raise ArithmeticError(f"trace mismatch at level {N}, p={p}")
    return record


def compute_level(N, prec, ap_primes=AP_PRIMES):
    """All newform orbits exact at level N, with certificates. May be []"""
    gs = genus_x0_star(N)
    _init_star(get_space(N, PRIMES[0]))    # dimension certificates
    if gs == 0:
        return []
    ndim = new_star_dim(N)

    spec = None
    for cand in sep_candidates(N):
        coeffs = _charpoly_of_op(N, cand)
        pairs = factor_pairs(coeffs)
        if all(e == 2 for _, e in pairs):
            spec = cand
            break
    if spec is None:
        raise ArithmeticError(f"no separating Hecke operator at level {N}")

    old = set()
    for M in divisors(N):
        if 1 < M < N and genus_x0_star(M) > 0:
            for f, e in factor_pairs(_charpoly_of_op(M, spec)):
                if e != 2:
                    raise ArithmeticError(f"separator fails at divisor {M}")
                old.add(f)
    new = [f for f, _ in pairs if f not in old]
    if sum(len(f) - 1 for f in new) != ndim:
        raise ArithmeticError(
            f"new dimension mismatch at {N}: "
            f"{sorted(len(f) - 1 for f in new)} vs {ndim}")

    return [extract_orbit(N, spec, list(f), prec, ap_primes) for f in new]
