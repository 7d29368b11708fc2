"""Sparse exact linear algebra over the rationals.

A matrix is column-major: a list of columns, each column a dict {row: coeff}
with nonzero exact values (int, gmpy2.mpq, or Fraction).  Everything downstream
needs the same three answers, so there is a single primitive: solve() returns
the rank, the pivot columns (the lex-first maximal independent subset), and the
canonical kernel basis (one vector per free column f, with entry 1 at f, zeros
at other free columns, and entries only at earlier pivot columns).

Two engines produce identical output:

* a pure rational row-echelon engine (small matrices), and
* a modular engine for large ones: RREF mod a fixed prime sequence via numpy
  int64, rational reconstruction, then exact certification.  The mod-p pivot
  minor proves rank >= |pivots|; exact verification of M*v = 0 for every
  candidate kernel vector, together with the echelon shape, proves
  rank <= |pivots| and that the span is the full kernel.  A bad prime can only
  force a retry, never a wrong answer.  No floating point is involved.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

# Largest primes below 2^31; (p-1)^2 + (p-1) < 2^63 keeps int64 arithmetic safe.
PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
)

# nrows*ncols at or below this uses the pure rational engine.
SMALL_LIMIT = 60_000

# Test hook: None = auto, "fraction" or "modular" forces an engine.
FORCE_ENGINE = None


class SolveResult:
    __slots__ = ("nrows", "ncols", "rank", "pivots", "kernel")

    def __init__(self, nrows, ncols, rank, pivots, kernel):
        self.nrows = nrows
        self.ncols = ncols
        self.rank = rank
        self.pivots = pivots      # sorted list of pivot column indices
        self.kernel = kernel      # list of {col: coeff}, one per free column

    @property
    def nullity(self):
        return self.ncols - self.rank

    def free_columns(self):
        pivset = set(self.pivots)
        return [c for c in range(self.ncols) if c not in pivset]


class Echelon:
    """Incremental reduced row-echelon basis of exact vectors.

    Vectors are dicts {coordinate: coeff}.  Rows are kept fully reduced, so a
    single pass eliminates every pivot coordinate from an incoming vector.
    """

    def __init__(self):
        self.rows = {}  # pivot coordinate -> reduced row dict (entry 1 at pivot)

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residue of vec modulo the current row span (vec is not modified)."""
        v = dict(vec)
        for c in list(v):
            f = v.get(c)
            if not f or c not in self.rows:
                continue
            del v[c]
            for cc, w in self.rows[c].items():
                if cc == c:
                    continue
                x = v.get(cc, 0) - f * w
                if x:
                    v[cc] = x
                else:
                    v.pop(cc, None)
        return v

    def add(self, vec):
        """Insert vec if independent; returns the new pivot coordinate or None."""
        r = self.reduce(vec)
        if not r:
            return None
        p = min(r)
        inv = Q(1) / Q(r[p])
        row = {c: v * inv for c, v in r.items()}
        row[p] = 1
        # keep existing rows reduced against the new pivot
        for q, other in self.rows.items():
            f = other.get(p)
            if f:
                del other[p]
                for cc, w in row.items():
                    if cc == p:
                        continue
                    x = other.get(cc, 0) - f * w
                    if x:
                        other[cc] = x
                    else:
                        other.pop(cc, None)
        self.rows[p] = row
        return p


def solve(cols, nrows):
    """Exact rank / pivot columns / canonical kernel basis of a sparse matrix."""
    ncols = len(cols)
    if ncols == 0:
        return SolveResult(nrows, 0, 0, [], [])
    if nrows == 0 or all(not c for c in cols):
        return SolveResult(nrows, ncols, 0, [],
                           [{f: 1} for f in range(ncols)])
    engine = FORCE_ENGINE
    if engine is None:
        engine = "fraction" if nrows * ncols <= SMALL_LIMIT else "modular"
    if engine == "fraction":
        return _solve_fraction(cols, nrows)
    return _solve_modular(cols, nrows)


def rank_of(cols, nrows):
    return solve(cols, nrows).rank


def transpose(cols, nrows):
    rows = [dict() for _ in range(nrows)]
    for c, col in enumerate(cols):
        for r, v in col.items():
            rows[r][c] = v
    return rows


def rank_exact(cols, nrows):
    """Certified rank; transposes wide matrices so the kernel to verify stays small."""
    ncols = len(cols)
    if ncols == 0 or nrows == 0:
        return 0
    if ncols > nrows:
        return solve(transpose(cols, nrows), ncols).rank
    return solve(cols, nrows).rank


def greedy_pivots(cols, nrows, checkpoints=()):
    """Lex-first maximal independent column subset, with certified counts.

    Returns (pivots, rank).  rank is exact, and for every prefix length k in
    checkpoints the number of pivots below k equals the exact rank of that
    prefix (so block-wise generator counts are certified even if an unlucky
    prime shifts which columns get picked).
    """
    ncols = len(cols)
    if ncols == 0 or nrows == 0:
        return [], 0
    if FORCE_ENGINE != "modular" and nrows * ncols <= SMALL_LIMIT:
        res = _solve_fraction(cols, nrows)
        return res.pivots, res.rank
    total = rank_exact(cols, nrows)
    want = {k: rank_exact(cols[:k], nrows) for k in checkpoints}
    for p in PRIMES:
        try:
            M = _dense_mod(cols, nrows, p)
        except _BadPrime:
            continue
        piv = _rref_mod(M, p)
        if len(piv) != total:
            continue
        if all(sum(1 for c in piv if c < k) == r for k, r in want.items()):
            return piv, total
    raise RuntimeError("no prime matched the certified ranks (%dx%d)" % (nrows, ncols))


def _solve_fraction(cols, nrows):
    ncols = len(cols)
    # row-major view; RREF of the rows gives pivot columns and kernel data
    rows = {}
    for c, col in enumerate(cols):
        for r, v in col.items():
            rows.setdefault(r, {})[c] = v
    ech = Echelon()
    for r in sorted(rows):
        ech.add(rows[r])
    pivots = sorted(ech.rows)
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: 1}
        for p in pivots:
            if p > f:
                break
            e = ech.rows[p].get(f)
            if e:
                v[p] = -e
        kernel.append(v)
    return SolveResult(nrows, ncols, len(pivots), pivots, kernel)


def _rref_mod(M, p):
    """In-place RREF of an int64 numpy matrix mod p; returns pivot columns."""
    m, n = M.shape
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r, c:] = (M[r, c:] * inv) % p
        f = M[:, c].copy()
        f[r] = 0
        nzr = np.nonzero(f)[0]
        if nzr.size:
            M[np.ix_(nzr, np.arange(c, n))] = (
                M[np.ix_(nzr, np.arange(c, n))] - f[nzr, None] * M[r, c:][None, :]
            ) % p
        piv.append(c)
        r += 1
    return piv


def _reduce_entry_mod(v, p):
    num = v.numerator if hasattr(v, "numerator") else v
    den = v.denominator if hasattr(v, "denominator") else 1
    if den == 1:
        return int(num) % p
    d = int(den) % p
    if d == 0:
        raise _BadPrime
    return (int(num) * pow(d, p - 2, p)) % p


class _BadPrime(Exception):
    pass


def _ratrec(u, m, bound):
    """Rational reconstruction: a/b with a = u*b mod m, |a|,|b| <= bound."""
    r0, r1 = m, u % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    return Q(r1, t1) if t1 > 0 else Q(-r1, -t1)


def _crt_pair(a1, m1, a2, m2):
    # combine x = a1 mod m1, x = a2 mod m2
    d = (a2 - a1) * pow(m1 % m2, m2 - 2, m2) % m2
    return a1 + m1 * d, m1 * m2


def _verify_kernel_vector(cols, vec):
    acc = {}
    for c, val in vec.items():
        for r, a in cols[c].items():
            x = acc.get(r, 0) + a * val
            if x:
                acc[r] = x
            else:
                acc.pop(r, None)
    return not acc


def _dense_mod(cols, nrows, p):
    M = np.zeros((nrows, len(cols)), dtype=np.int64)
    for c, col in enumerate(cols):
        for r, v in col.items():
            M[r, c] = _reduce_entry_mod(v, p)
    return M


def _solve_modular(cols, nrows):
    ncols = len(cols)
    runs = []  # (prime, pivot tuple, F matrix = rref rows restricted to free cols)
    for p in PRIMES:
        try:
            M = _dense_mod(cols, nrows, p)
        except _BadPrime:
            continue
        piv = _rref_mod(M, p)
        pivset = set(piv)
        free = [c for c in range(ncols) if c not in pivset]
        F = M[: len(piv)][:, free].copy() if piv else np.zeros((0, len(free)), dtype=np.int64)
        runs.append((p, tuple(piv), F))
        # try all candidate pivot groups seen so far, in first-seen order
        groups = {}
        for pp, pv, FF in runs:
            groups.setdefault(pv, []).append((pp, FF))
        for pv, members in groups.items():
            res = _attempt(cols, nrows, ncols, list(pv), members)
            if res is not None:
                return res
    raise RuntimeError(
        "modular kernel computation failed to certify with %d primes "
        "(matrix %dx%d)" % (len(PRIMES), nrows, ncols))


def _attempt(cols, nrows, ncols, pivots, members):
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    r = len(pivots)
    if not free:
        return SolveResult(nrows, ncols, r, pivots, [])
    # CRT per entry across members, then rational reconstruction
    if len(members) == 1:
        p, F = members[0]
        res_m = int(p)
        get = lambda k, j: int(F[k, j])
    else:
        mats = [(int(p), F) for p, F in members]
        res_m = 1
        for p, _ in mats:
            res_m *= p

        def get(k, j):
            a, m = int(mats[0][1][k, j]), mats[0][0]
            for p, F in mats[1:]:
                a, m = _crt_pair(a, m, int(F[k, j]), p)
            return a

    bound = isqrt(res_m // 2)
    cache = {}
    kernel = []
    for j, f in enumerate(free):
        vec = {f: 1}
        ok = True
        for k in range(r):
            if pivots[k] > f:
                break
            u = get(k, j)
            if u == 0:
                continue
            q = cache.get(u)
            if q is None:
                q = _ratrec(u, res_m, bound)
                if q is None:
                    ok = False
                    break
                cache[u] = q
            vec[pivots[k]] = -q
        if not ok or not _verify_kernel_vector(cols, vec):
            return None
        kernel.append(vec)
    return SolveResult(nrows, ncols, r, pivots, kernel)
