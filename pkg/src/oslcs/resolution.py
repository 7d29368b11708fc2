"""Minimal free resolutions: A over E, k over E, and k over A.

The engine is the same in every case: at each homological step, expand the
current differential into one exact matrix per internal degree, take its
kernel, and minimalize by quotienting out degree-1 multiples of the kernel one
degree down.  Selected kernel vectors become the next differential's columns,
so the differentials stay canonical and their entry counts are the graded
Betti numbers.  Free modules are right modules, which keeps the differential
strictly linear under multiplication and spares any sign bookkeeping in the
minimalization products.
"""

from __future__ import annotations

from math import comb

from ._linalg import Echelon, greedy_pivots, rank_exact, solve
from .errors import ResourceCapError
from .exterior import (
    GradedElement, indices_of, mask_of, mask_position, mask_wedge,
    maskvec_of, monomial_masks,
)

MAX_COLUMNS = 200_000


class GradedFreeModule:
    """Free module ⊕ R(-d) over ring tag "E" or "A"; degrees is the multiset."""

    __slots__ = ("ring", "degrees")

    def __init__(self, ring, degrees):
        assert ring in ("E", "A")
        self.ring = ring
        self.degrees = tuple(degrees)
        assert all(d >= 0 for d in self.degrees)

    def __repr__(self):
        return "GradedFreeModule(%r, %r)" % (self.ring, list(self.degrees))


class GradedMap:
    """Map of graded free modules; entries[(r, c)] is homogeneous of degree
    source.degrees[c] - target.degrees[r], zeros omitted."""

    __slots__ = ("source", "target", "entries")

    def __init__(self, source, target, entries):
        self.source = source
        self.target = target
        self.entries = {}
        for (r, c), e in entries.items():
            if e:
                assert e.degree == source.degrees[c] - target.degrees[r]
                self.entries[(r, c)] = e

    def entry(self, r, c):
        return self.entries.get((r, c))

    def column(self, c):
        return {r: e for (r, cc), e in self.entries.items() if cc == c}


def compose_entries(outer, inner):
    """Entries of outer∘inner; empty dict means the composition is zero."""
    assert outer.source.degrees == inner.target.degrees
    out = {}
    for (g, c), a in inner.entries.items():
        for h in range(len(outer.target.degrees)):
            b = outer.entry(h, g)
            if b is None:
                continue
            prod = b.wedge(a)
            if not prod:
                continue
            cur = out.get((h, c))
            total = prod if cur is None else cur + prod
            if total:
                out[(h, c)] = total
            else:
                out.pop((h, c), None)
    return out


class ResolutionMaps(list):
    """The differentials d_1, d_2, ...; carries the truncation they were built to."""

    def __init__(self, maps, n, i_max, j_max):
        super().__init__(maps)
        self.n = n
        self.i_max = i_max
        self.j_max = j_max


class BettiTable:
    """Graded Betti numbers with explicit truncation.

    entry(i, j) returns (value, status): status "computed" for entries inside
    the computed window, "zero" for entries forced to vanish (j < i always;
    j >= i + rank when resolving A over E), "unknown" past the truncation.
    """

    def __init__(self, ring, values, i_max, j_max, rank=None):
        self.ring = ring
        self.values = dict(values)
        self.i_max = i_max
        self.j_max = j_max
        self.rank = rank

    def entry(self, i, j):
        if j < i:
            return 0, "zero"
        if self.ring == "E" and self.rank is not None and j >= i + self.rank:
            return 0, "zero"
        if (i, j) in self.values:
            return self.values[(i, j)], "computed"
        return None, "unknown"

    def get(self, i, j):
        """Value when known (computed or forced zero), else None."""
        v, status = self.entry(i, j)
        return v if status != "unknown" else None

    def known_region(self):
        return [(i, j) for (i, j) in sorted(self.values)]


# --- resolving over E --------------------------------------------------------

def _e_matrix(n, src_degrees, src_cols, tgt_degrees, j):
    """Matrix of the differential in internal degree j.

    Domain basis: (source gen g, monomial of degree j - deg g), g-major, lex.
    Returns (domain list, columns over target positions, number of rows).
    """
    tpos = {}
    for h, dh in enumerate(tgt_degrees):
        if j - dh >= 0:
            for m in monomial_masks(n, j - dh):
                tpos[(h, m)] = len(tpos)
    dom = []
    cols = []
    for g, dg in enumerate(src_degrees):
        d = j - dg
        if d < 0:
            continue
        for m in monomial_masks(n, d):
            col = {}
            for (h, m0), c in src_cols[g].items():
                s, mm = mask_wedge(m0, m)
                if s:
                    col[tpos[(h, mm)]] = s * c
            dom.append((g, m))
            cols.append(col)
    if len(cols) > MAX_COLUMNS:
        raise ResourceCapError(
            "matrix with %d columns exceeds the cap of %d" % (len(cols), MAX_COLUMNS))
    return dom, cols, len(tpos)


def _times_e(vec, t):
    """Right multiplication of a module vector {(g, mask): c} by e_t."""
    out = {}
    bit = 1 << t
    for (g, m), c in vec.items():
        if m & bit:
            continue
        if (m >> (t + 1)).bit_count() & 1:
            out[(g, m | bit)] = -c
        else:
            out[(g, m | bit)] = c
    return out


def _e_step(n, src_degrees, src_cols, tgt_degrees, j_lo, j_hi):
    """One homological step; returns (new gen degrees, their kernel vectors)."""
    new_degrees = []
    new_cols = []
    prev_kernel = []
    for j in range(j_lo, j_hi + 1):
        dom, cols, nrows = _e_matrix(n, src_degrees, src_cols, tgt_degrees, j)
        if not dom:
            prev_kernel = []
            continue
        res = solve(cols, nrows)
        kernel = [{dom[p]: c for p, c in v.items()} for v in res.kernel]
        wcols = []
        dpos = {gm: k for k, gm in enumerate(dom)}
        for v in prev_kernel:
            for t in range(n):
                w = _times_e(v, t)
                if w:
                    wcols.append({dpos[gm]: c for gm, c in w.items()})
        kcols = [dict(v) for v in res.kernel]
        piv, _ = greedy_pivots(wcols + kcols, len(dom), checkpoints=(len(wcols),))
        for p in piv:
            if p < len(wcols):
                continue
            vec = kernel[p - len(wcols)]
            # minimality: a degree-0 coefficient would make some generator redundant
            assert all(j > src_degrees[g] for (g, _m) in vec)
            new_degrees.append(j)
            new_cols.append(vec)
        prev_kernel = kernel
    return new_degrees, new_cols


def _dense_counts(values, fdeg, i_max, j_max):
    for i in range(i_max + 1):
        degs = fdeg[i] if i < len(fdeg) else []
        for j in range(j_max + 1):
            values[(i, j)] = sum(1 for d in degs if d == j)


def _to_graded_maps(ring, fdeg, raw_maps):
    out = []
    for i, cols in enumerate(raw_maps):
        src = GradedFreeModule(ring, fdeg[i + 1])
        tgt = GradedFreeModule(ring, fdeg[i])
        entries = {}
        by_rc = {}
        for c, col in enumerate(cols):
            for (h, m), v in col.items():
                by_rc.setdefault((h, c), {})[indices_of(m)] = v
        for (h, c), coords in by_rc.items():
            entries[(h, c)] = GradedElement(fdeg[i + 1][c] - fdeg[i][h], coords)
        out.append(GradedMap(src, tgt, entries))
    return out


def _resolve_E(n, f1_degrees, f1_cols, i_max, j_max, rank):
    """Shared driver; rank None disables the A-over-E vanishing cap."""
    fdeg = [[0], list(f1_degrees)]
    raw = [list(f1_cols)]
    while len(fdeg) - 1 < i_max:
        i = len(fdeg) - 1
        if not fdeg[i]:
            break
        j_lo = min(fdeg[i]) + 1
        j_hi = j_max if rank is None else min(j_max, i + rank)
        nd, nc = _e_step(n, fdeg[i], raw[i - 1], fdeg[i - 1], j_lo, j_hi)
        fdeg.append(nd)
        raw.append(nc)
    values = {}
    _dense_counts(values, fdeg, i_max, j_max)
    table = BettiTable("E", values, i_max, j_max, rank=rank)
    maps = ResolutionMaps(_to_graded_maps("E", fdeg, raw), n, i_max, j_max)
    return table, maps


def resolve_over_E(ideal, i_max=4, j_max=None):
    """Minimal free resolution of E/I over E, truncated to (i_max, j_max)."""
    if i_max < 1:
        raise ValueError("i_max must be at least 1")
    if j_max is None:
        j_max = i_max + ideal.rank - 1
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    degrees = []
    cols = []
    for j in sorted(ideal.generators_by_degree):
        for g in ideal.generators_by_degree[j]:
            degrees.append(j)
            cols.append({(0, m): c for m, c in maskvec_of(g).items()})
    return _resolve_E(ideal.n, degrees, cols, i_max, j_max, ideal.rank)


def resolve_k_over_E(n, i_max=4, j_max=None):
    """Resolution of the residue field over E; its table is the Koszul diagonal."""
    if j_max is None:
        j_max = i_max
    cols = [{(0, 1 << t): 1} for t in range(n)]
    return _resolve_E(n, [1] * n, cols, i_max, j_max, None)


# --- derived quantities ------------------------------------------------------

def linear_strand_lower_bound(lattice, i):
    """i * sum over codim-2 flats of C(mu + i - 1, i + 1)."""
    assert i >= 1
    return i * sum(comb(mu + i - 1, i + 1) for mu in lattice.l2_mu())


class LinearStrand:
    """Linear-strand Betti numbers b'_{i,i+1} and the degree-3 syzygy data.

    Kernels in the strand never need minimalization (the one-degree-down
    kernel is always zero there), so each step is a single kernel computation
    and the chain restricts to the strand generators.
    """

    def __init__(self, n, a2, betti, s3, w4_rank):
        self.n = n
        self.a2 = a2
        self.betti = betti      # {i: b'_{i,i+1}} for i >= 1
        self.s3 = s3            # degree-3 syzygies as {(gen, mask): coeff}
        self.w4_rank = w4_rank  # rank of E_1 * S_3 inside (F_1 quad block)_4


def linear_strand(ideal, i_max):
    """b'_{i,i+1} for 2 <= i <= i_max without resolving off the strand."""
    assert i_max >= 2
    n = ideal.n
    quads = [maskvec_of(g) for g in ideal.generators_by_degree.get(2, [])]
    a2 = len(quads)
    src_deg = [2] * a2
    src_cols = [{(0, m): c for m, c in v.items()} for v in quads]
    tgt_deg = [0]
    betti = {1: a2}
    s3 = None
    w4_rank = 0
    for i in range(1, i_max):
        j = i + 2
        dom, cols, nrows = _e_matrix(n, src_deg, src_cols, tgt_deg, j)
        if not dom:
            betti[i + 1] = 0
            if i == 1:
                s3 = []
            if i == 2:
                w4_rank = 0
            src_deg, src_cols, tgt_deg = [], [], src_deg
            continue
        res = solve(cols, nrows)
        kernel = [{dom[p]: c for p, c in v.items()} for v in res.kernel]
        betti[i + 1] = len(kernel)
        if i == 1:
            s3 = kernel
        if i == 2:
            w4_rank = res.rank
        tgt_deg = src_deg
        src_deg = [j] * len(kernel)
        src_cols = kernel
    return LinearStrand(n, a2, betti, s3, w4_rank)


def _koszul_pair_vectors(quads, a2):
    out = []
    for i in range(a2):
        for j in range(i + 1, a2):
            vec = {}
            for m, c in quads[i].items():
                vec[(j, m)] = c
            for m, c in quads[j].items():
                vec[(i, m)] = vec.get((i, m), 0) - c
            out.append({k: v for k, v in vec.items() if v})
    return out


def _delta4_core(n, quads, s3, w4_rank=None):
    """dim of the Koszul-syzygy span inside the degree-4 minimal syzygies."""
    a2 = len(quads)
    if a2 < 2:
        return 0
    pos = {}
    for g in range(a2):
        for m in monomial_masks(n, 2):
            pos[(g, m)] = len(pos)
    wcols = []
    for v in s3:
        for t in range(n):
            w = _times_e(v, t)
            if w:
                wcols.append({pos[gm]: c for gm, c in w.items()})
    kcols = [{pos[gm]: c for gm, c in v.items()}
             for v in _koszul_pair_vectors(quads, a2)]
    if w4_rank is None:
        w4_rank = rank_exact(wcols, len(pos))
    combined = rank_exact(wcols + kcols, len(pos))
    delta = combined - w4_rank
    assert 0 <= delta <= comb(a2, 2)
    return delta


def delta4(ideal, maps):
    """Count of minimal quadratic syzygies that are Koszul, from the computed
    resolution: quotient span{f_i eps_j - f_j eps_i} by E_1 times the linear
    syzygies."""
    quads = [maskvec_of(g) for g in ideal.generators_by_degree.get(2, [])]
    a2 = len(quads)
    if a2 < 2:
        return 0
    if len(maps) < 2:
        raise ValueError("need the second differential; resolve with i_max >= 2")
    d2 = maps[1]
    s3 = []
    for c, dg in enumerate(d2.source.degrees):
        if dg != 3:
            continue
        vec = {}
        for r, dr in enumerate(d2.target.degrees):
            e = d2.entry(r, c)
            if e is None:
                continue
            assert dr == 2, "degree-3 syzygy touching a cubic generator"
            for mon, v in e.coords.items():
                vec[(r, mask_of(mon))] = v
        s3.append(vec)
    return _delta4_core(ideal.n, quads, s3)


def delta4_from_strand(ideal, strand):
    if 3 not in strand.betti:
        raise ValueError("strand too shallow; compute it with i_max >= 3")
    quads = [maskvec_of(g) for g in ideal.generators_by_degree.get(2, [])]
    return _delta4_core(ideal.n, quads, strand.s3, w4_rank=strand.w4_rank)


def delta4_upper_bound(lattice):
    """Pair sum of C(mu,2)C(mu',2) over distinct codim-2 flats; equality is
    the MLS case."""
    mus = [comb(mu, 2) for mu in lattice.l2_mu()]
    total = sum(mus)
    return sum(m * (total - m) for m in mus) // 2


class HilbertCheck:
    """Per-coefficient result of the alternating-sum identity
    (sum_{i,j} (-1)^i b'_{ij} t^j) (1+t)^n = sum b_i t^i."""

    def __init__(self, statuses, through):
        self.statuses = statuses      # {m: "ok" | "fail" | "inconclusive"}
        self.through = through        # identity verified for m <= through

    @property
    def failed(self):
        return sorted(m for m, s in self.statuses.items() if s == "fail")

    @property
    def inconclusive(self):
        return sorted(m for m, s in self.statuses.items() if s == "inconclusive")

    def __bool__(self):
        return not self.failed


def hilbert_identity_check(table, lattice):
    n = lattice.n
    through = min(table.i_max, table.j_max)
    statuses = {}
    colsum = {}
    for q in range(through + 1):
        s = 0
        for i in range(q + 1):
            v, status = table.entry(i, q)
            assert status != "unknown"
            s += v if i % 2 == 0 else -v
        colsum[q] = s
    for m in range(max(through, lattice.rank) + 1):
        if m > through:
            statuses[m] = "inconclusive"
            continue
        lhs = sum(colsum[q] * comb(n, m - q) for q in range(m + 1))
        rhs = lattice.whitney[m] if m <= lattice.rank else 0
        statuses[m] = "ok" if lhs == rhs else "fail"
    return HilbertCheck(statuses, through)


def b34_formula(b1, a3, b24, d4):
    """dim Tor_3^A(k,k)_4 from resolution data over E."""
    assert min(b1, a3, b24, d4) >= 0
    return (b24 - d4) + b1 * a3


def b44_formula(a2, b1, b23, b34, d4):
    """Fourth diagonal Betti number of A from resolution data over E."""
    assert min(a2, b1, b23, b34, d4) >= 0
    return comb(b1 + 3, 4) + (comb(b1 + 1, 2) + a2) * a2 + b34 + b1 * b23 - d4


# --- resolving k over A ------------------------------------------------------

class _AAlgebra:
    """Monomial basis of A = E/I per degree, with right multiplication by the
    degree-1 generators, everything reduced against the lex echelon of I."""

    def __init__(self, ideal):
        self.n = ideal.n
        self.top = ideal.rank
        if ideal.j_max < ideal.rank:
            raise ValueError("ideal must be computed through its full rank")
        self.basis = {0: [0]}
        self.pos = {0: {0: 0}}
        self._reducers = {}
        for j in range(1, self.top + 1):
            posmap = mask_position(self.n, j)
            ech = Echelon()
            for v in ideal.basis_by_degree.get(j, []):
                ech.add({posmap[m]: c for m, c in v.items()})
            pivots = set(ech.rows)
            monos = [m for k, m in enumerate(monomial_masks(self.n, j))
                     if k not in pivots]
            self.basis[j] = monos
            self.pos[j] = {m: k for k, m in enumerate(monos)}
            self._reducers[j] = ech
            assert len(monos) == comb(self.n, j) - ideal.graded_dims[j]
        self._mult = {}

    def dim(self, j):
        return len(self.basis.get(j, []))

    def right_mult_table(self, j, t):
        """A_j -> A_{j+1} as {basis index: sparse image vector}."""
        key = (j, t)
        if key in self._mult:
            return self._mult[key]
        table = {}
        if j + 1 > self.top:
            self._mult[key] = table
            return table
        posmap = mask_position(self.n, j + 1)
        ech = self._reducers[j + 1]
        bit = 1 << t
        for k, m in enumerate(self.basis[j]):
            if m & bit:
                continue
            sign = -1 if (m >> (t + 1)).bit_count() & 1 else 1
            residue = ech.reduce({posmap[m | bit]: sign})
            vec = {}
            for p, c in residue.items():
                vec[self.pos[j + 1][monomial_masks(self.n, j + 1)[p]]] = c
            if vec:
                table[k] = vec
        self._mult[key] = table
        return table

    def rmul_e(self, vec, j, t):
        """(vector over basis of A_j) * x_t."""
        table = self.right_mult_table(j, t)
        out = {}
        for k, c in vec.items():
            img = table.get(k)
            if img is None:
                continue
            for kk, v in img.items():
                x = out.get(kk, 0) + c * v
                if x:
                    out[kk] = x
                else:
                    out.pop(kk, None)
        return out

    def rmul_mono(self, vec, j, mask):
        """(vector over A_j) * (image of e_mask), multiplying bit by bit."""
        cur = vec
        d = j
        m = mask
        while m and cur:
            low = m & -m
            cur = self.rmul_e(cur, d, low.bit_length() - 1)
            d += 1
            m ^= low
        return cur


def _a_matrix(alg, src_degrees, src_cols, tgt_degrees, j):
    tpos = {}
    for h, dh in enumerate(tgt_degrees):
        for k in range(alg.dim(j - dh) if j >= dh else 0):
            tpos[(h, k)] = len(tpos)
    dom = []
    cols = []
    for g, dg in enumerate(src_degrees):
        d = j - dg
        if d < 0 or alg.dim(d) == 0:
            continue
        for bk, bmask in enumerate(alg.basis[d]):
            col = {}
            by_h = {}
            for (h, k), c in src_cols[g].items():
                by_h.setdefault(h, {})[k] = c
            for h, vec in by_h.items():
                prod = alg.rmul_mono(vec, dg - tgt_degrees[h], bmask)
                for kk, v in prod.items():
                    key = tpos[(h, kk)]
                    x = col.get(key, 0) + v
                    if x:
                        col[key] = x
                    else:
                        col.pop(key, None)
            dom.append((g, bk))
            cols.append(col)
    if len(cols) > MAX_COLUMNS:
        raise ResourceCapError(
            "matrix with %d columns exceeds the cap of %d" % (len(cols), MAX_COLUMNS))
    return dom, cols, len(tpos)


def resolve_k_over_A(ideal, i_max=4, j_max=None):
    """Brute-force oracle: minimal resolution of the residue field over A."""
    if j_max is None:
        j_max = i_max
    alg = _AAlgebra(ideal)
    n = alg.n
    fdeg = [[0], [1] * n]
    raw = [[{(0, t): 1} for t in range(n)]]
    while len(fdeg) - 1 < i_max:
        i = len(fdeg) - 1
        if not fdeg[i]:
            break
        new_degrees = []
        new_cols = []
        prev_kernel = []
        for j in range(min(fdeg[i]) + 1, j_max + 1):
            dom, cols, nrows = _a_matrix(alg, fdeg[i], raw[i - 1], fdeg[i - 1], j)
            if not dom:
                prev_kernel = []
                continue
            res = solve(cols, nrows)
            kernel = [{dom[p]: c for p, c in v.items()} for v in res.kernel]
            dpos = {gk: k for k, gk in enumerate(dom)}
            wcols = []
            for v in prev_kernel:
                for t in range(n):
                    w = {}
                    for (g, k), c in v.items():
                        img = alg.right_mult_table(j - 1 - fdeg[i][g], t).get(k)
                        if img is None:
                            continue
                        for kk, vv in img.items():
                            x = w.get((g, kk), 0) + c * vv
                            if x:
                                w[(g, kk)] = x
                            else:
                                w.pop((g, kk), None)
                    if w:
                        wcols.append({dpos[gk]: c for gk, c in w.items()})
            kcols = [dict(v) for v in res.kernel]
            piv, _ = greedy_pivots(wcols + kcols, len(dom), checkpoints=(len(wcols),))
            for p in piv:
                if p < len(wcols):
                    continue
                vec = kernel[p - len(wcols)]
                assert all(j > fdeg[i][g] for (g, _k) in vec)
                new_degrees.append(j)
                new_cols.append(vec)
            prev_kernel = kernel
        fdeg.append(new_degrees)
        raw.append(new_cols)
    values = {}
    _dense_counts(values, fdeg, i_max, j_max)
    return BettiTable("A", values, i_max, j_max, rank=None)
