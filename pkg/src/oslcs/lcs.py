"""Lower central series ranks and the algebra-level tests built on them.

phi_1..phi_4 have exact expressions in lattice and resolution data; higher
ranks are only ever reported from series inversion of computed diagonal Betti
numbers, or as predictions.  Every value that two routes can reach is computed
both ways, and disagreement raises rather than picking a winner.
"""

from math import comb

from ._linalg import Echelon
from .errors import InconsistencyError
from .exterior import mask_position, maskvec_of, monomial_masks
from .resolution import linear_strand, linear_strand_lower_bound


class IntegerSeries:
    """Truncated power series with exact integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, n=None):
        c = list(coeffs)
        if n is not None:
            c = c[:n + 1] + [0] * (n + 1 - len(c))
        self.coeffs = tuple(c)

    @property
    def truncation(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k <= self.truncation else 0

    def __eq__(self, other):
        return isinstance(other, IntegerSeries) and self.coeffs == other.coeffs

    def __repr__(self):
        return "IntegerSeries(%r)" % (list(self.coeffs),)

    def __mul__(self, other):
        n = min(self.truncation, other.truncation)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if not a:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return IntegerSeries(out)

    def reciprocal(self):
        c0 = self.coeffs[0]
        if c0 not in (1, -1):
            raise ValueError("series is invertible only when c0 = +-1")
        n = self.truncation
        out = [0] * (n + 1)
        out[0] = c0
        for m in range(1, n + 1):
            s = sum(self.coeffs[i] * out[m - i] for i in range(1, m + 1))
            out[m] = -c0 * s
        return IntegerSeries(out)

    def alternate(self):
        """Substitute t -> -t."""
        return IntegerSeries([c if k % 2 == 0 else -c
                              for k, c in enumerate(self.coeffs)])

    def pow_int(self, e):
        if e < 0:
            return self.reciprocal().pow_int(-e)
        out = IntegerSeries([1], n=self.truncation)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out


def one_minus_power(j, e, n):
    """(1 - t^j)^e as a series through degree n; e may be negative."""
    base = [0] * (n + 1)
    base[0] = 1
    if j <= n:
        base[j] = -1
    return IntegerSeries(base).pow_int(e)


class LCSReport:
    """phi values keyed by k, provenance per entry, and the derived flags."""

    PROVENANCES = ("closed-form", "series-inversion-from-oracle", "conjectural")

    def __init__(self, phi, provenance, is_mls, is_quadratic, koszul_status):
        assert set(phi) == set(provenance)
        assert all(p in self.PROVENANCES for p in provenance.values())
        assert koszul_status in ("koszul", "not-koszul", "undetermined")
        self.phi = dict(phi)
        self.provenance = dict(provenance)
        self.is_mls = is_mls
        self.is_quadratic = is_quadratic
        self.koszul_status = koszul_status


def _mobius(d):
    result = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    if d > 1:
        result = -result
    return result


def witt(n, k):
    """Rank of the k-th LCS quotient of a free group on n generators."""
    assert n >= 0 and k >= 1
    total = sum(_mobius(d) * n ** (k // d) for d in range(1, k + 1)
                if k % d == 0)
    assert total % k == 0
    return total // k


def falk_bound(lattice, k):
    """Sum of free-group Witt numbers over the codimension-2 multiple points."""
    return sum(witt(mu, k) for mu in lattice.l2_mu())


def phi_123(lattice, ideal):
    """First three LCS ranks, each checked along two independent routes."""
    b1 = lattice.n
    a2 = ideal.a.get(2, 0)
    a3 = ideal.a.get(3, 0)
    b3 = lattice.whitney[3] if lattice.rank >= 3 else 0
    phi3 = b3 - comb(b1, 3) + b1 * a2 + a3
    syz = linear_strand(ideal, 2).betti[2]
    if phi3 != syz:
        raise InconsistencyError(
            "phi_3 routes disagree: combinatorial %d vs syzygy count %d"
            % (phi3, syz))
    return b1, a2, phi3


def phi4(a2, b34, d4):
    """Fourth LCS rank from the quadratic strand data."""
    assert min(a2, b34, d4) >= 0
    return comb(a2, 2) + b34 - d4


def diagonal_series(table):
    """The generating series of the diagonal Betti numbers b_ii."""
    return IntegerSeries([table.values.get((i, i), 0)
                          for i in range(table.i_max + 1)])


def lcs_from_diagonal(b_ii):
    """Invert prod (1-t^k)^{-phi_k} = sum b_ii t^i for phi_1..phi_N.

    A negative exponent along the way means the input is not such a product
    and the table it came from is wrong somewhere.
    """
    if b_ii[0] != 1:
        raise ValueError("diagonal series must start at 1")
    n = b_ii.truncation
    target = b_ii.reciprocal()
    partial = IntegerSeries([1], n=n)
    phis = {}
    for k in range(1, n + 1):
        phi = partial[k] - target[k]
        if phi < 0:
            raise InconsistencyError(
                "series inversion produced phi_%d = %d < 0" % (k, phi))
        phis[k] = phi
        partial = partial * one_minus_power(k, phi, n)
    if partial.coeffs != target.coeffs:
        raise InconsistencyError("inverted phis do not reproduce the series")
    return phis


def mls_test(lattice, b23):
    """True when the linear strand is as small as the multiple points allow."""
    return b23 == linear_strand_lower_bound(lattice, 2)


def mls_lcs_prediction(lattice, k_max):
    """Flat-by-flat LCS prediction: phi_k = sum over L2 of witt(mu, k).

    Returns (series, phis): the product form (1-t)^{b1-b2} prod (1-mu t) and
    the per-k values.  The two presentations are checked against each other;
    entries are exact for MLS arrangements up to k = 4 and conjectural beyond.
    """
    b1 = lattice.n
    b2 = lattice.whitney[2] if lattice.rank >= 2 else 0
    phis = {1: b1}
    for k in range(2, k_max + 1):
        phis[k] = falk_bound(lattice, k)
    series = one_minus_power(1, b1 - b2, k_max)
    for mu in lattice.l2_mu():
        series = series * IntegerSeries([1, -mu], n=k_max)
    check = IntegerSeries([1], n=k_max)
    for k, phi in phis.items():
        check = check * one_minus_power(k, phi, k_max)
    if check != series:
        raise InconsistencyError("prediction sum and product forms disagree")
    return series, phis


def quadraticity_test(lattice, a2, a3, b3):
    """True when the lattice data certifies the algebra is not quadratic."""
    if a3 > 0:
        return True
    b1 = lattice.n
    crit = (comb(b1, 3) - b3 - b1 * a2
            + 2 * sum(comb(mu + 1, 3) for mu in lattice.l2_mu()))
    return crit > 0


def koszul_tests(a3, b24, d4, chordal=None):
    """Koszulness status from the available certificates.

    chordal carries the graphic-arrangement answer when there is one: True
    settles koszul affirmatively, False or None leaves only the negative
    certificates (a3 > 0, or quadratic syzygies beyond the Koszul ones).
    """
    certified_not = a3 > 0
    if b24 is not None and d4 is not None and b24 > d4:
        certified_not = True
    if chordal:
        if certified_not:
            raise InconsistencyError(
                "chordal input carries a non-Koszul certificate")
        return "koszul"
    if certified_not:
        return "not-koszul"
    return "undetermined"


# --- syzygy locality ---------------------------------------------------------

def _gen_flats(ideal):
    """Partition the quadric generators by the multiple point they live on.

    Two triple-circuits lie on the same flat exactly when they share two
    hyperplanes; the chosen generators of one flat are chained through such
    overlaps, so transitive closure recovers the flats without the lattice.
    """
    masks = []
    for g in ideal.generators_by_degree.get(2, []):
        mk = 0
        for mon in g.coords:
            for i in mon:
                mk |= 1 << i
        masks.append(mk)
    parent = list(range(len(masks)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if (masks[i] & masks[j]).bit_count() >= 2:
                parent[find(i)] = find(j)
    return [find(i) for i in range(len(masks))]


def syzygy_locality(ideal, syzygies=None):
    """Check whether every linear syzygy lives on a single multiple point.

    syzygies: vectors over (generator index, degree-1 mask), as produced by
    the linear strand; recomputed when omitted.  The space is put in canonical
    echelon form first, so the answer does not depend on the presented basis.
    Returns (all_local, witnesses) with witnesses the canonical basis vectors
    whose support mixes flats.
    """
    if syzygies is None:
        syzygies = linear_strand(ideal, 2).s3
    flat_of = _gen_flats(ideal)
    a2 = len(flat_of)
    pos = {}
    for g in range(a2):
        for m in monomial_masks(ideal.n, 1):
            pos[(g, m)] = len(pos)
    by_pos = sorted(pos, key=pos.get)
    ech = Echelon()
    for v in syzygies:
        ech.add({pos[gm]: c for gm, c in v.items()})
    witnesses = []
    for pivot in sorted(ech.rows):
        row = ech.rows[pivot]
        support = {flat_of[by_pos[p][0]] for p in row}
        if len(support) > 1:
            witnesses.append({by_pos[p]: c for p, c in row.items()})
    return not witnesses, witnesses


def verify_decomposable(a, b, ideal):
    """True iff the wedge of the two degree-1 elements is nonzero and lies
    in the quadratic part of the ideal."""
    assert a.degree == 1 and b.degree == 1
    sign_prod = a.wedge(b)
    if not sign_prod:
        return False
    posmap = mask_position(ideal.n, 2)
    ech = Echelon()
    for v in ideal.basis_by_degree.get(2, []):
        ech.add({posmap[m]: c for m, c in v.items()})
    residue = ech.reduce({posmap[m]: c
                          for m, c in maskvec_of(sign_prod).items()})
    return not residue


# --- assembled report --------------------------------------------------------

def lcs_report(lattice, ideal, strand, d4, b24=None, chordal=None,
               oracle_diag=None):
    """Build the LCS report from computed ingredients.

    strand must cover i = 2, 3; oracle_diag, when given, extends phi past 4
    by series inversion and must agree with the closed forms below it.
    """
    b1, a2, p3 = phi_123(lattice, ideal)
    p4 = phi4(a2, strand.betti[3], d4)
    phi = {1: b1, 2: a2, 3: p3, 4: p4}
    provenance = {k: "closed-form" for k in phi}
    if oracle_diag is not None:
        inverted = lcs_from_diagonal(oracle_diag)
        for k, v in inverted.items():
            if k in phi:
                if phi[k] != v:
                    raise InconsistencyError(
                        "phi_%d: closed form %d vs series inversion %d"
                        % (k, phi[k], v))
            else:
                phi[k] = v
                provenance[k] = "series-inversion-from-oracle"
    a3 = ideal.a.get(3, 0)
    is_mls = mls_test(lattice, strand.betti[2])
    if any(ideal.a.get(j, 0) for j in range(3, ideal.j_max + 1)):
        is_quadratic = False
    elif ideal.j_max >= ideal.rank:
        is_quadratic = True
    else:
        is_quadratic = None
    b3 = lattice.whitney[3] if lattice.rank >= 3 else 0
    if quadraticity_test(lattice, a2, a3, b3) and is_quadratic:
        raise InconsistencyError(
            "non-quadraticity certificate against a degree-2 presentation")
    return LCSReport(phi, provenance, is_mls, is_quadratic,
                     koszul_tests(a3, b24, d4, chordal))
