"""Exterior algebra on n degree-1 generators and the Orlik-Solomon ideal.

Monomials are strictly increasing index tuples at the API surface; internally
every degree-j piece is handled as bitmask vectors over the lex-ordered
monomial list, which is what the linear algebra consumes.  The ideal is built
degree by degree: candidates in degree j are the degree-1 multiples of the
degree-(j-1) basis followed by boundaries of size-(j+1) circuits in lex order;
pivot columns of that candidate matrix give a basis of I_j, and pivots landing
in the circuit block are the minimal generators, so a_j = dim I_j - dim(E_1 *
I_{j-1}) by construction.
"""

from __future__ import annotations

import itertools
import warnings
from functools import lru_cache
from math import comb

from ._linalg import Q, greedy_pivots, solve
from .errors import ResourceCapError


class Monomial(tuple):
    """e_{i1} ^ ... ^ e_{ir} with i1 < ... < ir."""

    __slots__ = ()

    def __new__(cls, indices):
        t = tuple(indices)
        if any(i < 0 for i in t) or any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("indices must be strictly increasing and >= 0: %r" % (t,))
        return super().__new__(cls, t)

    @property
    def degree(self):
        return len(self)

    def wedge(self, other):
        """(sign, product) with sign 0 when an index repeats."""
        if set(self) & set(other):
            return 0, None
        inv = sum(1 for a in self for b in other if a > b)
        merged = Monomial(sorted(self + tuple(other)))
        return (-1) ** (inv & 1), merged


class GradedElement:
    """Homogeneous element of E: sparse map from index tuple to coefficient."""

    __slots__ = ("degree", "coords")

    def __init__(self, degree, coords):
        self.degree = degree
        clean = {}
        for mon, c in coords.items():
            t = tuple(mon)
            assert len(t) == degree
            if c:
                clean[t] = c
        self.coords = clean

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        return (isinstance(other, GradedElement)
                and self.degree == other.degree and self.coords == other.coords)

    def __hash__(self):
        return hash((self.degree, frozenset(self.coords.items())))

    def __add__(self, other):
        assert self.degree == other.degree
        out = dict(self.coords)
        for m, c in other.coords.items():
            x = out.get(m, 0) + c
            if x:
                out[m] = x
            else:
                out.pop(m, None)
        return GradedElement(self.degree, out)

    def __neg__(self):
        return GradedElement(self.degree, {m: -c for m, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        if not c:
            return GradedElement(self.degree, {})
        return GradedElement(self.degree, {m: c * v for m, v in self.coords.items()})

    def wedge(self, other):
        out = {}
        for ma, ca in self.coords.items():
            sa = set(ma)
            for mb, cb in other.coords.items():
                if sa & set(mb):
                    continue
                inv = sum(1 for a in ma for b in mb if a > b)
                merged = tuple(sorted(ma + mb))
                c = -ca * cb if inv & 1 else ca * cb
                x = out.get(merged, 0) + c
                if x:
                    out[merged] = x
                else:
                    out.pop(merged, None)
        return GradedElement(self.degree + other.degree, out)

    def __repr__(self):
        if not self.coords:
            return "GradedElement(%d, 0)" % self.degree
        parts = ["%s*e%s" % (c, list(m)) for m, c in sorted(self.coords.items())]
        return "GradedElement(%d, %s)" % (self.degree, " + ".join(parts))


def boundary(mon):
    """Leibnitz boundary: e_J -> sum_t (-1)^t e_{J minus its t-th index}."""
    t = tuple(mon)
    assert len(t) >= 1
    out = {}
    for pos in range(len(t)):
        out[t[:pos] + t[pos + 1:]] = 1 if pos % 2 == 0 else -1
    return GradedElement(len(t) - 1, out)


# --- bitmask layer -----------------------------------------------------------

def indices_of(mask):
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@lru_cache(maxsize=None)
def monomial_masks(n, j):
    """Degree-j monomial masks in lex order of their index tuples."""
    return tuple(mask_of(c) for c in itertools.combinations(range(n), j))


@lru_cache(maxsize=None)
def mask_position(n, j):
    return {m: i for i, m in enumerate(monomial_masks(n, j))}


def e_times(t, vec):
    """e_t wedge (mask vector); sign counts the indices below t."""
    out = {}
    bit = 1 << t
    for m, c in vec.items():
        if m & bit:
            continue
        if (m & (bit - 1)).bit_count() & 1:
            out[m | bit] = -c
        else:
            out[m | bit] = c
    return out


def mask_wedge(a, b):
    """(sign, union) for e_A ^ e_B on masks, A's indices first; sign 0 on overlap."""
    if a & b:
        return 0, 0
    inv = 0
    x = a
    while x:
        low = x & -x
        inv += (b & (low - 1)).bit_count()
        x ^= low
    return (-1 if inv & 1 else 1), a | b


def boundary_maskvec(mask):
    out = {}
    for pos, i in enumerate(indices_of(mask)):
        out[mask ^ (1 << i)] = 1 if pos % 2 == 0 else -1
    return out


def maskvec_of(elem):
    return {mask_of(m): c for m, c in elem.coords.items()}


def elem_of(degree, maskvec):
    return GradedElement(degree, {indices_of(m): c for m, c in maskvec.items()})


# --- circuits and the ideal --------------------------------------------------

def circuits(lattice, max_size):
    """Minimal dependent sets as masks, by size, lex-ordered.

    A size-c circuit spans a rank-(c-1) flat, so candidates are drawn from the
    flats of that rank only.
    """
    out = {}
    for c in range(3, max_size + 1):
        seen = set()
        found = []
        for f in lattice.level(c - 1):
            if len(f.members) < c:
                continue
            for sub in itertools.combinations(f.members, c):
                mask = mask_of(sub)
                if mask in seen:
                    continue
                seen.add(mask)
                if lattice.closure_rank(mask) != c - 1:
                    continue
                if all(lattice.closure_rank(mask ^ (1 << s)) == c - 1 for s in sub):
                    found.append((sub, mask))
        found.sort()
        out[c] = [m for _, m in found]
    return out


class OSIdeal:
    """Graded pieces and minimal generators of the OS ideal.

    generators_by_degree[j] lists the chosen minimal degree-j generators;
    a[j] counts them; graded_dims[j] = dim I_j.  basis_by_degree[j] keeps the
    mask-vector basis of I_j for downstream matrix building.
    """

    def __init__(self, n, rank, j_max, generators_by_degree, a, graded_dims,
                 basis_by_degree):
        self.n = n
        self.rank = rank
        self.j_max = j_max
        self.generators_by_degree = generators_by_degree
        self.a = a
        self.graded_dims = graded_dims
        self.basis_by_degree = basis_by_degree

    def a_vector(self):
        return tuple(self.a.get(j, 0) for j in range(2, self.j_max + 1))

    def all_generators(self):
        """Generators in (degree, registry order): the f_i of the resolution."""
        out = []
        for j in sorted(self.generators_by_degree):
            out.extend(self.generators_by_degree[j])
        return out


def _ideal_core(n, rank, j_max, cand_by_degree):
    dims = {0: 0, 1: 0}
    basis = {0: [], 1: []}
    gens = {}
    a = {}
    for j in range(2, j_max + 1):
        nrows = comb(n, j)
        pos = mask_position(n, j)
        prods = [e_times(t, v) for v in basis[j - 1] for t in range(n)]
        cands = cand_by_degree.get(j, [])
        vecs = prods + cands
        cols = [{pos[m]: c for m, c in v.items()} for v in vecs]
        piv, rank_j = greedy_pivots(cols, nrows, checkpoints=(len(prods),))
        dims[j] = rank_j
        basis[j] = [vecs[i] for i in piv]
        chosen = [vecs[i] for i in piv if i >= len(prods)]
        gens[j] = chosen
        a[j] = len(chosen)
    return dims, basis, gens, a


def os_ideal(lattice, j_max=None):
    """The OS ideal of a lattice, computed through degree j_max."""
    n, rank = lattice.n, lattice.rank
    if j_max is None:
        j_max = rank
    elif j_max > rank:
        warnings.warn("j_max %d exceeds rank %d; clamped (everything above the "
                      "rank vanishes)" % (j_max, rank))
        j_max = rank
    circ = circuits(lattice, j_max + 1)
    cand = {c - 1: [boundary_maskvec(m) for m in circ.get(c, [])]
            for c in circ}
    dims, basis, gens, a = _ideal_core(n, rank, j_max, cand)
    if j_max >= 2:
        assert a[2] == sum(comb(f.mobius, 2) for f in lattice.l2())
    gbd = {j: [elem_of(j, v) for v in g] for j, g in gens.items() if g}
    return OSIdeal(n, rank, j_max, gbd, a, dims, basis)


def quadratic_closure(ideal):
    """Ideal generated by the degree-2 generators alone."""
    g2 = [maskvec_of(g) for g in ideal.generators_by_degree.get(2, [])]
    dims, basis, gens, a = _ideal_core(ideal.n, ideal.rank, ideal.j_max, {2: g2})
    assert all(a[j] == 0 for j in a if j > 2)
    gbd = {2: list(ideal.generators_by_degree.get(2, []))}
    return OSIdeal(ideal.n, ideal.rank, ideal.j_max, gbd, a, dims, basis)


def graded_dim_A(ideal, j):
    """dim (E/I)_j; zero above the rank, matches Whitney numbers below."""
    if j < 0:
        return 0
    if j > ideal.rank:
        return 0
    if j not in ideal.graded_dims:
        raise ValueError("degree %d beyond computed cutoff %d" % (j, ideal.j_max))
    return comb(ideal.n, j) - ideal.graded_dims[j]
