"""Central hyperplane arrangements and their intersection lattices.

Two input forms normalize to the same lattice structure: exact normal vectors
(any rank, up to the enumeration cap) and rank-3 line configurations given
combinatorially by their multiple points.  Flats are stored with member
bitmasks; levels are sorted by mask so every enumeration is deterministic.
"""

from __future__ import annotations

import itertools
from math import comb

from ._linalg import Echelon, Q
from .errors import InputError, ResourceCapError

# flats are 16-bit member sets; raising this needs a wider closure loop
LATTICE_CAP = 16


def to_rational(x):
    """Exact conversion; floats are rejected so no rounding can sneak in."""
    if isinstance(x, float):
        raise InputError("floating-point input rejected; use p/q strings or ints")
    try:
        return Q(x)
    except (TypeError, ValueError) as e:
        raise InputError("not an exact rational: %r" % (x,)) from e


class Arrangement:
    """Simple central arrangement: one exact normal row per hyperplane."""

    def __init__(self, normals):
        rows = [tuple(to_rational(x) for x in row) for row in normals]
        if not rows:
            raise InputError("empty arrangement")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or 0 in widths:
            raise InputError("normal rows must share one positive length")
        seen = {}
        for i, r in enumerate(rows):
            if not any(r):
                raise InputError("zero normal vector at row %d" % i)
            lead = next(x for x in r if x)
            canon = tuple(x / lead for x in r)
            if canon in seen:
                raise InputError(
                    "rows %d and %d are proportional; arrangement must be simple"
                    % (seen[canon], i))
            seen[canon] = i
        self.normals = rows
        self.n = len(rows)
        self.dim = widths.pop()
        ech = Echelon()
        for r in rows:
            ech.add({c: v for c, v in enumerate(r) if v})
        self.rank = ech.rank


class Rank3Configuration:
    """Rank-3 line configuration given by its multiple points.

    flats lists the subsets of lines passing through a common point, one per
    point with 3 or more lines; plain double points are implicit.
    """

    def __init__(self, n, flats):
        if n < 1:
            raise InputError("need at least one line")
        self.n = n
        canon = []
        for fl in flats:
            s = frozenset(fl)
            if len(s) < 3:
                raise InputError("multiple points need at least 3 lines: %r" % (sorted(fl),))
            if not all(isinstance(i, int) and 0 <= i < n for i in s):
                raise InputError("line index out of range in %r" % (sorted(fl),))
            canon.append(s)
        for a, b in itertools.combinations(canon, 2):
            if len(a & b) >= 2:
                raise InputError(
                    "flats %r and %r share two lines; they must be one flat"
                    % (sorted(a), sorted(b)))
        self.flats = canon


class Flat:
    """Lattice flat: member set, rank, and Möbius value."""

    __slots__ = ("mask", "members", "rank", "mobius")

    def __init__(self, mask, rank, mobius=None):
        self.mask = mask
        self.members = tuple(i for i in range(mask.bit_length()) if mask >> i & 1)
        self.rank = rank
        self.mobius = mobius

    def __repr__(self):
        return "Flat(%r, rank=%d, mu=%r)" % (list(self.members), self.rank, self.mobius)


class IntersectionLattice:
    """Flats grouped by rank, with Möbius values and Whitney numbers."""

    def __init__(self, n, levels):
        self.n = n
        self.by_rank = levels          # levels[r] sorted by member mask
        self.rank = len(levels) - 1
        _fill_mobius(levels)
        self.whitney = tuple(
            (-1) ** r * sum(f.mobius for f in lvl) for r, lvl in enumerate(levels))
        assert all(b >= 0 for b in self.whitney)
        assert self.rank == 0 or self.whitney[1] == n

    def flats(self):
        for lvl in self.by_rank:
            yield from lvl

    def level(self, r):
        return self.by_rank[r] if 0 <= r <= self.rank else []

    def l2(self):
        return self.level(2)

    def l2_mu(self):
        """Möbius values of codimension-2 flats, in flat order."""
        return [f.mobius for f in self.l2()]

    def closure_rank(self, mask):
        """Rank of the smallest flat containing the given member set."""
        for r, lvl in enumerate(self.by_rank):
            for f in lvl:
                if mask & ~f.mask == 0:
                    return r
        raise ValueError("no flat contains mask %x" % mask)


def _fill_mobius(levels):
    chain = [f for lvl in levels for f in lvl]
    for f in chain:
        if f.rank == 0:
            f.mobius = 1
        else:
            f.mobius = -sum(g.mobius for g in chain
                            if g.rank < f.rank and g.mask & ~f.mask == 0)


def lattice_from_normals(arr):
    """Intersection lattice by breadth-first closure over exact rationals."""
    if arr.n > LATTICE_CAP:
        raise ResourceCapError(
            "%d hyperplanes exceeds the closure cap of %d" % (arr.n, LATTICE_CAP))
    n = arr.n
    rowvecs = [{c: v for c, v in enumerate(r) if v} for r in arr.normals]
    levels = [[Flat(0, 0)]]
    spans = {0: Echelon()}
    current = {0: spans[0]}
    r = 0
    while current:
        nxt = {}
        for mask, ech in current.items():
            for h in range(n):
                if mask >> h & 1:
                    continue
                ext = Echelon()
                ext.rows = {p: dict(row) for p, row in ech.rows.items()}
                ext.add(rowvecs[h])
                new_mask = 0
                for g in range(n):
                    if mask >> g & 1 or g == h or not ext.reduce(rowvecs[g]):
                        new_mask |= 1 << g
                if new_mask not in nxt:
                    nxt[new_mask] = ext
        r += 1
        if not nxt:
            break
        levels.append([Flat(m, r) for m in sorted(nxt)])
        current = nxt
    lat = IntersectionLattice(n, levels)
    if lat.rank >= 2:
        assert lat.whitney[2] == comb(n, 2) - sum(comb(f.mobius, 2) for f in lat.l2())
    return lat


def lattice_from_config(cfg):
    """Lattice of a rank-3 configuration: listed points, implicit double
    points, and a top flat when the configuration is essential."""
    n = cfg.n
    masks = []
    for fl in cfg.flats:
        m = 0
        for i in fl:
            m |= 1 << i
        masks.append(m)
    full = (1 << n) - 1
    l2 = set(masks)
    for i, j in itertools.combinations(range(n), 2):
        pair = 1 << i | 1 << j
        if not any(pair & ~m == 0 for m in masks):
            l2.add(pair)
    levels = [[Flat(0, 0)], [Flat(1 << i, 1) for i in range(n)]]
    if n >= 2:
        levels.append([Flat(m, 2) for m in sorted(l2)])
        if len(l2) > 1:
            assert n >= 3
            levels.append([Flat(full, 3)])
    lat = IntersectionLattice(n, levels)
    for fl, m in zip(cfg.flats, masks):
        got = next(f.mobius for f in lat.l2() if f.mask == m)
        assert got == len(fl) - 1
    return lat


def essential_rank(arr):
    """Rank of the normal matrix; the resolution-degree bound downstream."""
    ech = Echelon()
    for r in arr.normals:
        ech.add({c: v for c, v in enumerate(r) if v})
    return ech.rank
