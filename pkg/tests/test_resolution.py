"""Resolution engine tests.

The frozen tables below were fixed before the engine existed: small pencils
admit a closed form, the six-line and seven-line configurations have published
Betti diagrams, and the residue-field resolution over A provides a fully
independent route to the diagonal numbers.  Each golden test pins exact
integers; the hypothesis suite checks the structural identities on random
small configurations.
"""

from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from oslcs.arrangement import (
    Arrangement, Rank3Configuration, lattice_from_config, lattice_from_normals,
)
from oslcs.errors import ResourceCapError
from oslcs.exterior import os_ideal, quadratic_closure
from oslcs import resolution
from oslcs.resolution import (
    BettiTable, b34_formula, b44_formula, compose_entries, delta4,
    delta4_from_strand, delta4_upper_bound, hilbert_identity_check,
    linear_strand, linear_strand_lower_bound, resolve_k_over_A,
    resolve_k_over_E, resolve_over_E,
)

from test_arrangement import PENCIL3, X2_FLATS, X3_NORMALS, braid_k4


def pencil(m):
    """m >= 3 concurrent lines, pairwise distinct slopes."""
    return Arrangement([(1, 0), (0, 1)] + [(1, k) for k in range(1, m - 1)])


def ideal_of(arr):
    return os_ideal(lattice_from_normals(arr))


def table_dict(table):
    return {k: v for k, v in sorted(table.values.items()) if v}


X3_LAT = lattice_from_normals(Arrangement(X3_NORMALS))
X2_LAT = lattice_from_config(Rank3Configuration(7, X2_FLATS))
C4_LAT = lattice_from_config(Rank3Configuration(4, []))


# --- golden tables over E ----------------------------------------------------

def test_pencil3_table():
    table, maps = resolve_over_E(ideal_of(PENCIL3), i_max=4)
    assert table_dict(table) == {
        (0, 0): 1, (1, 2): 1, (2, 3): 2, (3, 4): 3, (4, 5): 4}
    # in-band zeros are reported as computed, the rank band as forced
    assert table.entry(2, 2) == (0, "computed")
    assert table.entry(1, 4) == (0, "zero")


def test_pencil_strand_closed_form():
    for m in (4, 5, 6, 7):
        st_ = linear_strand(ideal_of(pencil(m)), 3)
        for i in (2, 3):
            assert st_.betti[i] == i * comb(m + i - 2, i + 1), (m, i)


def test_x3_table():
    ideal = os_ideal(X3_LAT)
    assert ideal.a_vector() == (3, 1)
    table, maps = resolve_over_E(ideal, i_max=4)
    expected = {(0, 0): 1, (1, 2): 3, (1, 3): 1}
    for i in range(2, 5):
        expected[(i, i + 1)] = 3 * i
    for i in range(2, 5):
        expected[(i, i + 2)] = i * (i + 1) * (i * i + 5 * i - 2) // 8
    assert table_dict(table) == expected


def test_k4_table():
    ideal = ideal_of(braid_k4())
    assert ideal.a_vector() == (4, 0)
    table, _ = resolve_over_E(ideal, i_max=3)
    d = table_dict(table)
    assert d[(2, 3)] == 10
    assert (2, 4) not in d and table.entry(2, 4) == (0, "computed")
    assert d[(3, 4)] == 15
    st_ = linear_strand(ideal, 3)
    assert st_.betti == {1: 4, 2: 10, 3: 15}


def test_x2_table():
    ideal = os_ideal(X2_LAT)
    assert ideal.a_vector() == (5, 0)
    table, maps = resolve_over_E(ideal, i_max=3)
    d = table_dict(table)
    assert d[(2, 3)] == 10 and d[(2, 4)] == 15 and d[(3, 4)] == 15
    assert delta4(ideal, maps) == 10


def test_boolean_table_is_trivial():
    ideal = ideal_of(Arrangement([(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    table, maps = resolve_over_E(ideal, i_max=3)
    assert table_dict(table) == {(0, 0): 1}


# --- delta4 ------------------------------------------------------------------

def test_delta4_golden():
    x3 = os_ideal(X3_LAT)
    _, maps = resolve_over_E(x3, i_max=2, j_max=4)
    assert delta4(x3, maps) == 3
    assert delta4_from_strand(x3, linear_strand(x3, 3)) == 3
    assert delta4_upper_bound(X3_LAT) == 3

    k4 = ideal_of(braid_k4())
    assert delta4_from_strand(k4, linear_strand(k4, 3)) == 0
    assert delta4_upper_bound(lattice_from_normals(braid_k4())) == 6

    x2 = os_ideal(X2_LAT)
    assert delta4_from_strand(x2, linear_strand(x2, 3)) == 10
    assert delta4_upper_bound(X2_LAT) == 10


def test_delta4_degenerate():
    p3 = ideal_of(PENCIL3)  # one quadric: no pairs to span
    assert delta4_from_strand(p3, linear_strand(p3, 3)) == 0
    c4 = os_ideal(C4_LAT)   # no quadrics at all
    assert delta4_from_strand(c4, linear_strand(c4, 3)) == 0
    assert delta4_upper_bound(C4_LAT) == 0
    x3 = os_ideal(X3_LAT)
    with pytest.raises(ValueError):
        delta4(x3, resolve_over_E(x3, i_max=1)[1])
    with pytest.raises(ValueError):
        delta4_from_strand(x3, linear_strand(x3, 2))


def test_delta4_same_from_quadratic_closure():
    full = os_ideal(X3_LAT)
    quad = quadratic_closure(full)
    assert (delta4_from_strand(quad, linear_strand(quad, 3))
            == delta4_from_strand(full, linear_strand(full, 3)) == 3)


# --- structural properties on the fixtures -----------------------------------

FIXTURE_IDEALS = [
    ideal_of(PENCIL3), os_ideal(X3_LAT), os_ideal(X2_LAT),
    ideal_of(braid_k4()), os_ideal(C4_LAT),
]


@pytest.mark.parametrize("ideal", FIXTURE_IDEALS)
def test_differentials_compose_to_zero(ideal):
    _, maps = resolve_over_E(ideal, i_max=3)
    for outer, inner in zip(maps, maps[1:]):
        assert compose_entries(outer, inner) == {}


@pytest.mark.parametrize("ideal", FIXTURE_IDEALS)
def test_minimality(ideal):
    _, maps = resolve_over_E(ideal, i_max=3)
    for m in maps:
        for e in m.entries.values():
            assert e.degree >= 1


def test_vanishing_band_is_real():
    # recompute two fixtures with the degree cap lifted: everything at or
    # past column rank must come out zero on its own
    from oslcs.exterior import maskvec_of
    for arr, rank in ((PENCIL3, 2), (Arrangement(X3_NORMALS), 3)):
        ideal = ideal_of(arr)
        degrees, cols = [], []
        for j in sorted(ideal.generators_by_degree):
            for g in ideal.generators_by_degree[j]:
                degrees.append(j)
                cols.append({(0, m): c for m, c in maskvec_of(g).items()})
        table, _ = resolution._resolve_E(
            ideal.n, degrees, cols, 3, 3 + rank + 1, None)
        for i in range(4):
            for j in range(i + rank, 3 + rank + 2):
                assert table.values.get((i, j), 0) == 0, (i, j)


@pytest.mark.parametrize("ideal", FIXTURE_IDEALS)
def test_strand_agrees_with_full_table(ideal):
    table, _ = resolve_over_E(ideal, i_max=3)
    st_ = linear_strand(ideal, 3)
    for i in (2, 3):
        assert table.values[(i, i + 1)] == st_.betti[i]


@pytest.mark.parametrize("lat", [X3_LAT, X2_LAT, C4_LAT])
def test_strand_lower_bound_values(lat):
    ideal = os_ideal(lat)
    st_ = linear_strand(ideal, 3)
    attained2 = st_.betti[2] == linear_strand_lower_bound(lat, 2)
    for i in (2, 3):
        assert st_.betti[i] >= linear_strand_lower_bound(lat, i)
        if attained2:
            assert st_.betti[i] == linear_strand_lower_bound(lat, i)


def test_strand_bound_strict_for_k4():
    lat = lattice_from_normals(braid_k4())
    assert linear_strand_lower_bound(lat, 2) == 8  # four triple points
    st_ = linear_strand(os_ideal(lat), 2)
    assert st_.betti[2] == 10 > 8


def test_rank3_second_strand_recursion():
    # when the linear strand is minimal, the next strand follows a closed
    # recursion in n and the multiple-point counts; check the whole window
    for lat in (X3_LAT, X2_LAT):
        ideal = os_ideal(lat)
        table, _ = resolve_over_E(ideal, i_max=4)
        n = lat.n
        s = sum(comb(mu, 2) for mu in lat.l2_mu())
        for i in range(1, 4):
            nxt = table.values[(i + 1, i + 2)]
            expect = (nxt + comb(i + 1, 2) * comb(n + i - 2, i + 2)
                      - comb(n + i - 2, i) * s)
            assert table.values[(i, i + 2)] == expect, (lat.n, i)


# --- Hilbert identity --------------------------------------------------------

@pytest.mark.parametrize("lat", [X3_LAT, X2_LAT, C4_LAT])
def test_hilbert_identity(lat):
    table, _ = resolve_over_E(os_ideal(lat), i_max=3)
    hc = hilbert_identity_check(table, lat)
    assert hc and not hc.inconclusive


def test_hilbert_identity_flags_tampering():
    table, _ = resolve_over_E(os_ideal(X3_LAT), i_max=3)
    table.values[(2, 3)] += 1
    hc = hilbert_identity_check(table, X3_LAT)
    assert not hc and hc.failed


def test_hilbert_identity_inconclusive_when_shallow():
    table, _ = resolve_over_E(os_ideal(X3_LAT), i_max=2)
    hc = hilbert_identity_check(table, X3_LAT)
    assert hc and hc.inconclusive == [3]


# --- the residue-field oracle over A -----------------------------------------

def test_k_over_A_pencil3():
    t = resolve_k_over_A(ideal_of(PENCIL3), i_max=4)
    assert [t.values[(i, i)] for i in range(5)] == [2 ** (i + 1) - 1
                                                   for i in range(5)]


@pytest.mark.parametrize("ideal", FIXTURE_IDEALS)
def test_k_over_A_low_rows(ideal):
    t = resolve_k_over_A(ideal, i_max=2, j_max=ideal.rank + 2)
    n = ideal.n
    assert t.values[(0, 0)] == 1 and t.values[(1, 1)] == n
    assert all(v == 0 for (i, j), v in t.values.items() if i == 1 and j != 1)
    assert t.values[(2, 2)] == comb(n + 1, 2) + ideal.a.get(2, 0)
    for j in range(3, ideal.rank + 3):
        assert t.values.get((2, j), 0) == ideal.a.get(j, 0), j


def test_k_over_A_golden_diagonals():
    k4 = resolve_k_over_A(ideal_of(braid_k4()), i_max=4)
    assert [k4.values[(i, i)] for i in range(5)] == [1, 6, 25, 90, 301]
    x2 = resolve_k_over_A(os_ideal(X2_LAT), i_max=4)
    assert x2.values[(3, 4)] == 5
    assert x2.values[(4, 4)] == 450


@pytest.mark.parametrize("lat", [X3_LAT, X2_LAT, C4_LAT])
def test_oracle_matches_formula_routes(lat):
    ideal = os_ideal(lat)
    table, maps = resolve_over_E(ideal, i_max=3)
    st_ = linear_strand(ideal, 3)
    d4 = delta4_from_strand(ideal, st_)
    b1 = lat.n
    a2 = ideal.a.get(2, 0)
    a3 = ideal.a.get(3, 0)
    oracle = resolve_k_over_A(ideal, i_max=4)
    assert oracle.values[(3, 4)] == b34_formula(
        b1, a3, table.values[(2, 4)], d4)
    assert oracle.values[(4, 4)] == b44_formula(
        a2, b1, st_.betti[2], st_.betti[3], d4)


# --- resolving k over E ------------------------------------------------------

def test_k_over_E_diagonal():
    for n in range(1, 6):
        t, maps = resolve_k_over_E(n, i_max=4)
        for j in range(5):
            assert t.values[(j, j)] == comb(n + j - 1, j), (n, j)
        assert all(v == 0 for (i, j), v in t.values.items() if i != j)
        for outer, inner in zip(maps, maps[1:]):
            assert compose_entries(outer, inner) == {}


# --- guards and bookkeeping --------------------------------------------------

def test_input_validation():
    ideal = ideal_of(PENCIL3)
    with pytest.raises(ValueError):
        resolve_over_E(ideal, i_max=0)
    with pytest.raises(ValueError):
        resolve_over_E(ideal, i_max=2, j_max=1)


def test_column_cap(monkeypatch):
    monkeypatch.setattr(resolution, "MAX_COLUMNS", 10)
    with pytest.raises(ResourceCapError):
        resolve_over_E(os_ideal(X3_LAT), i_max=3)


def test_table_statuses():
    table, _ = resolve_over_E(os_ideal(X3_LAT), i_max=2)
    assert table.entry(1, 0) == (0, "zero")           # below the diagonal
    assert table.entry(2, 6) == (0, "zero")           # past the rank band
    assert table.entry(3, 4)[1] == "unknown"          # beyond the truncation
    assert table.get(3, 4) is None
    assert table.entry(2, 3) == (6, "computed")


# --- randomized structural suite ---------------------------------------------

@st.composite
def small_config(draw):
    n = draw(st.integers(min_value=3, max_value=6))
    flats = []
    used = set()
    for size in draw(st.lists(st.integers(min_value=3, max_value=4),
                              max_size=2)):
        pool = [h for h in range(n) if h not in used]
        if len(pool) < size:
            continue
        fl = set(draw(st.permutations(pool))[:size])
        flats.append(fl)
        used |= fl
    return Rank3Configuration(n, flats)


@settings(max_examples=25, deadline=None)
@given(small_config())
def test_random_config_structure(cfg):
    lat = lattice_from_config(cfg)
    ideal = os_ideal(lat)
    table, maps = resolve_over_E(ideal, i_max=3)
    for outer, inner in zip(maps, maps[1:]):
        assert compose_entries(outer, inner) == {}
    for m in maps:
        assert all(e.degree >= 1 for e in m.entries.values())
    assert hilbert_identity_check(table, lat)
    st_ = linear_strand(ideal, 3)
    for i in (2, 3):
        assert table.values[(i, i + 1)] == st_.betti[i]
        assert st_.betti[i] >= linear_strand_lower_bound(lat, i)
    d4 = delta4_from_strand(ideal, st_)
    assert 0 <= d4 <= delta4_upper_bound(lat)
    oracle = resolve_k_over_A(ideal, i_max=3, j_max=4)
    assert oracle.values[(2, 2)] == comb(lat.n + 1, 2) + ideal.a.get(2, 0)
    assert oracle.values.get((2, 3), 0) == ideal.a.get(3, 0)
    assert oracle.values[(3, 4)] == b34_formula(
        lat.n, ideal.a.get(3, 0), table.values[(2, 4)], d4)
