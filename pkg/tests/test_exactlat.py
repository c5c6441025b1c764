from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amalgam import exactlat as xl
from amalgam.errors import DefinitenessError

from oracles import box_vectors, in_span, min_diagonal_over_unimodular, residue_intersection


def test_hnf_small_cases():
    assert xl.hnf([[2, 0], [1, 1]]) == [[1, 1], [0, 2]]
    assert xl.hnf([[1, 0], [0, 1]]) == [[1, 0], [0, 1]]


def test_hnf_drops_dependent_rows():
    h = xl.hnf([[2, 0], [0, 2], [1, 1]])
    assert h == [[1, 1], [0, 2]]
    # both spans agree on the box {0,1}^2 + 2Z^2 residues
    for x in range(4):
        for y in range(4):
            a = in_span([[2, 0], [0, 2]], (x, y)) or in_span([[1, 1], [0, 2]], (x, y))
            assert in_span(h, (x, y)) == (in_span([[1, 1], [0, 2]], (x, y)) or a)


unimodular = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=8)
small_rows = st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3).filter(
    lambda m: m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    != 0
)


@given(small_rows, unimodular)
@settings(max_examples=60, deadline=None)
def test_hnf_is_basis_independent(rows, ops):
    mixed = [list(r) for r in rows]
    for i, j, c in ops:
        if i != j:
            mixed[i] = [a + c * b for a, b in zip(mixed[i], mixed[j])]
    assert xl.hnf(mixed) == xl.hnf(rows)
    assert xl.hnf(xl.hnf(rows)) == xl.hnf(rows)


def test_lattice_intersect_trivial_cases():
    L = xl.lattice_from_rows([[1, 1], [0, 2]])
    assert xl.lattice_intersect(L, L) == L
    Z2 = xl.lattice_from_rows([[1, 0], [0, 1]])
    E = xl.lattice_from_rows([[2, 0], [0, 2]])
    assert xl.lattice_intersect(Z2, E) == E


def test_lattice_intersect_against_residues():
    A, B = [[1, 1], [0, 2]], [[2, 0], [0, 1]]
    got = xl.lattice_intersect(xl.lattice_from_rows(A), xl.lattice_from_rows(B))
    # frozen from residue enumeration mod 4: {(0,0),(0,2),(2,0),(2,2)}
    assert residue_intersection(A, B, 4) == {(0, 0), (0, 2), (2, 0), (2, 2)}
    assert got == xl.lattice_from_rows([[2, 0], [0, 2]])
    for x in range(4):
        for y in range(4):
            assert ((x, y) in got) == ((x, y) in residue_intersection(A, B, 4))


@given(small_rows, small_rows)
@settings(max_examples=40, deadline=None)
def test_intersection_is_largest_common_sublattice(r1, r2):
    L1, L2 = xl.lattice_from_rows(r1), xl.lattice_from_rows(r2)
    M = xl.lattice_intersect(L1, L2)
    assert xl.lattice_contains(L1, M) and xl.lattice_contains(L2, M)
    for v in [[1, 0, 0], [0, 1, 0], [3, -2, 5], [6, 6, 6]]:
        w = [x * 720 for x in v]
        assert (w in M) == (w in L1 and w in L2)


def test_lattice_index():
    Z2 = xl.lattice_from_rows([[1, 0], [0, 1]])
    E = xl.lattice_from_rows([[2, 0], [0, 2]])
    assert xl.lattice_index(E, Z2) == 4
    assert xl.lattice_index(Z2, Z2) == 1


def test_rational_lattice_json_round_trip():
    L = xl.lattice_from_rows([[1, 3], [0, 4]], den=6)
    assert xl.RatLattice.from_json(L.to_json()) == L
    assert [Fraction(1, 6), Fraction(1, 2)] in L


def test_dual_of_dual():
    L = xl.lattice_from_rows([[2, 1], [0, 3]])
    assert xl.dual_lattice(xl.dual_lattice(L)) == L


def test_lll_identity_and_small_gram():
    T, G = xl.lll_reduce([[1, 0], [0, 1]])
    assert [[abs(v) for v in r] for r in T] == [[1, 0], [0, 1]]
    T, G = xl.lll_reduce([[4, 2], [2, 4]])
    assert sorted([G[0][0], G[1][1]]) == min_diagonal_over_unimodular([[4, 2], [2, 4]]) == [4, 4]
    T, G = xl.lll_reduce([[5, 7], [7, 10]])
    assert sorted([G[0][0], G[1][1]]) == min_diagonal_over_unimodular([[5, 7], [7, 10]])


def _det(m):
    import sympy

    return sympy.Matrix(m).det()


spd4 = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=4, max_size=4).map(
    lambda a: [[sum(a[k][i] * a[k][j] for k in range(4)) + (5 if i == j else 0) for j in range(4)] for i in range(4)]
)


@given(spd4)
@settings(max_examples=30, deadline=None)
def test_lll_preserves_determinant(g):
    T, G = xl.lll_reduce(g)
    assert _det(G) == _det(g)
    assert abs(_det(T)) == 1
    assert xl.lovasz_holds(G)


def test_short_vectors_small_cases():
    assert set(xl.enumerate_short_vectors([[2, 0], [0, 2]], 2)) == {(1, 0), (0, 1)}
    assert xl.enumerate_short_vectors([[1, 0], [0, 1]], Fraction(1, 2)) == []
    got = set(xl.enumerate_short_vectors([[2, 1], [1, 2]], 2))
    assert got == box_vectors([[2, 1], [1, 2]], 2, 2) == {(1, 0), (0, 1), (1, -1)}


def test_short_vectors_rejects_indefinite():
    with pytest.raises(DefinitenessError):
        xl.enumerate_short_vectors([[1, 0], [0, -1]], 1)


@given(st.integers(2, 4), st.data())
@settings(max_examples=25, deadline=None)
def test_short_vectors_match_box_search(d, data):
    a = data.draw(st.lists(st.lists(st.integers(-2, 2), min_size=d, max_size=d), min_size=d, max_size=d))
    g = [[sum(a[k][i] * a[k][j] for k in range(d)) + (2 if i == j else 0) for j in range(d)] for i in range(d)]
    bound = data.draw(st.integers(1, 12))
    # minimum eigenvalue >= 2, so |x_i| <= sqrt(bound / 2) <= 3
    assert set(xl.enumerate_short_vectors(g, bound)) == box_vectors(g, bound, 3)


@pytest.mark.parametrize("d", [5, 6])
def test_short_vectors_match_box_search_high_dim(d):
    g = [[2 if i == j else (1 if abs(i - j) == 1 else 0) for j in range(d)] for i in range(d)]
    assert set(xl.enumerate_short_vectors(g, 4)) == box_vectors(g, 4, 2)


def test_f2_linear_algebra():
    ident = [0b01, 0b10]
    assert xl.f2_kernel(ident) == []
    assert xl.f2_rank([0, 0]) == 0
    assert len(xl.f2_kernel([0, 0])) == 2
    assert xl.f2_solve([0b01, 0b11], 0b10) is not None
    assert xl.f2_solve([0b11, 0b11], 0b01) is None
