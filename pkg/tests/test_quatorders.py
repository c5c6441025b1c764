from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amalgam import exactlat as xl
from amalgam import quatorders as qo

from conftest import algebra, field, seed

HALF = Fraction(1, 2)


def test_quaternion_identities():
    alg = algebra(12)
    one, i, j, k = alg.units
    h = alg.element(0, -1, 0, -1)
    assert h.nrd() == field(12).element(2)
    ij = alg.mul(i, j)
    assert ij == k
    assert ij.conj() == -ij == alg.mul(j, i)


elems = st.lists(st.integers(-4, 4), min_size=8, max_size=8)


@given(elems, elems)
@settings(max_examples=40, deadline=None)
def test_norm_is_multiplicative(a, b):
    alg = algebra(12)
    x, y = qo.QuatElement(alg, a), qo.QuatElement(alg, b)
    assert alg.mul(x, y).nrd() == x.nrd() * y.nrd()
    assert alg.mul(x, y).conj() == alg.mul(y.conj(), x.conj())


def test_standard_order_contents():
    a8 = algebra(8)
    z8 = field(8).z
    M8 = seed(8)
    assert a8.element(z8 * HALF, z8 * HALF).vector() in M8
    a12 = algebra(12)
    z12 = field(12).z
    assert a12.element((1 + z12) * HALF, (1 + z12) * HALF).vector() in seed(12)
    for n in (8, 12, 20):
        hurwitz = algebra(n).element(HALF, HALF, HALF, HALF)
        assert hurwitz.nrd() == field(n).one
        assert hurwitz.vector() in seed(n)


@pytest.mark.parametrize("n", [8, 12, 16, 20, 24, 28, 36])
def test_standard_order_is_maximal(n):
    alg = algebra(n)
    M = seed(n)
    assert qo.reduced_discriminant_is_trivial(alg, M)
    assert xl.is_positive_definite(qo._trace_gram(alg))


def test_lipschitz_hurwitz_order_is_not_maximal():
    alg = algebra(8)
    assert not qo.reduced_discriminant_is_trivial(alg, qo.lipschitz_hurwitz_order(alg))


@pytest.mark.parametrize("n, count", [(8, 3), (20, 5), (36, 9)])
def test_number_of_neighbours(n, count):
    assert len(qo.left_ideals_norm_p(algebra(n), seed(n))) == count


@pytest.mark.parametrize("n", [8, 20])
def test_neighbour_orders(n):
    alg, M = algebra(n), seed(n)
    q = field(n).q
    for I in qo.left_ideals_norm_p(alg, M):
        assert qo.nrd_val_of_left_ideal(alg, I, M) == 1
        M2 = qo.right_order(alg, I)
        assert qo.left_order(alg, I) == M
        assert qo.reduced_discriminant_is_trivial(alg, M2)
        E = qo.eichler_order(M, M2)
        assert xl.lattice_index(E, M) == q
        J = qo.bar_ideal(alg, I)
        assert qo.right_order(alg, J) == qo.left_order(alg, I)
        assert qo.bar_ideal(alg, J) == I
        assert xl.lattice_sum(I, J) == E
        assert qo.nrd_val_of_left_ideal(alg, J, M2) == 1


def test_ideal_index_in_order():
    alg, M = algebra(8), seed(8)
    I = qo.left_ideals_norm_p(alg, M)[0]
    assert xl.lattice_index(I, M) == field(8).q ** 2


def test_connecting_ideal_distances():
    alg, M = algebra(8), seed(8)
    I, k = qo.connecting_ideal(alg, M, M)
    assert k == 0 and I == M
    I1 = qo.left_ideals_norm_p(alg, M)[0]
    M1 = qo.right_order(alg, I1)
    assert qo.connecting_ideal(alg, M, M1)[1] == 1
    # step away from M along a non-backtracking path
    back = qo.bar_ideal(alg, I1)
    nxt = next(J for J in qo.left_ideals_norm_p(alg, M1) if J != back)
    M2 = qo.right_order(alg, nxt)
    assert qo.connecting_ideal(alg, M, M2)[1] == 2


@pytest.mark.parametrize("n", [8, 12, 16, 20])
def test_gate_relations(n):
    alg, ctx = algebra(n), field(n)
    g = qo.build_gates(alg)
    t, h = g.t, g.h
    j = alg.element(0, 0, 1)
    assert t.nrd() == ctx.z + 2
    # j t j^-1 = t^-1 up to scalars
    assert alg.mul(alg.mul(alg.mul(j, t), j.inverse()), t).is_scalar()
    assert alg.mul(j, t) == alg.mul(alg.element(ctx.z + 2), j) - alg.mul(t, j)
    x = alg.one
    for _ in range(n // 2):
        x = alg.mul(x, t)
    y = alg.mul(x, h)
    # (t^(n/2) h)^2 = -nrd(t^(n/2) h) j, so the square is j up to F^x
    assert alg.mul(y, y) == alg.mul(alg.element(-y.nrd()), j)


def test_clifford_order_maximality():
    assert qo.reduced_discriminant_is_trivial(algebra(12), qo.build_gates(algebra(12)).T_order)
    a8 = algebra(8)
    # reduced discriminant p^2 with N(p) = 2
    assert qo.discriminant_ratio(a8, qo.build_gates(a8).T_order) == 16


def test_residue_algebra_spans_left_ideals():
    alg, M = algebra(20), seed(20)
    ra = qo.residue_algebra(alg, M)
    ideals = qo.left_ideals_norm_p(alg, M, ra)
    assert len(set(ideals)) == field(20).q + 1
