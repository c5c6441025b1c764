from __future__ import annotations

import itertools

import pytest

from amalgam import quatorders as qo
from amalgam import realcyc as rc
from amalgam import unitgroups as ug
from amalgam.errors import ClassificationError
from amalgam.unitgroups import GroupLabel

from conftest import algebra, field, quotient, seed


def L(s: str) -> GroupLabel:
    return GroupLabel.parse(s)


def test_norm_one_elements_of_seed():
    assert len(ug.elements_of_norm(algebra(8), seed(8), field(8).one)) == 24
    assert len(ug.elements_of_norm(algebra(12), seed(12), field(12).one)) == 12
    alg = algebra(20)
    found = {ug.canonical(x) for x in ug.elements_of_norm(alg, seed(20), field(20).one)}
    for u in alg.units:
        assert ug.canonical(u) in found


def test_seed_stabilizers():
    assert ug.unit_group(algebra(12), seed(12), "gamma1").label == L("A4")
    assert ug.unit_group(algebra(12), seed(12), "gammaplus").label == L("S4")
    for fl in ug.FLAVORS[:2]:
        assert ug.unit_group(algebra(8), seed(8), fl).label == L("S4")


def test_far_vertex_group_in_level_20():
    g = quotient(20, "gamma1")
    far = [V for V in g.vertices if V.stabilizer.label == L("A5")]
    assert far
    for V in far:
        assert ug.unit_group(algebra(20), V.order, "gammaplus").label == L("A5")


@pytest.mark.parametrize("n", [8, 12, 16, 20, 24, 28, 36])
def test_seed_is_octahedral(n):
    G1 = ug.unit_group(algebra(n), seed(n), "gamma1")
    Gp = ug.unit_group(algebra(n), seed(n), "gammaplus")
    assert Gp.label == L("S4")
    ratio = Gp.order // G1.order
    assert Gp.order % G1.order == 0 and ratio & (ratio - 1) == 0


@pytest.mark.parametrize("n", [12, 20, 28, 36])
def test_clifford_order_is_dihedral(n):
    alg = algebra(n)
    T = qo.build_gates(alg).T_order
    assert ug.unit_group(alg, T, "gammaplus").label == L(f"D{n}")


def test_group_tables_are_groups():
    G = ug.unit_group(algebra(20), seed(20), "gammaplus")
    T = G.mul_table
    e = G.identity
    for x in range(G.order):
        assert T[e][x] == x == T[x][e]
        assert T[x][G.inverse_index(x)] == e
    for x, y, z in itertools.islice(itertools.product(range(G.order), repeat=3), 0, None, 97):
        assert T[T[x][y]][z] == T[x][T[y][z]]


def test_identify_group_examples():
    alg = algebra(28)
    g = qo.build_gates(alg)
    assert ug.identify_group(ug.group_closure([g.t])) == L("C28")
    assert ug.identify_group(ug.group_closure([g.t, alg.element(0, 0, 1)])) == L("D28")
    S4 = ug.unit_group(algebra(8), seed(8), "gamma1")
    assert ug.identify_group(S4) == L("S4")
    assert sorted(S4.element_orders()) == sorted([1] + [2] * 9 + [3] * 8 + [4] * 6)
    A4 = ug.unit_group(algebra(12), seed(12), "gamma1")
    assert ug.identify_group(A4) == L("A4") and 6 not in A4.element_orders()


def test_identify_group_rejects_unknown_orders():
    # C2 x C4 has no place among the finite rotation groups
    elems = [(a, b) for a in range(2) for b in range(4)]
    table = [[elems.index(((a + c) % 2, (b + d) % 4)) for c, d in elems] for a, b in elems]
    G = ug.FiniteQuotientGroup(list(range(8)), table, ug.TRIVIAL, None)
    with pytest.raises(ClassificationError):
        ug.identify_group(G)


def test_su_inflation():
    assert ug.su_inflate(L("D14")) == L("Q56")
    assert ug.su_inflate(L("C14")) == L("C28")
    assert ug.su_inflate(L("D2")) == L("Q8")
    assert ug.su_inflate(L("S4")) == L("E48")
    for lab in ("C3", "D5", "A4", "S4", "A5"):
        assert ug.su_inflate(L(lab)).order == 2 * L(lab).order


def test_label_parsing_round_trip():
    for s in ("C1", "C28", "D2", "D60", "A4", "S4", "A5", "Q8", "E24"):
        assert str(L(s)) == s
    with pytest.raises(ValueError):
        L("X5")


def test_principality_across_flavors():
    alg = algebra(8)
    g = quotient(8, "gamma1")
    a, b = g.vertices[0].order, g.vertices[1].order
    assert ug.principality_with_class(alg, a, a, "gamma1") == alg.one
    assert ug.principality_with_class(alg, a, b, "gamma1") is None
    gamma = ug.principality_with_class(alg, a, b, "gamma0")
    assert gamma is not None
    assert rc.val_p(field(8), gamma.nrd()) % 2 == 1
    assert qo.conjugate_lattice_by(alg, gamma, b) == a


def test_clifford_vertex_is_separate_in_level_12():
    alg = algebra(12)
    T = qo.build_gates(alg).T_order
    for fl in ug.FLAVORS:
        assert ug.principality_with_class(alg, seed(12), T, fl) is None
