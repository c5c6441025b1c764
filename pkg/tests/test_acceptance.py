"""Acceptance gate: one group of checks per criterion, summarised at the end of the run."""
from __future__ import annotations

import random
import time
from collections import deque
from fractions import Fraction

import pytest

from amalgam import bassserre as bs
from amalgam import exactlat as xl
from amalgam import quatorders as qo
from amalgam import treequot as tq
from amalgam import unitgroups as ug
from amalgam.cli import compute
from amalgam.realcyc import build_field

from oracles import box_vectors, residue_intersection

P = bs.parse_presentation
LEVELS = [8, 12, 16, 20, 24, 28, 32, 36, 40, 48, 60]

_timed: dict[tuple[int, str], tuple[object, float]] = {}
_algs: dict[int, qo.QuatAlgebra] = {}


def timed(n: int, flavor: str):
    """Fresh pipeline run with its wall time (field construction included once per n)."""
    key = (n, flavor)
    if key not in _timed:
        t0 = time.perf_counter()
        if n not in _algs:
            _algs[n] = qo.QuatAlgebra(build_field(n))
        r = compute(n, flavor, alg=_algs[n])
        _timed[key] = (r, time.perf_counter() - t0)
    return _timed[key]


def same(got: bs.Presentation, text: str) -> bool:
    return bs.presentations_equivalent(got, P(text))


@pytest.fixture(scope="module", autouse=True)
def warm_kernel():
    # load the compiled enumeration kernel once, outside the per-level timings
    xl.enumerate_short_vectors([[2, 0], [0, 2]], 2)


# -- 1 ----------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("n, q1", list(zip(LEVELS, [3, 3, 3, 5, 3, 9, 3, 9, 5, 3, 17])))
def test_residue_fields(n, q1):
    t0 = time.perf_counter()
    ctx = build_field(n)
    assert ctx.q + 1 == q1
    assert time.perf_counter() - t0 < 1.0


# -- 2 ----------------------------------------------------------------------------

INDICES = {8: (1, 2), 12: (2, 1), 16: (1, 2), 20: (2, 1), 24: (2, 1), 28: (2, 2), 32: (1, 2), 36: (2, 1), 40: (2, 1), 48: (2, 1), 60: (2, 2)}


@pytest.mark.criterion(2)
@pytest.mark.parametrize("n", LEVELS)
def test_flavor_indices(n):
    t0 = time.perf_counter()
    ctx = build_field(n)
    got = (tq.flavor_index(ctx, "gamma1", "gammaplus"), tq.flavor_index(ctx, "gammaplus", "gamma0"))
    assert got == INDICES[n]
    assert time.perf_counter() - t0 < 10.0


# -- 3 ----------------------------------------------------------------------------

SMALL = [
    (8, "gamma1", "S4 *_{D4} S4", "-1/24"),
    (8, "gamma0", "S4 *_{D4} D8", "-1/48"),
    (12, "gamma1", "A4 *_{D2} D6", "-1/12"),
    (12, "gamma0", "S4 *_{D4} D12", "-1/24"),
    (16, "gamma1", "S4 *_{D4} D8 *_{D4} S4", "-5/48"),
    (16, "gamma0", "S4 *_{D4} D16", "-5/96"),
    (24, "gamma1", "*_{D4}{S4, S4, D12}", "-1/8"),
    (24, "gamma0", "S4 *_{D4} D24", "-1/16"),
]


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n, flavor, pres, chi", SMALL)
def test_small_presentations(n, flavor, pres, chi):
    r, secs = timed(n, flavor)
    assert same(r.presentation, pres), str(r.presentation)
    assert r.mass.chi == Fraction(chi)
    assert secs < 60


# -- 4 ----------------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_level20():
    r1, s1 = timed(20, "gamma1")
    r0, s0 = timed(20, "gamma0")
    assert same(r1.presentation, "A5 *_{A4} A5 *_{D2} D10") and r1.mass.chi == Fraction(-1, 4)
    assert same(r0.presentation, "A5 *_{A4} S4 *_{D4} D20") and r0.mass.chi == Fraction(-1, 8)
    rep = bs.infinite_index_report(r0.hgraph, r0.clifford)
    assert rep.infinite_in_pi1 and rep.infinite_in_torsion_part and not rep.equal
    assert s1 + s0 < 120


# -- 5 ----------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_level28():
    r0, s0 = timed(28, "gamma0")
    rp, sp = timed(28, "gammaplus")
    r1, s1 = timed(28, "gamma1")
    assert same(r0.presentation, "D28 *_{C28} D28 *_{D4} S4 * C2^{*2}") and r0.mass.chi == Fraction(-13, 12)
    assert rp.mass.genus == 2 and rp.mass.chi == Fraction(-13, 6)
    assert same(rp.presentation, "S4 *_{D4} D28 *_{C28} D28 *_{D4} S4 * Z^{*2}")
    assert r1.mass.genus == 4 and r1.mass.chi == Fraction(-13, 3)
    assert same(r1.presentation, "A4 *_{D2} D14 *_{C14} D14 *_{D2} A4 * Z^{*4}")
    assert len(r0.graph.vertices) == 3
    assert s0 + sp + s1 < 600


# -- 6 ----------------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_level36():
    r0, s0 = timed(36, "gamma0")
    r1, s1 = timed(36, "gamma1")
    assert same(r0.presentation, "D9 *_{C2} D3 * C3 * S4 *_{D4} D36 * Z")
    assert r0.mass.chi == Fraction(-217, 72) and r0.mass.genus == 1
    assert same(r1.presentation, "C9 * C3^{*3} * A4 *_{D2} D18 * Z^{*3}") and r1.mass.genus == 3
    assert s0 + s1 < 900


# -- 7 (stretch) -----------------------------------------------------------------


@pytest.mark.stretch
@pytest.mark.criterion(7)
def test_level32():
    r, _ = timed(32, "gamma0")
    assert r.mass.genus == 16 and r.mass.chi == Fraction(-1455, 64)
    assert same(r.presentation, "D32 *_{D4} S4 * C3^{*4} * C2^{*8} * Z^{*16}")
    assert len(r.graph.vertices) == 58
    assert sum(1 for V in r.graph.vertices if V.stabilizer.order == 1) == 40


@pytest.mark.stretch
@pytest.mark.criterion(7)
def test_level40():
    r0, _ = timed(40, "gamma0")
    assert r0.mass.genus == 16 and r0.mass.chi == Fraction(-287, 16)
    r1, _ = timed(40, "gamma1")
    assert r1.mass.genus == 34
    assert [str(x) for t in r1.presentation.trees for x in t.nodes if x.with_z] == ["(C3 ⊕ Z)"]


@pytest.mark.stretch
@pytest.mark.criterion(7)
def test_level48():
    r0, _ = timed(48, "gamma0")
    assert r0.mass.genus == 8 and r0.mass.chi == Fraction(-365, 32)
    rep = bs.infinite_index_report(r0.hgraph, r0.clifford)
    assert rep.infinite_in_pi1 and rep.torsion_part_proper
    r1, _ = timed(48, "gamma1")
    assert r1.mass.genus == 20


@pytest.mark.stretch
@pytest.mark.criterion(7)
def test_level60():
    r, _ = timed(60, "gamma0")
    assert r.mass.genus == 5 and r.mass.chi == Fraction(-15, 2)
    assert len(r.graph.vertices) == 7
    assert [str(x) for t in r.presentation.trees for x in t.nodes if x.with_z] == ["(D60 ⊕ Z)"]


# -- 8 ----------------------------------------------------------------------------

PROPERTY_LEVELS = [8, 12, 16, 20, 24]


def _bipartite(g) -> bool:
    colour = {0: 0}
    dq = deque([0])
    while dq:
        v = dq.popleft()
        for d in g.darts_at(v):
            if d.target not in colour:
                colour[d.target] = 1 - colour[v]
                dq.append(d.target)
            elif colour[d.target] == colour[v]:
                return False
    return True


@pytest.mark.criterion(8)
def test_property_suite():
    t0 = time.perf_counter()
    for n in PROPERTY_LEVELS:
        alg = _algs.setdefault(n, qo.QuatAlgebra(build_field(n)))
        ctx = alg.ctx
        graphs = {}
        for fl in ug.FLAVORS:
            r, _ = timed(n, fl)
            g = graphs[fl] = r.graph
            for V in g.vertices:
                assert sum(V.stabilizer.order // d.stabilizer.order for d in g.darts_at(V.id)) == ctx.q + 1
            for d in g.darts:
                assert len(set(tq.edge_source_image(g, d))) == len(set(tq.edge_image(g, d))) == d.stabilizer.order
            if fl != "gamma0":
                assert _bipartite(g) and not g.half_edges()
            assert r.mass.chi == r.presentation.chi()
        for fine, coarse in (("gamma1", "gammaplus"), ("gammaplus", "gamma0")):
            rep = tq.cover_check(alg, graphs[fine], graphs[coarse])
            assert rep.degree == rep.expected_degree == tq.flavor_index(ctx, fine, coarse)
            if fine == "gammaplus":
                assert rep.etale
            else:
                # ramified exactly where the gamma1 stabiliser is a proper subgroup
                want = [V.id for V in graphs[coarse].vertices if tq.stabilizer_vertex(alg, V.order, "gamma1").order < V.stabilizer.order]
                assert sorted(rep.ramified) == want
        gates = qo.build_gates(alg)
        assert gates.t.nrd() == ctx.z + 2
        x = alg.one
        for _ in range(n // 2):
            x = alg.mul(x, gates.t)
        y = alg.mul(x, gates.h)
        assert alg.mul(y, y) == alg.mul(alg.element(-y.nrd()), alg.element(0, 0, 1))
        assert graphs["gamma0"].vertices[0].stabilizer.label == ug.GroupLabel("S4")
        kind, ident = graphs["gamma0"].t_mark
        T = graphs["gamma0"].vertices[ident].stabilizer if kind == "vertex" else graphs["gamma0"].half_groups[ident]
        assert T.order % (2 * n) == 0
        r0, _ = timed(n, "gamma0")
        assert bs.presentations_equivalent(r0.clifford, bs.clifford_expected(n))
    assert time.perf_counter() - t0 < 60


# -- 9 ----------------------------------------------------------------------------


@pytest.mark.criterion(9)
def test_short_vectors_against_box_search():
    rng = random.Random(7)
    for d in range(1, 7):
        for _ in range(3):
            a = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(d)]
            g = [[sum(a[k][i] * a[k][j] for k in range(d)) + (2 if i == j else 0) for j in range(d)] for i in range(d)]
            bound = rng.randint(1, 8 if d > 4 else 20)
            radius = 2 if d > 4 else 3
            if bound > 2 * radius * radius:
                bound = 2 * radius * radius
            assert set(xl.enumerate_short_vectors(g, bound)) == box_vectors(g, bound, radius)


@pytest.mark.criterion(9)
def test_hnf_under_unimodular_changes():
    rng = random.Random(11)
    for _ in range(40):
        d = rng.randint(2, 5)
        rows = [[rng.randint(-9, 9) for _ in range(d)] for _ in range(d)]
        mixed = [r[:] for r in rows]
        for _ in range(10):
            i, j = rng.sample(range(d), 2)
            c = rng.randint(-3, 3)
            mixed[i] = [x + c * y for x, y in zip(mixed[i], mixed[j])]
        rng.shuffle(mixed)
        assert xl.hnf(mixed) == xl.hnf(rows)


def _contains_m(a, b, d, m):
    """span{(a, b), (0, d)} contains m Z^2."""
    return m % a == 0 and m % d == 0 and ((m // a) * b) % d == 0


@pytest.mark.criterion(9)
def test_intersection_against_residues():
    rng = random.Random(5)
    m = 12
    divs = [1, 2, 3, 4, 6, 12]
    bases = [[[a, b], [0, d]] for a in divs for d in divs for b in range(a) if _contains_m(a, b, d, m)]
    for _ in range(40):
        A, B = rng.sample(bases, 2)
        L = xl.lattice_intersect(xl.lattice_from_rows(A), xl.lattice_from_rows(B))
        got = {(x, y) for x in range(m) for y in range(m) if [x, y] in L}
        assert got == residue_intersection(A, B, m)
