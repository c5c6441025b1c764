"""Quotients of the Bruhat-Tits tree at p by Gamma1, Gamma+ and Gamma0.

Vertices of the tree are maximal orders agreeing with the standard order
away from p.  The exploration keeps one representative order per orbit;
every new representative is a tree neighbour of an older one, so the
representatives span a subtree.  Directed edges ("darts") at a vertex are
the orbits of its stabiliser on the q+1 ideals of norm p.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import exactlat as xl
from . import quatorders as qo
from . import unitgroups as ug
from .errors import BudgetError, InternalError, StructureError
from .quatorders import QuatAlgebra, QuatElement
from .realcyc import FieldContext

log = logging.getLogger(__name__)


@dataclass
class QuotientVertex:
    id: int
    order: xl.RatLattice
    stabilizer: ug.FiniteQuotientGroup
    depth: int
    parent: int | None
    marks: set[str] = field(default_factory=set)
    # per-vertex local data
    residue: qo.ResidueAlgebra | None = field(default=None, repr=False)
    ideals: list[xl.RatLattice] = field(default_factory=list, repr=False)
    spaces: list[tuple[int, ...]] = field(default_factory=list, repr=False)
    perms: list[list[int]] = field(default_factory=list, repr=False)


@dataclass
class Dart:
    """A directed quotient edge: a stabiliser orbit of norm-p ideals at ``source``."""

    id: int
    source: int
    ideal_index: int  # least member of the orbit in the source's ideal list
    orbit: list[int]
    target: int
    transporter: QuatElement  # gamma with gamma O_R(I) gamma^-1 = order of target
    stabilizer: ug.FiniteQuotientGroup
    reverse: int = -1

    @property
    def half(self) -> bool:
        return self.reverse == self.id


@dataclass
class QuotientGraph:
    n: int
    flavor: str
    vertices: list[QuotientVertex]
    darts: list[Dart]
    half_groups: dict[int, ug.FiniteQuotientGroup] = field(default_factory=dict)
    inverters: dict[int, QuatElement] = field(default_factory=dict)
    t_mark: tuple[str, int] | None = None

    def edges(self) -> list[Dart]:
        """One dart per geometric edge (half-edges included once)."""
        return [d for d in self.darts if d.id <= d.reverse]

    def regular_edges(self) -> list[Dart]:
        return [d for d in self.darts if d.id < d.reverse]

    def half_edges(self) -> list[Dart]:
        return [d for d in self.darts if d.half]

    def darts_at(self, v: int) -> list[Dart]:
        return [d for d in self.darts if d.source == v]

    @property
    def genus(self) -> int:
        return 1 + len(self.regular_edges()) - len(self.vertices)


# ---------------------------------------------------------------------------
# local data at a vertex


def _apply_bits(rows: list[int], v: int) -> int:
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= rows[i]
        v >>= 1
        i += 1
    return out


def _generators(G: ug.FiniteQuotientGroup) -> list[int]:
    """A small generating set, chosen greedily in element order."""
    e = G.identity
    gens: list[int] = []
    span = {e}
    for i in range(G.order):
        if i in span:
            continue
        gens.append(i)
        span = {e}
        frontier = [e]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = G.mul_table[x][s]
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(span) == G.order:
            break
    return gens


def _prepare_vertex(alg: QuatAlgebra, V: QuotientVertex) -> None:
    ra = qo.residue_algebra(alg, V.order)
    V.residue = ra
    V.ideals = qo.left_ideals_norm_p(alg, V.order, ra)
    V.spaces = [tuple(ra.space_of(I)) for I in V.ideals]
    lookup = {sp: i for i, sp in enumerate(V.spaces)}
    G = V.stabilizer
    m = len(V.ideals)

    def perm_of(g: QuatElement) -> list[int]:
        rows = ra.conjugation_action(g, g.inverse())
        out = []
        for sp in V.spaces:
            img = tuple(xl.f2_rref([_apply_bits(rows, v) for v in sp]))
            if img not in lookup:
                raise InternalError("stabiliser element does not permute the ideals of norm p")
            out.append(lookup[img])
        return out

    perms: list[list[int] | None] = [None] * G.order
    e = G.identity
    perms[e] = list(range(m))
    gens = _generators(G)
    gperm = {s: perm_of(G.elements[s]) for s in gens}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.mul_table[x][s]
                if perms[y] is None:
                    px, ps = perms[x], gperm[s]
                    perms[y] = [px[ps[i]] for i in range(m)]
                    nxt.append(y)
        frontier = nxt
    if any(p is None for p in perms):
        raise InternalError("generators do not generate the stabiliser")
    V.perms = perms  # type: ignore[assignment]


def _orbits(V: QuotientVertex) -> list[list[int]]:
    m = len(V.ideals)
    seen = [False] * m
    out = []
    for i in range(m):
        if seen[i]:
            continue
        orb = sorted({p[i] for p in V.perms})
        for j in orb:
            seen[j] = True
        out.append(orb)
    return out


def ideal_index(alg: QuatAlgebra, V: QuotientVertex, I: xl.RatLattice) -> int:
    sp = tuple(V.residue.space_of(I))
    try:
        return V.spaces.index(sp)
    except ValueError:
        raise StructureError("lattice is not an ideal of norm p of this order") from None


# ---------------------------------------------------------------------------
# orbit identification


class OrbitFinder:
    """Locate the quotient vertex of an arbitrary tree order."""

    def __init__(self, alg: QuatAlgebra, flavor: str):
        self.alg = alg
        self.flavor = flavor
        self.reps: list[QuotientVertex] = []
        self.tests = 0

    def invariant(self, order: xl.RatLattice, group: ug.FiniteQuotientGroup) -> tuple:
        return (group.order, str(group.label))

    def find(self, order: xl.RatLattice, group: ug.FiniteQuotientGroup, parity: int | None = None) -> tuple[int, QuatElement] | None:
        inv = self.invariant(order, group)
        for V in self.reps:
            if parity is not None and self.flavor != "gamma0" and V.depth % 2 != parity:
                continue
            if self.invariant(V.order, V.stabilizer) != inv:
                continue
            self.tests += 1
            gamma = ug.principality_with_class(self.alg, V.order, order, self.flavor)
            if gamma is not None:
                return V.id, gamma
        return None


def stabilizer_vertex(alg: QuatAlgebra, O: xl.RatLattice, flavor: str) -> ug.FiniteQuotientGroup:
    """Vertex stabiliser: Gamma0 and Gamma+ agree on vertices."""
    return ug.unit_group(alg, O, "gamma1" if flavor == "gamma1" else "gammaplus")


# ---------------------------------------------------------------------------
# exploration


def bfs_quotient(
    alg: QuatAlgebra,
    flavor: str,
    seed: xl.RatLattice | None = None,
    max_vertices: int = 500,
    progress: Callable[[str], None] | None = None,
) -> QuotientGraph:
    """Quotient h-graph of groups of the flavor's group acting on the tree."""
    if flavor not in ug.FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    ctx = alg.ctx
    seed = seed if seed is not None else qo.standard_order(alg)
    finder = OrbitFinder(alg, flavor)
    vertices: list[QuotientVertex] = []
    darts: list[Dart] = []
    graph = QuotientGraph(ctx.n, flavor, vertices, darts)

    def add_vertex(order, group, depth, parent) -> QuotientVertex:
        V = QuotientVertex(len(vertices), order, group, depth, parent)
        vertices.append(V)
        finder.reps.append(V)
        if len(vertices) > max_vertices:
            raise BudgetError(f"more than {max_vertices} quotient vertices", partial=graph)
        return V

    root = add_vertex(seed, stabilizer_vertex(alg, seed, flavor), 0, None)
    root.marks.add("M")
    queue = deque([root.id])
    while queue:
        V = vertices[queue.popleft()]
        _prepare_vertex(alg, V)
        for orb in _orbits(V):
            i0 = orb[0]
            I = V.ideals[i0]
            nb = qo.right_order(alg, I)
            stab_e = V.stabilizer.subgroup([g for g, p in enumerate(V.perms) if p[i0] == i0])
            nb_group = stabilizer_vertex(alg, nb, flavor)
            hit = finder.find(nb, nb_group, parity=(V.depth + 1) % 2)
            if hit is None:
                W = add_vertex(nb, nb_group, V.depth + 1, V.id)
                queue.append(W.id)
                target, gamma = W.id, alg.one
            else:
                target, gamma = hit
            darts.append(Dart(len(darts), V.id, i0, orb, target, gamma, stab_e))
        if progress:
            progress(f"n={ctx.n} {flavor}: {len(vertices)} vertices, {len(queue)} queued")
    _pair_darts(alg, graph)
    log.info("n=%d %s: %d vertices, %d orbit tests", ctx.n, flavor, len(vertices), finder.tests)
    return graph


def _dart_at(graph: QuotientGraph, v: int, idx: int) -> Dart:
    for d in graph.darts:
        if d.source == v and idx in d.orbit:
            return d
    raise InternalError("ideal not covered by any dart")


def _pair_darts(alg: QuatAlgebra, graph: QuotientGraph) -> None:
    V = graph.vertices
    for d in graph.darts:
        src = V[d.source]
        I = src.ideals[d.ideal_index]
        J = qo.conjugate_lattice_by(alg, d.transporter, alg.conj_lattice(I))
        tgt = V[d.target]
        j = ideal_index(alg, tgt, J)
        r = _dart_at(graph, d.target, j)
        d.reverse = r.id
        if r.id == d.id:
            # find g in the stabiliser with g J g^-1 = I; then g*gamma inverts the edge
            g = next(gi for gi, p in enumerate(src.perms) if p[j] == d.ideal_index)
            delta = alg.mul(src.stabilizer.elements[g], d.transporter)
            graph.inverters[d.id] = delta
            graph.half_groups[d.id] = ug.group_closure(list(d.stabilizer.elements) + [delta])
    for d in graph.darts:
        if graph.darts[d.reverse].reverse != d.id:
            raise StructureError("edge reversal is not an involution")
        if d.stabilizer.order != graph.darts[d.reverse].stabilizer.order:
            raise StructureError("opposite darts carry groups of different orders")
    if graph.half_edges() and graph.flavor != "gamma0":
        raise StructureError("only Gamma0 may invert edges")


def edge_image(graph: QuotientGraph, d: Dart) -> list[int]:
    """Indices in the target stabiliser of gamma * Gamma_e * gamma^-1."""
    G = graph.vertices[d.target].stabilizer
    alg = d.transporter.alg
    ginv = d.transporter.inverse()
    out = []
    for x in d.stabilizer.elements:
        y = alg.mul(alg.mul(d.transporter, x), ginv)
        i = G.index_of(y)
        if i is None:
            raise StructureError("edge group does not embed in the target stabiliser")
        out.append(i)
    return out


def edge_source_image(graph: QuotientGraph, d: Dart) -> list[int]:
    G = graph.vertices[d.source].stabilizer
    out = []
    for x in d.stabilizer.elements:
        i = G.index_of(x)
        if i is None:
            raise StructureError("edge group is not contained in the source stabiliser")
        out.append(i)
    return out


# ---------------------------------------------------------------------------
# locating tree vertices in the quotient


def project_order(alg: QuatAlgebra, graph: QuotientGraph, order: xl.RatLattice) -> tuple[int, QuatElement]:
    """Quotient vertex of a tree order and gamma with gamma order gamma^-1 = rep."""
    finder = OrbitFinder(alg, graph.flavor)
    finder.reps = graph.vertices
    hit = finder.find(order, stabilizer_vertex(alg, order, graph.flavor))
    if hit is None:
        raise StructureError("tree order not found in the quotient graph")
    return hit


def locate_T_vertex(alg: QuatAlgebra, graph: QuotientGraph, gates: qo.Gates | None = None) -> tuple[str, int]:
    """Image of the midpoint of the path from the seed M to t M t^-1.

    Returns ("vertex", id) or ("edge", dart id) and marks the graph.  The
    stabiliser there must contain the image of <t, j>, a dihedral group D_n.
    """
    ctx = alg.ctx
    gates = gates or qo.build_gates(alg)
    M = graph.vertices[0].order
    tM = qo.conjugate_lattice_by(alg, gates.t, M)
    I, k = qo.connecting_ideal(alg, M, tM)
    j = alg.element(0, 0, 1)
    if k % 2 == 0:
        w = qo.path_vertex(alg, M, I, k // 2)
        vid, gamma = project_order(alg, graph, w)
        G = graph.vertices[vid].stabilizer
        kind, ident = "vertex", vid
    else:
        w1 = qo.path_vertex(alg, M, I, k // 2)
        w2 = qo.path_vertex(alg, M, I, k // 2 + 1)
        vid, gamma = project_order(alg, graph, w1)
        V = graph.vertices[vid]
        idx = ideal_index(alg, V, qo.connecting_ideal(alg, V.order, qo.conjugate_lattice_by(alg, gamma, w2))[0])
        d = _dart_at(graph, vid, idx)
        # move the middle edge onto the orbit representative of its dart
        g = next(gi for gi, p in enumerate(V.perms) if p[idx] == d.ideal_index)
        gamma = alg.mul(V.stabilizer.elements[g], gamma)
        G = graph.half_groups.get(d.id, d.stabilizer)
        kind, ident = "edge", d.id
    ginv = gamma.inverse()
    # t lies in Gamma0 only; the other flavors are checked on j alone
    elems = (gates.t, j) if graph.flavor == "gamma0" else (j,)
    gens = [alg.mul(alg.mul(gamma, x), ginv) for x in elems]
    if any(G.index_of(g) is None for g in gens):
        raise StructureError("stabiliser at the T location does not contain <t, j>")
    if graph.flavor == "gamma0":
        dn = ug.group_closure(gens)
        if dn.label != ug.GroupLabel("D", ctx.n):
            raise StructureError(f"<t, j> has type {dn.label}, expected D{ctx.n}")
    graph.t_mark = (kind, ident)
    if kind == "vertex":
        graph.vertices[ident].marks.add("T")
    return kind, ident


# ---------------------------------------------------------------------------
# covering maps between flavors


@dataclass
class CoverReport:
    fine: str
    coarse: str
    degree: int
    expected_degree: int
    vertex_map: list[int]
    ramified: list[int]
    etale: bool


def flavor_index(ctx: FieldContext, fine: str, coarse: str) -> int:
    from .realcyc import unit_classes

    plus_over_one = 2 ** unit_classes(ctx)["coker_rank"]
    zero_over_plus = 2 if ctx.p_generator_tp is not None else 1
    idx = {"gamma1": 1, "gammaplus": plus_over_one, "gamma0": plus_over_one * zero_over_plus}
    return idx[coarse] // idx[fine]


def cover_check(alg: QuatAlgebra, fine: QuotientGraph, coarse: QuotientGraph) -> CoverReport:
    """Verify the map of quotient graphs induced by fine flavor < coarse flavor."""
    ctx = alg.ctx
    expected = flavor_index(ctx, fine.flavor, coarse.flavor)
    finder = OrbitFinder(alg, coarse.flavor)
    finder.reps = coarse.vertices
    vmap = []
    for V in fine.vertices:
        grp = stabilizer_vertex(alg, V.order, coarse.flavor)
        hit = finder.find(V.order, grp)
        if hit is None:
            raise StructureError(f"fine vertex {V.id} has no image in the coarse graph")
        vmap.append(hit[0])
    ramified = []
    for W in coarse.vertices:
        pre = [V for V, w in zip(fine.vertices, vmap) if w == W.id]
        total = sum(Fraction(W.stabilizer.order, V.stabilizer.order) for V in pre)
        if total != expected:
            raise StructureError(f"coarse vertex {W.id} is covered with degree {total}, expected {expected}")
        if len(pre) < expected:
            ramified.append(W.id)
    etale = not ramified
    if fine.flavor == "gammaplus" and coarse.flavor == "gamma0" and not etale:
        raise StructureError("Gamma+ -> Gamma0 cover must be etale")
    return CoverReport(fine.flavor, coarse.flavor, expected, expected, vmap, ramified, etale)
