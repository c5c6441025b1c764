"""Graphs of groups with half-edges, their fundamental groups and masses.

A presentation is a free product of amalgam trees (finite groups glued
along edge groups), groups of the form G + Z coming from loops with inner
monodromy, and a free group of some rank.  Two amalgam trees are compared
up to telescoping: an edge whose group is all of an endpoint's group can be
contracted without changing the fundamental group.
"""
from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DomainError, OpenCaseError, StructureError
from .unitgroups import TRIVIAL, FiniteQuotientGroup, GroupLabel, su_inflate

# ---------------------------------------------------------------------------
# graphs of groups


@dataclass
class GEdge:
    """Edge u -- v with group ``label``; a half-edge has v == -1 and carries
    the group ``half_label`` of its elided midpoint."""

    u: int
    v: int
    label: GroupLabel
    half_label: GroupLabel | None = None
    # index maps of the edge group into the endpoint groups (optional)
    src_map: list[int] | None = None
    dst_map: list[int] | None = None

    @property
    def half(self) -> bool:
        return self.v < 0


@dataclass
class HGraphOfGroups:
    labels: list[GroupLabel]
    edges: list[GEdge]
    groups: list[FiniteQuotientGroup] | None = None
    marks: dict[int, set[str]] = field(default_factory=dict)

    @property
    def regular(self) -> list[GEdge]:
        return [e for e in self.edges if not e.half]

    @property
    def halves(self) -> list[GEdge]:
        return [e for e in self.edges if e.half]

    def vertex_with_mark(self, mark: str) -> int | None:
        for v, ms in self.marks.items():
            if mark in ms:
                return v
        return None


@dataclass
class MassReport:
    VM: Fraction
    EM: Fraction
    genus: int

    @property
    def chi(self) -> Fraction:
        return self.VM - self.EM


def mass_and_genus(G: HGraphOfGroups) -> MassReport:
    """Vertex and edge masses; elided half-edge midpoints count as vertices."""
    for lab in G.labels:
        if lab.order <= 0:
            raise DomainError("infinite vertex group")
    VM = sum((Fraction(1, lab.order) for lab in G.labels), Fraction(0))
    EM = Fraction(0)
    for e in G.edges:
        EM += Fraction(1, e.label.order)
        if e.half:
            VM += Fraction(1, e.half_label.order)
    return MassReport(VM, EM, 1 + len(G.regular) - len(G.labels))


# ---------------------------------------------------------------------------
# label trees and presentations


@dataclass(frozen=True)
class Node:
    """A vertex of an amalgam tree: a finite group, or G + Z when ``with_z``."""

    label: GroupLabel
    with_z: bool = False

    def __str__(self) -> str:
        return f"({self.label} ⊕ Z)" if self.with_z else str(self.label)

    @property
    def chi(self) -> Fraction:
        return Fraction(0) if self.with_z else Fraction(1, self.label.order)

    @property
    def size(self) -> int | None:
        return None if self.with_z else self.label.order


@dataclass
class LabelTree:
    nodes: list[Node]
    edges: list[tuple[int, int, GroupLabel]]
    root: int = 0

    def chi(self) -> Fraction:
        return sum((x.chi for x in self.nodes), Fraction(0)) - sum((Fraction(1, c.order) for _, _, c in self.edges), Fraction(0))

    def adjacency(self) -> dict[int, list[tuple[int, GroupLabel]]]:
        adj: dict[int, list[tuple[int, GroupLabel]]] = {i: [] for i in range(len(self.nodes))}
        for a, b, c in self.edges:
            adj[a].append((b, c))
            adj[b].append((a, c))
        return adj

    def is_trivial(self) -> bool:
        return all(not x.with_z and x.label.order == 1 for x in self.nodes)


@dataclass
class Presentation:
    trees: list[LabelTree]
    free_rank: int = 0

    def chi(self) -> Fraction:
        return chi_of_presentation(self)

    def __str__(self) -> str:
        return render(self)

    def direct_sum_count(self) -> int:
        return sum(1 for t in self.trees for x in t.nodes if x.with_z)


def chi_of_presentation(P: Presentation) -> Fraction:
    """chi(finite G) = 1/|G|, chi(A *_C B) = chi A + chi B - chi C, chi(G + Z) = 0."""
    factors = [t for t in P.trees if not t.is_trivial()]
    m = len(factors) + P.free_rank
    if m == 0:
        return Fraction(1)
    return sum((t.chi() for t in factors), Fraction(0)) - (m - 1)


# -- telescoping normal form -------------------------------------------------


def _tree_code(nodes: tuple[Node, ...], edges: tuple[tuple[int, int, GroupLabel], ...]) -> str:
    """Canonical string of an unrooted labelled tree (minimum over roots)."""
    adj: dict[int, list[tuple[int, GroupLabel]]] = {i: [] for i in range(len(nodes))}
    for a, b, c in edges:
        adj[a].append((b, c))
        adj[b].append((a, c))

    def code(v: int, parent: int) -> str:
        kids = sorted(f"<{c}>" + code(w, v) for w, c in adj[v] if w != parent)
        return str(nodes[v]) + ("[" + ",".join(kids) + "]" if kids else "")

    return min(code(r, -1) for r in range(len(nodes)))


def _contract(nodes, edges, idx, keep):
    """Contract edge ``idx`` merging its other endpoint into ``keep``."""
    a, b, _ = edges[idx]
    gone = b if keep == a else a
    new_edges = []
    for j, (x, y, c) in enumerate(edges):
        if j == idx:
            continue
        x = keep if x == gone else x
        y = keep if y == gone else y
        new_edges.append((x, y, c))
    remap = {}
    new_nodes = []
    for i, x in enumerate(nodes):
        if i == gone:
            continue
        remap[i] = len(new_nodes)
        new_nodes.append(x)
    return tuple(new_nodes), tuple((remap[x], remap[y], c) for x, y, c in new_edges)


def _absorbable(nodes, edges):
    """(edge index, kept endpoint) pairs for telescoping contractions."""
    out = []
    for j, (a, b, c) in enumerate(edges):
        na, nb = nodes[a], nodes[b]
        if not na.with_z and na.label.order == c.order:
            out.append((j, b))
        if not nb.with_z and nb.label.order == c.order:
            out.append((j, a))
    return out


@lru_cache(maxsize=4096)
def _reduced_forms(nodes: tuple[Node, ...], edges: tuple[tuple[int, int, GroupLabel], ...]) -> frozenset[str]:
    moves = _absorbable(nodes, edges)
    if not moves:
        return frozenset([_tree_code(nodes, edges)])
    out: set[str] = set()
    seen = set()
    for j, keep in moves:
        n2, e2 = _contract(nodes, edges, j, keep)
        key = _tree_code(n2, e2)
        if key in seen:
            continue
        seen.add(key)
        out |= _reduced_forms(n2, e2)
    return frozenset(out)


def reduced_forms(t: LabelTree) -> frozenset[str]:
    """All fully telescoped shapes reachable from the tree."""
    return _reduced_forms(tuple(t.nodes), tuple(sorted(t.edges, key=lambda e: (e[0], e[1], e[2].sort_key()))))


def trees_equivalent(a: LabelTree, b: LabelTree) -> bool:
    return bool(reduced_forms(a) & reduced_forms(b))


def presentations_equivalent(P: Presentation, Q: Presentation) -> bool:
    """Same free rank and a bijection of amalgam factors up to telescoping."""
    if P.free_rank != Q.free_rank:
        return False
    A = [t for t in P.trees if not t.is_trivial()]
    B = [t for t in Q.trees if not t.is_trivial()]
    if len(A) != len(B):
        return False
    fa = [reduced_forms(t) for t in A]
    fb = [reduced_forms(t) for t in B]
    # bipartite matching (Kuhn)
    match: dict[int, int] = {}

    def augment(i, seen):
        for j in range(len(B)):
            if j in seen or not (fa[i] & fb[j]):
                continue
            seen.add(j)
            if j not in match or augment(match[j], seen):
                match[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(A)))


# -- rendering ------------------------------------------------------------------


def telescope(t: LabelTree) -> LabelTree:
    """Deterministic telescoping used for display: contract absorbable edges,
    preferring to keep the root, and keep hubs whose edges all equal their group."""
    nodes, edges = tuple(t.nodes), tuple(t.edges)
    root = t.root
    while True:
        adj = Counter()
        for a, b, _ in edges:
            adj[a] += 1
            adj[b] += 1
        chosen = None
        for j, keep in _absorbable(nodes, edges):
            a, b, c = edges[j]
            gone = b if keep == a else a
            # a hub joined to several neighbours over its full group is kept
            full = sum(1 for x, y, cc in edges if gone in (x, y) and cc.order == c.order)
            if full >= 3 and adj[gone] == full:
                continue
            if gone == root:
                continue
            chosen = (j, keep, gone)
            break
        if chosen is None:
            # only the root is absorbable: fold it into its neighbour
            for j, keep in _absorbable(nodes, edges):
                a, b, c = edges[j]
                gone = b if keep == a else a
                full = sum(1 for x, y, cc in edges if gone in (x, y) and cc.order == c.order)
                if full >= 3 and adj[gone] == full:
                    continue
                chosen = (j, keep, gone)
                break
        if chosen is None:
            return LabelTree(list(nodes), list(edges), root)
        j, keep, gone = chosen
        nodes, edges = _contract(nodes, edges, j, keep)
        new_root = keep if root == gone else root
        root = new_root - (1 if new_root > gone else 0)


def _render_tree(t: LabelTree) -> str:
    if len(t.nodes) == 1:
        return str(t.nodes[0])
    adj = t.adjacency()
    # star over a common subgroup: *_{C}{A, B, ...}
    for h in range(len(t.nodes)):
        cs = {c for _, c in adj[h]}
        if len(adj[h]) >= 3 and len(cs) == 1 and t.nodes[h].label == next(iter(cs)) and len(t.edges) == len(adj[h]):
            leaves = sorted((str(t.nodes[w]) for w, _ in adj[h]), key=_label_sort)
            return f"*_{{{next(iter(cs))}}}{{{', '.join(leaves)}}}"
    leaves = [v for v in adj if len(adj[v]) == 1]
    is_path = all(len(adj[v]) <= 2 for v in adj)
    if is_path:
        start = t.root if t.root in leaves else min(leaves, key=lambda v: _walk(t, adj, v))
        return _walk(t, adj, start)
    return _nested(t, adj, t.root, -1)


def _walk(t: LabelTree, adj, start: int) -> str:
    out = [str(t.nodes[start])]
    prev, cur = -1, start
    while True:
        nxt = [(w, c) for w, c in adj[cur] if w != prev]
        if not nxt:
            return " ".join(out)
        w, c = nxt[0]
        out.append(f"*_{{{c}}} {t.nodes[w]}")
        prev, cur = cur, w


def _nested(t: LabelTree, adj, v: int, parent: int) -> str:
    kids = [(w, c) for w, c in adj[v] if w != parent]
    kids.sort(key=lambda wc: _nested(t, adj, wc[0], v))
    s = str(t.nodes[v])
    for i, (w, c) in enumerate(kids):
        sub = _nested(t, adj, w, v)
        if len(adj[w]) > 1 and i < len(kids) - 1:
            sub = f"({sub})"
        s += f" *_{{{c}}} {sub}"
    return s


def _label_sort(s: str):
    try:
        return (0,) + GroupLabel.parse(s).sort_key()
    except ValueError:
        return (1, 0, 0)


def render(P: Presentation) -> str:
    """Canonical string: amalgam factors first, then finite factors, then Z^{*k}."""
    amalgams = []
    singles: Counter = Counter()
    for t in P.trees:
        if t.is_trivial():
            continue
        tt = telescope(t)
        if len(tt.nodes) == 1:
            singles[tt.nodes[0]] += 1
        else:
            amalgams.append(_render_tree(tt))
    parts = list(amalgams)
    for node in sorted(singles, key=lambda x: (x.with_z,) + x.label.sort_key()):
        k = singles[node]
        parts.append(str(node) if k == 1 else f"{node}^{{*{k}}}")
    if P.free_rank == 1:
        parts.append("Z")
    elif P.free_rank > 1:
        parts.append(f"Z^{{*{P.free_rank}}}")
    return " * ".join(parts) if parts else "C1"


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\*_\{[A-Z0-9]+\}|\^\{\*\d+\}|⊕|\*|\(|\)|\{|\}|,|[A-Z][0-9]*)")


def _tokens(text: str) -> list[str]:
    text = text.replace("∗", "*").replace("\\oplus", "⊕").replace("+", "⊕")
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse presentation at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_presentation(text: str) -> Presentation:
    """Parse strings such as ``D28 *_{C28} D28 *_{D4} S4 * C2^{*2}``."""
    toks = _tokens(text)
    pos = 0
    trees: list[LabelTree] = []
    rank = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        t = toks[pos]
        if expected is not None and t != expected:
            raise ValueError(f"expected {expected!r}, got {t!r}")
        pos += 1
        return t

    def atom(tree: LabelTree) -> int:
        t = take()
        if t == "(":
            lab = GroupLabel.parse(take())
            if peek() == "⊕":
                take()
                take("Z")
                take(")")
                tree.nodes.append(Node(lab, True))
                return len(tree.nodes) - 1
            tree.nodes.append(Node(lab))
            first = len(tree.nodes) - 1
            chain_rest(tree, first)
            take(")")
            return first
        tree.nodes.append(Node(GroupLabel.parse(t)))
        return len(tree.nodes) - 1

    def chain_rest(tree: LabelTree, prev: int) -> None:
        while peek() is not None and peek().startswith("*_{"):
            c = GroupLabel.parse(take()[3:-1])
            cur = atom(tree)
            tree.edges.append((prev, cur, c))
            prev = cur

    def term() -> None:
        nonlocal rank
        t = peek()
        if t is not None and t.startswith("*_{"):
            c = GroupLabel.parse(take()[3:-1])
            take("{")
            tree = LabelTree([Node(c)], [])
            while True:
                lab = GroupLabel.parse(take())
                tree.nodes.append(Node(lab))
                tree.edges.append((0, len(tree.nodes) - 1, c))
                if peek() == ",":
                    take()
                    continue
                take("}")
                break
            trees.append(tree)
            return
        if t == "Z":
            take()
            k = 1
            if peek() is not None and peek().startswith("^{*"):
                k = int(take()[3:-1])
            rank += k
            return
        tree = LabelTree([], [])
        first = atom(tree)
        if peek() is not None and peek().startswith("^{*"):
            k = int(take()[3:-1])
            for _ in range(k - 1):
                trees.append(LabelTree([tree.nodes[first]], []))
        chain_rest(tree, first)
        trees.append(tree)

    term()
    while pos < len(toks):
        take("*")
        term()
    return Presentation(trees, rank)


# ---------------------------------------------------------------------------
# fundamental group


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.p[b] = a
        return True


def _expanded(G: HGraphOfGroups) -> tuple[list[GroupLabel], list[GEdge]]:
    """Half-edges become edges to their elided midpoint vertices."""
    labels = list(G.labels)
    edges = []
    for e in G.edges:
        if e.half:
            labels.append(e.half_label)
            edges.append(GEdge(e.u, len(labels) - 1, e.label))
        else:
            edges.append(e)
    return labels, edges


def spanning_tree(G: HGraphOfGroups) -> tuple[list[int], list[int]]:
    """Indices of tree edges and off-tree edges (regular edges only).

    Edges with nontrivial group are taken first, so off-tree edges are
    trivial whenever possible.
    """
    n = len(G.labels)
    dsu = _DSU(n)
    reg = [i for i, e in enumerate(G.edges) if not e.half]
    order = sorted(reg, key=lambda i: (G.edges[i].label.order == 1, i))
    tree, off = [], []
    for i in order:
        e = G.edges[i]
        (tree if dsu.union(e.u, e.v) else off).append(i)
    roots = {dsu.find(v) for v in range(n)}
    if len(roots) > 1:
        raise StructureError("graph of groups is disconnected")
    return sorted(tree), sorted(off)


def _tree_path(n: int, edges: list[GEdge], tree: list[int], a: int, b: int) -> list[tuple[int, bool]]:
    """Edges (index, forward?) of the tree path from a to b."""
    adj: dict[int, list[tuple[int, int, bool]]] = {v: [] for v in range(n)}
    for i in tree:
        e = edges[i]
        adj[e.u].append((e.v, i, True))
        adj[e.v].append((e.u, i, False))
    prev = {a: None}
    dq = deque([a])
    while dq:
        x = dq.popleft()
        for y, i, fw in adj[x]:
            if y not in prev:
                prev[y] = (x, i, fw)
                dq.append(y)
    path = []
    cur = b
    while prev[cur] is not None:
        x, i, fw = prev[cur]
        path.append((i, fw))
        cur = x
    return path[::-1]


def _edge_iso(G: HGraphOfGroups, e: GEdge, forward: bool) -> dict[int, int]:
    """Isomorphism Gamma_u -> Gamma_v (or reverse) through an edge with full group."""
    if e.src_map is None or e.dst_map is None:
        raise OpenCaseError("loop monodromy needs explicit edge inclusions")
    a, b = (e.src_map, e.dst_map) if forward else (e.dst_map, e.src_map)
    return {x: y for x, y in zip(a, b)}


def loop_monodromy_is_inner(G: HGraphOfGroups, cycle: list[tuple[int, bool]], start: int) -> bool:
    """Compose the edge isomorphisms around a loop of equal groups and test
    whether the resulting automorphism of the start group is inner."""
    grp = G.groups[start]
    phi = {x: x for x in range(grp.order)}
    for i, fw in cycle:
        step = _edge_iso(G, G.edges[i], fw)
        phi = {x: step[y] for x, y in phi.items()}
    T = grp.mul_table
    for x in range(grp.order):
        for y in range(grp.order):
            if phi[T[x][y]] != T[phi[x]][phi[y]]:
                raise StructureError("loop monodromy is not a homomorphism")
    for g in range(grp.order):
        gi = grp.inverse_index(g)
        if all(phi[x] == T[T[g][x]][gi] for x in range(grp.order)):
            return True
    return False


def fundamental_group(G: HGraphOfGroups) -> Presentation:
    """pi_1 of the h-graph of groups as a presentation."""
    labels, edges = _expanded(G)
    H = HGraphOfGroups(labels, edges, G.groups, G.marks)
    tree, off = spanning_tree(H)
    nodes = [Node(lab) for lab in labels]
    rank = 0
    merged = _DSU(len(labels))
    tree_set = set(tree)
    for i in off:
        e = edges[i]
        if e.label.order == 1:
            rank += 1
            continue
        path = _tree_path(len(labels), edges, tree, e.v, e.u)
        cycle = [(i, True)] + path
        verts = {e.u} | {edges[j].u for j, _ in path} | {edges[j].v for j, _ in path}
        if any(labels[v].order != e.label.order for v in verts) or any(edges[j].label.order != e.label.order for j, _ in path):
            raise OpenCaseError("loop with an HNN extension that is not a direct product")
        if G.groups is None or e.u >= len(G.labels):
            raise OpenCaseError("loop monodromy needs explicit vertex groups")
        if not loop_monodromy_is_inner(H, cycle, e.u):
            raise OpenCaseError("loop monodromy is not inner")
        for v in verts:
            merged.union(e.u, v)
        for j, _ in path:
            tree_set.discard(j)
        nodes[merged.find(e.u)] = Node(labels[e.u], True)
    # collapse merged loops to single nodes, then cut at trivial edges
    rep = {v: merged.find(v) for v in range(len(labels))}
    comp = _DSU(len(labels))
    kept_edges = []
    for i in sorted(tree_set):
        e = edges[i]
        a, b = rep[e.u], rep[e.v]
        if a == b:
            continue
        if e.label.order > 1:
            comp.union(a, b)
            kept_edges.append((a, b, e.label))
    roots: dict[int, list[int]] = {}
    for v in sorted(set(rep.values())):
        roots.setdefault(comp.find(v), []).append(v)
    mark_m = G.vertex_with_mark("M")
    m_rep = rep[mark_m] if mark_m is not None else None
    trees = []
    for members in roots.values():
        idx = {v: k for k, v in enumerate(members)}
        tedges = [(idx[a], idx[b], c) for a, b, c in kept_edges if a in idx]
        has_m = m_rep in idx
        t = LabelTree([nodes[v] for v in members], tedges, idx[m_rep] if has_m else 0)
        if not t.is_trivial():
            trees.append((not has_m, t))
    # the factor holding the M mark comes first
    trees = [t for _, t in sorted(trees, key=lambda p: p[0])]
    return Presentation(trees, rank)


def su_presentation(P: Presentation) -> Presentation:
    """Inflate every label by the central +-1 (PSU_2 side -> SU_2 side)."""
    return Presentation(
        [LabelTree([Node(su_inflate(x.label), x.with_z) for x in t.nodes], [(a, b, su_inflate(c)) for a, b, c in t.edges], t.root) for t in P.trees],
        P.free_rank,
    )


# ---------------------------------------------------------------------------
# the Clifford-cyclotomic sub-amalgam


def clifford_expected(n: int) -> Presentation:
    return parse_presentation(f"S4 *_{{D4}} D{n}")


def subgraph_path(G: HGraphOfGroups, start: int, end: int, end_half: int | None = None) -> HGraphOfGroups:
    """Sub-graph of groups along a shortest path of regular edges, optionally
    ending in the half-edge with index ``end_half``."""
    n = len(G.labels)
    reg = [i for i, e in enumerate(G.edges) if not e.half]
    path = _tree_path(n, G.edges, reg, start, end)
    verts = [start]
    for i, fw in path:
        e = G.edges[i]
        verts.append(e.v if fw else e.u)
    idx = {v: k for k, v in enumerate(verts)}
    labels = [G.labels[v] for v in verts]
    edges = [GEdge(idx[G.edges[i].u], idx[G.edges[i].v], G.edges[i].label) for i, _ in path]
    if end_half is not None:
        h = G.edges[end_half]
        edges.append(GEdge(idx[h.u], -1, h.label, h.half_label))
    marks = {idx[v]: set(ms) for v, ms in G.marks.items() if v in idx}
    return HGraphOfGroups(labels, edges, None, marks)


def detect_clifford_subpath(G: HGraphOfGroups, n: int, t_location: tuple[str, int]) -> tuple[HGraphOfGroups, Presentation]:
    """The path from the M-vertex to the T location and its telescoped pi_1,
    which must be S4 *_{D4} D_n."""
    m = G.vertex_with_mark("M")
    if m is None:
        raise StructureError("graph has no M mark")
    kind, ident = t_location
    if kind == "vertex":
        sub = subgraph_path(G, m, ident)
    else:
        sub = subgraph_path(G, m, G.edges[ident].u, end_half=ident)
    P = fundamental_group(sub)
    if not presentations_equivalent(P, clifford_expected(n)):
        raise StructureError(f"M-T path telescopes to {P}, expected S4 *_{{D4}} D{n}")
    return sub, P


@dataclass
class IndexReport:
    equal: bool  # sub-amalgam is the whole group
    infinite_in_pi1: bool
    infinite_in_torsion_part: bool  # sub-amalgam has infinite index in [pi_1]_f
    torsion_part_proper: bool  # [pi_1]_f is a proper subgroup (free or G + Z factors)


def infinite_index_report(G: HGraphOfGroups, sub_presentation: Presentation) -> IndexReport:
    """Dichotomy for a sub-amalgam along a subtree: it is all of pi_1 or of infinite index."""
    P = fundamental_group(G)
    equal = presentations_equivalent(P, sub_presentation)
    finite_part = Presentation([t for t in P.trees if not any(x.with_z for x in t.nodes)], 0)
    torsion_proper = P.free_rank > 0 or P.direct_sum_count() > 0
    sub_is_finite_part = presentations_equivalent(finite_part, sub_presentation)
    return IndexReport(equal, not equal, not sub_is_finite_part, torsion_proper)


def from_quotient(graph) -> HGraphOfGroups:
    """Graph of groups of a quotient graph (one edge per geometric edge)."""
    from .treequot import edge_image, edge_source_image

    labels = [V.stabilizer.label for V in graph.vertices]
    edges = []
    for d in graph.edges():
        if d.half:
            edges.append(GEdge(d.source, -1, d.stabilizer.label, graph.half_groups[d.id].label))
        else:
            edges.append(GEdge(d.source, d.target, d.stabilizer.label, None, edge_source_image(graph, d), edge_image(graph, d)))
    marks = {V.id: set(V.marks) for V in graph.vertices if V.marks}
    return HGraphOfGroups(labels, edges, [V.stabilizer for V in graph.vertices], marks)


def t_location_in(G: HGraphOfGroups, graph) -> tuple[str, int]:
    """Translate a quotient-graph T location (dart ids) to edge indices of G."""
    kind, ident = graph.t_mark
    if kind == "vertex":
        return kind, ident
    darts = graph.edges()
    d = graph.darts[ident]
    for k, e in enumerate(darts):
        if e.id in (d.id, d.reverse):
            return kind, k
    raise StructureError("T edge not found")
