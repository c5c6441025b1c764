"""Finite unit groups modulo scalars, norm searches and group labels.

Elements of a finite subgroup of H_n^x / F^x are stored exactly, scaled so
that their first nonzero quaternion component equals 1.  For the
multiplication table each element is also embedded in the real Hamilton
quaternions through the first real embedding of F_n; distinct classes
modulo F^x stay distinct there, so products are located by nearest unit
vector and the gap to the next candidate is checked.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import exactlat as xl
from . import quatorders as qo
from .errors import ClassificationError, InternalError
from .quatorders import QuatAlgebra, QuatElement
from .realcyc import FieldElement

FLAVORS = ("gamma1", "gammaplus", "gamma0")

_MATCH_TOL = 1e-8


# ---------------------------------------------------------------------------
# labels


_FAMILY_ORDER = {"C": 0, "D": 1, "A4": 2, "S4": 3, "A5": 4, "Q": 5, "E24": 6, "E48": 7, "E120": 8}


@dataclass(frozen=True)
class GroupLabel:
    """Isomorphism type of a finite group: C_m, D_m, A4, S4, A5, Q_2m or E_k."""

    family: str
    m: int = 0

    @property
    def order(self) -> int:
        if self.family == "C":
            return self.m
        if self.family == "D":
            return 2 * self.m
        if self.family == "Q":
            return self.m
        return {"A4": 12, "S4": 24, "A5": 60, "E24": 24, "E48": 48, "E120": 120}[self.family]

    def __str__(self) -> str:
        if self.family in ("C", "D", "Q"):
            return f"{self.family}{self.m}"
        return self.family

    def sort_key(self) -> tuple[int, int]:
        return (_FAMILY_ORDER[self.family], self.m)

    @classmethod
    def parse(cls, text: str) -> "GroupLabel":
        text = text.strip()
        if text in ("A4", "S4", "A5", "E24", "E48", "E120"):
            return cls(text)
        if text[:1] in ("C", "D", "Q") and text[1:].isdigit():
            return cls(text[0], int(text[1:]))
        raise ValueError(f"unknown group label {text!r}")


TRIVIAL = GroupLabel("C", 1)


def su_inflate(label: GroupLabel) -> GroupLabel:
    """Label of the preimage under SU_2 -> PSU_2 (central extension by +-1)."""
    if label.family == "C":
        return GroupLabel("C", 2 * label.m)
    if label.family == "D":
        return GroupLabel("Q", 4 * label.m)
    return {"A4": GroupLabel("E24"), "S4": GroupLabel("E48"), "A5": GroupLabel("E120")}[label.family]


# ---------------------------------------------------------------------------
# element normalisation and numerics


def canonical(x: QuatElement) -> QuatElement:
    """Representative of x F^x whose first nonzero component is 1."""
    comps = x.components()
    for c in comps:
        if not c.is_zero():
            inv = c.inverse()
            alg = x.alg
            vec = []
            for d in comps:
                vec.extend((d * inv).c if not d.is_zero() else d.c)
            return QuatElement.from_vector(alg, vec)
    raise InternalError("zero has no class modulo scalars")


def numeric_unit(x: QuatElement) -> np.ndarray:
    """Unit real quaternion of x under the first real embedding (defined up to sign)."""
    ctx = x.alg.ctx
    with mpmath.workprec(160):
        comps = [ctx.numeric(c, 160)[0] for c in x.components()]
        nrm = mpmath.sqrt(sum(c * c for c in comps))
        v = np.array([float(c / nrm) for c in comps])
    return v


def _qmul_float(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton products a[..] * b[..] of float quaternion arrays."""
    a1, ai, aj, ak = np.moveaxis(a, -1, 0)
    b1, bi, bj, bk = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a1 * b1 - ai * bi - aj * bj - ak * bk,
            a1 * bi + ai * b1 + aj * bk - ak * bj,
            a1 * bj - ai * bk + aj * b1 + ak * bi,
            a1 * bk + ai * bj - aj * bi + ak * b1,
        ],
        axis=-1,
    )


# ---------------------------------------------------------------------------
# finite groups


@dataclass
class FiniteQuotientGroup:
    """A finite subgroup of H_n^x / F^x with its multiplication table."""

    elements: list[QuatElement]
    mul_table: list[list[int]]
    label: GroupLabel
    vectors: np.ndarray = field(repr=False)
    lifts: list[QuatElement] = field(default_factory=list, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def locate(self, v: np.ndarray) -> int | None:
        if not len(self.elements):
            return None
        dots = np.abs(self.vectors @ v)
        i = int(np.argmax(dots))
        return i if dots[i] > 1 - _MATCH_TOL else None

    def index_of(self, x: QuatElement) -> int | None:
        return self.locate(numeric_unit(x))

    def __contains__(self, x: QuatElement) -> bool:
        return self.index_of(x) is not None

    def inverse_index(self, i: int) -> int:
        return self.mul_table[i].index(self.identity)

    @property
    def identity(self) -> int:
        for i, row in enumerate(self.mul_table):
            if all(row[j] == j for j in range(len(row))):
                return i
        raise InternalError("group has no identity")

    def element_orders(self) -> list[int]:
        e = self.identity
        out = []
        for i in range(self.order):
            k, cur = 1, i
            while cur != e:
                cur = self.mul_table[cur][i]
                k += 1
            out.append(k)
        return out

    def subgroup(self, indices: Iterable[int]) -> "FiniteQuotientGroup":
        idx = sorted(set(indices))
        return group_from_elements([self.elements[i] for i in idx], lifts=[self.lifts[i] for i in idx] if self.lifts else None)


def _build_table(vectors: np.ndarray) -> list[list[int]] | None:
    N = len(vectors)
    if N == 0:
        return []
    prods = _qmul_float(vectors[:, None, :], vectors[None, :, :]).reshape(N * N, 4)
    dots = np.abs(prods @ vectors.T)
    best = dots.argmax(axis=1)
    if np.any(dots[np.arange(N * N), best] < 1 - _MATCH_TOL):
        return None
    return best.reshape(N, N).tolist()


def group_from_elements(elems: Sequence[QuatElement], lifts: Sequence[QuatElement] | None = None) -> FiniteQuotientGroup:
    """Group on the given classes; raises InternalError when not closed."""
    elems = [canonical(x) for x in elems]
    vecs = np.array([numeric_unit(x) for x in elems]).reshape(len(elems), 4)
    if len(elems) > 1:
        gram = np.abs(vecs @ vecs.T) - np.eye(len(elems))
        if gram.max() > 1 - 1e-6:
            raise InternalError("duplicate classes modulo scalars")
    table = _build_table(vecs)
    if table is None:
        raise InternalError("element set is not closed under multiplication")
    G = FiniteQuotientGroup(list(elems), table, TRIVIAL, vecs, list(lifts) if lifts is not None else [])
    G.label = identify_group(G)
    return G


def group_closure(gens: Sequence[QuatElement], limit: int = 240) -> FiniteQuotientGroup:
    """Finite group generated by the classes of the given elements."""
    if not gens:
        raise InternalError("empty generator list")
    alg = gens[0].alg
    one = canonical(alg.one)
    elems = [one]
    vecs = [numeric_unit(one)]
    gens = [canonical(g) for g in gens]
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = canonical(alg.mul(x, g))
                v = numeric_unit(y)
                if max(abs(float(np.dot(w, v))) for w in vecs) > 1 - _MATCH_TOL:
                    continue
                elems.append(y)
                vecs.append(v)
                nxt.append(y)
                if len(elems) > limit:
                    raise InternalError("generated group is not finite within the limit")
        frontier = nxt
    return group_from_elements(elems)


def identify_group(G: FiniteQuotientGroup) -> GroupLabel:
    """Label within the finite subgroups of PGL_2(C)."""
    N = G.order
    orders = G.element_orders()
    cnt = Counter(orders)
    if N == 0:
        raise ClassificationError("empty group")
    if max(orders) == N:
        return GroupLabel("C", N)
    if N % 2 == 0:
        m = N // 2
        if m == 2 and cnt[2] == 3:
            return GroupLabel("D", 2)
        # cyclic subgroup of index 2 with all other elements involutions
        if cnt[m] and cnt[2] >= m:
            gen = orders.index(m)
            cyc = {G.identity}
            cur = gen
            while cur not in cyc:
                cyc.add(cur)
                cur = G.mul_table[cur][gen]
            if all(orders[i] == 2 for i in range(N) if i not in cyc):
                return GroupLabel("D", m)
    if N == 12 and cnt == Counter({1: 1, 2: 3, 3: 8}):
        return GroupLabel("A4")
    if N == 24 and cnt == Counter({1: 1, 2: 9, 3: 8, 4: 6}):
        return GroupLabel("S4")
    if N == 60 and cnt == Counter({1: 1, 2: 15, 3: 20, 5: 24}):
        return GroupLabel("A5")
    raise ClassificationError(f"group of order {N} with element orders {dict(cnt)} is not a PGL2 subgroup")


# ---------------------------------------------------------------------------
# norm searches


def norm_form_gram(alg: QuatAlgebra, L: xl.RatLattice, eps: FieldElement) -> list[list[Fraction]]:
    """Gram matrix of x -> Tr_{F/Q}(nrd(x) / eps) on the basis of L."""
    ctx = alg.ctx
    dF = alg.degree
    w = eps.inverse()
    zp = ctx.one
    tw = []
    for _ in range(2 * dF - 1):
        tw.append((w * zp).trace())
        zp = zp * ctx.z
    den_t = lcm(*(v.denominator for v in tw))
    ti = [int(v * den_t) for v in tw]
    D = alg.dim
    A = np.zeros((D, D), dtype=object)
    for b in range(4):
        for a in range(dF):
            for c in range(dF):
                A[b * dF + a, b * dF + c] = ti[a + c]
    B = np.array(L.rows, dtype=object)
    G = B.dot(A).dot(B.T)
    scale = Fraction(1, den_t * L.den * L.den)
    return [[v * scale for v in row] for row in G.tolist()]


class NormSearcher:
    """Elements of one lattice with prescribed reduced norm."""

    def __init__(self, alg: QuatAlgebra, L: xl.RatLattice):
        self.alg = alg
        self.L = L
        self._enums: dict[tuple, xl.ShortVectorEnumerator] = {}

    def _enum(self, eps: FieldElement) -> xl.ShortVectorEnumerator:
        key = eps.c
        if key not in self._enums:
            self._enums[key] = xl.ShortVectorEnumerator(norm_form_gram(self.alg, self.L, eps))
        return self._enums[key]

    def elements(self, eps: FieldElement, first: bool = False) -> list[QuatElement]:
        """All x in L with nrd(x) = eps, one per +-pair, in enumeration order."""
        alg = self.alg
        out = []
        rows = self.L.rows
        D = alg.dim
        for v in self._enum(eps).vectors(alg.degree):
            num = [0] * D
            for c, r in zip(v, rows):
                if c:
                    for t in range(D):
                        num[t] += c * r[t]
            x = QuatElement(alg, num, self.L.den)
            if x.nrd() == eps:
                out.append(x)
                if first:
                    break
        return out


def elements_of_norm(alg: QuatAlgebra, L: xl.RatLattice, eps: FieldElement) -> list[QuatElement]:
    """All x in L with nrd(x) = eps (eps totally positive), one per +-pair."""
    return NormSearcher(alg, L).elements(eps)


def norm_classes(alg: QuatAlgebra, flavor: str) -> list[FieldElement]:
    """Reduced norms, modulo unit squares, allowed for stabilisers of the flavor."""
    ctx = alg.ctx
    if flavor == "gamma1":
        return [ctx.one]
    if flavor in ("gammaplus", "gamma0"):
        return list(ctx.tp_unit_class_reps)
    raise ValueError(f"unknown flavor {flavor!r}")


def unit_group(alg: QuatAlgebra, O: xl.RatLattice, flavor: str, searcher: NormSearcher | None = None) -> FiniteQuotientGroup:
    """Stabiliser of the vertex O in the flavor's group, modulo scalars."""
    searcher = searcher or NormSearcher(alg, O)
    lifts = []
    for eps in norm_classes(alg, flavor):
        lifts.extend(searcher.elements(eps))
    return group_from_elements(lifts, lifts=lifts)


# ---------------------------------------------------------------------------
# orbit tests


def transporter_norms(alg: QuatAlgebra, k: int, flavor: str) -> list[FieldElement]:
    """Norms eps such that a generator of nrd eps of a connecting ideal of
    norm p^k realises an equivalence in the flavor's group (empty if none)."""
    ctx = alg.ctx
    pi = ctx.p_generator
    if k % 2 == 0:
        base = pi ** k
        return [base * t for t in norm_classes(alg, flavor)]
    if flavor != "gamma0" or ctx.p_generator_tp is None:
        return []
    base = ctx.p_generator_tp * pi ** (k - 1)
    return [base * t for t in ctx.tp_unit_class_reps]


def principality_with_class(alg: QuatAlgebra, M: xl.RatLattice, M2: xl.RatLattice, flavor: str) -> QuatElement | None:
    """gamma with gamma M2 gamma^-1 = M in the flavor's group, or None."""
    I, k = qo.connecting_ideal(alg, M, M2)
    if k == 0:
        return alg.one
    return generator_with_norms(alg, I, transporter_norms(alg, k, flavor))


def generator_with_norms(alg: QuatAlgebra, I: xl.RatLattice, norms: Sequence[FieldElement]) -> QuatElement | None:
    searcher = NormSearcher(alg, I)
    for eps in norms:
        found = searcher.elements(eps, first=True)
        if found:
            return found[0]
    return None
