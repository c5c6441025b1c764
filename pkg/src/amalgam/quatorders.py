"""Quaternion algebra H_n = (-1,-1 / F_n), its orders, ideals and gate elements.

The ambient Q-basis is z^a * b with b in (1, i, j, k); the coordinate of
z^a * b sits at position ``b * degree + a``.  Orders and ideals are
canonical HNF lattices in these coordinates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from . import exactlat as xl
from .errors import ConstructionError, StructureError
from .realcyc import FieldContext, FieldElement, chebyshev_zm

# quaternion unit products: (b1, b2) -> (sign, b3)
_QTABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}

_INT64_SAFE = 2 ** 62


class QuatElement:
    """An element of H_n stored as an integer vector over a denominator."""

    __slots__ = ("alg", "num", "den", "_hash")

    def __init__(self, alg: "QuatAlgebra", num: Sequence[int], den: int = 1):
        g = den
        for v in num:
            if v:
                g = gcd(g, v)
        if den < 0:
            g = -g
        self.alg = alg
        self.num = tuple(int(v) // g for v in num)
        self.den = den // g
        self._hash = None

    @classmethod
    def from_vector(cls, alg, vec: Sequence) -> "QuatElement":
        den = 1
        for v in vec:
            den = lcm(den, Fraction(v).denominator)
        return cls(alg, [int(Fraction(v) * den) for v in vec], den)

    def __eq__(self, other):
        return isinstance(other, QuatElement) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        names = ("1", "i", "j", "k")
        parts = []
        for b, c in enumerate(self.components()):
            if not c.is_zero():
                parts.append(f"({c})*{names[b]}")
        return "Q[" + (" + ".join(parts) or "0") + "]"

    def vector(self) -> list[Fraction]:
        return [Fraction(v, self.den) for v in self.num]

    def components(self) -> list[FieldElement]:
        dF = self.alg.degree
        ctx = self.alg.ctx
        return [
            FieldElement._raw(ctx, tuple(Fraction(v, self.den) for v in self.num[b * dF:(b + 1) * dF]))
            for b in range(4)
        ]

    def __mul__(self, other):
        if isinstance(other, QuatElement):
            return self.alg.mul(self, other)
        if isinstance(other, FieldElement):
            return self.alg.scalar_mul(other, self)
        other = Fraction(other)
        return QuatElement(self.alg, [v * other.numerator for v in self.num], self.den * other.denominator)

    def __rmul__(self, other):
        if isinstance(other, FieldElement):
            return self.alg.scalar_mul(other, self)
        return self * other

    def __add__(self, other):
        den = lcm(self.den, other.den)
        a, b = den // self.den, den // other.den
        return QuatElement(self.alg, [x * a + y * b for x, y in zip(self.num, other.num)], den)

    def __neg__(self):
        return QuatElement(self.alg, [-v for v in self.num], self.den)

    def __sub__(self, other):
        return self + (-other)

    def conj(self) -> "QuatElement":
        dF = self.alg.degree
        return QuatElement(self.alg, [v if i < dF else -v for i, v in enumerate(self.num)], self.den)

    def nrd(self) -> FieldElement:
        c = self.components()
        return c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]

    def trd(self) -> FieldElement:
        return self.components()[0] * 2

    def is_scalar(self) -> bool:
        dF = self.alg.degree
        return not any(self.num[dF:])

    def inverse(self) -> "QuatElement":
        return self.alg.scalar_mul(self.nrd().inverse(), self.conj())

    def is_zero(self) -> bool:
        return not any(self.num)


class QuatAlgebra:
    """Structure constants and lattice products for H_n."""

    def __init__(self, ctx: FieldContext):
        self.ctx = ctx
        self.degree = dF = ctx.degree
        self.dim = D = 4 * dF
        table = ctx.power_table
        C = np.zeros((D, D, D), dtype=np.int64)
        for b1 in range(4):
            for b2 in range(4):
                sg, b3 = _QTABLE[(b1, b2)]
                for a1 in range(dF):
                    for a2 in range(dF):
                        row = table[a1 + a2]
                        for a3 in range(dF):
                            if row[a3]:
                                C[b1 * dF + a1, b2 * dF + a2, b3 * dF + a3] += sg * row[a3]
        self.C = C
        self.C2 = C.reshape(D, D * D)
        self.C_obj = C.astype(object)
        self.C_abs = int(np.abs(C).sum(axis=(0, 1)).max())

    # -- elements ---------------------------------------------------------
    def element(self, c1=0, ci=0, cj=0, ck=0) -> QuatElement:
        vec = []
        for c in (c1, ci, cj, ck):
            vec.extend(self.ctx.element(c).c)
        return QuatElement.from_vector(self, vec)

    @cached_property
    def one(self) -> QuatElement:
        return self.element(1)

    @cached_property
    def units(self) -> tuple[QuatElement, QuatElement, QuatElement, QuatElement]:
        return self.element(1), self.element(0, 1), self.element(0, 0, 1), self.element(0, 0, 0, 1)

    def _products(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """All products X[a] * Y[b] as an (m, p, D) integer array."""
        mx = int(np.abs(X).max()) if X.size else 0
        my = int(np.abs(Y).max()) if Y.size else 0
        if X.dtype != object and Y.dtype != object and mx * my * self.C_abs * self.dim < _INT64_SAFE:
            T = (X @ self.C2).reshape(X.shape[0], self.dim, self.dim)
            return np.einsum("bj,ajk->abk", Y, T)
        X = X.astype(object)
        Y = Y.astype(object)
        T = X.dot(self.C_obj.reshape(self.dim, self.dim * self.dim)).reshape(X.shape[0], self.dim, self.dim)
        out = np.empty((X.shape[0], Y.shape[0], self.dim), dtype=object)
        for a in range(X.shape[0]):
            out[a] = Y.dot(T[a])
        return out

    @staticmethod
    def _as_array(nums: Sequence[Sequence[int]]) -> np.ndarray:
        big = any(abs(v) >= 2 ** 40 for r in nums for v in r)
        return np.array(nums, dtype=object if big else np.int64)

    def mul(self, x: QuatElement, y: QuatElement) -> QuatElement:
        P = self._products(self._as_array([x.num]), self._as_array([y.num]))
        return QuatElement(self, [int(v) for v in P[0, 0]], x.den * y.den)

    def scalar_mul(self, c: FieldElement, x: QuatElement) -> QuatElement:
        return self.mul(self.element(c), x)

    def conj_lattice(self, L: xl.RatLattice) -> xl.RatLattice:
        dF = self.degree
        return xl.lattice_from_rows([[v if i < dF else -v for i, v in enumerate(r)] for r in L.rows], L.den)

    # -- lattices ------------------------------------------------------------
    def lattice_from_elements(self, elems: Iterable[QuatElement]) -> xl.RatLattice:
        elems = list(elems)
        den = 1
        for e in elems:
            den = lcm(den, e.den)
        return xl.lattice_from_rows([[v * (den // e.den) for v in e.num] for e in elems], den)

    def basis_elements(self, L: xl.RatLattice) -> list[QuatElement]:
        return [QuatElement(self, r, L.den) for r in L.rows]

    def lattice_product(self, A: xl.RatLattice, B: xl.RatLattice) -> xl.RatLattice:
        P = self._products(self._as_array(A.rows), self._as_array(B.rows))
        rows = P.reshape(-1, self.dim).tolist()
        return xl.lattice_from_rows(rows, A.den * B.den)

    def scale_lattice(self, c: FieldElement, L: xl.RatLattice) -> xl.RatLattice:
        el = self.element(c)
        P = self._products(self._as_array([el.num]), self._as_array(L.rows))
        return xl.lattice_from_rows(P[0].tolist(), el.den * L.den)

    def o_plus_span(self, elems: Iterable[QuatElement]) -> xl.RatLattice:
        """O+-module spanned by the given elements."""
        out = []
        zpow = [self.element(self.ctx.z ** a) for a in range(self.degree)]
        for e in elems:
            out.extend(self.mul(zp, e) for zp in zpow)
        return self.lattice_from_elements(out)

    def left_mult_matrix(self, num: Sequence[int]) -> np.ndarray:
        """Matrix (object dtype) with y * matrix = x * y, x given by its numerator."""
        return np.tensordot(np.array(num, dtype=object), self.C_obj, axes=(0, 0))

    def right_mult_matrix(self, num: Sequence[int]) -> np.ndarray:
        """Matrix (object dtype) with y * matrix = y * x, x given by its numerator."""
        return np.tensordot(self.C_obj, np.array(num, dtype=object), axes=(1, 0))

    def is_closed(self, L: xl.RatLattice) -> bool:
        return xl.lattice_contains(L, self.lattice_product(L, L))

    def order_generated(self, gens: Iterable[QuatElement]) -> xl.RatLattice:
        """Smallest O+-order containing the generators."""
        gens = [self.one, *gens]
        # products of pairs span H_n over F whenever the generators do
        L = self.o_plus_span(gens + [self.mul(a, b) for a in gens for b in gens])
        for _ in range(64):
            P = xl.lattice_sum(L, self.lattice_product(L, L))
            if P == L:
                return L
            L = P
        raise ConstructionError("order closure did not stabilise")

    def colon_right(self, I: xl.RatLattice, J: xl.RatLattice) -> xl.RatLattice:
        """{x : I * x subset of J}."""
        inv, d = J._inverse
        invm = np.array(inv, dtype=object)
        cols = []
        for r in I.rows:
            # functional x -> coordinates of (r / I.den) * x in the basis of J
            cols.append(self.left_mult_matrix(r).dot(invm))
        A = np.concatenate(cols, axis=1)  # D x (D*D), scaled
        # x * A * (J.den / (I.den * d)) integral  <=>  x in dual of columns scaled
        scale = Fraction(J.den, I.den * d)
        vecs = A.T.tolist()
        den = scale.denominator
        num = scale.numerator
        gen = xl.lattice_from_rows([[v * num for v in row] for row in vecs], den)
        return xl.dual_lattice(gen)

    def colon_left(self, I: xl.RatLattice, J: xl.RatLattice) -> xl.RatLattice:
        """{x : x * I subset of J}."""
        inv, d = J._inverse
        invm = np.array(inv, dtype=object)
        cols = []
        for r in I.rows:
            cols.append(self.right_mult_matrix(r).dot(invm))
        A = np.concatenate(cols, axis=1)
        scale = Fraction(J.den, I.den * d)
        gen = xl.lattice_from_rows([[v * scale.numerator for v in row] for row in A.T.tolist()], scale.denominator)
        return xl.dual_lattice(gen)


# ---------------------------------------------------------------------------
# discriminants and standard orders


def _trace_gram(alg: QuatAlgebra) -> list[list[int]]:
    """Ambient Gram of (x, y) -> Tr_{F/Q} trd(x * conj(y))."""
    dF = alg.degree
    ps = alg.ctx.power_sums
    D = alg.dim
    G = [[0] * D for _ in range(D)]
    for b in range(4):
        for a in range(dF):
            for c in range(dF):
                G[b * dF + a][b * dF + c] = 2 * ps[a + c]
    return G


def discriminant_ratio(alg: QuatAlgebra, O: xl.RatLattice) -> Fraction:
    """det(trace form on O) / disc(O+)^4; equal to 1 exactly for maximal orders."""
    dF = alg.degree
    ps = alg.ctx.power_sums
    T = [[ps[a + c] for c in range(dF)] for a in range(dF)]
    import flint

    disc_o = int(flint.fmpz_mat(T).det())
    det_amb = 2 ** alg.dim * disc_o ** 4
    return abs(O.covolume ** 2 * det_amb / Fraction(disc_o) ** 4)


def reduced_discriminant_is_trivial(alg: QuatAlgebra, O: xl.RatLattice) -> bool:
    return discriminant_ratio(alg, O) == 1


def q_ideal_basis(ctx: FieldContext) -> list[FieldElement]:
    """Z-basis of q = p^(e/2), the square root of (2)."""
    pi = ctx.p_generator
    g = pi ** (ctx.e // 2)
    return [g * ctx.z ** a for a in range(ctx.degree)]


def standard_order(alg: QuatAlgebra) -> xl.RatLattice:
    """The maximal order generated by 1, (1+i)a/2, (1+j)a/2, (1+i+j+k)/2."""
    ctx = alg.ctx
    half = Fraction(1, 2)
    gens = [alg.element(half, half, half, half)]
    for a in q_ideal_basis(ctx):
        gens.append(alg.element(a * half, a * half, 0, 0))
        gens.append(alg.element(a * half, 0, a * half, 0))
    O = alg.order_generated(gens)
    if not alg.is_closed(O):
        raise ConstructionError("standard order is not closed under multiplication")
    if not reduced_discriminant_is_trivial(alg, O):
        raise ConstructionError("standard order is not maximal")
    return O


def lipschitz_hurwitz_order(alg: QuatAlgebra) -> xl.RatLattice:
    """O+<1, i, j, (1+i+j+k)/2>, an order of reduced discriminant (2)."""
    half = Fraction(1, 2)
    return alg.order_generated([alg.element(0, 1), alg.element(0, 0, 1), alg.element(half, half, half, half)])


# ---------------------------------------------------------------------------
# ideals of norm p


def nrd_val_of_left_ideal(alg: QuatAlgebra, I: xl.RatLattice, O: xl.RatLattice) -> int:
    """k with nrd(I) = p^k, read off from [O : I] = q^(2k)."""
    idx = xl.lattice_index(I, O)
    q = alg.ctx.q
    k = 0
    if idx >= 1:
        while idx > 1:
            if idx.denominator != 1 or idx.numerator % (q * q):
                raise StructureError("index is not a power of q^2")
            idx /= q * q
            k += 1
    else:
        while idx < 1:
            if idx.numerator != 1 or idx.denominator % (q * q):
                raise StructureError("index is not a power of q^2")
            idx *= q * q
            k -= 1
    return k


@dataclass
class ResidueAlgebra:
    """M / 2M with the image of pM, used to find the ideals of norm p."""

    order: xl.RatLattice
    basis: list[QuatElement]
    rows_by_right: list[list[int]]  # rows_by_right[j][i]: bits of b_i * b_j
    p_image: list[int]  # rref basis of pM / 2M
    dim: int

    def left_ideal_space(self, mask: int) -> list[int]:
        """F_2-span of M*x + pM/2M for x with coordinate bits ``mask``."""
        rows = [0] * self.dim
        for j in range(self.dim):
            if mask >> j & 1:
                R = self.rows_by_right[j]
                for i in range(self.dim):
                    rows[i] ^= R[i]
        return xl.f2_rref(rows + self.p_image)

    def lift(self, space: Sequence[int]) -> xl.RatLattice:
        D = self.dim
        rows = []
        den = self.order.den
        for v in space:
            rows.append([sum(self.order.rows[i][c] for i in range(D) if v >> i & 1) for c in range(D)])
        for r in self.order.rows:
            rows.append([2 * x for x in r])
        return xl.lattice_from_rows(rows, den)

    def space_of(self, L: xl.RatLattice) -> list[int]:
        """Image of a lattice between 2M and M in M/2M."""
        bits = []
        for r in L.rows:
            coords = self.order.coordinates([Fraction(v, L.den) for v in r])
            m = 0
            for i, c in enumerate(coords):
                if c.denominator != 1:
                    raise StructureError("lattice not contained in the order")
                if c.numerator % 2:
                    m |= 1 << i
            bits.append(m)
        return xl.f2_rref(bits)

    def conjugation_action(self, g: QuatElement, ginv: QuatElement) -> list[int]:
        """Bit rows of x -> g x g^-1 on M/2M (g must normalise M)."""
        alg = g.alg
        out = []
        for b in self.basis:
            y = alg.mul(alg.mul(g, b), ginv)
            coords = self.order.coordinates(y.vector())
            m = 0
            for i, c in enumerate(coords):
                if c.denominator != 1:
                    raise StructureError("element does not normalise the order")
                if c.numerator % 2:
                    m |= 1 << i
            out.append(m)
        return out


def residue_algebra(alg: QuatAlgebra, M: xl.RatLattice) -> ResidueAlgebra:
    D = alg.dim
    basis = alg.basis_elements(M)
    X = alg._as_array(M.rows)
    P = alg._products(X, X)  # P[i, j] = b_i * b_j scaled by den^2
    inv, d = M._inverse
    invm = np.array(inv, dtype=object)
    coords = P.reshape(D * D, D).astype(object).dot(invm)  # scaled by den^2 * d / den = den * d
    scale = M.den * d
    coords = coords.reshape(D, D, D)
    rows_by_right = [[0] * D for _ in range(D)]
    for i in range(D):
        for j in range(D):
            m = 0
            for c in range(D):
                v = coords[i, j, c]
                if v % scale:
                    raise StructureError("lattice is not closed under multiplication")
                if (v // scale) % 2:
                    m |= 1 << c
            rows_by_right[j][i] = m
    pM = alg.scale_lattice(alg.ctx.p_generator, M)
    ra = ResidueAlgebra(M, basis, rows_by_right, [], D)
    ra.p_image = ra.space_of(pM)
    return ra


def left_ideals_norm_p(alg: QuatAlgebra, M: xl.RatLattice, ra: ResidueAlgebra | None = None) -> list[xl.RatLattice]:
    """The q+1 left M-ideals I with pM < I < M and [M : I] = q^2."""
    ra = ra or residue_algebra(alg, M)
    q = alg.ctx.q
    f = alg.ctx.f
    target = len(ra.p_image) + 2 * f
    found: dict[tuple[int, ...], list[int]] = {}
    rng = random.Random(20240601)
    tries = 0
    limit = 400 * (q + 1) ** 2
    while len(found) < q + 1 and tries < limit:
        tries += 1
        mask = rng.getrandbits(alg.dim)
        space = ra.left_ideal_space(mask)
        if len(space) == target:
            found.setdefault(tuple(space), space)
    if len(found) != q + 1:
        raise StructureError(f"found {len(found)} ideals of norm p, expected {q + 1}")
    ideals = [ra.lift(sp) for sp in found.values()]
    ideals.sort(key=lambda L: (L.den, L.rows))
    return ideals


def right_order(alg: QuatAlgebra, I: xl.RatLattice) -> xl.RatLattice:
    return alg.colon_right(I, I)


def left_order(alg: QuatAlgebra, I: xl.RatLattice) -> xl.RatLattice:
    return alg.colon_left(I, I)


def bar_ideal(alg: QuatAlgebra, I: xl.RatLattice, k: int = 1) -> xl.RatLattice:
    """p * I^-1 for a left ideal of norm p^k, via I^-1 = conj(I) / nrd(I)."""
    Ic = alg.conj_lattice(I)
    if k == 1:
        return Ic
    pi = alg.ctx.p_generator
    return alg.scale_lattice(pi ** (1 - k), Ic)


def eichler_order(M: xl.RatLattice, M2: xl.RatLattice) -> xl.RatLattice:
    return xl.lattice_intersect(M, M2)


def connecting_ideal(alg: QuatAlgebra, M: xl.RatLattice, M2: xl.RatLattice) -> tuple[xl.RatLattice, int]:
    """Integral left-M right-M2 ideal of norm p^k, k the tree distance."""
    J = alg.lattice_product(M, M2)
    idx = xl.lattice_index(M, J)
    q2 = alg.ctx.q ** 2
    k = 0
    while idx > 1:
        if idx.denominator != 1 or idx.numerator % q2:
            raise StructureError("orders differ away from p")
        idx /= q2
        k += 1
    if idx != 1:
        raise StructureError("orders differ away from p")
    if k == 0:
        return M, 0
    return alg.scale_lattice(alg.ctx.p_generator ** k, J), k


def path_vertex(alg: QuatAlgebra, M: xl.RatLattice, I_conn: xl.RatLattice, a: int) -> xl.RatLattice:
    """Right order of I_conn + p^a M: the vertex at distance a towards the far end."""
    if a == 0:
        return M
    Ia = xl.lattice_sum(I_conn, alg.scale_lattice(alg.ctx.p_generator ** a, M))
    return right_order(alg, Ia)


def conjugate_lattice_by(alg: QuatAlgebra, g: QuatElement, L: xl.RatLattice) -> xl.RatLattice:
    """g L g^-1."""
    ginv = g.inverse()
    A = alg._as_array([g.num])
    P = alg._products(A, alg._as_array(L.rows))[0]
    Bi = alg._as_array([ginv.num])
    Q = alg._products(alg._as_array(P.tolist()), Bi)[:, 0, :]
    return xl.lattice_from_rows(Q.tolist(), g.den * L.den * ginv.den)


# ---------------------------------------------------------------------------
# gates


@dataclass
class Gates:
    h: QuatElement
    t: QuatElement
    T_order: xl.RatLattice


def build_gates(alg: QuatAlgebra) -> Gates:
    """h = -i-k, t_n = 1 + cos(2pi/n) + sin(2pi/n) k and the order O+<t_n, j>."""
    ctx = alg.ctx
    n = ctx.n
    h = alg.element(0, -1, 0, -1)
    z = ctx.z
    t = alg.element(1 + z / 2, 0, 0, -chebyshev_zm(ctx, 1 + n // 4) / 2)
    j = alg.element(0, 0, 1)
    T = alg.order_generated([t, j])
    return Gates(h, t, T)
