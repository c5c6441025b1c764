"""Exact integer and rational lattice algorithms.

Every lattice is stored as ``rows / den`` with ``rows`` a square integer
matrix in row Hermite normal form, so equal lattices have equal
representations.  Heavy lifting (HNF, exact LLL) is delegated to FLINT; the
short-vector enumeration is a Fincke-Pohst search whose output is always
re-checked in exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor, gcd, isqrt, lcm, sqrt
from typing import Iterable, Sequence

import flint
import numba
import numpy as np

from .errors import DefinitenessError, RankError, ShapeError

IntRows = Sequence[Sequence[int]]


def _to_int_rows(mat) -> list[list[int]]:
    return [[int(v) for v in row] for row in mat.tolist()]


def hnf(rows: IntRows) -> list[list[int]]:
    """Row Hermite normal form of a full column rank integer matrix.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``.
    """
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        raise RankError("empty generating set")
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ShapeError("ragged matrix")
    h = flint.fmpz_mat(rows).hnf()
    out = _to_int_rows(h)[:ncols]
    if len(out) < ncols or any(out[i][i] == 0 for i in range(ncols)):
        raise RankError("rows do not span a full-rank lattice")
    return out


@dataclass(frozen=True)
class RatLattice:
    """The lattice spanned by the rows of ``rows`` divided by ``den``."""

    den: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def matrix(self) -> flint.fmpz_mat:
        return flint.fmpz_mat([list(r) for r in self.rows])

    @cached_property
    def _inverse(self) -> tuple[list[list[int]], int]:
        num, d = self.matrix.inv().numer_denom()
        return _to_int_rows(num), int(d)

    @cached_property
    def covolume(self) -> Fraction:
        det = 1
        for i in range(self.dim):
            det *= self.rows[i][i]
        return Fraction(det, self.den ** self.dim)

    def coordinates(self, vec: Sequence) -> list[Fraction]:
        """Coordinates of an ambient rational vector in the HNF basis."""
        inv, d = self._inverse
        out = []
        for j in range(self.dim):
            s = Fraction(0)
            for i, v in enumerate(vec):
                if v:
                    s += v * inv[i][j]
            out.append(s * self.den / d)
        return out

    def __contains__(self, vec) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(vec))

    def basis_vectors(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in r] for r in self.rows]

    def to_json(self) -> dict:
        return {"den": self.den, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "RatLattice":
        return lattice_from_rows(data["rows"], data["den"])


def lattice_from_rows(rows: IntRows, den: int = 1) -> RatLattice:
    """Canonical lattice spanned by integer ``rows`` scaled by ``1/den``."""
    if den <= 0:
        raise ShapeError("denominator must be positive")
    h = hnf(rows)
    g = den
    for r in h:
        for v in r:
            if v:
                g = gcd(g, v)
                if g == 1:
                    break
        if g == 1:
            break
    if g > 1:
        h = [[v // g for v in r] for r in h]
        den //= g
    return RatLattice(den, tuple(tuple(r) for r in h))


def lattice_from_vectors(vectors: Iterable[Sequence]) -> RatLattice:
    """Lattice spanned by rational vectors (Fractions or ints)."""
    vectors = [list(v) for v in vectors]
    den = 1
    for v in vectors:
        for x in v:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
    rows = [[int(x * den) for x in v] for v in vectors]
    return lattice_from_rows(rows, den)


def _common(lats: Sequence[RatLattice]) -> int:
    dims = {L.dim for L in lats}
    if len(dims) != 1:
        raise ShapeError("ambient rank mismatch")
    den = 1
    for L in lats:
        den = lcm(den, L.den)
    return den


def lattice_sum(*lats: RatLattice) -> RatLattice:
    den = _common(lats)
    rows = []
    for L in lats:
        s = den // L.den
        rows.extend([v * s for v in r] for r in L.rows)
    return lattice_from_rows(rows, den)


def lattice_scale(L: RatLattice, c: Fraction | int) -> RatLattice:
    c = Fraction(c)
    return lattice_from_rows([[v * c.numerator for v in r] for r in L.rows], L.den * c.denominator)


def dual_lattice(L: RatLattice) -> RatLattice:
    """Dual with respect to the standard dot product."""
    inv, d = L._inverse
    n = L.dim
    rows = [[inv[i][j] * L.den for i in range(n)] for j in range(n)]
    return lattice_from_rows(rows, d)


def lattice_intersect(L1: RatLattice, L2: RatLattice) -> RatLattice:
    if L1.dim != L2.dim:
        raise ShapeError("ambient rank mismatch")
    if L1 == L2:
        return L1
    return dual_lattice(lattice_sum(dual_lattice(L1), dual_lattice(L2)))


def lattice_index(L_sub: RatLattice, L_sup: RatLattice) -> Fraction:
    """Generalised index: covolume ratio, the group index when nested."""
    if L_sub.dim != L_sup.dim:
        raise ShapeError("ambient rank mismatch")
    return L_sub.covolume / L_sup.covolume


def lattice_contains(L_sup: RatLattice, L_sub: RatLattice) -> bool:
    """True when ``L_sub`` is a sublattice of ``L_sup``."""
    if L_sub.dim != L_sup.dim:
        raise ShapeError("ambient rank mismatch")
    inv, d = L_sup._inverse
    prod = flint.fmpz_mat([list(r) for r in L_sub.rows]) * flint.fmpz_mat(inv)
    scale = L_sup.den
    mod = L_sub.den * d
    return all(int(v) * scale % mod == 0 for v in prod.entries())


# ---------------------------------------------------------------------------
# Gram matrices, LLL and enumeration


def _integral_gram(g: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    n = len(g)
    if any(len(r) != n for r in g):
        raise ShapeError("Gram matrix must be square")
    den = 1
    for r in g:
        for v in r:
            den = lcm(den, Fraction(v).denominator)
    G = [[int(Fraction(v) * den) for v in r] for r in g]
    for i in range(n):
        for j in range(i):
            if G[i][j] != G[j][i]:
                raise ShapeError("Gram matrix must be symmetric")
    return G, den


def is_positive_definite(g: Sequence[Sequence]) -> bool:
    """Exact test via the signs of the LDL^T pivots."""
    n = len(g)
    a = [[Fraction(v) for v in r] for r in g]
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return True


def lll_reduce(g: Sequence[Sequence]) -> tuple[list[list[int]], list[list[Fraction]]]:
    """Exact LLL (delta = 0.99) of a positive definite Gram matrix.

    Returns ``(T, R)`` with ``T`` unimodular and ``R = T g T^t``.
    """
    G, den = _integral_gram(g)
    if not is_positive_definite(G):
        raise DefinitenessError("Gram matrix is not positive definite")
    R, T = flint.fmpz_mat(G).lll(transform=True, rep="gram", gram="exact", delta=0.99)
    red = [[Fraction(int(v), den) for v in r] for r in R.tolist()]
    return _to_int_rows(T), red


def lovasz_holds(g: Sequence[Sequence], delta: Fraction = Fraction(99, 100)) -> bool:
    """Exact size-reduction and Lovasz check on a Gram matrix."""
    n = len(g)
    G = [[Fraction(v) for v in r] for r in g]
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
            mu[i][j] = s / B[j]
        B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(51, 100):
                return False
    return all(B[i] >= (delta - mu[i][i - 1] ** 2) * B[i - 1] for i in range(1, n))


@numba.njit(cache=True)
def _fp_kernel(q, mu, bound, cap):
    m = q.shape[0]
    x = np.zeros(m, np.int64)
    ub = np.zeros(m, np.int64)
    cen = np.zeros(m)
    partial = np.zeros(m + 1)
    allzero = np.zeros(m + 1, np.bool_)
    out = np.zeros((cap, m), np.int64)
    count = 0
    overflow = False
    i = m - 1
    allzero[m - 1] = True
    fresh = True
    while True:
        if fresh:
            c = 0.0
            for j in range(i + 1, m):
                c -= mu[i, j] * x[j]
            cen[i] = c
            rem = bound - partial[i + 1]
            if rem < 0.0:
                lo = 1
                hi = 0
            else:
                r = np.sqrt(rem / q[i])
                lo = np.int64(np.ceil(c - r - 1e-9))
                hi = np.int64(np.floor(c + r + 1e-9))
            if allzero[i] and lo < 0:
                lo = 0
            x[i] = lo
            ub[i] = hi
            fresh = False
        if x[i] > ub[i]:
            i += 1
            if i == m:
                break
            x[i] += 1
            continue
        t = x[i] - cen[i]
        val = partial[i + 1] + q[i] * t * t
        if val > bound:
            x[i] += 1
            continue
        if i == 0:
            if not (allzero[0] and x[0] == 0):
                if count < cap:
                    for j in range(m):
                        out[count, j] = x[j]
                    count += 1
                else:
                    overflow = True
                    break
            x[0] += 1
            continue
        partial[i] = val
        i -= 1
        allzero[i] = allzero[i + 1] and x[i + 1] == 0
        fresh = True
    return out[:count], overflow


def _float_cholesky(G: list[list[int]]):
    n = len(G)
    a = np.array(G, dtype=np.float64)
    q = np.zeros(n)
    mu = np.zeros((n, n))
    for i in range(n):
        s = a[i, i] - sum(mu[k, i] ** 2 * q[k] for k in range(i))
        q[i] = s
        for j in range(i + 1, n):
            t = a[i, j] - sum(mu[k, i] * mu[k, j] * q[k] for k in range(i))
            mu[i, j] = t / s
    return q, mu


def _quad(G: list[list[int]], x: Sequence[int]) -> int:
    n = len(x)
    s = 0
    for i in range(n):
        if x[i]:
            row = G[i]
            t = 0
            for j in range(n):
                if x[j]:
                    t += row[j] * x[j]
            s += x[i] * t
    return s


class ShortVectorEnumerator:
    """Reusable Fincke-Pohst enumerator for one Gram matrix.

    The reduction transform is computed once; :meth:`vectors` can then be
    called with several bounds.
    """

    def __init__(self, g: Sequence[Sequence]):
        self.G, self.den = _integral_gram(g)
        self.n = len(self.G)
        if not is_positive_definite(self.G):
            raise DefinitenessError("Gram matrix is not positive definite")
        R, T = flint.fmpz_mat(self.G).lll(transform=True, rep="gram", gram="exact", delta=0.99)
        self.T = _to_int_rows(T)
        self.R = _to_int_rows(R)
        self.q, self.mu = _float_cholesky(self.R)

    def vectors(self, bound) -> list[tuple[int, ...]]:
        """All nonzero x with x g x^t <= bound, one per +-pair, lexicographic."""
        bound = Fraction(bound)
        if bound <= 0:
            return []
        ib = bound * self.den
        fb = float(ib) * (1 + 1e-9) + 1e-9
        cap = 1024
        while True:
            ys, overflow = _fp_kernel(self.q, self.mu, fb, cap)
            if not overflow:
                break
            cap *= 8
        out = []
        T = self.T
        for y in ys:
            y = [int(v) for v in y]
            x = [0] * self.n
            for i, c in enumerate(y):
                if c:
                    row = T[i]
                    for j in range(self.n):
                        x[j] += c * row[j]
            if _quad(self.R, y) > ib:
                continue
            for v in x:
                if v:
                    if v < 0:
                        x = [-w for w in x]
                    break
            out.append(tuple(x))
        out.sort()
        return out


def enumerate_short_vectors(g: Sequence[Sequence], bound) -> list[tuple[int, ...]]:
    """All nonzero integer x with x^t g x <= bound, one per +-pair."""
    if Fraction(bound) <= 0:
        return []
    return ShortVectorEnumerator(g).vectors(bound)


def quadratic_value(g: Sequence[Sequence], x: Sequence[int]) -> Fraction:
    G, den = _integral_gram(g)
    return Fraction(_quad(G, x), den)


# ---------------------------------------------------------------------------
# Linear algebra over F_2.  Vectors are Python ints used as bit masks.


def f2_rref(rows: Iterable[int]) -> list[int]:
    """Reduced echelon basis of the span, pivots on the highest bits."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            if r ^ b < r:
                r ^= b
        if r:
            basis = [b ^ r if b ^ r < b else b for b in basis]
            basis.append(r)
            basis.sort(reverse=True)
    return basis


def f2_rank(rows: Iterable[int]) -> int:
    return len(f2_rref(rows))


def f2_image(rows: Sequence[int]) -> list[int]:
    """Basis of the image of the map v -> v*A (A given by its rows)."""
    return f2_rref(rows)


def f2_kernel(rows: Sequence[int]) -> list[int]:
    """Basis of {v : v*A = 0}; bit i of v selects row i of A."""
    m = len(rows)
    aug = [(r << m) | (1 << i) for i, r in enumerate(rows)]
    red = f2_rref(aug)
    low = (1 << m) - 1
    return [v & low for v in red if v >> m == 0]


def f2_solve(rows: Sequence[int], target: int) -> int | None:
    """Some v with v*A = target, or None when target is not in the image."""
    m = len(rows)
    basis: list[tuple[int, int]] = []
    for i, r in enumerate(rows):
        comb = 1 << i
        for b, c in basis:
            if r ^ b < r:
                r ^= b
                comb ^= c
        if r:
            basis.append((r, comb))
            basis.sort(reverse=True)
    comb = 0
    for b, c in basis:
        if target ^ b < target:
            target ^= b
            comb ^= c
    return comb if target == 0 else None
