"""Arithmetic in the real cyclotomic field F_n = Q(zeta_n + zeta_n^-1).

Elements are coefficient vectors in the power basis of z = zeta + zeta^-1,
which is also a Z-basis of the ring of integers.  Real embeddings send z to
2 cos(2 pi a / n) and are enclosed with interval arithmetic whenever a sign
is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import flint
import mpmath
import sympy
from mpmath import iv

from . import exactlat as xl
from .errors import DomainError, HypothesisError, InternalError, StructureError


def _phi(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def split_level(n: int) -> tuple[int, int]:
    """Write n = 2^s * d with d odd."""
    s = 0
    while n % 2 == 0:
        n //= 2
        s += 1
    return s, n


def real_minpoly(n: int) -> list[int]:
    """Coefficients (constant first) of the minimal polynomial of 2cos(2pi/n).

    Writes the cyclotomic polynomial as x^d * psi(x + 1/x) and peels off
    psi one power of (x + 1/x) at a time.
    """
    x = sympy.Symbol("x")
    phi = [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs())]
    deg = len(phi) - 1
    d = deg // 2
    # Laurent coefficients of x^-d * Phi_n: index k stands for x^(k - d)
    rest = {k - d: c for k, c in enumerate(phi) if c}
    psi = [0] * (d + 1)
    binom = [[1]]
    for m in range(1, d + 1):
        prev = binom[-1]
        binom.append([1] + [prev[i] + prev[i + 1] for i in range(m - 1)] + [1])
    for m in range(d, -1, -1):
        c = rest.get(m, 0)
        psi[m] = c
        if c:
            # (x + 1/x)^m = sum_i binom(m, i) x^(m - 2i)
            for i, b in enumerate(binom[m]):
                e = m - 2 * i
                rest[e] = rest.get(e, 0) - c * b
    if any(v for v in rest.values()):
        raise InternalError("cyclotomic polynomial is not palindromic")
    return psi


def hypothesis_profile(n: int) -> dict:
    """Modular data on the primes above 2 in F_n and in Q(zeta_n)."""
    if n % 4:
        raise DomainError("level must be divisible by 4")
    _, d = split_level(n)
    units = [a for a in range(1, d + 1) if gcd(a, d) == 1] if d > 1 else [0]
    phi_d = len(units)

    def generated(gens):
        seen = {1 % d}
        frontier = [1 % d]
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = a * g % d
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return seen

    if d == 1:
        h_pm, h_two = {0}, {0}
    else:
        h_pm = generated([2, d - 1])
        h_two = generated([2])
    minus_one = (d - 1) % d if d > 1 else 0
    return {
        "satisfied": len(h_pm) == phi_d,
        "r_plus": phi_d // len(h_pm),
        "r": phi_d // len(h_two),
        "splits_in_K": minus_one not in h_two,
        "subgroup": sorted(h_pm),
    }


class FieldElement:
    """An element of F_n in the power basis of z."""

    __slots__ = ("ctx", "c", "_hash")

    def __init__(self, ctx: "FieldContext", coeffs: Sequence):
        self.ctx = ctx
        self.c = tuple(Fraction(v) for v in coeffs)
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, ctx, coeffs):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.c = coeffs
        obj._hash = None
        return obj

    def __repr__(self):
        terms = []
        for a, v in enumerate(self.c):
            if v:
                terms.append(f"{v}" if a == 0 else f"{v}*z^{a}")
        return "F(" + (" + ".join(terms) or "0") + ")"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        return isinstance(other, FieldElement) and self.c == other.c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other
        return self.ctx.element(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement._raw(self.ctx, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(self.ctx, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement._raw(self.ctx, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement._raw(self.ctx, tuple(a * other for a in self.c))
        return self.ctx.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement._raw(self.ctx, tuple(a / other for a in self.c))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ctx.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DomainError("inverse of zero")
        return self.ctx.inverse(self)

    def norm(self) -> Fraction:
        return self.ctx.norm(self)

    def trace(self) -> Fraction:
        return self.ctx.trace(self)

    def embeddings(self, prec: int = 53) -> list:
        return self.ctx.numeric(self, prec)


@dataclass
class FieldContext:
    """Everything about F_n that the quaternion layers need."""

    n: int
    s: int
    d: int
    degree: int
    minpoly: tuple[int, ...]
    embedding_indices: tuple[int, ...]
    prime_p: xl.RatLattice | None = None
    e: int = 0
    f: int = 0
    unit_gens: list = field(default_factory=list)
    p_generator: FieldElement | None = None
    p_generator_tp: FieldElement | None = None
    tp_unit_class_reps: list = field(default_factory=list)

    # -- basic tables ------------------------------------------------------
    @cached_property
    def power_table(self) -> list[list[int]]:
        """Coefficients of z^m for 0 <= m <= 2*degree - 2."""
        dF = self.degree
        rows = []
        cur = [0] * dF
        cur[0] = 1
        for m in range(2 * dF - 1):
            rows.append(cur[:])
            # multiply by z
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for a in range(dF):
                    cur[a] -= top * self.minpoly[a]
        return rows

    @cached_property
    def power_sums(self) -> list[int]:
        """Tr(z^m) for 0 <= m <= 2*degree - 2."""
        dF = self.degree
        tz = [self._trace_basis(a) for a in range(dF)]
        return [sum(c * t for c, t in zip(row, tz)) for row in self.power_table]

    def _trace_basis(self, a: int) -> int:
        # Newton identities for the monic minimal polynomial
        dF = self.degree
        coef = self.minpoly  # constant first, leading 1
        e = [(-1) ** k * coef[dF - k] for k in range(dF + 1)]  # elementary symmetric
        p = [dF]
        for m in range(1, a + 1):
            s = 0
            for k in range(1, m):
                if k <= dF:
                    s += (-1) ** (k - 1) * e[k] * p[m - k]
            if m <= dF:
                s += (-1) ** (m - 1) * m * e[m]
            p.append(s)
        return p[a]

    @cached_property
    def one(self) -> FieldElement:
        return self.element(1)

    @cached_property
    def z(self) -> FieldElement:
        c = [0] * self.degree
        c[1] = 1
        return FieldElement(self, c)

    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (int, Fraction)):
            c = [Fraction(0)] * self.degree
            c[0] = Fraction(value)
            return FieldElement._raw(self, tuple(c))
        return FieldElement(self, value)

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        dF = self.degree
        prod = [Fraction(0)] * (2 * dF - 1)
        for a, u in enumerate(x.c):
            if u:
                for b, v in enumerate(y.c):
                    if v:
                        prod[a + b] += u * v
        out = list(prod[:dF])
        table = self.power_table
        for m in range(dF, 2 * dF - 1):
            w = prod[m]
            if w:
                row = table[m]
                for a in range(dF):
                    if row[a]:
                        out[a] += w * row[a]
        return FieldElement._raw(self, tuple(out))

    def mult_matrix(self, x: FieldElement) -> list[list[Fraction]]:
        """Rows: coefficients of x * z^a."""
        rows = []
        cur = x
        for a in range(self.degree):
            rows.append(list(cur.c))
            cur = cur * self.z
        return rows

    def inverse(self, x: FieldElement) -> FieldElement:
        m = flint.fmpq_mat([[flint.fmpq(v.numerator, v.denominator) for v in r] for r in self.mult_matrix(x)])
        rhs = flint.fmpq_mat([[1] + [0] * (self.degree - 1)])
        sol = m.transpose().solve(rhs.transpose())
        return FieldElement(self, [Fraction(int(v.p), int(v.q)) for v in sol.entries()])

    def norm(self, x: FieldElement) -> Fraction:
        m = flint.fmpq_mat([[flint.fmpq(v.numerator, v.denominator) for v in r] for r in self.mult_matrix(x)])
        det = m.det()
        return Fraction(int(det.p), int(det.q))

    def trace(self, x: FieldElement) -> Fraction:
        ps = self.power_sums
        return sum((v * ps[a] for a, v in enumerate(x.c)), Fraction(0))

    # -- embeddings --------------------------------------------------------
    def numeric(self, x: FieldElement, prec: int = 53) -> list:
        with mpmath.workprec(prec):
            out = []
            for a in self.embedding_indices:
                r = 2 * mpmath.cos(2 * mpmath.pi * a / self.n)
                acc = mpmath.mpf(0)
                for v in reversed(x.c):
                    acc = acc * r + mpmath.mpf(v.numerator) / v.denominator
                out.append(acc)
            return out

    def signs(self, x: FieldElement) -> tuple[int, ...]:
        """Signs (+1/-1) of x under every real embedding, certified."""
        if x.is_zero():
            raise DomainError("sign of zero")
        prec = 60
        while prec < 20000:
            old = iv.prec
            iv.prec = prec
            try:
                out = []
                ok = True
                for a in self.embedding_indices:
                    r = 2 * iv.cos(2 * iv.pi * a / self.n)
                    acc = iv.mpf(0)
                    for v in reversed(x.c):
                        acc = acc * r + iv.mpf(v.numerator) / v.denominator
                    if acc.a > 0:
                        out.append(1)
                    elif acc.b < 0:
                        out.append(-1)
                    else:
                        ok = False
                        break
            finally:
                iv.prec = old
            if ok:
                return tuple(out)
            prec *= 2
        raise InternalError("could not resolve embedding signs")

    def sign_bits(self, x: FieldElement) -> int:
        bits = 0
        for i, sg in enumerate(self.signs(x)):
            if sg < 0:
                bits |= 1 << i
        return bits

    # -- auxiliary split primes for quadratic characters -----------------------
    @cached_property
    def split_primes(self) -> list[tuple[int, list[int]]]:
        """Primes l = 1 mod n with the images of z under the split embeddings."""
        out = []
        ell = self.n + 1
        while len(out) < 24:
            if sympy.isprime(ell) and ell > 3:
                g = sympy.primitive_root(ell)
                w = pow(g, (ell - 1) // self.n, ell)
                roots = [(pow(w, a, ell) + pow(w, ell - 1 - a, ell)) % ell for a in self.embedding_indices]
                out.append((ell, roots))
            ell += self.n
        return out

    def character_bits(self, x: FieldElement) -> int:
        """Signs followed by quadratic residue symbols at the split primes.

        Bit positions that cannot be evaluated (x vanishing mod the prime) are
        left at zero.  Squares give the zero vector.
        """
        bits = self.sign_bits(x)
        pos = self.degree
        for ell, roots in self.split_primes:
            for r in roots:
                val = 0
                ok = True
                for v in reversed(x.c):
                    if v.denominator % ell == 0:
                        ok = False
                        break
                    val = (val * r + v.numerator * pow(v.denominator, ell - 2, ell)) % ell
                if ok and val and pow(val, (ell - 1) // 2, ell) != 1:
                    bits |= 1 << pos
                pos += 1
        return bits

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        def fe(x):
            return [str(v) for v in x.c] if x is not None else None

        return {
            "n": self.n,
            "minpoly": list(self.minpoly),
            "e": self.e,
            "f": self.f,
            "prime_p": self.prime_p.to_json() if self.prime_p else None,
            "p_generator": fe(self.p_generator),
            "p_generator_tp": fe(self.p_generator_tp),
            "unit_gens": [fe(u) for u in self.unit_gens],
            "tp_unit_class_reps": [fe(u) for u in self.tp_unit_class_reps],
        }

    @property
    def q(self) -> int:
        return 2 ** self.f

    def from_coeffs(self, coeffs) -> FieldElement:
        return FieldElement(self, [Fraction(v) for v in coeffs])


def build_field(n: int, check_hypothesis: bool = True) -> FieldContext:
    """Construct F_n with its prime above 2 and unit data."""
    if n % 4 or n < 8:
        raise DomainError(f"level {n} must satisfy 4 | n and n >= 8")
    prof = hypothesis_profile(n)
    if check_hypothesis and not prof["satisfied"]:
        raise HypothesisError(
            f"<2, -1> is a proper subgroup of (Z/{split_level(n)[1]}Z)^x for n = {n}",
            prof["subgroup"],
        )
    s, d = split_level(n)
    psi = real_minpoly(n)
    ctx = FieldContext(
        n=n,
        s=s,
        d=d,
        degree=len(psi) - 1,
        minpoly=tuple(psi),
        embedding_indices=tuple(a for a in range(1, n // 2) if gcd(a, n) == 1),
    )
    if not prof["satisfied"]:
        return ctx
    ideal, e, f = prime_above_2(ctx)
    ctx.prime_p, ctx.e, ctx.f = ideal, e, f
    ctx.p_generator = _ideal_generator(ctx, ideal, 2 ** f)
    if ctx.p_generator is None:
        raise StructureError("prime above 2 is not principal")
    ctx.unit_gens = _unit_generators(ctx)
    data = unit_classes(ctx)
    ctx.tp_unit_class_reps = data["tp_reps"]
    ctx.p_generator_tp = data["p_generator_tp"]
    return ctx


# ---------------------------------------------------------------------------
# ideals of O+ as lattices in the power basis


def ideal_from_elements(ctx: FieldContext, gens: Iterable[FieldElement]) -> xl.RatLattice:
    """O+-ideal generated by the given elements."""
    vecs = []
    for g in gens:
        cur = g
        for _ in range(ctx.degree):
            vecs.append(list(cur.c))
            cur = cur * ctx.z
    return xl.lattice_from_vectors(vecs)


def ideal_mul(ctx: FieldContext, I: xl.RatLattice, J: xl.RatLattice) -> xl.RatLattice:
    a = [ctx.from_coeffs(v) for v in I.basis_vectors()]
    b = [ctx.from_coeffs(v) for v in J.basis_vectors()]
    return xl.lattice_from_vectors([list((x * y).c) for x in a for y in b])


def ring_of_integers(ctx: FieldContext) -> xl.RatLattice:
    dF = ctx.degree
    return xl.lattice_from_rows([[int(i == j) for j in range(dF)] for i in range(dF)])


def prime_above_2(ctx: FieldContext) -> tuple[xl.RatLattice, int, int]:
    """Nilradical of O+/2 via iterated Frobenius, lifted to O+."""
    dF = ctx.degree
    mod2 = [c % 2 for c in ctx.minpoly]

    def reduce_bits(coeffs):
        # coeffs: list of bits of arbitrary length, reduce modulo minpoly mod 2
        c = coeffs[:]
        for m in range(len(c) - 1, dF - 1, -1):
            if c[m]:
                c[m] = 0
                for a in range(dF):
                    if mod2[a]:
                        c[m - dF + a] ^= 1
        return c[:dF] + [0] * max(0, dF - len(c))

    def to_int(bits):
        return sum(b << i for i, b in enumerate(bits))

    # squaring is linear over F_2; rows are images of the basis z^a
    frob = []
    for a in range(dF):
        v = [0] * (2 * dF)
        v[2 * a] = 1
        frob.append(to_int(reduce_bits(v)))

    def apply(rows, vec):
        out = 0
        for i in range(dF):
            if vec >> i & 1:
                out ^= rows[i]
        return out

    power = frob[:]
    k = 1
    while 2 ** k < dF:
        power = [apply(frob, r) for r in power]
        k += 1
    nil = xl.f2_kernel(power)
    fixed = xl.f2_kernel([frob[i] ^ (1 << i) for i in range(dF)])
    if len(fixed) != 1:
        raise HypothesisError(f"{len(fixed)} primes above 2 for n = {ctx.n}")
    f = dF - len(nil)
    if dF % f:
        raise StructureError("residue degree does not divide the degree")
    e = dF // f
    rows = [[2 * int(i == j) for j in range(dF)] for i in range(dF)]
    for v in nil:
        rows.append([v >> i & 1 for i in range(dF)])
    ideal = xl.lattice_from_rows(rows)
    # sanity: p^e = 2 O+
    pe = ideal
    for _ in range(e - 1):
        pe = ideal_mul(ctx, pe, ideal)
    two = xl.lattice_from_rows([[2 * int(i == j) for j in range(dF)] for i in range(dF)])
    if pe != two:
        raise StructureError("p^e differs from 2 O+")
    return ideal, e, f


def val_p(ctx: FieldContext, x: FieldElement) -> int:
    """Valuation at the unique prime above 2, from the 2-adic norm."""
    if x.is_zero():
        raise DomainError("valuation of zero")
    nm = abs(x.norm())
    v = 0
    num, den = nm.numerator, nm.denominator
    while num % 2 == 0:
        num //= 2
        v += 1
    while den % 2 == 0:
        den //= 2
        v -= 1
    if v % ctx.f:
        raise StructureError("2-adic norm valuation not divisible by f")
    return v // ctx.f


def is_totally_positive(ctx: FieldContext, x: FieldElement) -> bool:
    if x.is_zero():
        return False
    return all(sg > 0 for sg in ctx.signs(x))


def chebyshev_zm(ctx: FieldContext, m: int) -> FieldElement:
    """zeta^m + zeta^-m as an element of F_n."""
    m = abs(m)
    prev, cur = ctx.element(2), ctx.z
    if m == 0:
        return prev
    for _ in range(m - 1):
        prev, cur = cur, ctx.z * cur - prev
    return cur


def trace_form_gram(ctx: FieldContext, basis: Sequence[FieldElement], twist: FieldElement | None = None):
    """Gram matrix of (x, y) -> Tr(twist * x * y)."""
    t = twist if twist is not None else ctx.one
    tb = [t * b for b in basis]
    return [[(x * y).trace() for y in basis] for x in tb]


def _ideal_generator(ctx: FieldContext, ideal: xl.RatLattice, norm: int, max_tries: int = 12):
    """Element x of the ideal with |N(x)| = norm, by growing T2 searches."""
    basis = [ctx.from_coeffs(v) for v in ideal.basis_vectors()]
    gram = trace_form_gram(ctx, basis)
    enum = xl.ShortVectorEnumerator(gram)
    bound = max(Fraction(ctx.degree), Fraction(int(ctx.degree * float(norm) ** (2 / ctx.degree)) + 1))
    for _ in range(max_tries):
        best = None
        for v in enum.vectors(bound):
            x = sum((c * b for c, b in zip(v, basis) if c), ctx.element(0))
            if abs(x.norm()) == norm:
                t2 = (x * x).trace()
                if best is None or t2 < best[0]:
                    best = (t2, x)
        if best is not None:
            return best[1]
        bound *= 2
    return None


def _cyclotomic_units(ctx: FieldContext) -> list[FieldElement]:
    """(zeta^a - zeta^-a)/(zeta - zeta^-1) for 1 < a < n/2 coprime to n."""
    out = []
    for a in range(2, ctx.n // 2):
        if gcd(a, ctx.n) != 1:
            continue
        # sum_{k=0}^{a-1} zeta^{a-1-2k}
        acc = ctx.element(1) if a % 2 else ctx.element(0)
        for m in range(a - 1, 0, -2):
            acc = acc + chebyshev_zm(ctx, m)
        out.append(acc)
    return out


def _unit_generators(ctx: FieldContext) -> list[FieldElement]:
    """-1 and units independent modulo squares, dF of them in total.

    Cyclotomic units are tried first; short units found by a T2 search fill
    any gap.  Independence is certified by signs and quadratic characters.
    """
    gens: list[FieldElement] = []
    rows: list[int] = []

    def offer(u: FieldElement) -> bool:
        bits = ctx.character_bits(u)
        if xl.f2_rank(rows + [bits]) > len(rows):
            rows.append(bits)
            gens.append(u)
        return len(gens) == ctx.degree

    if offer(ctx.element(-1)):
        return gens
    for u in _cyclotomic_units(ctx):
        if abs(u.norm()) != 1:
            raise InternalError("cyclotomic unit with nontrivial norm")
        if offer(u):
            return gens
    dF = ctx.degree
    basis = [ctx.from_coeffs([int(i == j) for j in range(dF)]) for i in range(dF)]
    enum = xl.ShortVectorEnumerator(trace_form_gram(ctx, basis))
    bound = Fraction(4 * dF)
    for _ in range(10):
        for v in enum.vectors(bound):
            x = ctx.from_coeffs(v)
            if abs(x.norm()) == 1 and offer(x):
                return gens
        bound *= 2
    raise InternalError("unit group generators not found")


def _product(ctx: FieldContext, elems: Sequence[FieldElement], mask: int) -> FieldElement:
    out = ctx.one
    for i, u in enumerate(elems):
        if mask >> i & 1:
            out = out * u
    return out


def sig_p(ctx: FieldContext, x: FieldElement) -> int:
    """Sign bits of x followed by val_p(x) mod 2 at bit position degree."""
    return ctx.sign_bits(x) | ((val_p(ctx, x) % 2) << ctx.degree)


def unit_classes(ctx: FieldContext) -> dict:
    """Signature data for the S-units R^x = O+[1/2]^x.

    Returns the totally positive unit classes modulo squares, the matrix of
    the signature map on generators, its cokernel rank (so that
    [Gamma+ : Gamma1] = 2^rank) and a totally positive generator of p if
    one exists.
    """
    gens = list(ctx.unit_gens) + [ctx.p_generator]
    sig = [sig_p(ctx, g) for g in gens]
    coker_rank = ctx.degree + 1 - xl.f2_rank(sig)
    unit_signs = [ctx.sign_bits(u) for u in ctx.unit_gens]
    kernel = xl.f2_kernel(unit_signs)
    span = {0}
    for v in kernel:
        span |= {w ^ v for w in span}
    tp_reps = [_product(ctx, ctx.unit_gens, m) for m in sorted(span)]
    fix = xl.f2_solve(unit_signs, ctx.sign_bits(ctx.p_generator))
    p_tp = None
    if fix is not None:
        p_tp = ctx.p_generator * _product(ctx, ctx.unit_gens, fix)
    return {
        "tp_reps": tp_reps,
        "sig_matrix": sig,
        "coker_rank": coker_rank,
        "p_generator_tp": p_tp,
    }


def has_tp_generator(ctx: FieldContext, ideal: xl.RatLattice) -> FieldElement | None:
    """A totally positive generator of the ideal, or None."""
    norm = xl.lattice_index(ideal, ring_of_integers(ctx))
    if norm.denominator != 1:
        raise DomainError("ideal must be integral")
    x = _ideal_generator(ctx, ideal, int(norm))
    if x is None:
        return None
    unit_signs = [ctx.sign_bits(u) for u in ctx.unit_gens]
    fix = xl.f2_solve(unit_signs, ctx.sign_bits(x))
    if fix is None:
        return None
    return x * _product(ctx, ctx.unit_gens, fix)


def is_square(ctx: FieldContext, x: FieldElement) -> tuple[bool, FieldElement | None]:
    """Decide whether x is a square in F_n; return a root when it is."""
    if x.is_zero():
        raise DomainError("zero has no square class")
    if ctx.sign_bits(x):
        return False, None
    if ctx.character_bits(x):
        return False, None
    den = 1
    for v in x.c:
        den = lcm(den, v.denominator)
    # den^2 * x is integral and has the same square class
    root = _integral_sqrt(ctx, x * (den * den))
    if root is None:
        raise InternalError("square root reconstruction failed for a character-square element")
    return True, root / den


def _integral_sqrt(ctx: FieldContext, y: FieldElement) -> FieldElement | None:
    """Square root of y by sign patterns of embedding roots and rounding."""
    if any(v.denominator != 1 for v in y.c):
        return None
    dF = ctx.degree
    prec = 200
    with mpmath.workprec(prec):
        vals = ctx.numeric(y, prec)
        roots = [mpmath.sqrt(v) for v in vals]
        pts = [2 * mpmath.cos(2 * mpmath.pi * a / ctx.n) for a in ctx.embedding_indices]
        V = mpmath.matrix([[p ** k for k in range(dF)] for p in pts])
        Vinv = V ** -1
        for mask in range(2 ** (dF - 1)):
            rhs = mpmath.matrix([(-r if (mask >> i) & 1 else r) for i, r in enumerate(roots)])
            coeffs = Vinv * rhs
            cand = ctx.from_coeffs([int(mpmath.nint(coeffs[k])) for k in range(dF)])
            if cand * cand == y:
                return cand
    return None
