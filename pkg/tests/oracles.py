"""Brute-force reference computations used to freeze expected values."""
from __future__ import annotations

import itertools
from fractions import Fraction


def box_vectors(g, bound, radius):
    """Nonzero integer x with |x_i| <= radius and x^T g x <= bound, one per +- pair."""
    d = len(g)
    out = set()
    for x in itertools.product(range(-radius, radius + 1), repeat=d):
        if not any(x):
            continue
        v = sum(Fraction(g[i][j]) * x[i] * x[j] for i in range(d) for j in range(d))
        if v <= bound:
            lead = next(c for c in x if c)
            out.add(x if lead > 0 else tuple(-c for c in x))
    return out


def in_span(rows, vec):
    """Integer membership of vec in the row span of a full-rank 2x2 basis."""
    (a, b), (c, d) = rows
    det = a * d - b * c
    s = Fraction(vec[0] * d - vec[1] * c, det)
    t = Fraction(-vec[0] * b + vec[1] * a, det)
    return s.denominator == 1 and t.denominator == 1


def residue_intersection(rows1, rows2, modulus):
    """Residues mod ``modulus`` lying in both spans; both lattices contain modulus*Z^2."""
    return {
        (x, y)
        for x in range(modulus)
        for y in range(modulus)
        if in_span(rows1, (x, y)) and in_span(rows2, (x, y))
    }


def min_diagonal_over_unimodular(g, radius=3):
    """Smallest max-diagonal reachable by 2x2 unimodular changes with entries in [-radius, radius]."""
    best = None
    rng = range(-radius, radius + 1)
    for a, b, c, d in itertools.product(rng, repeat=4):
        if a * d - b * c not in (1, -1):
            continue
        u = [[a, b], [c, d]]
        h = [[sum(u[i][k] * g[k][l] * u[j][l] for k in range(2) for l in range(2)) for j in range(2)] for i in range(2)]
        key = sorted([h[0][0], h[1][1]])
        if best is None or key < best:
            best = key
    return best


def expand_real_minpoly(n):
    """Minimal polynomial of 2cos(2 pi/n) from products over Galois conjugates (numeric, rounded)."""
    import math

    roots = [2 * math.cos(2 * math.pi * a / n) for a in range(1, n // 2) if math.gcd(a, n) == 1]
    poly = [1.0]
    for r in roots:
        poly = [a - r * b for a, b in zip(poly + [0.0], [0.0] + poly)]
    return [round(c) for c in poly]
