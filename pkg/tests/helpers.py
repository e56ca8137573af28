"""Shared builders and small independent oracles for the test suite.

The Gaussian elimination and determinant here are deliberately separate
reimplementations: tests that compare the library against "full
expansion plus elimination" should not inherit the library's own linear
algebra.
"""

from __future__ import annotations

import random

from ncpit import CircuitBuilder, NcPoly, PrimeField
from ncpit.oracle import poly_of_forms


def commutator_circuit(field: PrimeField) -> "Circuit":
    """x1*x2 - x2*x1."""
    b = CircuitBuilder(field, 2)
    left = b.mul(b.var(1), b.var(2))
    right = b.mul(b.var(2), b.var(1))
    return b.build(b.add(left, b.scaled(field.p - 1, right)))


def squaring_chain(field: PrimeField, depth: int) -> "Circuit":
    """(x1 + x2) squared ``depth`` times: degree 2**depth."""
    b = CircuitBuilder(field, 2)
    g = b.add(b.var(1), b.var(2))
    for _ in range(depth):
        g = b.mul(g, g)
    return b.build(g)


def random_ncpoly(rng: random.Random, field: PrimeField, n: int, degree: int,
                  max_terms: int) -> NcPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        w = tuple(rng.randint(1, n) for _ in range(degree))
        terms[w] = field.sample_nonzero(rng)
    return NcPoly(field, n, terms)


def random_invertible(rng: random.Random, field: PrimeField, n: int):
    while True:
        m = [[field.sample(rng) for _ in range(n)] for _ in range(n)]
        if determinant(field, m) != 0:
            return m


def determinant(field: PrimeField, m) -> int:
    """Laplace expansion; fine for the tiny matrices tests use."""
    n = len(m)
    if n == 1:
        return m[0][0] % field.p
    total = 0
    for j in range(n):
        if m[0][j] % field.p == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        sign = 1 if j % 2 == 0 else field.p - 1
        total = (total + sign * m[0][j] * determinant(field, minor)) % field.p
    return total


def gauss_pivots(field: PrimeField, rows):
    """Leftmost independent row indices plus expression coefficients.

    Independent of ncpit.linforms on purpose.
    """
    p = field.p
    pivots, combos, basis = [], {}, []
    for i, row in enumerate(rows):
        work = [v % p for v in row]
        comb = {}
        for col, brow, hist in basis:
            f = work[col]
            if f:
                work = [(a - f * b) % p for a, b in zip(work, brow)]
                for j, v in hist.items():
                    comb[j] = (comb.get(j, 0) + f * v) % p
        lead = next((t for t, v in enumerate(work) if v), None)
        if lead is None:
            combos[i] = {j: v for j, v in comb.items() if v}
            continue
        pivots.append(i)
        s = pow(work[lead], p - 2, p)
        hist = {j: -s * v % p for j, v in comb.items() if v}
        hist[i] = s
        basis.append((lead, [v * s % p for v in work], hist))
    return pivots, combos


def expand_products(field: PrimeField, n: int, products):
    """[(scalar, forms)] -> (sorted monomial list, coefficient rows)."""
    polys = [poly_of_forms(field, n, forms, scalar=s) for s, forms in products]
    monomials = sorted({w for poly in polys for w in poly.terms},
                       key=lambda w: (len(w), w))
    rows = [[poly.terms.get(w, 0) for w in monomials] for poly in polys]
    return monomials, rows


def random_product(rng: random.Random, field: PrimeField, n: int, length: int,
                   zero_ok: bool = False):
    forms = []
    for _ in range(length):
        vec = tuple(field.sample(rng) for _ in range(n))
        if not zero_ok and not any(vec):
            vec = tuple(1 if i == 0 else v for i, v in enumerate(vec))
        forms.append(vec)
    return forms
