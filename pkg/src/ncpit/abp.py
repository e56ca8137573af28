"""Layer-by-layer basis maintenance for products of linear forms.

Given m polynomials, each a scalar times a product of L linear forms
over common variables, this module finds all exact linear dependencies
among them without expanding: at layer q it keeps at most m monomials
of degree q whose coefficient vectors (one entry per polynomial) span
the row space of the full degree-q coefficient matrix.  Advancing a
layer multiplies each kept row entrywise by the next form's
coefficients, candidate monomial by candidate monomial, and re-reduces.

The kept rows are always true coefficient vectors of their monomials
(reduction only decides which monomials to keep), which is what allows
the entrywise advance step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .field import PrimeField
from .linforms import max_indep_rows
from .oracle import Word


@dataclass
class ProductAbp:
    """m products of a common length over shared variables.

    products[j] = (scalar, [form_1, ..., form_L]); each form is a
    coefficient tuple of length n.
    """

    field: PrimeField
    n: int
    products: list[tuple[int, list[tuple[int, ...]]]]

    def __post_init__(self):
        lengths = {len(forms) for _, forms in self.products}
        if len(lengths) > 1:
            raise ValueError("products must share a common length")
        for _, forms in self.products:
            for f in forms:
                if len(f) != self.n:
                    raise ValueError("form arity differs from variable count")

    @property
    def m(self) -> int:
        return len(self.products)

    @property
    def length(self) -> int:
        return len(self.products[0][1]) if self.products else 0


@dataclass
class LayerBasis:
    """Kept degree-q monomials and their m-column coefficient matrix."""

    monomials: list[Word]
    matrix: list[list[int]]


def initial_basis(abp: ProductAbp) -> LayerBasis:
    """Layer 0: the empty monomial with the scalars as its row."""
    scalars = [s % abp.field.p for s, _ in abp.products]
    if not any(scalars):
        return LayerBasis([], [])
    return LayerBasis([()], [scalars])


def rs_advance(field: PrimeField, n: int, basis: LayerBasis,
               forms: Sequence[Sequence[int]]) -> LayerBasis:
    """Advance one layer; ``forms[j]`` is column j's next linear form.

    Candidate monomials u * x_v inherit the row of u scaled entrywise
    by the coefficient of x_v in each column's form; candidates are
    processed in lexicographic monomial order so the representative
    kept for each pivot is the smallest, making output deterministic.
    """
    p = field.p
    candidates: list[tuple[Word, list[int]]] = []
    for u, row in zip(basis.monomials, basis.matrix):
        for v in range(1, n + 1):
            new_row = [row[j] * (forms[j][v - 1] % p) % p
                       for j in range(len(row))]
            if any(new_row):
                candidates.append((u + (v,), new_row))
    candidates.sort(key=lambda t: t[0])

    monomials: list[Word] = []
    matrix: list[list[int]] = []
    elim: list[tuple[int, list[int]]] = []  # (pivot column, normalized row)
    for mono, row in candidates:
        work = list(row)
        for col, brow in elim:
            f = work[col]
            if f:
                for t, v in enumerate(brow):
                    if v:
                        work[t] = (work[t] - f * v) % p
        lead = next((t for t, v in enumerate(work) if v), None)
        if lead is None:
            continue
        s = field.inv(work[lead])
        elim.append((lead, [v * s % p for v in work]))
        monomials.append(mono)
        matrix.append(row)
    return LayerBasis(monomials, matrix)


def rs_dependencies(abp: ProductAbp) -> tuple[list[int], dict[int, dict[int, int]]]:
    """Leftmost maximal independent subset of the m products.

    Returns (independent indices, combos) where combos[j] gives exact
    coefficients expressing product j over the independent ones
    (scalars folded in).  Equality of column spans layer by layer makes
    the final small matrix carry every linear dependency of the fully
    expanded polynomials.
    """
    basis = initial_basis(abp)
    for q in range(abp.length):
        forms = [forms_list[q] for _, forms_list in abp.products]
        basis = rs_advance(abp.field, abp.n, basis, forms)
        if not basis.monomials:
            break
    columns = [[basis.matrix[r][j] for r in range(len(basis.monomials))]
               for j in range(abp.m)]
    return max_indep_rows(abp.field, columns)
