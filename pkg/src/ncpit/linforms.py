"""Homogeneous linear forms and exact linear algebra over Z_p.

A linear form is a coefficient tuple (a_1, ..., a_n).  Products of
linear forms are compared as words over a canonical alphabet: two forms
get the same letter exactly when one is a scalar multiple of the other,
which is decided by scaling the first nonzero coefficient to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .field import PrimeField

LinForm = tuple[int, ...]


def canonicalize(field: PrimeField, form: Sequence[int]) -> Optional[tuple[LinForm, int]]:
    """Scale a form so its first nonzero coefficient is 1.

    Returns (canonical form, scalar) with form = scalar * canonical,
    or None for the zero form.
    """
    vec = tuple(v % field.p for v in form)
    lead = next((v for v in vec if v), None)
    if lead is None:
        return None
    if lead == 1:
        return vec, 1
    s = field.inv(lead)
    return tuple(v * s % field.p for v in vec), lead


@dataclass
class LinAlphabet:
    """Letters 1..r for the pairwise non-proportional canonical forms.

    ``assignment[i]`` maps input form i to (letter, scalar), or None if
    that form was zero (a zero form is not a letter: any product
    containing it is the zero polynomial).
    """

    field: PrimeField
    n: int
    letters: list[LinForm]
    assignment: list[Optional[tuple[int, int]]]

    @property
    def size(self) -> int:
        return len(self.letters)

    def form_of(self, letter: int) -> LinForm:
        return self.letters[letter - 1]


class AlphabetBuilder:
    """Incrementally assigns letters in first-occurrence order."""

    def __init__(self, field: PrimeField, n: int):
        self.field = field
        self.n = n
        self.letters: list[LinForm] = []
        self._index: dict[LinForm, int] = {}

    def add(self, form: Sequence[int]) -> Optional[tuple[int, int]]:
        """Letter and scalar for a form; None for the zero form."""
        if len(form) != self.n:
            raise ValueError(f"form arity {len(form)} differs from {self.n}")
        canon = canonicalize(self.field, form)
        if canon is None:
            return None
        vec, scalar = canon
        letter = self._index.get(vec)
        if letter is None:
            self.letters.append(vec)
            letter = len(self.letters)
            self._index[vec] = letter
        return letter, scalar

    def build(self, assignment: list[Optional[tuple[int, int]]]) -> LinAlphabet:
        return LinAlphabet(self.field, self.n, list(self.letters), assignment)


def build_alphabet(field: PrimeField, forms: Sequence[Sequence[int]]) -> LinAlphabet:
    arities = {len(f) for f in forms}
    if len(arities) > 1:
        raise ValueError("forms have mixed arities")
    n = arities.pop() if arities else 0
    b = AlphabetBuilder(field, n)
    return b.build([b.add(f) for f in forms])


def max_indep_rows(field: PrimeField, rows: Sequence[Sequence[int]]
                   ) -> tuple[list[int], dict[int, dict[int, int]]]:
    """Leftmost maximal independent subset of the rows, with witnesses.

    Returns (pivot indices, combos) where combos[i] expresses every
    non-pivot row i exactly as sum(combos[i][j] * rows[j] for pivot j).
    Processing rows in order makes "leftmost" deterministic: a row is a
    pivot iff it is independent of the rows before it.
    """
    p = field.p
    pivots: list[int] = []
    combos: dict[int, dict[int, int]] = {}
    # basis: (pivot column, normalized reduced row, history over pivot rows)
    basis: list[tuple[int, list[int], dict[int, int]]] = []
    for i, row in enumerate(rows):
        work = [v % p for v in row]
        comb: dict[int, int] = {}
        for col, brow, hist in basis:
            f = work[col]
            if f:
                for t, v in enumerate(brow):
                    if v:
                        work[t] = (work[t] - f * v) % p
                for j, v in hist.items():
                    comb[j] = (comb.get(j, 0) + f * v) % p
        lead = next((t for t, v in enumerate(work) if v), None)
        if lead is None:
            combos[i] = {j: v for j, v in comb.items() if v}
            continue
        pivots.append(i)
        s = field.inv(work[lead])
        norm = [v * s % p for v in work]
        hist = {j: -s * v % p for j, v in comb.items() if v}
        hist[i] = s
        basis.append((lead, norm, hist))
    return pivots, combos
