"""Brute-force ground truth: explicit sparse noncommutative polynomials.

``NcPoly`` stores a polynomial in free variables x_1..x_n as a map from
words (tuples of variable indices) to nonzero coefficients.  Everything
here is exact and budgeted: expansion is the oracle every identity-test
verdict is checked against at desk scale, and it refuses cleanly when a
circuit is too large to expand (which is the regime the real algorithms
exist for).

``ProjPoly`` is the partially commutative image of a homogeneous
polynomial: variables at a chosen set of positions stay noncommutative
(recorded as (position, variable) pairs), all other occurrences
collapse to commuting variables z_1..z_n.  This is where cancellation
can newly occur, so like terms are combined on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import BudgetError
from .field import PrimeField
from .linforms import max_indep_rows

Word = tuple[int, ...]

DEFAULT_MAX_TERMS = 1 << 20
DEFAULT_MAX_DEGREE = 64


@dataclass
class NcPoly:
    field: PrimeField
    n: int
    terms: dict[Word, int] = dc_field(default_factory=dict)

    @classmethod
    def zero(cls, field: PrimeField, n: int) -> "NcPoly":
        return cls(field, n, {})

    @classmethod
    def const(cls, field: PrimeField, n: int, c: int) -> "NcPoly":
        c %= field.p
        return cls(field, n, {(): c} if c else {})

    @classmethod
    def var(cls, field: PrimeField, n: int, i: int) -> "NcPoly":
        if not 1 <= i <= n:
            raise ValueError(f"variable x{i} outside 1..{n}")
        return cls(field, n, {(i,): 1})

    @classmethod
    def from_terms(cls, field: PrimeField, n: int,
                   terms: Iterable[tuple[Word, int]]) -> "NcPoly":
        acc: dict[Word, int] = {}
        for w, c in terms:
            c = (acc.get(w, 0) + c) % field.p
            if c:
                acc[w] = c
            else:
                acc.pop(w, None)
        return cls(field, n, acc)

    def is_zero(self) -> bool:
        return not self.terms

    def num_terms(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Largest word length; 0 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        lengths = {len(w) for w in self.terms}
        return len(lengths) <= 1

    def coeff(self, w: Word) -> int:
        return self.terms.get(tuple(w), 0)

    def add(self, other: "NcPoly") -> "NcPoly":
        out = dict(self.terms)
        p = self.field.p
        for w, c in other.terms.items():
            v = (out.get(w, 0) + c) % p
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NcPoly(self.field, self.n, out)

    def sub(self, other: "NcPoly") -> "NcPoly":
        return self.add(other.scale(-1))

    def scale(self, c: int) -> "NcPoly":
        p = self.field.p
        c %= p
        if c == 0:
            return NcPoly.zero(self.field, self.n)
        return NcPoly(self.field, self.n,
                      {w: v * c % p for w, v in self.terms.items()})

    def mul(self, other: "NcPoly", max_terms: Optional[int] = None) -> "NcPoly":
        """Concatenation-convolution product, optionally size-guarded."""
        p = self.field.p
        out: dict[Word, int] = {}
        for u, cu in self.terms.items():
            for v, cv in other.terms.items():
                w = u + v
                c = (out.get(w, 0) + cu * cv) % p
                if c:
                    out[w] = c
                    if max_terms is not None and len(out) > max_terms:
                        raise BudgetError(
                            "terms",
                            f"product exceeds the term budget {max_terms}")
                else:
                    out.pop(w, None)
        return NcPoly(self.field, self.n, out)

    def eval_scalars(self, values: Sequence[int]) -> int:
        """Commutative image at scalar values (one per variable)."""
        if len(values) != self.n:
            raise ValueError("need one value per variable")
        p = self.field.p
        total = 0
        for w, c in self.terms.items():
            v = c
            for i in w:
                v = v * values[i - 1] % p
            total = (total + v) % p
        return total

    def sorted_terms(self) -> list[tuple[Word, int]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def dump(self) -> str:
        """One `coeff: x_i1 x_i2 ...` line per term, sorted."""
        lines = []
        for w, c in self.sorted_terms():
            mono = " ".join(f"x{i}" for i in w)
            lines.append(f"{c}: {mono}" if mono else f"{c}:")
        return "\n".join(lines)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, NcPoly) and self.field == other.field
                and self.terms == other.terms)


def expand(circuit, max_terms: int = DEFAULT_MAX_TERMS,
           max_degree: int = DEFAULT_MAX_DEGREE) -> NcPoly:
    """Exact sparse expansion of a circuit, gate by gate.

    The degree budget is checked against syntactic degrees up front
    (conservative: cancellation could keep the true degree lower); the
    term budget is enforced exactly while each product materializes.
    """
    from .circuit import syntactic_degrees  # local import to avoid a cycle

    if max_terms < 1 or max_degree < 0:
        raise ValueError("budgets must be positive")
    degs = syntactic_degrees(circuit)
    reach = circuit.reachable()
    for i in reach:
        if degs[i] > max_degree:
            raise BudgetError(
                "degree",
                f"gate g{circuit.names[i]} has syntactic degree {degs[i]} "
                f"> budget {max_degree}")
    f = circuit.field
    n = circuit.n
    values: dict[int, NcPoly] = {}
    for i in reach:
        op, a, b = circuit.gates[i]
        if op == "x":
            values[i] = NcPoly.var(f, n, a)
        elif op == "const":
            values[i] = NcPoly.const(f, n, a)
        elif op == "add":
            out = values[a].add(values[b])
            if len(out.terms) > max_terms:
                raise BudgetError("terms",
                                  f"sum exceeds the term budget {max_terms}")
            values[i] = out
        else:
            values[i] = values[a].mul(values[b], max_terms=max_terms)
    return values[circuit.out]


def poly_of_forms(field: PrimeField, n: int, forms: Sequence[Sequence[int]],
                  scalar: int = 1,
                  max_terms: int = DEFAULT_MAX_TERMS) -> NcPoly:
    """Expanded product scalar * L_1 L_2 ... L_k of linear forms."""
    acc = NcPoly.const(field, n, scalar)
    for form in forms:
        factor = NcPoly(field, n,
                        {(i + 1,): c % field.p
                         for i, c in enumerate(form) if c % field.p})
        acc = acc.mul(factor, max_terms=max_terms)
    return acc


def _require_homogeneous(f: NcPoly) -> int:
    if not f.is_homogeneous():
        raise ValueError("polynomial is not homogeneous")
    return f.degree()


def apply_position_map(f: NcPoly, j: int, matrix: Sequence[Sequence[int]]) -> NcPoly:
    """Replace the variable at position j of every monomial by its image.

    ``matrix`` is n x n over the field; row i is the image of x_(i+1),
    so x_i becomes sum(matrix[i-1][v] * x_(v+1)).  The map must be
    invertible (checked), which makes it zero-preserving in both
    directions for homogeneous inputs.
    """
    d = _require_homogeneous(f)
    if f.is_zero():
        return f
    if not 1 <= j <= d:
        raise ValueError(f"position {j} outside 1..{d}")
    n, p = f.n, f.field.p
    if len(matrix) != n or any(len(r) != n for r in matrix):
        raise ValueError("matrix must be n x n")
    pivots, _ = max_indep_rows(f.field, matrix)
    if len(pivots) != n:
        raise ValueError("position map is singular")
    out: dict[Word, int] = {}
    for w, c in f.terms.items():
        row = matrix[w[j - 1] - 1]
        head, tail = w[:j - 1], w[j:]
        for v, a in enumerate(row):
            a %= p
            if not a:
                continue
            w2 = head + (v + 1,) + tail
            val = (out.get(w2, 0) + c * a) % p
            if val:
                out[w2] = val
            else:
                out.pop(w2, None)
    return NcPoly(f.field, n, out)


def set_multilinearize(f: NcPoly) -> NcPoly:
    """Rename the variable at position j to a position-indexed copy.

    x_i at position j maps to variable (j-1)*n + i over n*d variables.
    Monomials map one-to-one, so term counts are preserved and f = 0
    iff the result is 0.
    """
    d = _require_homogeneous(f)
    n = f.n
    out = {tuple((j * n) + i for j, i in enumerate(w)): c
           for w, c in f.terms.items()}
    return NcPoly(f.field, n * d, out)


@dataclass
class ProjPoly:
    """Image of a homogeneous polynomial under an I-projection.

    Terms are keyed by (noncommutative part, commutative exponents):
    the noncommutative part lists (position, variable) for positions in
    I in order; the exponent tuple counts how often each of z_1..z_n
    occurs at the remaining positions.
    """

    field: PrimeField
    n: int
    positions: tuple[int, ...]
    terms: dict[tuple[tuple[tuple[int, int], ...], tuple[int, ...]], int]

    def is_zero(self) -> bool:
        return not self.terms

    def num_terms(self) -> int:
        return len(self.terms)

    def add(self, other: "ProjPoly") -> "ProjPoly":
        if self.positions != other.positions:
            raise ValueError("projections over different position sets")
        out = dict(self.terms)
        p = self.field.p
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return ProjPoly(self.field, self.n, self.positions, out)

    def scale(self, c: int) -> "ProjPoly":
        p = self.field.p
        c %= p
        if c == 0:
            return ProjPoly(self.field, self.n, self.positions, {})
        return ProjPoly(self.field, self.n, self.positions,
                        {k: v * c % p for k, v in self.terms.items()})

    def eval_point(self, z_values: Sequence[int],
                   slot_values: Sequence[Sequence[int]]) -> int:
        """Evaluate with z_i = z_values[i-1] and the variable at the
        m-th projected position = slot_values[var-1][m-1]."""
        p = self.field.p
        pos_slot = {pos: m for m, pos in enumerate(self.positions)}
        total = 0
        for (nc, expo), c in self.terms.items():
            v = c
            for pos, var in nc:
                v = v * slot_values[var - 1][pos_slot[pos]] % p
            for i, e in enumerate(expo):
                if e:
                    v = v * pow(z_values[i], e, p) % p
            total = (total + v) % p
        return total

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, ProjPoly) and self.field == other.field
                and self.positions == other.positions
                and self.terms == other.terms)


def project(f: NcPoly, positions: Iterable[int]) -> ProjPoly:
    """I-projection: keep order information only at ``positions``."""
    d = _require_homogeneous(f)
    pos = tuple(sorted(set(positions)))
    if pos and (pos[0] < 1 or pos[-1] > d):
        raise ValueError(f"positions {pos} outside 1..{d}")
    keep = set(pos)
    p = f.field.p
    out: dict[tuple[tuple[tuple[int, int], ...], tuple[int, ...]], int] = {}
    for w, c in f.terms.items():
        nc = []
        expo = [0] * f.n
        for j, i in enumerate(w, start=1):
            if j in keep:
                nc.append((j, i))
            else:
                expo[i - 1] += 1
        key = (tuple(nc), tuple(expo))
        v = (out.get(key, 0) + c) % p
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return ProjPoly(f.field, f.n, pos, out)


def find_isolating_set(field: PrimeField, n: int,
                       products: Sequence[Sequence[Sequence[int]]],
                       betas: Sequence[int],
                       max_terms: int = DEFAULT_MAX_TERMS) -> tuple[int, ...]:
    """Smallest position set whose projection preserves (non)zeroness.

    ``products`` are fully materialized lists of linear forms, all of a
    common length D; the combination sum(betas[i] * products[i]) is
    compared against its I-projection for every I in increasing size
    (then lexicographic) order, and the first I for which zeroness
    agrees is returned.  For a nonzero combination of s products some I
    with at most s - 1 positions always qualifies; for a zero
    combination the empty set qualifies trivially.
    """
    if len(products) != len(betas):
        raise ValueError("need one scalar per product")
    if not products:
        return ()
    lengths = {len(forms) for forms in products}
    if len(lengths) != 1:
        raise ValueError("products must share a common length")
    deg = lengths.pop()
    total = NcPoly.zero(field, n)
    for forms, beta in zip(products, betas):
        if beta % field.p == 0:
            raise ValueError("scalars must be nonzero")
        total = total.add(poly_of_forms(field, n, forms, scalar=beta,
                                        max_terms=max_terms))
    want_zero = total.is_zero()
    for size in range(deg + 1):
        for subset in combinations(range(1, deg + 1), size):
            if project(total, subset).is_zero() == want_zero:
                return subset
    raise AssertionError("full projection must always qualify")
