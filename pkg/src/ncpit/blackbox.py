"""Randomized black-box identity tests via matrix substitution.

Two tests live here.  Both only evaluate the circuit on square matrices
over its own prime field, never reading its structure, and both are
one-sided: a NonZero answer comes with a replayable witness point, and
only ProbablyZero answers carry error.

``lowdeg_bw_test`` handles polynomials of small degree: a nonzero
polynomial of degree at most 2d-1 cannot vanish identically on d x d
matrices, so random matrix entries catch it with probability at least
1 - (2d-1)/p per trial.

``blackbox_sps_test`` handles sums of s products of linear forms whose
degree D may be exponential.  For some k <= s-1, keeping the order
information of just k positions preserves nonzeroness; the substitution
matrices below simulate, in one (k+1) x (k+1) matrix product, the sum
over all ways to choose those k positions.  The matrix for variable x_i
has z_i * xi_(q+1) on the diagonal entry (q, q) and x_(i,q) on the
superdiagonal entry (q-1, q):

        [ z_i xi_1    x_(i,1)    0        ...       ]
        [ 0           z_i xi_2   x_(i,2)  ...       ]
        [ 0           0          z_i xi_3 ...       ]

Walking from state 0 to state k while multiplying the matrices of a
product's variables accumulates, for every increasing position tuple J,
the J-projected product weighted by a bookkeeping monomial in the xi
variables; the xi weights keep different J contributions from mixing,
so the (0, k) entry is a nonzero commutative polynomial of total degree
at most 2D whenever the projected sum is nonzero.  Sweeping k over
0..s-1 and drawing the point coordinates uniformly from a field with
p > 4D bounds the per-trial failure probability by 2D/p <= 1/2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .circuit import Circuit, circuit_degree, evaluate_matrix
from .errors import FieldSizeError
from .field import PrimeField, derive_rng

Matrix = list[list[int]]
EvalFn = Callable[[int, dict[int, Matrix]], Matrix]


@dataclass
class BlackBox:
    """Evaluation access to a polynomial over a fixed prime field."""

    field: PrimeField
    n: int
    evaluate: EvalFn
    degree_bound: Optional[int] = None
    fanin_bound: Optional[int] = None

    @classmethod
    def from_circuit(cls, c: Circuit) -> "BlackBox":
        return cls(c.field, c.n,
                   lambda dim, assign: evaluate_matrix(c, dim, assign),
                   degree_bound=circuit_degree(c))


@dataclass
class AutomatonPoint:
    """One sampled substitution point for projection size k."""

    k: int
    z: list[int]  # z_i per variable, i = 1..n
    xi: list[int]  # xi_1 .. xi_(k+1)
    x: list[list[int]]  # x[i-1][q-1] = value of x_(i,q)

    @classmethod
    def sample(cls, rng, field: PrimeField, n: int, k: int) -> "AutomatonPoint":
        return cls(k,
                   [field.sample(rng) for _ in range(n)],
                   [field.sample(rng) for _ in range(k + 1)],
                   [[field.sample(rng) for _ in range(k)] for _ in range(n)])


def build_automaton_matrices(field: PrimeField, n: int,
                             pt: AutomatonPoint) -> list[Matrix]:
    """The n substitution matrices of dimension (k+1) x (k+1)."""
    k = pt.k
    p = field.p
    out = []
    for i in range(n):
        m = [[0] * (k + 1) for _ in range(k + 1)]
        for q in range(k + 1):
            m[q][q] = pt.z[i] * pt.xi[q] % p
        for q in range(1, k + 1):
            m[q - 1][q] = pt.x[i][q - 1]
        out.append(m)
    return out


@dataclass
class Witness:
    """Replayable evidence that the black box is not zero."""

    kind: str  # "sps-automaton" | "lowdeg-matrices"
    k: Optional[int]
    trial: int
    seed: int
    point: dict
    entry: tuple[int, int]
    value: int

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind, "k": self.k, "trial": self.trial,
            "seed": self.seed, "point": self.point,
            "entry": list(self.entry), "value": self.value,
        })


@dataclass
class PitVerdict:
    nonzero: bool
    witness: Optional[Witness]
    error_bound: float  # probability a zero verdict is wrong

    @property
    def probably_zero(self) -> bool:
        return not self.nonzero


def _assign_from(mats: Sequence[Matrix]) -> dict[int, Matrix]:
    return {i + 1: m for i, m in enumerate(mats)}


def blackbox_sps_test(bb: BlackBox, s: int, degree: int,
                      trials: int = 10, seed: int = 0) -> PitVerdict:
    """Zero test for an s-summand product-of-linear-forms black box.

    Requires p > 4 * degree so each of the ``trials`` evaluations per
    projection size fails with probability at most 1/2; the reported
    bound for a zero verdict is (2 * degree / p) ** trials.  A nonzero
    entry ends the sweep immediately at the smallest (k, trial) pair.
    """
    if s < 1:
        raise ValueError("need at least one summand")
    if degree < 0:
        raise ValueError("degree bound must be nonnegative")
    p = bb.field.p
    if p <= 4 * degree:
        raise FieldSizeError(
            f"field size {p} is too small for degree {degree}: need "
            f"p > {4 * degree} (larger base primes only; extension fields "
            "are not supported)")
    for k in range(s):
        for trial in range(trials):
            rng = derive_rng(seed, "sps-trial", k, trial)
            pt = AutomatonPoint.sample(rng, bb.field, bb.n, k)
            mats = build_automaton_matrices(bb.field, bb.n, pt)
            result = bb.evaluate(k + 1, _assign_from(mats))
            value = result[0][k]
            if value:
                witness = Witness(
                    "sps-automaton", k, trial, seed,
                    {"z": pt.z, "xi": pt.xi, "x": pt.x},
                    (0, k), value)
                return PitVerdict(True, witness, 0.0)
    eps = (2 * degree / p) ** trials if degree else 0.0
    return PitVerdict(False, None, eps)


def replay_witness(bb: BlackBox, witness: Witness) -> int:
    """Re-evaluate at the stored point; returns the entry value."""
    if witness.kind == "sps-automaton":
        pt = AutomatonPoint(witness.k, witness.point["z"],
                            witness.point["xi"], witness.point["x"])
        mats = build_automaton_matrices(bb.field, bb.n, pt)
    else:
        mats = witness.point["matrices"]
    result = bb.evaluate(len(mats[0]), _assign_from(mats))
    r, c = witness.entry
    return result[r][c]


def dimension_for_degree(degree_bound: int) -> int:
    """Smallest d with 2d - 1 >= degree_bound."""
    return max((degree_bound + 2) // 2, 1)


def lowdeg_bw_test(bb: BlackBox, degree_bound: int,
                   trials: int = 5, seed: int = 0) -> PitVerdict:
    """Zero test for degree-bounded black boxes on random matrices.

    Evaluates on uniform d x d matrices with d chosen so 2d - 1 covers
    the degree bound; requires p >= 4d.  Any nonzero output entry is a
    witness; all-zero outputs give ProbablyZero with error at most
    ((2d - 1) / p) ** trials.
    """
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    d = dimension_for_degree(degree_bound)
    p = bb.field.p
    if p < 4 * d:
        raise FieldSizeError(
            f"field size {p} is too small for {d}x{d} matrix substitution: "
            f"need p >= {4 * d}")
    for trial in range(trials):
        rng = derive_rng(seed, "lowdeg-trial", trial)
        mats = [[[bb.field.sample(rng) for _ in range(d)] for _ in range(d)]
                for _ in range(bb.n)]
        result = bb.evaluate(d, _assign_from(mats))
        for r in range(d):
            for c in range(d):
                if result[r][c]:
                    witness = Witness("lowdeg-matrices", None, trial, seed,
                                      {"matrices": mats}, (r, c),
                                      result[r][c])
                    return PitVerdict(True, witness, 0.0)
    return PitVerdict(False, None, ((2 * d - 1) / p) ** trials)
