"""Random circuit generation for test corpora.

Generated circuits come in two classes:

* ``gen_sum_of_products``: a top sum of products of linear forms, the
  black-box test's input class;
* ``gen_layered``: the same thing iterated over several sum layers,
  with uniform product lengths per level so every layer has one
  syntactic degree.

Every linear form is emitted as a genuine +-tree (single-variable forms
split their coefficient into two nonzero halves) so the layered
classifier's path-crossing condition holds by construction.  With
``force_zero`` the top sum is a difference of two structurally distinct
copies of the same polynomial, which is identically zero however the
copies are associated.

``ground_truth`` decides zeroness by sparse expansion when a budget
allows, so generated corpora carry their own oracle verdicts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .circuit import Circuit, CircuitBuilder
from .errors import BudgetError
from .field import PrimeField
from .oracle import expand


@dataclass
class GeneratedCircuit:
    circuit: Circuit
    cls: str  # "plus-regular" | "sps"
    is_zero: Optional[bool]  # None when the oracle budget was exceeded

    def sidecar(self, seed: int) -> dict:
        return {"seed": seed, "class": self.cls, "is_zero": self.is_zero}


def _random_form_vector(rng: random.Random, field: PrimeField, n: int
                        ) -> list[int]:
    vec = [0] * n
    support = rng.sample(range(n), rng.randint(1, n))
    for i in support:
        vec[i] = field.sample_nonzero(rng)
    return vec


def _form_gate(b: CircuitBuilder, rng: random.Random, vec: list[int]) -> int:
    """A +-tree computing sum(vec[i] * x_(i+1)), never a bare variable."""
    field = b.field
    support = [i for i, coef in enumerate(vec) if coef]
    if len(support) == 1:
        # Split the lone coefficient so the form is still a + gate.
        i = support[0]
        coef = vec[i]
        if field.p == 2:
            z = b.var(i + 1)
            return b.add(b.add(z, z), z)
        return b.add(b.scaled(2 * coef % field.p, b.var(i + 1)),
                     b.scaled(-coef % field.p, b.var(i + 1)))
    terms = [b.scaled(vec[i], b.var(i + 1)) if vec[i] != 1 else b.var(i + 1)
             for i in support]
    return b.sum(terms)


def _product_tree(b: CircuitBuilder, rng: random.Random,
                  factors: list[int]) -> int:
    """Multiply factors in order under a random association shape."""
    nodes = list(factors)
    while len(nodes) > 1:
        i = rng.randrange(len(nodes) - 1)
        nodes[i:i + 2] = [b.mul(nodes[i], nodes[i + 1])]
    return nodes[0]


def gen_sum_of_products(rng: random.Random, field: PrimeField, n: int,
                        s: int, max_len: int,
                        force_zero: bool = False,
                        homogeneous: bool = True) -> Circuit:
    """A top sum of s products of linear forms, length <= max_len each.

    Products of a single form could fold into the top sum and leave the
    same form gate in two different layers, so zero constructions use
    length >= 2 and single-form summands fold any scalar into the form.
    """
    if n < 2 and field.p == 2:
        raise ValueError("p = 2 form splitting needs at least 2 variables")
    b = CircuitBuilder(field, n)
    if force_zero:
        out = None
        pairs = max(s // 2, 1)
        length = rng.randint(2, max(max_len, 2))
        for pair in range(pairs):
            vecs = [_random_form_vector(rng, field, n) for _ in range(length)]
            c = 1 if pair == 0 else field.sample_nonzero(rng)
            one = _product_tree(b, rng, [_form_gate(b, rng, v) for v in vecs])
            two = _product_tree(b, rng, [_form_gate(b, rng, v) for v in vecs])
            if c != 1:
                one = b.scaled(c, one)
            block = b.add(one, b.scaled(field.p - c, two))
            out = block if out is None else b.add(out, block)
        return b.build(out)
    common = rng.randint(1, max_len)
    summands = []
    for _ in range(s):
        length = common if homogeneous else rng.randint(1, max_len)
        scale = field.sample_nonzero(rng) if rng.random() < 0.3 else 1
        vecs = [_random_form_vector(rng, field, n) for _ in range(length)]
        if length == 1:
            vecs[0] = [scale * v % field.p for v in vecs[0]]
            summands.append(_form_gate(b, rng, vecs[0]))
            continue
        prod = _product_tree(b, rng, [_form_gate(b, rng, v) for v in vecs])
        if scale != 1:
            prod = b.scaled(scale, prod)
        summands.append(prod)
    return b.build(b.sum(summands))


def gen_layered(rng: random.Random, field: PrimeField, n: int,
                layers: int, max_degree: int,
                force_zero: bool = False) -> Circuit:
    """A circuit with ``layers`` sum layers of uniform degrees.

    Level 1 is a pool of linear-form gates; each higher level sums a
    few products of fixed length over the previous pool, so the level
    degrees multiply up to at most ``max_degree``.
    """
    if layers < 1:
        raise ValueError("need at least one layer")
    if n < 2 and field.p == 2:
        raise ValueError("p = 2 form splitting needs at least 2 variables")
    b = CircuitBuilder(field, n)
    if layers == 1:
        vec = _random_form_vector(rng, field, n)
        first = _form_gate(b, rng, vec)
        if force_zero:
            return b.build(b.add(first, b.scaled(field.p - 1,
                                                 _form_gate(b, rng, vec))))
        second = _form_gate(b, rng, _random_form_vector(rng, field, n))
        return b.build(b.add(first, second))
    lengths = _pick_lengths(rng, layers - 1, max_degree)
    pool = [_form_gate(b, rng, _random_form_vector(rng, field, n))
            for _ in range(rng.randint(2, 4))]
    for level in range(2, layers + 1):
        length = lengths[level - 2]
        top = level == layers
        if top and force_zero:
            factors = [rng.choice(pool) for _ in range(length)]
            first = _product_tree(b, rng, factors)
            second = _product_tree(b, rng, factors)
            out = b.add(first, b.scaled(field.p - 1, second))
            return b.build(out)
        new_pool = []
        for _ in range(1 if top else rng.randint(2, 3)):
            summands = []
            for _ in range(rng.randint(2, 3)):
                factors = [rng.choice(pool) for _ in range(length)]
                prod = _product_tree(b, rng, factors)
                if rng.random() < 0.25:
                    prod = b.scaled(field.sample_nonzero(rng), prod)
                summands.append(prod)
            new_pool.append(b.sum(summands))
        pool = new_pool
    return b.build(pool[0])


def _pick_lengths(rng: random.Random, count: int, max_degree: int) -> list[int]:
    """Per-level product lengths (each >= 2) fitting the degree budget.

    Lengths below 2 would let a product collapse to a bare sum gate,
    which the layered classifier cannot place in a unique layer.
    """
    if max_degree < 2 ** count:
        raise ValueError(
            f"max_degree {max_degree} cannot host {count + 1} layers "
            f"(needs at least {2 ** count})")
    lengths = []
    degree = 1
    for i in range(count):
        cap = max_degree // (degree * 2 ** (count - i - 1))
        length = rng.randint(2, min(3, cap)) if cap > 2 else 2
        lengths.append(length)
        degree *= length
    return lengths


def ground_truth(c: Circuit, max_terms: int = 1 << 18,
                 max_degree: int = 64) -> Optional[bool]:
    """Oracle zeroness under a budget; None when the budget is hit."""
    try:
        return expand(c, max_terms=max_terms, max_degree=max_degree).is_zero()
    except BudgetError:
        return None


def generate(rng: random.Random, field: PrimeField, cls: str, n: int,
             layers: int = 2, max_degree: int = 8,
             force_zero: bool = False,
             truth_budget: int = 1 << 18) -> GeneratedCircuit:
    """Generate one corpus circuit with its oracle verdict attached."""
    if cls == "sps":
        circuit = gen_sum_of_products(rng, field, n, s=rng.randint(2, 4),
                                      max_len=max_degree,
                                      force_zero=force_zero)
    elif cls == "plus-regular":
        circuit = gen_layered(rng, field, n, layers, max_degree,
                              force_zero=force_zero)
    else:
        raise ValueError(f"unknown class {cls!r}")
    truth = ground_truth(circuit, max_terms=truth_budget)
    if force_zero and truth is False:
        raise AssertionError("force_zero generator emitted a nonzero circuit")
    if force_zero:
        truth = True
    return GeneratedCircuit(circuit, cls, truth)
