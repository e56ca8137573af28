"""Linear independence of products of linear forms given as words.

The inputs are scalar-times-product polynomials whose form sequences
are word programs over a canonical alphabet (so their lengths may be
exponential).  The engine finds the leftmost maximal linearly
independent subset and exact expression coefficients for the rest:

1. products of unequal degree are independent outright; within a
   degree, products whose words are equal are scalar multiples of each
   other and collapse to one representative per word;
2. a representative can only depend on earlier representatives whose
   words disagree with it in few positions (at most c * l**4 for l
   representatives, from the rank bound behind the restriction step),
   so candidates are filtered by bounded mismatch enumeration;
3. the union T of those mismatch position sets (at most c * l**5
   positions) is where the candidates can differ at all; dropping the
   common forms outside T preserves every linear dependency exactly in
   both directions, so the short restricted products are fed to the
   layer-by-layer dependency finder, whose answers are exact.

Reported dependencies are therefore certificates on the restricted
products; independence verdicts inherit the word-equality error budget
(zero below the expansion threshold) plus the mismatch-budget
assumption, and a too-small ``c_const`` can only cause false
"independent" answers, never a false dependency.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import slp as slp_mod
from .abp import ProductAbp, rs_dependencies
from .errors import StructureError
from .field import PrimeField
from .linforms import LinAlphabet
from .slp import Slp, FingerprintSession


@dataclass
class SigmaProduct:
    """scalar * (product of the linear forms spelled by ``word``).

    ``word`` letters index a LinAlphabet; a product that is identically
    zero (zero scalar or a zero form in it) has scalar 0 and no word.
    """

    scalar: int
    word: Optional[Slp]
    degree: int

    @property
    def is_zero(self) -> bool:
        return self.scalar == 0


@dataclass
class IndepResult:
    """Leftmost maximal independent subset plus expression coefficients.

    ``combos[j]`` expresses product j exactly over the independent
    indices; zero products get the empty combination.
    """

    independent: list[int]
    combos: dict[int, dict[int, int]]


@dataclass
class PiStarConfig:
    c_const: int = 4
    eps: float = slp_mod.DEFAULT_EPS
    expand_threshold: int = slp_mod.EXPAND_THRESHOLD
    session: Optional[FingerprintSession] = None
    restrict_cap: Optional[int] = None  # defaults to c_const * l**5

    def word_kwargs(self) -> dict:
        return {"eps": self.eps, "session": self.session,
                "expand_threshold": self.expand_threshold}


@dataclass
class ScalarClass:
    """Products with equal words: each is ratio * representative."""

    rep: int
    degree: int
    members: list[tuple[int, int]] = dc_field(default_factory=list)  # (index, ratio)


def scalar_classes(field: PrimeField, products: Sequence[SigmaProduct],
                   cfg: Optional[PiStarConfig] = None) -> list[ScalarClass]:
    """Partition nonzero products into scalar-multiple classes.

    Two products are scalar multiples of each other exactly when their
    words coincide, so classes are formed by word equality; the class
    representative is the smallest index.  Zero products are skipped
    (the caller books them separately); products of unequal degree land
    in different classes automatically.
    """
    cfg = cfg or PiStarConfig()
    kwargs = cfg.word_kwargs()
    classes: list[ScalarClass] = []
    for i, prod in enumerate(products):
        if prod.is_zero:
            continue
        home = None
        for cls in classes:
            if cls.degree != prod.degree:
                continue
            rep_word = products[cls.rep].word
            if prod.degree == 0 or slp_mod.equals(prod.word, rep_word, **kwargs):
                home = cls
                break
        if home is None:
            classes.append(ScalarClass(i, prod.degree))
        else:
            ratio = prod.scalar * field.inv(products[home.rep].scalar) % field.p
            home.members.append((i, ratio))
    return classes


def restrict_to_positions(alphabet: LinAlphabet, product: SigmaProduct,
                          positions: Sequence[int],
                          cap: Optional[int] = None
                          ) -> tuple[int, list[tuple[int, ...]]]:
    """(scalar, forms) retaining only the forms at ``positions``.

    Positions are fetched letter by letter, so this never expands the
    word; order within the sorted position set is preserved.
    """
    pos = sorted(positions)
    if cap is not None and len(pos) > cap:
        raise StructureError(
            f"restriction to {len(pos)} positions exceeds the cap {cap}")
    if pos and (pos[0] < 1 or pos[-1] > product.degree):
        raise ValueError("positions outside the product")
    forms = [alphabet.form_of(slp_mod.letter_at(product.word, t)) for t in pos]
    return product.scalar, forms


def max_lin_indep(field: PrimeField, alphabet: LinAlphabet,
                  products: Sequence[SigmaProduct],
                  cfg: Optional[PiStarConfig] = None) -> IndepResult:
    """Leftmost maximal independent subset with exact coefficients."""
    cfg = cfg or PiStarConfig()
    kwargs = cfg.word_kwargs()
    p = field.p
    combos: dict[int, dict[int, int]] = {}
    for i, prod in enumerate(products):
        if prod.is_zero:
            combos[i] = {}

    classes = scalar_classes(field, products, cfg)
    n_reps = len(classes)
    mismatch_budget = cfg.c_const * max(n_reps, 1) ** 4
    cap = cfg.restrict_cap
    if cap is None:
        cap = cfg.c_const * max(n_reps, 1) ** 5

    independent: list[int] = []
    accepted: list[ScalarClass] = []
    for cls in classes:
        i = cls.rep
        prod = products[i]
        if prod.degree == 0:
            # There is at most one degree-0 class (all nonzero scalars
            # are proportional), so its representative is independent.
            independent.append(i)
            accepted.append(cls)
            continue
        candidates: list[tuple[int, list[int]]] = []
        for earlier in accepted:
            if earlier.degree != prod.degree:
                continue
            mm = slp_mod.mismatch_positions_up_to(
                prod.word, products[earlier.rep].word, mismatch_budget,
                **kwargs)
            if mm is not None:
                candidates.append((earlier.rep, mm))
        if not candidates:
            independent.append(i)
            accepted.append(cls)
            continue
        positions = sorted(set().union(*(set(mm) for _, mm in candidates)))
        if len(positions) > cap:
            raise StructureError(
                f"{len(positions)} differing positions exceed the "
                f"configured cap {cap}; raise c_const")
        column_ids = [j for j, _ in candidates] + [i]
        restricted = [restrict_to_positions(alphabet, products[j], positions)
                      for j in column_ids]
        abp = ProductAbp(field, alphabet.n, [(s, f) for s, f in restricted])
        pivots, deps = rs_dependencies(abp)
        last = len(column_ids) - 1
        # Candidate columns come from accepted representatives, so they
        # must stay pivots; a violation would mean an earlier verdict
        # was wrong (possible only through a fingerprint miss).
        assert all(t in pivots for t in range(last)), \
            "accepted representatives became dependent under restriction"
        if last in pivots:
            independent.append(i)
            accepted.append(cls)
        else:
            combos[i] = {column_ids[t]: v for t, v in deps[last].items()}

    accepted_set = set(independent)
    for cls in classes:
        rep_combo = ({cls.rep: 1} if cls.rep in accepted_set
                     else combos[cls.rep])
        for j, ratio in cls.members:
            combos[j] = {a: ratio * v % p for a, v in rep_combo.items()}
    return IndepResult(independent, combos)
