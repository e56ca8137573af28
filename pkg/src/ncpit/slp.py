"""Straight-line programs over a finite alphabet.

An ``Slp`` is a DAG of concatenations over letter leaves; with sharing
it represents words whose length is exponential in the node count, so
no operation here may ever materialize the full word.  Queries follow
two regimes:

* words at or below ``EXPAND_THRESHOLD`` letters are expanded and
  compared exactly (fully deterministic);
* longer words are compared through Karp-Rabin style polynomial
  fingerprints modulo a fixed 61-bit Mersenne prime, evaluated at
  random points drawn from a seeded session.  Fingerprint mismatches
  are certificates (a returned mismatch position is always verified by
  ``letter_at``); only "equal" style answers carry the configured
  error budget.

Fingerprints compose over concatenation: for h(w) = sum a_i x^(i-1),
h(uv) = h(u) + x^|u| h(v), so each node caches (hash, x^len) per
evaluation point and every query runs in O(depth) after a single
O(size) pass.
"""

from __future__ import annotations

import math
import random
from typing import Iterator, NamedTuple, Optional

from .errors import CapacityError
from .field import derive_rng

FP_PRIME = (1 << 61) - 1
EXPAND_THRESHOLD = 1 << 16
DEFAULT_EPS = 2.0 ** -40
# Beyond this length a single 61-bit fingerprint point is too weak to
# amplify cheaply; refuse rather than silently degrade.
MAX_FP_LENGTH = 1 << 55

_LETTER = 0
_CONCAT = 1


class FingerprintSession:
    """A lazily extended list of random evaluation points in F_q.

    ``uses`` counts how many comparisons actually consulted the points;
    callers use it to tell whether an answer stayed fully deterministic
    (everything ran below the expansion threshold) or not.
    """

    def __init__(self, seed: int = 0):
        self._rng = derive_rng(seed, "slp-fingerprint-points")
        self.points: list[int] = []
        self.uses = 0

    def point(self, i: int) -> int:
        while len(self.points) <= i:
            self.points.append(self._rng.randrange(1, FP_PRIME))
        return self.points[i]


_default_session = FingerprintSession(0)


def default_session() -> FingerprintSession:
    return _default_session


class Slp:
    """An immutable word program.  Build through :class:`SlpBuilder`."""

    __slots__ = ("alphabet_size", "kinds", "args", "lengths", "root", "_fp_cache")

    def __init__(self, alphabet_size, kinds, args, lengths, root):
        self.alphabet_size = alphabet_size
        self.kinds = kinds
        self.args = args
        self.lengths = lengths
        self.root = root
        self._fp_cache: dict[int, tuple[list[int], list[int]]] = {}

    def __len__(self) -> int:  # number of nodes, not word length
        return len(self.kinds)

    @property
    def length(self) -> int:
        """Length of the computed word (arbitrary precision)."""
        return self.lengths[self.root]

    @classmethod
    def from_word(cls, alphabet_size: int, word: list[int]) -> "Slp":
        """Balanced concatenation tree over an explicit letter list."""
        if not word:
            raise ValueError("empty words are not representable")
        b = SlpBuilder(alphabet_size)
        ids = [b.letter(a) for a in word]
        while len(ids) > 1:
            nxt = [b.concat(ids[i], ids[i + 1]) for i in range(0, len(ids) - 1, 2)]
            if len(ids) % 2:
                nxt.append(ids[-1])
            ids = nxt
        return b.build(ids[0])

    def _fingerprints(self, x: int) -> tuple[list[int], list[int]]:
        """Per-node (hash, x^length) arrays at evaluation point x."""
        cached = self._fp_cache.get(x)
        if cached is not None:
            return cached
        q = FP_PRIME
        hs = [0] * len(self.kinds)
        pows = [0] * len(self.kinds)
        for i, kind in enumerate(self.kinds):
            if kind == _LETTER:
                hs[i] = self.args[i][0] % q
                pows[i] = x
            else:
                l, r = self.args[i]
                hs[i] = (hs[l] + pows[l] * hs[r]) % q
                pows[i] = pows[l] * pows[r] % q
        self._fp_cache[x] = (hs, pows)
        return hs, pows

    def prefix_fingerprint(self, k: int, x: int) -> int:
        """Hash of the length-k prefix at point x (k may be 0)."""
        if not 0 <= k <= self.length:
            raise ValueError("prefix length out of range")
        hs, pows = self._fingerprints(x)
        q = FP_PRIME
        h = 0
        mult = 1
        node = self.root
        while k > 0:
            if k == self.lengths[node]:
                h = (h + mult * hs[node]) % q
                break
            l, r = self.args[node]
            left_len = self.lengths[l]
            if k <= left_len:
                node = l
            else:
                h = (h + mult * hs[l]) % q
                mult = mult * pows[l] % q
                k -= left_len
                node = r
        return h


class SlpBuilder:
    """Appends letter and concat nodes; node ids are dense ints."""

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise ValueError("alphabet must have at least one letter")
        self.alphabet_size = alphabet_size
        self.kinds: list[int] = []
        self.args: list[tuple[int, ...]] = []
        self.lengths: list[int] = []

    def letter(self, a: int) -> int:
        if not 1 <= a <= self.alphabet_size:
            raise ValueError(f"letter {a} outside alphabet 1..{self.alphabet_size}")
        self.kinds.append(_LETTER)
        self.args.append((a,))
        self.lengths.append(1)
        return len(self.kinds) - 1

    def concat(self, left: int, right: int) -> int:
        n = len(self.kinds)
        if not (0 <= left < n and 0 <= right < n):
            raise ValueError("concat of unknown node")
        self.kinds.append(_CONCAT)
        self.args.append((left, right))
        self.lengths.append(self.lengths[left] + self.lengths[right])
        return len(self.kinds) - 1

    def word(self, letters: list[int]) -> int:
        node = self.letter(letters[0])
        for a in letters[1:]:
            node = self.concat(node, self.letter(a))
        return node

    def power(self, node: int, e: int) -> int:
        """node repeated e >= 1 times, via square and multiply."""
        if e < 1:
            raise ValueError("power must be at least 1")
        result: Optional[int] = None
        base = node
        while e:
            if e & 1:
                result = base if result is None else self.concat(result, base)
            e >>= 1
            if e:
                base = self.concat(base, base)
        assert result is not None
        return result

    def build(self, root: int) -> Slp:
        return Slp(self.alphabet_size, list(self.kinds), list(self.args),
                   list(self.lengths), root)


def length(w: Slp) -> int:
    return w.length


def letter_at(w: Slp, k: int) -> int:
    """The k-th letter (1-based) of the computed word, in O(depth)."""
    if not 1 <= k <= w.length:
        raise ValueError(f"position {k} outside word of length {w.length}")
    node = w.root
    while w.kinds[node] == _CONCAT:
        l, r = w.args[node]
        left_len = w.lengths[l]
        if k <= left_len:
            node = l
        else:
            k -= left_len
            node = r
    return w.args[node][0]


def expand(w: Slp) -> list[int]:
    """The full word as a letter list.  Only for modest lengths."""
    if w.length > EXPAND_THRESHOLD:
        raise CapacityError(f"word of length {w.length} is too long to expand")
    memo: dict[int, list[int]] = {}

    def rec(node: int) -> list[int]:
        got = memo.get(node)
        if got is not None:
            return got
        if w.kinds[node] == _LETTER:
            out = [w.args[node][0]]
        else:
            l, r = w.args[node]
            out = rec(l) + rec(r)
        memo[node] = out
        return out

    return rec(w.root)


def subword_slp(w: Slp, k: int, k2: int) -> Slp:
    """An Slp for w[k..k2] (1-based, inclusive).

    Nodes fully inside the range are shared (copied once); only the two
    boundary paths create new concat nodes, so the result has
    O(size + depth) nodes.
    """
    if not (1 <= k <= k2 <= w.length):
        raise ValueError(f"range [{k}, {k2}] invalid for word of length {w.length}")
    b = SlpBuilder(w.alphabet_size)
    copied: dict[int, int] = {}

    def copy_full(node: int) -> int:
        got = copied.get(node)
        if got is not None:
            return got
        if w.kinds[node] == _LETTER:
            new = b.letter(w.args[node][0])
        else:
            l, r = w.args[node]
            new = b.concat(copy_full(l), copy_full(r))
        copied[node] = new
        return new

    def sub(node: int, lo: int, hi: int) -> int:
        if lo == 1 and hi == w.lengths[node]:
            return copy_full(node)
        l, r = w.args[node]
        left_len = w.lengths[l]
        if hi <= left_len:
            return sub(l, lo, hi)
        if lo > left_len:
            return sub(r, lo - left_len, hi - left_len)
        return b.concat(sub(l, lo, left_len), sub(r, 1, hi - left_len))

    return b.build(sub(w.root, k, k2))


class Comparison(NamedTuple):
    equal: bool
    reason: Optional[str]  # None | "length" | "mismatch"
    position: Optional[int]  # verified mismatch position when unequal


def _num_points(max_len: int, eps: float) -> int:
    if max_len >= MAX_FP_LENGTH:
        raise CapacityError(
            f"word length {max_len} exceeds the fingerprint capacity {MAX_FP_LENGTH}"
        )
    # Need (L/q)^m <= eps/L, i.e. m >= log(L/eps) / log(q/L).
    m = math.ceil(math.log(max_len / eps) / math.log(FP_PRIME / max_len))
    return max(m, 1)


def _fp_points(u: Slp, v: Slp, eps: float, session: Optional[FingerprintSession]) -> list[int]:
    session = session or _default_session
    session.uses += 1
    m = _num_points(max(u.length, v.length), eps)
    return [session.point(i) for i in range(m)]


def compare(u: Slp, v: Slp, eps: float = DEFAULT_EPS,
            session: Optional[FingerprintSession] = None,
            expand_threshold: int = EXPAND_THRESHOLD) -> Comparison:
    """Word equality with a certificate on the unequal side.

    A "mismatch" answer carries a position where the letters provably
    differ; an "equal" answer is wrong with probability at most eps.
    """
    if u.length != v.length:
        return Comparison(False, "length", None)
    if u.length <= expand_threshold:
        wu, wv = expand(u), expand(v)
        if wu == wv:
            return Comparison(True, None, None)
        pos = next(i + 1 for i, (a, b) in enumerate(zip(wu, wv)) if a != b)
        return Comparison(False, "mismatch", pos)
    points = _fp_points(u, v, eps, session)
    bad = [x for x in points
           if u._fingerprints(x)[0][u.root] != v._fingerprints(x)[0][v.root]]
    if not bad:
        return Comparison(True, None, None)
    pos = _search_mismatch(u, v, bad[0])
    return Comparison(False, "mismatch", pos)


def equals(u: Slp, v: Slp, eps: float = DEFAULT_EPS,
           session: Optional[FingerprintSession] = None,
           expand_threshold: int = EXPAND_THRESHOLD) -> bool:
    return compare(u, v, eps, session, expand_threshold).equal


def _search_mismatch(u: Slp, v: Slp, x: int) -> int:
    """First position where prefix hashes at point x diverge.

    If hashes of prefixes k-1 agree and of prefixes k differ, the
    letters at k differ exactly (the hash difference is x^(k-1) times
    the letter difference), so the result is always a true mismatch.
    """
    lo, hi = 1, u.length
    while lo < hi:
        mid = (lo + hi) // 2
        if u.prefix_fingerprint(mid, x) != v.prefix_fingerprint(mid, x):
            hi = mid
        else:
            lo = mid + 1
    assert letter_at(u, hi) != letter_at(v, hi)
    return hi


def leftmost_mismatch(u: Slp, v: Slp, eps: float = DEFAULT_EPS,
                      session: Optional[FingerprintSession] = None,
                      expand_threshold: int = EXPAND_THRESHOLD) -> Optional[int]:
    """Leftmost differing position of two equal-length words, or None.

    None has the same one-sided eps guarantee as ``equals``; a returned
    position is verified exactly on both words.
    """
    if u.length != v.length:
        raise ValueError("words must have equal length")
    if u.length <= expand_threshold:
        wu, wv = expand(u), expand(v)
        for i, (a, b) in enumerate(zip(wu, wv)):
            if a != b:
                return i + 1
        return None
    points = _fp_points(u, v, eps, session)
    bad = [x for x in points
           if u._fingerprints(x)[0][u.root] != v._fingerprints(x)[0][v.root]]
    if not bad:
        return None
    return min(_search_mismatch(u, v, x) for x in bad)


def mismatch_positions_up_to(u: Slp, v: Slp, budget: int,
                             eps: float = DEFAULT_EPS,
                             session: Optional[FingerprintSession] = None,
                             expand_threshold: int = EXPAND_THRESHOLD
                             ) -> Optional[list[int]]:
    """All mismatch positions if there are at most ``budget`` of them.

    Returns None ("too many") as soon as budget + 1 mismatches are
    found.  Every listed position is verified by ``letter_at``; subword
    hash agreement may hide a mismatch with probability at most eps per
    comparison.  Cost is O(budget * depth * log L) hash evaluations.
    """
    if u.length != v.length:
        raise ValueError("words must have equal length")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if u.length <= expand_threshold:
        wu, wv = expand(u), expand(v)
        out = []
        for i, (a, b) in enumerate(zip(wu, wv)):
            if a != b:
                out.append(i + 1)
                if len(out) > budget:
                    return None
        return out
    points = _fp_points(u, v, eps, session)

    def range_differs(lo: int, hi: int) -> bool:
        for x in points:
            du = (u.prefix_fingerprint(hi, x) - u.prefix_fingerprint(lo - 1, x)) % FP_PRIME
            dv = (v.prefix_fingerprint(hi, x) - v.prefix_fingerprint(lo - 1, x)) % FP_PRIME
            if du != dv:
                return True
        return False

    out: list[int] = []
    stack = [(1, u.length)]
    while stack:
        lo, hi = stack.pop()
        if not range_differs(lo, hi):
            continue
        if lo == hi:
            assert letter_at(u, lo) != letter_at(v, lo)
            out.append(lo)
            if len(out) > budget:
                return None
            continue
        mid = (lo + hi) // 2
        # Right half pushed first so positions come out left to right.
        stack.append((mid + 1, hi))
        stack.append((lo, mid))
    out.sort()
    return out


def iter_letters(w: Slp) -> Iterator[int]:
    """Stream the word's letters without building the whole list."""
    stack = [w.root]
    while stack:
        node = stack.pop()
        if w.kinds[node] == _LETTER:
            yield w.args[node][0]
        else:
            l, r = w.args[node]
            stack.append(r)
            stack.append(l)


def random_slp(rng: random.Random, alphabet_size: int, n_letters: int,
               n_concats: int) -> Slp:
    """Random DAG-shaped program for tests and corpus generation."""
    b = SlpBuilder(alphabet_size)
    ids = [b.letter(rng.randrange(1, alphabet_size + 1)) for _ in range(n_letters)]
    for _ in range(n_concats):
        l = rng.choice(ids)
        r = rng.choice(ids)
        ids.append(b.concat(l, r))
    return b.build(ids[-1])
