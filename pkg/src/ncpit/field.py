"""Prime-field arithmetic Z_p for all coefficients and matrix entries.

The toolkit works over a single word-sized prime field (p < 2**62).
Elements are plain ints in canonical range [0, p); the hot paths in
other modules call the ``PrimeField`` methods on raw ints directly,
while ``FieldElem`` wraps a value with operator overloading for
convenience at API boundaries and in tests.

Randomness is always drawn from an explicit ``random.Random`` stream so
results are reproducible; independent streams are derived from a root
seed with ``derive_rng``.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .errors import CapacityError

MAX_PRIME_BITS = 62
# Witness set sound for every n < 2**64 (deterministic Miller-Rabin).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test, valid for all n below 2**64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field Z_p.  Values are ints reduced into [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if p < 2 or p >= (1 << MAX_PRIME_BITS):
            raise ValueError(f"modulus must satisfy 2 <= p < 2**{MAX_PRIME_BITS}, got {p}")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    # -- raw int operations (hot paths) --------------------------------

    def reduce(self, v: int) -> int:
        return v % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def sample(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def sample_nonzero(self, rng: random.Random) -> int:
        return rng.randrange(1, self.p)

    # -- wrapped elements ----------------------------------------------

    def elem(self, v: int) -> "FieldElem":
        return FieldElem(v % self.p, self)

    def zero(self) -> "FieldElem":
        return FieldElem(0, self)

    def one(self) -> "FieldElem":
        return FieldElem(1, self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


@dataclass(frozen=True)
class FieldElem:
    """A value of Z_p together with its field.

    Operations between elements of different fields are usage errors
    and raise ``ValueError``.
    """

    value: int
    field: PrimeField

    def _check(self, other: "FieldElem") -> None:
        if self.field != other.field:
            raise ValueError("field elements belong to different fields")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem((self.value + other.value) % self.field.p, self.field)

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem((self.value - other.value) % self.field.p, self.field)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.value * other.value % self.field.p, self.field)

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.value % self.field.p, self.field)

    def inv(self) -> "FieldElem":
        return FieldElem(self.field.inv(self.value), self.field)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


def sample(rng: random.Random, field: PrimeField) -> FieldElem:
    """Uniform element of the field, deterministic given the rng state."""
    return field.elem(field.sample(rng))


def find_prime_above(bound: int) -> PrimeField:
    """Smallest prime strictly greater than ``bound``.

    Refuses bounds at or above 2**61 so the resulting modulus stays
    word-sized; callers should cap their degree instead of asking for a
    larger field.
    """
    if bound >= (1 << 61):
        raise CapacityError(
            f"cannot construct a prime field above {bound}: moduli are limited to "
            f"2**{MAX_PRIME_BITS}; reduce the degree bound"
        )
    n = max(bound + 1, 2)
    while not is_prime(n):
        n += 1
    return PrimeField(n)


def derive_rng(seed: int, *labels: object) -> random.Random:
    """Independent RNG stream derived from a root seed and labels.

    Splitting is done by hashing so streams for distinct labels never
    overlap regardless of how many draws each consumes.
    """
    h = hashlib.sha256(repr((seed,) + labels).encode()).digest()
    return random.Random(int.from_bytes(h[:16], "big"))
