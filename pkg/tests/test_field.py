import random

import pytest

from ncpit import CapacityError, FieldElem, PrimeField, find_prime_above, is_prime, sample
from ncpit.field import derive_rng


def test_basic_arithmetic():
    f5 = PrimeField(5)
    assert f5.add(3, 4) == 2
    f7 = PrimeField(7)
    assert f7.mul(3, 5) == 1
    f2 = PrimeField(2)
    assert f2.neg(1) == 1


def test_inverse():
    assert PrimeField(7).inv(3) == 5
    assert PrimeField(5).inv(1) == 1
    assert PrimeField(101).inv(2) == 51
    with pytest.raises(ZeroDivisionError):
        PrimeField(7).inv(0)


def test_elem_operators():
    f = PrimeField(7)
    a, b = f.elem(3), f.elem(5)
    assert int(a + b) == 1
    assert int(a - b) == 5
    assert int(a * b) == 1
    assert int(-a) == 4
    assert int(a.inv() * a) == 1
    with pytest.raises(ValueError):
        a + PrimeField(5).elem(1)


def test_modulus_must_be_prime():
    with pytest.raises(ValueError):
        PrimeField(6)
    with pytest.raises(ValueError):
        PrimeField(1)
    with pytest.raises(ValueError):
        PrimeField(1 << 62)


def test_field_axioms_random():
    f = PrimeField(10007)
    rng = random.Random(7)
    for _ in range(10_000):
        a, b, c = (f.sample(rng) for _ in range(3))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        if a:
            assert f.mul(a, f.inv(a)) == 1
        assert f.add(a, f.neg(a)) == 0


def test_sample_reproducible():
    f = PrimeField(101)
    s1 = [f.sample(random.Random(42)) for _ in range(50)]
    s2 = [f.sample(random.Random(42)) for _ in range(50)]
    assert s1 == s2
    elem = sample(random.Random(0), f)
    assert isinstance(elem, FieldElem)
    assert 0 <= elem.value < 101


def test_sample_uniformity():
    # Binomial sd per residue is sqrt(10^4 * .2 * .8) = 40; allow 5 sd.
    f = PrimeField(5)
    rng = random.Random(12345)
    counts = [0] * 5
    for _ in range(10_000):
        counts[f.sample(rng)] += 1
    for c in counts:
        assert abs(c - 2000) <= 200


def test_sample_tiny_field():
    f = PrimeField(2)
    rng = random.Random(3)
    assert {f.sample(rng) for _ in range(100)} == {0, 1}


def test_find_prime_above():
    assert find_prime_above(10).p == 11
    assert find_prime_above(100).p == 101
    assert find_prime_above(1 << 16).p == 65537
    with pytest.raises(CapacityError):
        find_prime_above(1 << 61)


def test_is_prime_edges():
    assert not is_prime(0) and not is_prime(1)
    assert is_prime(2) and is_prime(3)
    assert not is_prime(3215031751)  # strong pseudoprime to a few bases
    assert is_prime((1 << 61) - 1)


def test_derive_rng_independent_streams():
    a = derive_rng(1, "x")
    b = derive_rng(1, "y")
    c = derive_rng(1, "x")
    sa = [a.random() for _ in range(5)]
    sb = [b.random() for _ in range(5)]
    sc = [c.random() for _ in range(5)]
    assert sa == sc
    assert sa != sb
