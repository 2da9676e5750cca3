"""Minimal-standard generator reproducibility and draw distribution."""

import pytest

from capsim.rng import MODULUS, MinStd


def test_known_sequence_from_seed_one():
    # classic check for the 16807 Lehmer generator: the 10000th draw
    rng = MinStd(1)
    value = 0
    for _ in range(10000):
        value = rng.next_raw()
    assert value == 1043618065


def test_first_draws_seed_one():
    rng = MinStd(1)
    assert rng.next_raw() == 16807
    assert rng.next_raw() == 282475249


def test_zero_seed_maps_to_one():
    assert MinStd(0).next_raw() == MinStd(1).next_raw()
    assert MinStd(MODULUS).next_raw() == MinStd(1).next_raw()


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        MinStd(-1)


def test_same_seed_same_stream():
    a = MinStd(53)
    b = MinStd(53)
    assert [a.next_raw() for _ in range(100)] == [b.next_raw() for _ in range(100)]


def test_uniform_int_inclusive_bounds():
    rng = MinStd(99)
    seen = {rng.uniform_int(2, 6) for _ in range(2000)}
    assert seen == {2, 3, 4, 5, 6}


def test_uniform_int_degenerate_range():
    rng = MinStd(5)
    assert rng.uniform_int(3, 3) == 3


def test_uniform_int_rejects_empty_range():
    with pytest.raises(ValueError):
        MinStd(1).uniform_int(4, 3)


def test_uniform_int_roughly_uniform():
    rng = MinStd(77)
    counts = {v: 0 for v in range(5)}
    n = 50000
    for _ in range(n):
        counts[rng.uniform_int(0, 4)] += 1
    for v, c in counts.items():
        assert abs(c / n - 0.2) < 0.01, (v, c)


def test_sample_without_replacement():
    rng = MinStd(42)
    pool = list(range(12))
    for _ in range(200):
        k = rng.uniform_int(0, 12)
        picked = rng.sample(pool, k)
        assert len(picked) == k
        assert len(set(picked)) == k
        assert set(picked) <= set(pool)
    with pytest.raises(ValueError):
        rng.sample(pool, 13)
