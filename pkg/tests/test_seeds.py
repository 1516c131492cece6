import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from haudim.seeds import BLOCK, blocked, generator, seed_derivation


@given(m=st.integers(0, 2**64 - 1), k=st.integers(0, 2**32))
def test_derivation_is_pure_64bit(m, k):
    a = seed_derivation(m, k)
    assert a == seed_derivation(m, k) and 0 <= a < 2**64


def test_streams_differ():
    assert seed_derivation(5, 0) != seed_derivation(5, 1)
    assert seed_derivation(5, (1, 2)) != seed_derivation(5, (2, 1))


def test_no_birthday_collisions():
    seeds = {seed_derivation(123, i) for i in range(10_000)}
    assert len(seeds) == 10_000


def test_blocked_independent_of_prefix():
    draw = lambda rng, m: rng.standard_normal(m)
    long = blocked(9, 3 * BLOCK + 17, draw)
    short = blocked(9, BLOCK + 5, draw)
    assert np.array_equal(long[: BLOCK + 5], short)
    assert np.array_equal(generator(4).random(3), generator(4).random(3))
