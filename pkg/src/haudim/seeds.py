"""Seed derivation and counter-based random streams.

``seed_derivation(master, stream)`` is a pure function built on numpy's
``SeedSequence`` hashing (stable across numpy releases by numpy's own
reproducibility policy).  Generators use the counter-based Philox bit
generator, so a stream is addressed by its key alone and never depends on
how many other streams were consumed before it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# fixed block size for array draws; the block layout is part of the
# reproducibility contract, so changing it changes every sample stream
BLOCK = 1 << 16


def seed_derivation(master_seed: int, stream_id: int | tuple) -> int:
    """Derive a 64-bit child seed for ``stream_id`` from ``master_seed``."""
    key = stream_id if isinstance(stream_id, tuple) else (stream_id,)
    ss = np.random.SeedSequence(entropy=int(master_seed) & MASK64, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generator(seed: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & MASK64)
    return np.random.Generator(np.random.Philox(ss))


def blocked(seed: int, n: int, draw, dtype=float) -> np.ndarray:
    """Fill n values block by block, each block from its own derived stream.

    ``draw(rng, size)`` produces one block.  Output is identical whether the
    blocks are produced serially or by independent workers.
    """
    out = np.empty(n, dtype=dtype)
    for b, start in enumerate(range(0, n, BLOCK)):
        stop = min(start + BLOCK, n)
        out[start:stop] = draw(generator(seed_derivation(seed, b)), stop - start)
    return out
