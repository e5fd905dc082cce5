"""Seed plumbing: named-stream splitting and the SplitMix64 counter hash.

Every random decision in the package is a pure function of a 64-bit seed and
a counter, so runs are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def derive_seed(seed: int, name: str) -> int:
    """Split a named 64-bit stream seed off a master seed."""
    h = hashlib.blake2b(digest_size=8, person=b"pprlab-stream")
    h.update(int(seed & MASK64).to_bytes(8, "little"))
    h.update(name.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream_id: int) -> int:
    return mix64(seed + GOLDEN_GAMMA * (stream_id + 1))


def counter_draw(key: int, counter: int) -> int:
    return mix64(key + GOLDEN_GAMMA * (counter + 1))


def uniform_index(key: int, counter: int, size: int, lanes: int = 8) -> int:
    """Unbiased integer in ``[0, size)`` by rejection over ``lanes`` counters.

    ``counter`` addresses lane 0; lane ``k`` uses ``counter + k``.
    """
    limit = (1 << 64) - ((1 << 64) % size)
    h = 0
    for k in range(lanes):
        h = counter_draw(key, counter + k)
        if h < limit:
            return h % size
    return h % size


def to_seed(random_state) -> int:
    """Coerce ``None``/int/RandomState/Generator to a 64-bit seed."""
    import numpy as np

    if random_state is None:
        return int(np.random.SeedSequence().entropy) & MASK64
    if isinstance(random_state, (int, np.integer)):
        if int(random_state) < 0:
            raise ValueError(f"seed must be non-negative, got {random_state}")
        return int(random_state) & MASK64
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(0, 2**63))
    if isinstance(random_state, np.random.RandomState):
        return int(random_state.randint(0, 2**31 - 1))
    raise TypeError(f"cannot use {random_state!r} as a seed")
