"""Reproducible random streams keyed by (seed, purpose, replicate).

Every consumer of randomness asks for a stream by purpose tag, so model
sampling and set-family generation never share draws even under the same
user seed. Replicate indices give independent substreams for parallel blocks;
the block layout never depends on the worker count.
"""

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def tag_code(tag: str) -> int:
    """Stable 32-bit code for a purpose tag (crc32, not Python's salted hash)."""
    return zlib.crc32(tag.encode("utf-8"))


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, tag: str, *replicate: int) -> np.random.Generator:
    """Independent generator for ``(seed, tag, *replicate)``; no replicate means (0,)."""
    key = tuple(int(r) for r in replicate) or (0,)
    seq = np.random.SeedSequence(entropy=check_seed(seed),
                                 spawn_key=(tag_code(tag),) + key)
    return np.random.Generator(np.random.PCG64(seq))
