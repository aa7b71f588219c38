"""Named, seeded random streams.

Every stochastic concern (observation, repair, walk sampling, GA operators)
draws from its own ``numpy.random.Generator`` backed by PCG64, the 64-bit
permuted congruential generator that numpy ships as its default bit
generator. A stream is keyed by ``(master_seed, label, *keys)`` through
``numpy.random.SeedSequence``, so adding or skipping draws in one concern
never shifts the numbers seen by another.
"""

from __future__ import annotations

import zlib

import numpy as np


def label_key(label: str) -> int:
    """Stable 32-bit integer for a stream label (CRC-32, not Python's ``hash``)."""
    return zlib.crc32(label.encode("utf-8"))


def stream(master_seed: int, label: str, *keys: int) -> np.random.Generator:
    """Return an independent generator for ``(master_seed, label, *keys)``."""
    if master_seed < 0:
        raise ValueError(f"master_seed must be non-negative, got {master_seed}")
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(label_key(label), *map(int, keys))
    )
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed: int, label: str, *keys: int) -> int:
    """Derive a 63-bit child seed, e.g. one seed per (instance, run)."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(label_key(label), *map(int, keys))
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


class Streams:
    """Factory bound to one master seed: ``streams("observe", t)``."""

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def __call__(self, label: str, *keys: int) -> np.random.Generator:
        return stream(self.master_seed, label, *keys)

    def __repr__(self) -> str:
        return f"Streams(master_seed={self.master_seed})"
