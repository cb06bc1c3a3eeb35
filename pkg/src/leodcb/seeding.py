"""Deterministic per-component RNG streams.

Every stochastic component draws from a stream derived from the master
seed plus a component tag, so no component ever touches global RNG state
and runs replay bit-for-bit.
"""

from __future__ import annotations

import zlib

import numpy as np


def _as_entropy(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    value = int(part)
    if value < 0:
        raise ValueError("seed parts must be non-negative")
    return value


def stream(master_seed: int, *tags) -> np.random.Generator:
    """Generator keyed by (master seed, component tags)."""
    entropy = [_as_entropy(master_seed)] + [_as_entropy(t) for t in tags]
    return np.random.default_rng(np.random.SeedSequence(entropy))
