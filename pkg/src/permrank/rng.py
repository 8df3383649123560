"""Seeded, splittable random streams.

Every stream is a Philox4x64 counter-based generator keyed through numpy's
``SeedSequence``: the master seed is the entropy and a tuple of integers (a
worker or block index) is the spawn key.  Distinct keys give independent
streams; the same (seed, key) always reproduces the same stream.
"""

from __future__ import annotations

import numpy as np

from .field import FieldElement, FieldSpec

RNG_ID = "numpy-philox4x64/seedsequence-spawn-key/v1"


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_check_seed(seed))))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``key`` derived from the master ``seed``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def sample_uniform(spec: FieldSpec, rng: np.random.Generator, size=None):
    """Uniform element (``size=None``) or array of encodings of the given shape."""
    if size is None:
        return FieldElement(spec, int(rng.integers(0, spec.q)))
    return rng.integers(0, spec.q, size=size, dtype=np.int64)
