"""Seeded random streams.

Every stochastic operation draws from its own PCG64 substream, keyed by the
user seed plus a fixed per-operation tag (and optional extra integers such as
a trial index or an OAM order). Adding a new operation never shifts the
numbers an existing operation sees.
"""

import zlib

import numpy as np

GENERATOR_NAME = "pcg64-v1"

_MASK64 = (1 << 64) - 1


def _tag(name):
    return zlib.crc32(name.encode("ascii"))


def _unsigned(k):
    # spawn keys must be nonnegative; negative OAM orders map injectively
    k = int(k)
    return 2 * k if k >= 0 else -2 * k - 1


def substream(seed, operation, *keys):
    """Return a ``numpy.random.Generator`` for ``(seed, operation, *keys)``."""
    spawn_key = (_tag(operation),) + tuple(_unsigned(k) for k in keys)
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, operation, *keys):
    """A 64-bit integer seed derived from ``(seed, operation, *keys)``."""
    return int(substream(seed, operation, *keys).integers(0, 2**63, dtype=np.int64))
