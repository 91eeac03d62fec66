"""Deterministic counter-based random substreams.

Every consumer of randomness (the real and imaginary draws of each frequency
atom, innovation noise, the oversampling offset, per-replicate seeds) gets
its own Philox generator keyed by (seed, role) with the index placed in the
counter block.  Streams are disjoint by construction and independent of
evaluation order, so multi-worker runs reproduce single-worker output bit
for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GaussianStream", "ATOM_REAL", "ATOM_IMAG", "NOISE", "OFFSET", "REPLICATE"]

ATOM_REAL = 1
ATOM_IMAG = 2
NOISE = 3
OFFSET = 4
REPLICATE = 5

_U64 = np.uint64


@dataclass(frozen=True)
class GaussianStream:
    """Family of named Gaussian substreams under one 64-bit seed."""

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def generator(self, role: int, index: int = 0) -> np.random.Generator:
        """Generator for substream (seed, role, index).

        Successive draws from the returned generator are a fixed sequence, so
        the n-th variate of a given substream never depends on what other
        substreams were consumed, or in which order.
        """
        if not 0 <= index < 2**64:
            raise ValueError(f"substream index out of range: {index}")
        key = np.array([self.seed, role], dtype=_U64)
        counter = np.array([0, 0, index, 0], dtype=_U64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def replicate_seed(self, i: int) -> int:
        """Derived seed for replicate i of an ensemble run."""
        return int(self.generator(REPLICATE, i).integers(0, 2**64, dtype=_U64))
