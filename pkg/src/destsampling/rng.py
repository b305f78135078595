"""Seeded uniform streams.

Every stream is numpy's PCG64 generator read as a sequence of float64
uniforms in ``[0, 1)`` (one 64-bit output per value). Values are consumed
strictly in order, so a run depends only on the seed and not on how the
stream is buffered. Independent streams come from ``SeedSequence`` spawning.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "PCG64 (numpy.random.Generator.random, float64)"


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """Child seed sequence for ``key``; the same key always gives the same stream."""
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))


class RandomStream:
    def __init__(self, seed=None, chunk: int = 1 << 20):
        if isinstance(seed, np.random.SeedSequence):
            ss = seed
        else:
            ss = np.random.SeedSequence(seed)
        self.seed_sequence = ss
        self.generator = np.random.Generator(np.random.PCG64(ss))
        self.chunk = chunk
        self.buffer = np.empty(0)
        self.pos = 0

    def spawn(self, count: int) -> list["RandomStream"]:
        return [RandomStream(ss, self.chunk) for ss in self.seed_sequence.spawn(count)]

    def ensure(self, count: int) -> None:
        """Make at least ``count`` unread values available in ``buffer[pos:]``."""
        have = self.buffer.size - self.pos
        if have >= count:
            return
        fresh = self.generator.random(max(self.chunk, count - have))
        self.buffer = np.concatenate((self.buffer[self.pos :], fresh))
        self.pos = 0

    def uniform(self) -> float:
        self.ensure(1)
        value = self.buffer[self.pos]
        self.pos += 1
        return float(value)

    def integer(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` from one uniform, as the kernels compute it."""
        return int(self.uniform() * n)

    def take(self, count: int) -> np.ndarray:
        self.ensure(count)
        out = self.buffer[self.pos : self.pos + count].copy()
        self.pos += count
        return out
