"""Seeded random streams with independent named substreams.

Each consumer (``init``, ``shuffle``, ``dropout``, ``refdrop``) draws from its
own generator derived from ``(seed, name)``, so turning dropout off never
changes the shuffling order and vice versa.
"""

from __future__ import annotations

import zlib

import numpy as np

ALGORITHM = "PCG64"
STREAMS = ("init", "shuffle", "dropout", "refdrop")


class SeededPrng:
    def __init__(self, seed: int):
        if not 0 <= int(seed) < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.algorithm = ALGORITHM
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        if name not in self._streams:
            key = zlib.crc32(name.encode("utf-8"))
            ss = np.random.SeedSequence([self.seed & 0xFFFFFFFF, self.seed >> 32, key])
            self._streams[name] = np.random.Generator(np.random.PCG64(ss))
        return self._streams[name]

    def __repr__(self):
        return f"SeededPrng({self.algorithm}, seed={self.seed})"
