"""Seeded random source shared by the samplers and the evolution loop.

Draws come from numpy's PCG64 bit generator, seeded through
``SeedSequence([stream, seed])``, consumed as a buffered stream of doubles
in [0, 1).  An integer below ``k`` is ``floor(u * k)``.  The sequence of
draws is therefore fixed by ``(seed, stream)`` alone.
"""

from __future__ import annotations

import math

import numpy as np

# Independent streams carved out of one seed.
EVOLUTION_STREAM = 0
SAMPLING_STREAM = 1

_BUFFER = 4096
_POISSON_KMAX = 20


def _poisson1_cdf() -> list[float]:
    cdf = []
    acc = 0.0
    for k in range(_POISSON_KMAX + 1):
        acc += math.exp(-1.0) / math.factorial(k)
        cdf.append(acc)
    return cdf


_POISSON1_CDF = _poisson1_cdf()


class RandomSource:
    def __init__(self, seed: int, stream: int = EVOLUTION_STREAM):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = int(seed)
        self.stream = int(stream)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.stream, self.seed])))
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BUFFER).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def below(self, k: int) -> int:
        """Uniform integer in ``0 .. k-1``."""
        return int(self.uniform() * k)

    def coin(self) -> bool:
        return self.uniform() < 0.5

    def choice_weighted(self, cdf: list[float]) -> int:
        """Index drawn by inverse transform from a cumulative table."""
        u = self.uniform() * cdf[-1]
        for i, c in enumerate(cdf):
            if u < c:
                return i
        return len(cdf) - 1

    def poisson1(self) -> int:
        """Poisson(1) draw; table truncated at k = 20 (tail mass < 1e-19)."""
        u = self.uniform()
        for k, c in enumerate(_POISSON1_CDF):
            if u < c:
                return k
        return _POISSON_KMAX
