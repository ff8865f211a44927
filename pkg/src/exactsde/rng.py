"""Seeded, splittable random streams.

Scalar draws are served from buffered numpy blocks so the pure-Python
inner loops of the samplers do not pay a numpy call per variate.
"""
from __future__ import annotations

import numpy as np

# spawn-key namespaces, so exact and Euler runs under one seed never share a stream
EXACT = 0
EULER = 1
ORACLE = 2

_MAX_BLOCK = 4096


class RandomSource:
    """Deterministic stream of uniform, normal and exponential variates.

    Identical ``(seed, stream)`` pairs give identical sequences.  ``stream``
    is an int or a tuple of ints and becomes the numpy ``SeedSequence``
    spawn key, so distinct streams are statistically independent.
    """

    def __init__(self, seed: int = 0, stream: int | tuple[int, ...] = ()):
        if isinstance(stream, int):
            stream = (stream,)
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        self.generator = np.random.Generator(np.random.PCG64(ss))
        self._block = 32
        self._u = iter(())
        self._n = iter(())
        self._e = iter(())

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream})"

    def spawn(self, *key: int) -> RandomSource:
        """Child stream, independent of this one and of its other children."""
        return RandomSource(self.seed, self.stream + tuple(key))

    def _grow(self):
        n = self._block
        if n < _MAX_BLOCK:
            self._block = 2 * n
        return n

    def uniform(self) -> float:
        """Uniform draw on the open interval (0, 1)."""
        try:
            return next(self._u)
        except StopIteration:
            arr = self.generator.random(self._grow())
            self._u = iter(arr[arr > 0.0].tolist())
            return self.uniform()

    def normal(self) -> float:
        try:
            return next(self._n)
        except StopIteration:
            self._n = iter(self.generator.standard_normal(self._grow()).tolist())
            return next(self._n)

    def exponential(self) -> float:
        """Exponential draw with unit mean."""
        try:
            return next(self._e)
        except StopIteration:
            self._e = iter(self.generator.standard_exponential(self._grow()).tolist())
            return next(self._e)
