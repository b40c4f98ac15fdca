"""Seeded shuffling on a counter-based generator.

Draws come straight from numpy's Philox4x64 bit generator via
``random_raw`` (fixed by the Philox algorithm, not by numpy's sampling
code), and the shuffle and bounded draws are done here, so a seed gives
the same permutation on every platform and numpy version.
"""
import numpy as np

_TWO64 = 1 << 64


class ShuffleRng:
    def __init__(self, seed):
        self.seed = int(seed)
        self._bits = np.random.Philox(key=self.seed % _TWO64)

    def next_u64(self):
        return int(self._bits.random_raw())

    def below(self, n):
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _TWO64 - (_TWO64 % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items):
        """Fisher-Yates shuffle; returns a new list."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
