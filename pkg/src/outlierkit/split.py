"""Seeded, platform-independent train/test splitting.

The shuffle never touches numpy's or Python's global generators. Its exact
algorithm is fixed, so a seed gives the same split on every platform and
library version:

* SplitMix64 (Steele, Lea & Flood 2014) produces the 64-bit stream. The
  state starts at ``seed mod 2**64`` and advances by ``0x9E3779B97F4A7C15``.
  Each output is finalized with the mix constants ``0xBF58476D1CE4E5B9`` and
  ``0x94D049BB133111EB``.
* A Fisher-Yates shuffle runs ``i`` from ``n - 1`` down to 1 and swaps
  ``i`` with ``j`` drawn uniformly from ``[0, i]``. The draw rejects any
  output at or above ``2**64 - (2**64 mod (i + 1))`` and then takes the
  remainder modulo ``i + 1``.
"""

import math
from fractions import Fraction

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next(self):
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, bound):
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound


def permutation(n, seed):
    rng = SplitMix64(seed)
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return np.array(order, dtype=np.int64)


def split_sizes(n, train_fraction):
    """``floor(f * n)`` training rows, with ``f`` read at its decimal value."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"split fraction must lie in (0, 1), got {train_fraction!r}")
    n_train = math.floor(Fraction(repr(float(train_fraction))) * n)
    return n_train, n - n_train


def train_test_split(dataset, train_fraction, seed):
    """Shuffle rows with ``seed`` and cut the first ``train_fraction`` off as train."""
    order = permutation(dataset.n_samples, seed)
    n_train, _ = split_sizes(dataset.n_samples, train_fraction)
    return dataset.take(order[:n_train]), dataset.take(order[n_train:])
