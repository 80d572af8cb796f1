"""Deterministic counter-based pseudorandom primitives.

Every random quantity in this package is a pure function of a 64-bit key
and a counter: output_i = finalize(key + (i+1)*GOLDEN) where finalize is
the splitmix64 mixing function.  Because there is no mutable generator
state, draws can be recomputed in any order, scalar or as numpy batches,
with bit-identical results; parallel callers never contend; and seeded
experiments reproduce exactly across runs.

The first outputs for key 0 match the published splitmix64 sequence
(0xE220A8397B1DCDAF, ...), which the test suite pins.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

_NP_GOLDEN = np.uint64(GOLDEN)
_NP_MUL1 = np.uint64(_MUL1)
_NP_MUL2 = np.uint64(_MUL2)
_NP_30 = np.uint64(30)
_NP_27 = np.uint64(27)
_NP_31 = np.uint64(31)
_NP_11 = np.uint64(11)
_NP_63 = np.uint64(63)
_NP_ONE = np.uint64(1)

#: 2^-53, converts the top 53 bits of a u64 into a float in [0, 1).
_UNIT = 1.0 / (1 << 53)


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def stream_u64(key: int, counter: int) -> int:
    """Output `counter` of the splitmix64 stream with the given key."""
    return _finalize((key + (counter + 1) * GOLDEN) & MASK64)


def stream_u64_array(key: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized `stream_u64`; bit-identical to the scalar version."""
    z = (np.uint64(key & MASK64) + (counters.astype(np.uint64) + _NP_ONE) * _NP_GOLDEN)
    z = (z ^ (z >> _NP_30)) * _NP_MUL1
    z = (z ^ (z >> _NP_27)) * _NP_MUL2
    return z ^ (z >> _NP_31)


def mix64(*words: int) -> int:
    """Fold any number of integer words into one 64-bit key.

    Chained absorb-and-finalize: h <- finalize((h ^ word) + GOLDEN).
    Used to derive independent sub-keys, e.g. mix64(seed, tag, trial).
    """
    h = 0
    for w in words:
        h = _finalize((h ^ (w & MASK64)) + GOLDEN & MASK64)
    return h


def unit_float(u: int) -> float:
    """Map a u64 to [0, 1) using its top 53 bits."""
    return (u >> 11) * _UNIT


def unit_float_array(u: np.ndarray) -> np.ndarray:
    return (u >> _NP_11).astype(np.float64) * _UNIT


def _at(keys: np.ndarray, counter: int) -> np.ndarray:
    """Stream output `counter` for an array of keys."""
    z = keys.astype(np.uint64) + (np.uint64(counter) + _NP_ONE) * _NP_GOLDEN
    z = (z ^ (z >> _NP_30)) * _NP_MUL1
    z = (z ^ (z >> _NP_27)) * _NP_MUL2
    return z ^ (z >> _NP_31)


def standard_normals(keys: np.ndarray) -> np.ndarray:
    """One N(0,1) draw per key (Box-Muller on counters 0 and 1).

    1 - u1 lies in (0, 1], so the log never sees zero.
    """
    u1 = unit_float_array(_at(keys, 0))
    u2 = unit_float_array(_at(keys, 1))
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    return r * np.cos((2.0 * np.pi) * u2)


def rademacher_signs(keys: np.ndarray) -> np.ndarray:
    """One +/-1 draw per key, from the top bit of stream output 0."""
    bit = _at(keys.astype(np.uint64), 0) >> _NP_63
    return np.where(bit == _NP_ONE, 1.0, -1.0)


class Stream:
    """Sequential convenience view over a counter-based stream."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    def u64(self) -> int:
        u = stream_u64(self.key, self.counter)
        self.counter += 1
        return u

    def uniform(self) -> float:
        return unit_float(self.u64())

    def below(self, m: int) -> int:
        """Unbiased integer in [0, m) by rejection."""
        if m <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            u = self.u64()
            if u < limit:
                return u % m

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct elements of range(n), via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} from {n} elements")
        arr = list(range(n))
        for j in range(k):
            r = j + self.below(n - j)
            arr[j], arr[r] = arr[r], arr[j]
        return arr[:k]
