"""Submodularity constraint families and additive violation measures.

Three nested families of unordered set pairs {A, B} are checked against
the inequality f(A) + f(B) >= f(A u B) + f(A n B):

  full:  all incomparable pairs, min(|A|,|B|) >= |A n B| + 1;
  dimin: pairs with min(|A|,|B|) = |A n B| + 1 (diminishing returns);
  cross: pairs with |A| = |B| = |A n B| + 1 (second-order squares).

The violation of a pair is gap(A,B) = f(AuB) + f(AnB) - f(A) - f(B);
epsilon for a family is the clamped maximum gap.  Checking every cross
pair suffices to certify submodularity outright, which is what
`verify_submodular` does.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .core import DENSE_LIMIT, SetFunction, to_explicit
from .prng import Stream, mix64

#: Full-family enumeration is O(4^n); cap it well below the dense limit.
FULL_LIMIT = 14

_ESTIMATE_TAG = 0x45505345


class ConstraintClass(Enum):
    FULL = "full"
    DIMIN = "dimin"
    CROSS = "cross"


class ConstraintPair(NamedTuple):
    """Unordered qualifying pair, stored with bitmask(A) < bitmask(B)."""

    A: int
    B: int


@dataclass(frozen=True)
class EpsilonReport:
    """Minimal additive slack for a constraint family, with a witness.

    epsilon = max(0, max gap); witness is a pair attaining the maximum,
    present only when some gap is strictly positive.  Ties go to the
    witness with the lexicographically smallest (A, B) bitmasks.
    """

    family: ConstraintClass
    epsilon: float
    witness: Optional[ConstraintPair] = None


def constraint_gap(f: SetFunction, pair: ConstraintPair) -> float:
    """gap(A,B) = f(AuB) + f(AnB) - f(A) - f(B)."""
    a, b = pair
    return f.value(a | b) + f.value(a & b) - f.value(a) - f.value(b)


def _check_limits(n: int, family: ConstraintClass) -> None:
    if family is ConstraintClass.FULL:
        if n > FULL_LIMIT:
            raise ValueError(f"full-family enumeration requires n <= {FULL_LIMIT}, got {n}")
    elif n > DENSE_LIMIT:
        raise ValueError(f"pair enumeration requires n <= {DENSE_LIMIT}, got {n}")


def enumerate_pairs(n: int, family: ConstraintClass) -> Iterator[ConstraintPair]:
    """Yield each qualifying unordered pair exactly once.

    cross: for each base set A (ascending) and each unordered {a, b}
    disjoint from A, the pair (A u {a}, A u {b}).
    dimin: pairs (A u {c}, B) with A a proper subset of B and c outside B;
    the equal-size (cross-shaped) duplicates are emitted once.
    full: pairs (A, B), A < B by bitmask, neither containing the other.
    """
    _check_limits(n, family)
    size = 1 << n
    if family is ConstraintClass.CROSS:
        for base in range(size):
            free = [i for i in range(n) if not base >> i & 1]
            for ia in range(len(free)):
                for ib in range(ia + 1, len(free)):
                    yield ConstraintPair(base | 1 << free[ia], base | 1 << free[ib])
    elif family is ConstraintClass.DIMIN:
        for b_mask in range(size):
            outside = [c for c in range(n) if not b_mask >> c & 1]
            b_card = b_mask.bit_count()
            sub = 0
            while True:
                if sub != b_mask:
                    cross_shaped = b_card == sub.bit_count() + 1
                    for c in outside:
                        x = sub | 1 << c
                        if cross_shaped and x > b_mask:
                            continue  # mirror emission already covered this pair
                        yield ConstraintPair(min(x, b_mask), max(x, b_mask))
                if sub == b_mask:
                    break
                sub = (sub - b_mask) & b_mask
    else:
        for a_mask in range(size):
            for b_mask in range(a_mask + 1, size):
                if a_mask & ~b_mask and b_mask & ~a_mask:
                    yield ConstraintPair(a_mask, b_mask)


def count_pairs(n: int, family: ConstraintClass) -> int:
    """Number of qualifying pairs (by enumeration; small n only)."""
    return sum(1 for _ in enumerate_pairs(n, family))


class _WitnessTracker:
    """Running (max gap, smallest (A,B) key among maximizers)."""

    __slots__ = ("nbits", "best", "key")

    def __init__(self, nbits: int):
        self.nbits = nbits
        self.best = -np.inf
        self.key = None

    def offer_arrays(self, gaps: np.ndarray, a: np.ndarray, b: np.ndarray) -> None:
        if gaps.size == 0:
            return
        m = gaps.max()
        if m < self.best:
            return
        hit = gaps == m
        keys = (a[hit].astype(np.int64) << self.nbits) | b[hit].astype(np.int64)
        kmin = int(keys.min())
        if m > self.best or kmin < self.key:
            if m > self.best:
                self.best = float(m)
            self.key = kmin if self.key is None or m > self.best or kmin < self.key else self.key
            self.key = kmin if self.key is None else min(self.key, kmin) if m == self.best else kmin

    def offer(self, gap: float, a: int, b: int) -> None:
        key = (a << self.nbits) | b
        if gap > self.best or (gap == self.best and (self.key is None or key < self.key)):
            self.best = gap
            self.key = key

    def report(self, family: ConstraintClass) -> EpsilonReport:
        if self.key is None or self.best <= 0.0:
            return EpsilonReport(family, max(0.0, self.best if self.key is not None else 0.0))
        mask = (1 << self.nbits) - 1
        pair = ConstraintPair(self.key >> self.nbits, self.key & mask)
        return EpsilonReport(family, self.best, pair)


def _scan_cross(table: np.ndarray, n: int, tracker: _WitnessTracker) -> None:
    masks = np.arange(1 << n, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            ab = (1 << a) | (1 << b)
            base = masks[(masks & ab) == 0]
            x = base | (1 << a)
            y = base | (1 << b)
            gaps = table[base | ab] + table[base] - table[x] - table[y]
            tracker.offer_arrays(gaps, x, y)


def _scan_full(table: np.ndarray, n: int, tracker: _WitnessTracker) -> None:
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    chunk = max(1, (1 << 21) // size)
    for lo in range(0, size, chunk):
        a = masks[lo : lo + chunk, None]
        b = masks[None, :]
        valid = ((a & ~b) != 0) & ((b & ~a) != 0) & (a < b)
        gaps = table[a | b] + table[a & b] - table[a] - table[b]
        gaps = np.where(valid, gaps, -np.inf)
        m = gaps.max()
        if m == -np.inf or m < tracker.best:
            continue
        rows, cols = np.nonzero(gaps == m)
        tracker.offer_arrays(np.full(rows.shape, m), lo + rows, cols)


def _scan_dimin(table: np.ndarray, n: int, tracker: _WitnessTracker) -> None:
    for pair in enumerate_pairs(n, ConstraintClass.DIMIN):
        a, b = pair
        gap = table[a | b] + table[a & b] - table[a] - table[b]
        tracker.offer(float(gap), a, b)


def exact_epsilon(f: SetFunction, family: ConstraintClass) -> EpsilonReport:
    """Exact minimal additive slack for the family, by enumeration."""
    n = f.ground.n
    _check_limits(n, family)
    table = to_explicit(f).table
    tracker = _WitnessTracker(n)
    if family is ConstraintClass.CROSS:
        _scan_cross(table, n, tracker)
    elif family is ConstraintClass.DIMIN:
        _scan_dimin(table, n, tracker)
    else:
        _scan_full(table, n, tracker)
    return tracker.report(family)


def verify_submodular(f: SetFunction, tol: float = 1e-9) -> Optional[ConstraintPair]:
    """None iff every cross pair has gap <= tol; else a max-gap witness.

    Cross constraints alone certify submodularity, so a None result means
    f is submodular (up to tol of float slack).
    """
    n = f.ground.n
    if n > DENSE_LIMIT:
        raise ValueError(f"verification requires n <= {DENSE_LIMIT}, got {n}")
    table = to_explicit(f).table
    tracker = _WitnessTracker(n)
    _scan_cross(table, n, tracker)
    report = tracker.report(ConstraintClass.CROSS)
    if report.witness is not None and report.epsilon > tol:
        return report.witness
    return None


def sample_pair(stream: Stream, n: int) -> ConstraintPair:
    """Draw one random pair by the size-then-elements protocol.

    Sizes are uniform on {1, ..., n-1}; each set is that many elements
    sampled without replacement.  The two members may coincide (their gap
    is zero, which is harmless for a max statistic).
    """
    n1 = 1 + stream.below(n - 1)
    n2 = 1 + stream.below(n - 1)
    s = 0
    for i in stream.sample(n, n1):
        s |= 1 << i
    t = 0
    for i in stream.sample(n, n2):
        t |= 1 << i
    return ConstraintPair(s, t)


def estimate_epsilon(f: SetFunction, num_pairs: int, seed: int) -> float:
    """Sampled lower estimate of the full-family epsilon.

    max(0, max over sampled pairs of gap); never exceeds the exact
    full-family epsilon since it maximizes over a subsample.
    """
    n = f.ground.n
    if n < 2:
        raise ValueError("epsilon sampling needs n >= 2")
    if num_pairs < 1:
        raise ValueError("num_pairs must be at least 1")
    stream = Stream(mix64(_ESTIMATE_TAG, seed))
    best = 0.0
    for _ in range(num_pairs):
        pair = sample_pair(stream, n)
        s, t = pair
        gap = f.value(s | t) + f.value(s & t) - f.value(s) - f.value(t)
        if gap > best:
            best = gap
    return best
