"""Ground sets, subset masks, and set-function representations.

A subset of {0, ..., n-1} is a bitmask integer: bit i set means element i
belongs to the subset.  Python integers are unbounded, so the encoding
works for any n; operations that enumerate all 2^n subsets (explicit
tables, exhaustive scans) are restricted to n <= DENSE_LIMIT.

All set functions here are immutable after construction and safe to
evaluate concurrently.  Noisy wrappers are deterministic: the perturbation
for a subset is a pure function of (seed, canonical subset encoding), so
repeated queries agree exactly, whether evaluated one at a time or in
vectorized batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import prng

#: Largest n for which full 2^n enumeration is permitted (2^25 doubles
#: is ~268 MB, the desk-scale ceiling).
DENSE_LIMIT = 25

#: Default tolerance for exact-arithmetic claims on float64 values.
DEFAULT_TOL = 1e-9

_NOISE_TAG = 0x4E4F4953  # domain separator for noise keys


@dataclass(frozen=True)
class GroundSet:
    """An n-element universe; elements are 0..n-1."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground set must have at least one element, got n={self.n}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        return 1 << self.n

    def require_dense(self, what: str = "dense enumeration") -> None:
        if self.n > DENSE_LIMIT:
            raise ValueError(
                f"{what} requires n <= {DENSE_LIMIT}, got n={self.n}"
            )


def as_mask(subset, n: int) -> int:
    """Normalize a subset (bitmask int or index iterable) to a bitmask.

    Raises on indices outside 0..n-1 and on duplicate indices.
    """
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >> n:
            raise ValueError(f"bitmask {mask} out of range for n={n}")
        return mask
    mask = 0
    for i in subset:
        i = int(i)
        if not 0 <= i < n:
            raise ValueError(f"element {i} out of range for n={n}")
        bit = 1 << i
        if mask & bit:
            raise ValueError(f"duplicate element {i} in subset")
        mask |= bit
    return mask


def mask_to_indices(mask: int) -> list[int]:
    """Sorted element indices of a bitmask."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_members(mask: int, n: int) -> np.ndarray:
    """Boolean membership array of length n for a bitmask (any n)."""
    raw = mask.to_bytes((n + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:n].astype(bool)


def popcounts(masks: np.ndarray) -> np.ndarray:
    """Vectorized popcount for mask arrays in the dense regime (n <= 25)."""
    v = masks.astype(np.uint32)
    v = v - ((v >> 1) & 0x55555555)
    v = (v & 0x33333333) + ((v >> 2) & 0x33333333)
    v = (v + (v >> 4)) & 0x0F0F0F0F
    return ((v * 0x01010101) >> 24).astype(np.int64)


class SetFunction:
    """Deterministic real-valued function on subsets of a ground set.

    Subclasses implement `_value(mask)`; `values(masks)` is a bulk
    evaluation hook that vectorizable representations override.
    """

    def __init__(self, ground: GroundSet):
        self._ground = ground

    @property
    def ground(self) -> GroundSet:
        return self._ground

    @property
    def n(self) -> int:
        return self._ground.n

    def value(self, subset) -> float:
        return self._value(as_mask(subset, self._ground.n))

    __call__ = value

    def _value(self, mask: int) -> float:
        raise NotImplementedError

    def values(self, masks) -> np.ndarray:
        arr = np.asarray(masks)
        return np.array([self._value(int(m)) for m in arr], dtype=np.float64)


def eval(f: SetFunction, subset) -> float:  # noqa: A001 - spec-level operation name
    """Evaluate f on a subset (bitmask or index iterable)."""
    return f.value(subset)


class ExplicitFunction(SetFunction):
    """Set function stored as a table of 2^n values indexed by bitmask."""

    def __init__(self, ground: GroundSet, table):
        super().__init__(ground)
        ground.require_dense("explicit table storage")
        tab = np.array(table, dtype=np.float64)
        if tab.shape != (ground.size,):
            raise ValueError(
                f"table must have 2^{ground.n} = {ground.size} entries, got {tab.shape}"
            )
        tab.setflags(write=False)
        self.table = tab

    def _value(self, mask: int) -> float:
        return float(self.table[mask])

    def values(self, masks) -> np.ndarray:
        return self.table[np.asarray(masks, dtype=np.int64)]


class ModularFunction(SetFunction):
    """offset + sum of per-element weights over the subset."""

    def __init__(self, weights: Sequence[float], offset: float = 0.0):
        super().__init__(GroundSet(len(weights)))
        self.weights = tuple(float(w) for w in weights)
        self.offset = float(offset)

    def _value(self, mask: int) -> float:
        total = self.offset
        for i, w in enumerate(self.weights):
            if mask >> i & 1:
                total += w
        return total

    def values(self, masks) -> np.ndarray:
        arr = np.asarray(masks, dtype=np.int64)
        out = np.full(arr.shape, self.offset, dtype=np.float64)
        for i, w in enumerate(self.weights):
            out += w * ((arr >> i) & 1)
        return out


class CallableFunction(SetFunction):
    """Adapter for an arbitrary mask -> float callable."""

    def __init__(self, ground: GroundSet, fn: Callable[[int], float]):
        super().__init__(ground)
        self._fn = fn

    def _value(self, mask: int) -> float:
        return float(self._fn(mask))


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph; at most one edge per unordered pair."""

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        seen = set()
        for u, v, _w in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u},{v}) out of range for {self.node_count} nodes")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge for pair {key}")
            seen.add(key)


class CutFunction(SetFunction):
    """Total weight of edges crossing between S and its complement."""

    def __init__(self, graph: WeightedGraph):
        super().__init__(GroundSet(graph.node_count))
        self.graph = graph
        self._u = np.array([e[0] for e in graph.edges], dtype=np.int64)
        self._v = np.array([e[1] for e in graph.edges], dtype=np.int64)
        self._w = np.array([e[2] for e in graph.edges], dtype=np.float64)

    def _value(self, mask: int) -> float:
        if len(self._w) == 0:
            return 0.0
        members = mask_members(mask, self.n)
        crossing = members[self._u] != members[self._v]
        return float(self._w[crossing].sum())

    def values(self, masks) -> np.ndarray:
        arr = np.asarray(masks, dtype=np.int64)
        out = np.zeros(arr.shape, dtype=np.float64)
        for u, v, w in self.graph.edges:
            out += w * (((arr >> u) ^ (arr >> v)) & 1)
        return out


def cut_value(graph: WeightedGraph, subset) -> float:
    """Weight of the cut (S, V \\ S)."""
    return CutFunction(graph).value(subset)


@dataclass(frozen=True)
class NoiseModel:
    """Per-subset additive noise, deterministic in (seed, subset).

    kind "none": zero.  kind "gaussian": N(0, param) with param = variance.
    kind "rademacher": +param or -param, each with probability 1/2.
    """

    kind: str
    param: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "rademacher"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.param < 0:
            raise ValueError("noise parameter must be non-negative")
        if not 0 <= self.seed <= prng.MASK64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls("none")

    @classmethod
    def gaussian(cls, sigma2: float, seed: int) -> "NoiseModel":
        return cls("gaussian", sigma2, seed)

    @classmethod
    def rademacher(cls, c: float, seed: int) -> "NoiseModel":
        return cls("rademacher", c, seed)

    def draws(self, masks, n: int) -> np.ndarray:
        """Vectorized draws; dense regime only (canonical encoding = mask)."""
        if n > DENSE_LIMIT:
            raise ValueError("bulk noise draws require the dense regime")
        arr = np.asarray(masks, dtype=np.uint64)
        if self.kind == "none":
            return np.zeros(arr.shape, dtype=np.float64)
        keys = _noise_keys(self.seed, arr)
        if self.kind == "gaussian":
            return prng.standard_normals(keys) * math.sqrt(self.param)
        return prng.rademacher_signs(keys) * self.param

    def draw(self, mask: int, n: int) -> float:
        """Scalar draw; routes through the vectorized path so the two agree."""
        if self.kind == "none":
            return 0.0
        canon = subset_canonical_key(mask, n)
        keys = np.array([_noise_key_scalar(self.seed, canon)], dtype=np.uint64)
        if self.kind == "gaussian":
            return float(prng.standard_normals(keys)[0] * math.sqrt(self.param))
        return float(prng.rademacher_signs(keys)[0] * self.param)


def subset_canonical_key(mask: int, n: int) -> int:
    """Canonical 64-bit encoding of a subset.

    Dense regime: the bitmask itself.  Larger ground sets: a chained
    splitmix64 hash of the sorted index list, stable across platforms.
    """
    if n <= DENSE_LIMIT:
        return mask
    h = 0
    i = 0
    m = mask
    while m:
        if m & 1:
            h = prng.mix64(h, i + 1)
        m >>= 1
        i += 1
    return h


def _noise_key_scalar(seed: int, canon: int) -> int:
    return prng.mix64(seed, _NOISE_TAG, canon)


def _noise_keys(seed: int, masks: np.ndarray) -> np.ndarray:
    """Vectorized mix64(seed, NOISE_TAG, mask) for dense-regime masks."""
    h = prng.mix64(seed, _NOISE_TAG)
    z = (np.uint64(h) ^ masks) + prng._NP_GOLDEN
    z = (z ^ (z >> prng._NP_30)) * prng._NP_MUL1
    z = (z ^ (z >> prng._NP_27)) * prng._NP_MUL2
    return z ^ (z >> prng._NP_31)


class NoisyFunction(SetFunction):
    """base(S) + Z_S with Z_S drawn per the noise model."""

    def __init__(self, base: SetFunction, noise: NoiseModel):
        super().__init__(base.ground)
        self.base = base
        self.noise = noise

    def _value(self, mask: int) -> float:
        return self.base._value(mask) + self.noise.draw(mask, self.n)

    def values(self, masks) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            return super().values(masks)
        arr = np.asarray(masks, dtype=np.int64)
        return self.base.values(arr) + self.noise.draws(arr, self.n)


def noisy_function(base: SetFunction, noise: NoiseModel) -> SetFunction:
    """Wrap a set function with deterministic additive noise."""
    if noise.kind == "none":
        return base
    return NoisyFunction(base, noise)


def to_explicit(f: SetFunction) -> ExplicitFunction:
    """Materialize f over all 2^n subsets (dense regime only)."""
    f.ground.require_dense("materializing an explicit table")
    if isinstance(f, ExplicitFunction):
        return f
    masks = np.arange(f.ground.size, dtype=np.int64)
    return ExplicitFunction(f.ground, f.values(masks))


# -- text formats -----------------------------------------------------------
#
# Explicit function file: first line "n <int>", then 2^n lines
# "<bitmask-decimal> <value>" in increasing bitmask order.
# Graph file: first line "nodes <int>", then lines "<u> <v> <w>".


def save_explicit(f: SetFunction, path) -> None:
    ef = to_explicit(f)
    with open(path, "w") as fh:
        fh.write(f"n {ef.n}\n")
        for mask, val in enumerate(ef.table):
            fh.write(f"{mask} {float(val)!r}\n")


def load_explicit(path) -> ExplicitFunction:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty function file")
    lineno, head = rows[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "n":
        raise ValueError(f"{path}:{lineno}: expected 'n <integer>' header")
    n = int(parts[1])
    ground = GroundSet(n)
    ground.require_dense("loading an explicit table")
    body = rows[1:]
    if len(body) != ground.size:
        raise ValueError(f"{path}: expected {ground.size} value lines, got {len(body)}")
    table = np.empty(ground.size, dtype=np.float64)
    for expect, (lineno, ln) in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected '<bitmask> <value>'")
        mask = int(parts[0])
        if mask != expect:
            raise ValueError(f"{path}:{lineno}: bitmask {mask} out of order (expected {expect})")
        table[mask] = float(parts[1])
    return ExplicitFunction(ground, table)


def save_graph(graph: WeightedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"nodes {graph.node_count}\n")
        for u, v, w in graph.edges:
            fh.write(f"{u} {v} {float(w)!r}\n")


def load_graph(path) -> WeightedGraph:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    lineno, head = rows[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "nodes":
        raise ValueError(f"{path}:{lineno}: expected 'nodes <integer>' header")
    node_count = int(parts[1])
    edges = []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected '<u> <v> <w>'")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return WeightedGraph(node_count, tuple(edges))
