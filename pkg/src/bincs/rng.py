"""Deterministic random streams built on the splitmix64 mixing function.

Every stochastic piece of the package (Gaussian matrices, sparse test
signals, null-space sampling, per-trial seeds) draws from these streams so
that a run is a pure function of its seeds, independent of platform RNG
state or execution order.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into a single 64-bit seed, order-sensitively."""
    acc = _GAMMA
    for p in parts:
        acc = _finalize((acc + (int(p) & _MASK)) & _MASK)
    return acc


def u64_block(seed: int, start: int, count: int) -> np.ndarray:
    """Counter-based block of 64-bit outputs: positions start..start+count-1."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK) + np.uint64(_GAMMA) * idx)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1), 53-bit mantissas, from the counter stream."""
    return (u64_block(seed, start, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def normal_block(seed: int, count: int) -> np.ndarray:
    """Standard normals via Box-Muller on consecutive uniform pairs.

    Pair i consumes counters (2i, 2i+1); the output is truncated to
    ``count``, so the same seed always yields the same leading entries.
    """
    pairs = (count + 1) // 2
    u = u64_block(seed, 0, 2 * pairs)
    # +1 keeps u1 in (0, 1] so the log is finite.
    u1 = ((u[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (u[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(2.0 * math.pi * u2)
    out[1::2] = r * np.sin(2.0 * math.pi * u2)
    return out[:count]


class Stream:
    """Sequential view of the counter stream keyed by one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._pos = 0
        self._normal_spare = None

    def next_u64(self) -> int:
        self._pos += 1
        return _finalize((self.seed + _GAMMA * self._pos) & _MASK)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        if self._normal_spare is not None:
            z, self._normal_spare = self._normal_spare, None
            return z
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        self._normal_spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, count: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(count)])

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), rejection-sampled to kill modulo bias."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK + 1) - ((_MASK + 1) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def sign(self) -> int:
        return 1 if self.next_u64() & 1 else -1

    def sample_indices(self, n: int, k: int) -> np.ndarray:
        """First k entries of a Fisher-Yates shuffle of range(n).

        Only the first k swap steps are performed; positions 0..k-1 are
        already final after that prefix.
        """
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        arr = np.arange(n)
        for i in range(k):
            j = i + self.below(n - i)
            arr[i], arr[j] = arr[j], arr[i]
        return arr[:k].copy()
