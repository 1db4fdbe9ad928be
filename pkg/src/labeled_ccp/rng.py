"""xoshiro256** streams, jitted so Monte Carlo kernels and Python callers
draw from the identical sequence.

Each replicate owns one stream: its 256-bit state is filled by SplitMix64
from ``derive_stream_seed(SeedSpec(master, replicate))``. Integers in
``[0, m)`` use rejection on the top of the 64-bit range, so they are
exactly uniform. Groups are drawn with Floyd's subset algorithm.
"""
from __future__ import annotations

import numpy as np
from numba import njit, uint64

from .stats import GOLDEN64, MIX_C1, MIX_C2, SeedSpec, derive_stream_seed

_GOLDEN = uint64(GOLDEN64)
_C1 = uint64(MIX_C1)
_C2 = uint64(MIX_C2)
_MUL5 = uint64(5)
_MUL9 = uint64(9)


@njit(cache=True, nogil=True)
def mix64_jit(x):
    x = uint64(x)
    x = (x ^ (x >> uint64(30))) * _C1
    x = (x ^ (x >> uint64(27))) * _C2
    return x ^ (x >> uint64(31))


@njit(cache=True, nogil=True)
def stream_seed_jit(master, stream):
    return mix64_jit(uint64(master) + _GOLDEN * (uint64(stream) + uint64(1)))


@njit(cache=True, nogil=True)
def seed_state(state, seed):
    x = uint64(seed)
    for i in range(4):
        x = x + _GOLDEN
        state[i] = mix64_jit(x)
    if state[0] == 0 and state[1] == 0 and state[2] == 0 and state[3] == 0:
        state[0] = _GOLDEN


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << uint64(k)) | (x >> uint64(64 - k))


@njit(cache=True, nogil=True)
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * _MUL5, 7) * _MUL9
    t = s1 << uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True, nogil=True)
def bounded(state, m):
    """Uniform integer in [0, m) for 1 <= m < 2**63."""
    mu = uint64(m)
    floor = (uint64(0) - mu) % mu
    while True:
        x = next_u64(state)
        if x >= floor:
            return np.int64(x % mu)


@njit(cache=True, nogil=True)
def draw_pair(state, n):
    """Floyd's algorithm specialised to k=2; returns (a, b) with a != b."""
    a = bounded(state, n - 1)
    b = bounded(state, n)
    if b == a:
        b = n - 1
    return a, b


@njit(cache=True, nogil=True)
def draw_group(state, n, k, out):
    """Floyd's algorithm: fill ``out[:k]`` with a uniform k-subset of range(n)."""
    filled = 0
    for j in range(n - k, n):
        t = bounded(state, j + 1)
        taken = False
        for i in range(filled):
            if out[i] == t:
                taken = True
                break
        out[filled] = j if taken else t
        filled += 1


@njit(cache=True, nogil=True)
def shuffle(state, arr):
    for i in range(arr.shape[0] - 1, 0, -1):
        j = bounded(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


class StreamRng:
    """Python handle on one xoshiro256** stream."""

    def __init__(self, seed: int):
        self.seed = int(seed) & ((1 << 64) - 1)
        self.state = np.zeros(4, dtype=np.uint64)
        seed_state(self.state, np.uint64(self.seed))

    @classmethod
    def for_stream(cls, master_seed: int, stream_id: int) -> "StreamRng":
        return cls(derive_stream_seed(SeedSpec(master_seed, stream_id)))

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def integers(self, m: int) -> int:
        if m < 1:
            raise ValueError("upper bound must be positive")
        return int(bounded(self.state, m))

    def pair(self, n: int) -> tuple[int, int]:
        a, b = draw_pair(self.state, n)
        return int(a), int(b)

    def group(self, n: int, k: int) -> list[int]:
        out = np.empty(k, dtype=np.int64)
        draw_group(self.state, n, k, out)
        return [int(x) for x in out]

    def permutation(self, n: int) -> list[int]:
        arr = np.arange(n, dtype=np.int64)
        shuffle(self.state, arr)
        return [int(x) for x in arr]

    def split(self) -> "StreamRng":
        """Independent child stream keyed on the current state.

        The parent is not advanced, so a caller can take side randomness
        without shifting the parent's draw sequence.
        """
        h = 0
        for word in self.state:
            h = (h * GOLDEN64 + int(word) + 1) & ((1 << 64) - 1)
        return StreamRng(derive_stream_seed(SeedSpec(h, 1 << 32)))
