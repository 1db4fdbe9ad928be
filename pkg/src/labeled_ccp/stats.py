"""Numeric foundations: harmonic numbers, leading-order theory values,
streaming estimates and the seed-stream mixer."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

# Euler-Mascheroni constant. Documentation only; nothing below computes with it.
EULER_GAMMA = 0.5772156649015329

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15
MIX_C1 = 0xBF58476D1CE4E5B9
MIX_C2 = 0x94D049BB133111EB

UNITS = ("drawings", "probability", "dimensionless")


def harmonic(n: int) -> float:
    """H_n = 1 + 1/2 + ... + 1/n, summed in ascending i in double precision."""
    if n < 1:
        raise ValueError(f"harmonic number needs n >= 1, got {n}")
    return _harmonic(int(n))


@lru_cache(maxsize=4096)
def _harmonic(n: int) -> float:
    total = 0.0
    for i in range(1, n + 1):
        total += 1.0 / i
    return total


@dataclass(frozen=True)
class TheoryValues:
    """Leading terms for the pair process, in pair drawings."""

    n: int
    harmonic: float
    e_t: float
    e_t_prime: float
    e_q1: float
    e_q2: float


def theory_values(n: int) -> TheoryValues:
    if n < 3:
        raise ValueError(f"stopping times are a.s. infinite for n < 3 (got n={n})")
    h = harmonic(n)
    full = 0.5 * n * h
    almost = full - 0.5 * n
    return TheoryValues(n=n, harmonic=h, e_t=full, e_t_prime=almost, e_q1=almost, e_q2=full)


def classic_expected_remaining(n: int, k: int) -> float:
    """E(T_k) = n * H_{n-k}: single draws needed to finish from k distinct coupons."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= k <= n - 1:
        raise ValueError(f"need 0 <= k <= n-1, got k={k}, n={n}")
    return n * harmonic(n - k)


@dataclass(frozen=True)
class EstimateSummary:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    unit: str = "dimensionless"

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return max(self.m2, 0.0) / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def se(self) -> float:
        if self.count < 1:
            return math.inf
        return math.sqrt(self.variance / self.count)


def update_estimate(summary: EstimateSummary, value: float) -> EstimateSummary:
    count = summary.count + 1
    delta = value - summary.mean
    mean = summary.mean + delta / count
    m2 = summary.m2 + delta * (value - mean)
    return replace(summary, count=count, mean=mean, m2=m2)


def merge_estimates(a: EstimateSummary, b: EstimateSummary) -> EstimateSummary:
    """Chan et al. pairwise combination of two summaries."""
    if a.unit != b.unit and a.count and b.count:
        raise ValueError(f"cannot merge summaries in {a.unit!r} and {b.unit!r}")
    if b.count == 0:
        return a
    if a.count == 0:
        return replace(b, unit=b.unit)
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / count)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / count)
    return EstimateSummary(count=count, mean=mean, m2=m2, unit=a.unit)


def summarize(values, unit: str = "dimensionless") -> EstimateSummary:
    """Two-pass summary of a whole array; equivalent to streaming updates."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        return EstimateSummary(unit=unit)
    mean = float(x.mean())
    m2 = float(np.square(x - mean).sum())
    return EstimateSummary(count=int(x.size), mean=mean, m2=m2, unit=unit)


def ci(summary: EstimateSummary, z: float = 3.0) -> tuple[float, float]:
    """Normal-approximation interval mean +/- z * sqrt(variance / count)."""
    if summary.count < 2:
        raise ValueError("confidence interval needs at least two observations")
    half = z * math.sqrt(summary.variance / summary.count)
    return summary.mean - half, summary.mean + half


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0


def mix64(x: int) -> int:
    """SplitMix64 finalizer: two multiply-xorshift rounds and a closing shift.

    A bijection on 64-bit words.
    """
    x &= MASK64
    x = ((x ^ (x >> 30)) * MIX_C1) & MASK64
    x = ((x ^ (x >> 27)) * MIX_C2) & MASK64
    return x ^ (x >> 31)


def derive_stream_seed(spec: SeedSpec) -> int:
    """Seed for stream ``stream_id`` under ``master_seed``.

    seed = mix64(master + GOLDEN64 * (stream_id + 1) mod 2**64). The affine
    step is injective in stream_id for stream_id < 2**64 because GOLDEN64 is
    odd, and mix64 is a bijection, so distinct streams never collide.
    """
    if spec.stream_id < 0:
        raise ValueError("stream_id must be non-negative")
    x = (spec.master_seed + GOLDEN64 * (spec.stream_id + 1)) & MASK64
    return mix64(x)
