"""Lower-tail thresholds and bounds for the collector's remaining time,
empirical tail frequencies, and negative-association checks for bin
occupancy."""
from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .simulator import SHARD_SIZE, ExperimentConfig, simulate_records
from .stats import EstimateSummary, ci, merge_estimates, summarize

TAIL_MODES = ("classic-full", "classic-almost", "pair-full", "pair-almost")
SCAN_LIMIT = 10**6


def validate_c(c: float) -> bool:
    """True iff (log m)**c < m for every integer m >= 2.

    Checked on m in [2, 10**6]. (log m)**c / m peaks at m = e**c and falls
    after it; if e**c is inside the scan the peak is covered, and if it is
    beyond, m = 10**6 itself already violates.
    """
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    m = np.arange(2, SCAN_LIMIT + 1, dtype=np.float64)
    log_m = np.log(m)
    # compare c*log(log m) < log m; log(log 2) < 0 is fine
    return bool(np.all(c * np.log(log_m) < log_m))


def _remaining(n: int, k: int) -> int:
    if n - k < 2:
        raise ValueError(f"need n - k >= 2, got n={n}, k={k}")
    return n - k


def threshold(n: int, k: int, c: float) -> float:
    """n log(n-k) - c n log log(n-k), natural logs, in single-coupon draws."""
    m = _remaining(n, k)
    return n * math.log(m) - c * n * math.log(math.log(m))


def _raw_prop5(n: int, k: int, c: float) -> float:
    m = _remaining(n, k)
    return math.exp(-math.log(m) ** c)


def _raw_prop6(n: int, k: int, c: float) -> float:
    m = _remaining(n, k)
    return m * math.exp(-(math.log(m) ** c) * (m - 1) / m)


def prop5_bound(n: int, k: int, c: float) -> float:
    """exp(-log^c(n-k)), leading term only, clamped to [0, 1]."""
    return min(1.0, _raw_prop5(n, k, c))


def prop6_bound(n: int, k: int, c: float) -> float:
    """(n-k) exp(-log^c(n-k) (n-k-1)/(n-k)), leading term only, clamped to [0, 1]."""
    return min(1.0, _raw_prop6(n, k, c))


@dataclass(frozen=True)
class TailSpec:
    n: int
    k: int
    c: float = 2.0
    mode: str = "classic-full"

    def validate(self) -> None:
        if self.mode not in TAIL_MODES:
            raise ValueError(f"unknown tail mode {self.mode!r}")
        if not (0 <= self.k <= self.n - 2):
            raise ValueError(f"need 0 <= k <= n-2, got n={self.n}, k={self.k}")
        if not (0 < self.c <= 2) or not validate_c(self.c):
            raise ValueError(f"c must lie in (0, 2] with log^c m < m, got {self.c}")


@dataclass(frozen=True)
class TailResult:
    spec: TailSpec
    reps: int
    threshold: float
    bound: float
    empirical: EstimateSummary
    violations: int

    @property
    def trivial(self) -> bool:
        """Bound clamped at 1: nothing to check."""
        return self.bound >= 1.0

    @property
    def null_se(self) -> float:
        """Binomial standard error at p = bound."""
        return math.sqrt(self.bound * (1.0 - self.bound) / self.reps)

    @property
    def passed(self) -> bool:
        return self.empirical.mean <= self.bound + 3.0 * self.null_se


def estimate_tail(spec: TailSpec, reps: int, master_seed: int, workers: int = 1) -> TailResult:
    """Frequency of finishing at or below the threshold.

    Pair modes count pair drawings against half the single-draw threshold.
    ``violations`` is the number of replicates at or below the threshold.
    """
    spec.validate()
    if reps < 1:
        raise ValueError("reps must be positive")
    pairs = spec.mode.startswith("pair")
    full = spec.mode.endswith("full")
    cut = threshold(spec.n, spec.k, spec.c) / (2.0 if pairs else 1.0)
    bound = (prop5_bound if full else prop6_bound)(spec.n, spec.k, spec.c)
    config = ExperimentConfig(n=spec.n, reps=reps, mode="pair" if pairs else "classic", k=spec.k, workers=workers)
    times = simulate_records(config, master_seed)[:, 0 if full else 1]
    hits = (times <= cut).astype(np.float64)
    empirical = EstimateSummary(unit="probability")
    for start in range(0, reps, SHARD_SIZE):
        empirical = merge_estimates(empirical, summarize(hits[start:start + SHARD_SIZE], "probability"))
    return TailResult(spec, reps, cut, bound, empirical, int(hits.sum()))


TAIL_COLUMNS = ("n", "k", "c", "mode", "reps", "threshold", "bound", "bound_trivial",
                "empirical", "ci_low", "ci_high", "violations", "passed")


def tail_row(result: TailResult) -> dict:
    lo, hi = ci(result.empirical) if result.reps >= 2 else (result.empirical.mean,) * 2
    spec = result.spec
    return {
        "n": spec.n, "k": spec.k, "c": spec.c, "mode": spec.mode, "reps": result.reps,
        "threshold": result.threshold, "bound": result.bound, "bound_trivial": result.trivial,
        "empirical": result.empirical.mean, "ci_low": lo, "ci_high": hi,
        "violations": result.violations, "passed": result.passed,
    }


def na_exact_two_bins(bins: int, balls: int) -> tuple[float, float]:
    """P(bins 0 and 1 both nonempty) and the product of the marginals."""
    if bins < 2:
        raise ValueError(f"need at least two bins, got {bins}")
    if balls < 0:
        raise ValueError("ball count must be non-negative")
    miss_one = (1.0 - 1.0 / bins) ** balls
    miss_two = (1.0 - 2.0 / bins) ** balls
    joint = 1.0 - 2.0 * miss_one + miss_two
    product = (1.0 - miss_one) ** 2
    return joint, product


@dataclass(frozen=True)
class CovarianceEstimate:
    value: float
    se: float
    reps: int

    def ci(self, z: float = 3.0) -> tuple[float, float]:
        return self.value - z * self.se, self.value + z * self.se


def na_empirical(
    bins: int,
    balls: int,
    first: Sequence[int],
    second: Sequence[int],
    reps: int,
    master_seed: int,
    workers: int = 1,
) -> CovarianceEstimate:
    """Cov(f, g) for f = all bins in ``first`` nonempty, g = all bins in
    ``second`` nonempty; both are non-decreasing in the occupancy counts."""
    first_idx, second_idx = list(first), list(second)
    if not first_idx or not second_idx:
        raise ValueError("index sets must be nonempty")
    if set(first_idx) & set(second_idx):
        raise ValueError("index sets must be disjoint")
    if not all(0 <= b < bins for b in first_idx + second_idx):
        raise ValueError(f"bin ids out of range for {bins} bins")
    if reps < 2:
        raise ValueError("need at least two replicates")
    if balls < 0:
        raise ValueError("ball count must be non-negative")
    in_i = np.array(first_idx, dtype=np.int64)
    in_j = np.array(second_idx, dtype=np.int64)
    master = np.uint64(master_seed & ((1 << 64) - 1))

    def shard(start: int) -> np.ndarray:
        count = min(SHARD_SIZE, reps - start)
        out = np.empty((count, 2), dtype=np.int64)
        K.occupancy_block(bins, balls, in_i, in_j, master, start, count, out)
        return out

    starts = range(0, reps, SHARD_SIZE)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(shard, starts))
    else:
        blocks = [shard(s) for s in starts]
    fg = np.concatenate(blocks).astype(np.float64)
    f, g = fg[:, 0], fg[:, 1]
    # influence terms of the sample covariance
    z = (f - f.mean()) * (g - g.mean())
    value = float(z.sum() / (reps - 1))
    se = float(z.std(ddof=1) / math.sqrt(reps))
    return CovarianceEstimate(value=value, se=se, reps=reps)
