"""Monte Carlo for the pair-drawing labeled collector and the classical
single-coupon collector."""
from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import _kernels as K
from .rng import StreamRng
from .stats import EstimateSummary, merge_estimates, summarize
from .tracker import ComponentTracker

# Replicates per shard. Fixed so that summaries never depend on worker count.
SHARD_SIZE = 4096

MODES = ("labeled", "classic", "pair")


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class RunRecord:
    t_cover: int
    t_almost: int
    q1: int
    q2: int
    x_at_cover: int
    x_at_almost: int


@dataclass(frozen=True)
class ClassicRecord:
    t_k: int
    t_prime_k: int


def sample_group(n: int, k: int, rng: StreamRng) -> frozenset[int]:
    if not 1 <= k <= n - 1:
        raise ValueError(f"group size must be in [1, n-1], got k={k}, n={n}")
    return frozenset(rng.group(n, k))


def simulate_labeled_run(n: int, rng: StreamRng) -> RunRecord:
    if n < 3:
        raise ValueError(f"Q_II is a.s. infinite for n < 3 (got n={n})")
    out = np.empty(6, dtype=np.int64)
    K.labeled_run(n, rng.state, np.empty(n, np.int64), np.empty(n, np.int64), out)
    return RunRecord(*map(int, out))


def record_from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> RunRecord | None:
    """Read the four stopping times off an explicit pair sequence using
    ComponentTracker. Returns None if the sequence ends before Q_II."""
    tracker = ComponentTracker(n)
    marks: dict[str, int] = {}
    for step, (u, v) in enumerate(pairs, start=1):
        tracker.add_edge(u, v)
        if "t_almost" not in marks and tracker.is_almost_covered():
            marks["t_almost"] = step
            marks["x_at_almost"] = tracker.p
        if "t_cover" not in marks and tracker.is_covered():
            marks["t_cover"] = step
            marks["x_at_cover"] = tracker.p
        if "q1" not in marks and tracker.is_variant1_done():
            marks["q1"] = step
        if tracker.is_variant2_done():
            marks["q2"] = step
            return RunRecord(**marks)
    return None


def simulate_classic_from_k(n: int, k: int, rng: StreamRng) -> ClassicRecord:
    if not 0 <= k <= n - 2:
        raise ValueError(f"need 0 <= k <= n-2, got k={k}, n={n}")
    t, t_almost = K.classic_run(n, k, rng.state, np.empty(n, np.bool_))
    return ClassicRecord(int(t), int(t_almost))


def simulate_pair_remaining(n: int, k: int, rng: StreamRng) -> ClassicRecord:
    if n < 2 or not 0 <= k <= n - 2:
        raise ValueError(f"need n >= 2 and 0 <= k <= n-2, got k={k}, n={n}")
    t, t_almost = K.pair_cover_run(n, k, rng.state, np.empty(n, np.bool_))
    return ClassicRecord(int(t), int(t_almost))


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    reps: int
    mode: str = "labeled"
    k: int = 0
    workers: int = 1


def _shards(reps: int) -> list[tuple[int, int]]:
    return [(start, min(SHARD_SIZE, reps - start)) for start in range(0, reps, SHARD_SIZE)]


def _run_shard(config: ExperimentConfig, master: int, start: int, count: int) -> np.ndarray:
    if config.mode == "labeled":
        out = np.empty((count, 6), dtype=np.int64)
        K.labeled_block(config.n, np.uint64(master), start, count, out)
    else:
        out = np.empty((count, 2), dtype=np.int64)
        K.coverage_block(config.n, config.k, config.mode == "pair", np.uint64(master), start, count, out)
    return out


def validate_config(config: ExperimentConfig) -> None:
    if config.reps < 1:
        raise ValueError("replicate count must be positive")
    if config.workers < 1:
        raise ValueError("worker count must be positive")
    if config.mode not in MODES:
        raise ValueError(f"unknown mode {config.mode!r}; expected one of {MODES}")
    if config.mode == "labeled" and config.n < 3:
        raise ValueError(f"labeled mode needs n >= 3, got {config.n}")
    if config.mode != "labeled" and not (config.n >= 2 and 0 <= config.k <= config.n - 2):
        raise ValueError(f"need n >= 2 and 0 <= k <= n-2, got n={config.n}, k={config.k}")


def simulate_shards(config: ExperimentConfig, master_seed: int) -> list[np.ndarray]:
    """Raw per-replicate records, one array per shard, in stream-id order."""
    validate_config(config)
    master = master_seed & ((1 << 64) - 1)
    shards = _shards(config.reps)
    if config.workers == 1:
        return [_run_shard(config, master, s, c) for s, c in shards]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(lambda sc: _run_shard(config, master, *sc), shards))


def simulate_records(config: ExperimentConfig, master_seed: int) -> np.ndarray:
    return np.concatenate(simulate_shards(config, master_seed))


def check_run_invariants(block: np.ndarray) -> None:
    t_cover, t_almost, q1, q2, x_cover, x_almost = block.T
    checks = {
        "t_almost <= t_cover <= q2": (t_almost <= t_cover) & (t_cover <= q2),
        "t_almost <= q1 <= q2": (t_almost <= q1) & (q1 <= q2),
        "x_at_cover == 0 iff q2 == t_cover": (x_cover == 0) == (q2 == t_cover),
        "x_at_almost == 0 iff q1 == t_almost": (x_almost == 0) == (q1 == t_almost),
        "x counts non-negative": (x_cover >= 0) & (x_almost >= 0),
    }
    for name, ok in checks.items():
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise InvariantViolation(f"{name} fails on record {block[bad].tolist()}")


def labeled_metrics(block: np.ndarray, n: int) -> dict[str, tuple[np.ndarray, str]]:
    b = block.astype(np.float64)
    t_cover, t_almost, q1, q2, x_cover, x_almost = b.T
    return {
        "t_cover": (t_cover, "drawings"),
        "t_almost": (t_almost, "drawings"),
        "q1": (q1, "drawings"),
        "q2": (q2, "drawings"),
        "q2_minus_q1": (q2 - q1, "drawings"),
        "q2_minus_t_cover": (q2 - t_cover, "drawings"),
        "t_cover_minus_t_almost": (t_cover - t_almost, "drawings"),
        "x_at_cover": (x_cover, "dimensionless"),
        "n_x_at_cover": (n * x_cover, "drawings"),
        "x_at_almost": (x_almost, "dimensionless"),
    }


def coverage_metrics(block: np.ndarray) -> dict[str, tuple[np.ndarray, str]]:
    b = block.astype(np.float64)
    return {"t_k": (b[:, 0], "drawings"), "t_prime_k": (b[:, 1], "drawings")}


def run_experiment(config: ExperimentConfig, master_seed: int) -> dict[str, EstimateSummary]:
    """Summaries per metric. Replicate r uses stream (master_seed, r); shard
    summaries are merged in stream order, so workers never change the result."""
    totals: dict[str, EstimateSummary] = {}
    for block in simulate_shards(config, master_seed):
        if config.mode == "labeled":
            check_run_invariants(block)
            metrics = labeled_metrics(block, config.n)
        else:
            metrics = coverage_metrics(block)
        for name, (values, unit) in metrics.items():
            part = summarize(values, unit)
            totals[name] = merge_estimates(totals[name], part) if name in totals else part
    return totals


RECORD_FIELDS = tuple(f.name for f in fields(RunRecord))


def records_to_csv(records: Iterable[RunRecord] | np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        writer.writerow(astuple(rec) if isinstance(rec, RunRecord) else [int(x) for x in rec])
    return buf.getvalue()
