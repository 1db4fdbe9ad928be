"""Brute-force deducibility: count the coupon-to-label bijections that agree
with every observed (group, label set) pair.

A coupon c may take label x only if x lies in the label set of every draw
containing c and in no label set of a draw missing c. Conversely any
bijection respecting those allowed sets maps each drawn group onto its
label set (injectivity plus equal sizes), so counting consistent
bijections is counting perfect matchings of the allowed-label relation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .rng import StreamRng
from .stats import SeedSpec, derive_stream_seed
from .tracker import ComponentTracker

MAX_ORACLE_N = 12


class KnowledgeVariant(enum.Enum):
    LABELS_KNOWN = "I"
    LABELS_UNKNOWN = "II"


@dataclass
class DrawLog:
    n: int
    k: int
    truth: tuple[int, ...] | None = None
    draws: list[tuple[frozenset[int], frozenset[int]]] = field(default_factory=list)

    def observe(self, group) -> None:
        """Append a draw of ``group``; its label set comes from the hidden truth."""
        if self.truth is None:
            raise ValueError("log has no ground truth to label draws with")
        group = frozenset(group)
        self.append(group, frozenset(self.truth[c] for c in group))

    def append(self, group, labels) -> None:
        group, labels = frozenset(group), frozenset(labels)
        if len(group) != self.k or len(labels) != self.k:
            raise ValueError(f"draw {sorted(group)} | {sorted(labels)} is not of size k={self.k}")
        if not all(0 <= c < self.n for c in group) or not all(0 <= x < self.n for x in labels):
            raise ValueError(f"ids out of range for n={self.n}")
        self.draws.append((group, labels))

    def prefix(self, length: int) -> "DrawLog":
        return DrawLog(self.n, self.k, self.truth, self.draws[:length])

    def to_text(self) -> str:
        lines = [f"{self.n} {self.k}"]
        for group, labels in self.draws:
            lines.append(" ".join(map(str, sorted(group))) + " | " + " ".join(map(str, sorted(labels))))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DrawLog":
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows:
            raise ValueError("empty draw log")
        n, k = map(int, rows[0].split())
        log = cls(n, k)
        for row in rows[1:]:
            left, sep, right = row.partition("|")
            if not sep:
                raise ValueError(f"malformed draw line {row!r}")
            log.append(map(int, left.split()), map(int, right.split()))
        return log


def _allowed_sets(log: DrawLog, coupons: list[int], labels: set[int]) -> dict[int, set[int]]:
    allowed = {c: set(labels) for c in coupons}
    for group, label_set in log.draws:
        for c in coupons:
            if c in group:
                allowed[c] &= label_set
            else:
                allowed[c] -= label_set
    return allowed


def _count_matchings(allowed: dict[int, set[int]], limit: int | None = None) -> int:
    """Backtracking over coupons, most constrained first, with forward checking."""
    order = sorted(allowed, key=lambda c: (len(allowed[c]), c))
    used: set[int] = set()
    count = 0

    def search(i: int) -> bool:
        nonlocal count
        if i == len(order):
            count += 1
            return limit is not None and count >= limit
        for x in sorted(allowed[order[i]] - used):
            used.add(x)
            # forward check: every later coupon still has a free label
            if all(allowed[c] - used for c in order[i + 1:]) and search(i + 1):
                return True
            used.discard(x)
        return False

    search(0)
    return count


def _domain(log: DrawLog, variant: KnowledgeVariant) -> tuple[list[int], set[int]]:
    if variant is KnowledgeVariant.LABELS_KNOWN:
        return list(range(log.n)), set(range(log.n))
    coupons: set[int] = set()
    labels: set[int] = set()
    for group, label_set in log.draws:
        coupons |= group
        labels |= label_set
    return sorted(coupons), labels


def count_consistent_bijections(log: DrawLog, variant: KnowledgeVariant, limit: int | None = None) -> int:
    """Number of bijections consistent with the log (capped at ``limit`` if given).

    LABELS_KNOWN ranges over all n coupons and the full label universe;
    LABELS_UNKNOWN over the observed coupons and observed labels only.
    """
    if log.n > MAX_ORACLE_N:
        raise ValueError(f"brute-force oracle is limited to n <= {MAX_ORACLE_N}")
    coupons, labels = _domain(log, variant)
    if len(coupons) != len(labels):
        return 0
    return _count_matchings(_allowed_sets(log, coupons, labels), limit)


def deducible(log: DrawLog, variant: KnowledgeVariant) -> bool:
    if variant is KnowledgeVariant.LABELS_UNKNOWN:
        seen: set[int] = set()
        for group, _ in log.draws:
            seen |= group
        if len(seen) < log.n:
            return False
    count = count_consistent_bijections(log, variant, limit=2)
    if count == 0:
        raise InconsistentLog(log)
    return count == 1


class InconsistentLog(ValueError):
    def __init__(self, log: DrawLog):
        super().__init__("no bijection is consistent with the draw log:\n" + log.to_text())
        self.log = log


class RuleMismatch(AssertionError):
    def __init__(self, log: DrawLog, step: int, variant: KnowledgeVariant, rule: bool, oracle: bool):
        super().__init__(
            f"variant {variant.value} at draw {step}: component rule says {rule}, "
            f"brute force says {oracle}\n{log.to_text()}"
        )
        self.log = log


@dataclass(frozen=True)
class EquivalenceReport:
    n: int
    runs: int
    disagreements: int
    max_steps: int


def check_rule_equivalence(n: int, runs: int, master_seed: int) -> EquivalenceReport:
    """Replay simulated pair draws through the component predicates and the
    brute-force oracle, comparing both variants after every draw.

    Run r draws from stream (master_seed, r), the same stream the Monte
    Carlo kernels use for replicate r. Raises RuleMismatch on disagreement.
    """
    if not 3 <= n <= 8:
        raise ValueError(f"rule equivalence is checked for 3 <= n <= 8, got {n}")
    if runs < 1:
        raise ValueError("runs must be positive")
    max_steps = 0
    for r in range(runs):
        rng = StreamRng(derive_stream_seed(SeedSpec(master_seed, r)))
        log = DrawLog(n, 2, tuple(rng.split().permutation(n)))
        tracker = ComponentTracker(n)
        step = 0
        while not tracker.is_variant2_done():
            step += 1
            u, v = rng.pair(n)
            log.observe((u, v))
            tracker.add_edge(u, v)
            pairs = (
                (KnowledgeVariant.LABELS_KNOWN, tracker.is_variant1_done()),
                (KnowledgeVariant.LABELS_UNKNOWN, tracker.is_variant2_done()),
            )
            for variant, rule in pairs:
                brute = deducible(log, variant)
                if brute != rule:
                    raise RuleMismatch(log, step, variant, rule, brute)
        max_steps = max(max_steps, step)
    return EquivalenceReport(n=n, runs=runs, disagreements=0, max_steps=max_steps)


def simulate_general_run(n: int, k: int, rng: StreamRng, max_steps: int) -> tuple[int | None, int | None]:
    """First draw index at which each variant becomes deducible, or None.

    The hidden labeling comes from ``rng.split()``, which leaves ``rng``
    unadvanced: for k=2 the group sequence is the one simulate_labeled_run
    would draw from the same stream.
    """
    if not 2 <= k <= n - 1:
        raise ValueError(f"need 2 <= k <= n-1, got k={k}, n={n}")
    if n > 10:
        raise ValueError(f"general-k exploration is limited to n <= 10, got {n}")
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    log = DrawLog(n, k, tuple(rng.split().permutation(n)))
    q1 = q2 = None
    for step in range(1, max_steps + 1):
        log.observe(rng.group(n, k))
        if q1 is None and deducible(log, KnowledgeVariant.LABELS_KNOWN):
            q1 = step
        if q2 is None and deducible(log, KnowledgeVariant.LABELS_UNKNOWN):
            q2 = step
        if q1 is not None and q2 is not None:
            break
    return q1, q2
