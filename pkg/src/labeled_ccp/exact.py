"""Exact expected stopping times from the lumped (s, p) absorbing chain.

The component process of the pair collector lumps onto (s, p): the chance
that the next pair joins two given size classes depends on the partition
only through s, p and l = n - s - 2p. Every non-self transition moves to a
state that is lexicographically smaller in (s, p), so expectations follow
by one backward sweep with the self-loop divided out.
"""
from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass
from math import comb

from .stats import theory_values


@dataclass(frozen=True)
class ClassState:
    s: int
    p: int

    def large_mass(self, n: int) -> int:
        return n - self.s - 2 * self.p

    def is_valid(self, n: int) -> bool:
        ell = self.large_mass(n)
        return self.s >= 0 and self.p >= 0 and ell >= 0 and ell not in (1, 2)


@dataclass(frozen=True)
class ExactExpectations:
    n: int
    e_t: float
    e_t_prime: float
    e_q1: float
    e_q2: float


def _outcomes(s: int, p: int, ell: int) -> list[tuple[int, int, int]]:
    """(ds, dp, number of vertex pairs) for every kind of drawn pair."""
    return [
        (-2, +1, comb(s, 2)),            # two singletons
        (-1, -1, 2 * p * s),             # singleton with a pair vertex
        (-1, 0, s * ell),                # singleton with a large component
        (0, -2, comb(2 * p, 2) - p),     # vertices of two different pairs
        (0, -1, 2 * p * ell),            # pair vertex with a large component
        (0, 0, p + comb(ell, 2)),        # inside one pair or one large component
    ]


def transition_distribution(state: ClassState, n: int) -> list[tuple[ClassState, float]]:
    if n < 2 or not state.is_valid(n):
        raise ValueError(f"invalid class state {state} for n={n}")
    total = comb(n, 2)
    result: dict[ClassState, float] = {}
    for ds, dp, ways in _outcomes(state.s, state.p, state.large_mass(n)):
        if ways:
            nxt = ClassState(state.s + ds, state.p + dp)
            result[nxt] = result.get(nxt, 0.0) + ways / total
    return list(result.items())


def _absorbed(s: int, p: int) -> tuple[bool, bool, bool, bool]:
    # order: T, T', Q_I, Q_II
    return s == 0, s <= 1, s <= 1 and p == 0, s == 0 and p == 0


def exact_expected_times(n: int) -> ExactExpectations:
    """Expected pair drawings from (n, 0) into each of the four absorbing sets."""
    if n < 3:
        raise ValueError(f"stopping times are a.s. infinite for n < 3 (got n={n})")
    total = comb(n, 2)
    # values[s][p] = (E_T, E_T', E_QI, E_QII) from state (s, p)
    values: list[list[tuple[float, float, float, float] | None]] = []
    for s in range(n + 1):
        row: list[tuple[float, float, float, float] | None] = []
        values.append(row)
        for p in range((n - s) // 2 + 1):
            ell = n - s - 2 * p
            if ell in (1, 2):
                row.append(None)
                continue
            done = _absorbed(s, p)
            if all(done):
                row.append((0.0, 0.0, 0.0, 0.0))
                continue
            stay = (p + comb(ell, 2)) / total
            acc = [1.0, 1.0, 1.0, 1.0]
            for ds, dp, ways in _outcomes(s, p, ell)[:-1]:
                if not ways:
                    continue
                nxt = values[s + ds][p + dp]
                q = ways / total
                for i in range(4):
                    acc[i] += q * nxt[i]
            scale = 1.0 / (1.0 - stay)
            row.append(tuple(0.0 if done[i] else acc[i] * scale for i in range(4)))
    e_t, e_t_prime, e_q1, e_q2 = values[n][0]
    return ExactExpectations(n=n, e_t=e_t, e_t_prime=e_t_prime, e_q1=e_q1, e_q2=e_q2)


def reachable_states(n: int) -> list[ClassState]:
    """States reachable from (n, 0), by forward search over the transitions."""
    start = ClassState(n, 0)
    seen = {start}
    frontier = [start]
    while frontier:
        state = frontier.pop()
        for nxt, _ in transition_distribution(state, n):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return sorted(seen, key=lambda st: (st.s, st.p))


EXACT_COLUMNS = (
    "n", "e_t", "e_t_prime", "e_q1", "e_q2",
    "theory_e_t", "theory_e_t_prime", "theory_e_q1", "theory_e_q2",
    "dev_e_t", "dev_e_t_prime", "dev_e_q1", "dev_e_q2", "gap_q2_q1",
)


def exact_table_rows(ns: Iterable[int]) -> list[dict[str, float | int]]:
    rows = []
    for n in ns:
        ex = exact_expected_times(n)
        th = theory_values(n)
        row: dict[str, float | int] = {"n": n}
        for name in ("e_t", "e_t_prime", "e_q1", "e_q2"):
            row[name] = getattr(ex, name)
        for name in ("e_t", "e_t_prime", "e_q1", "e_q2"):
            row[f"theory_{name}"] = getattr(th, name)
        for name in ("e_t", "e_t_prime", "e_q1", "e_q2"):
            row[f"dev_{name}"] = getattr(ex, name) - getattr(th, name)
        row["gap_q2_q1"] = ex.e_q2 - ex.e_q1
        rows.append(row)
    return rows


def exact_table_csv(ns: Iterable[int]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=EXACT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in exact_table_rows(ns):
        writer.writerow({k: repr(v) for k, v in row.items()})
    return buf.getvalue()
