"""Jitted replicate loops. Replicate r seeds its own stream from
(master, r), so a shard's output depends only on its replicate range."""
from __future__ import annotations

import numpy as np
from numba import njit

from .rng import bounded, draw_pair, seed_state, stream_seed_jit

# columns of the labeled-run output block
T_COVER, T_ALMOST, Q1, Q2, X_COVER, X_ALMOST = range(6)
LABELED_FIELDS = ("t_cover", "t_almost", "q1", "q2", "x_at_cover", "x_at_almost")


@njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True)
def labeled_run(n, state, parent, size, out):
    """One pair-drawing trajectory to Q_II; writes the six record fields."""
    for i in range(n):
        parent[i] = i
        size[i] = 1
    s = n
    p = 0
    draws = 0
    t_cover = 0
    t_almost = 0
    q1 = 0
    x_cover = -1
    x_almost = -1
    while True:
        draws += 1
        u, v = draw_pair(state, n)
        ru = _find(parent, u)
        rv = _find(parent, v)
        if ru != rv:
            a = size[ru]
            b = size[rv]
            if a == 1:
                s -= 1
            elif a == 2:
                p -= 1
            if b == 1:
                s -= 1
            elif b == 2:
                p -= 1
            if a + b == 2:
                p += 1
            if a < b or (a == b and ru > rv):
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] = a + b
        if t_almost == 0 and s <= 1:
            t_almost = draws
            x_almost = p
        if t_cover == 0 and s == 0:
            t_cover = draws
            x_cover = p
        if q1 == 0 and s <= 1 and p == 0:
            q1 = draws
        if s == 0 and p == 0:
            break
    out[T_COVER] = t_cover
    out[T_ALMOST] = t_almost
    out[Q1] = q1
    out[Q2] = draws
    out[X_COVER] = x_cover
    out[X_ALMOST] = x_almost


@njit(cache=True, nogil=True)
def labeled_block(n, master, start, count, out):
    state = np.zeros(4, dtype=np.uint64)
    parent = np.empty(n, dtype=np.int64)
    size = np.empty(n, dtype=np.int64)
    for i in range(count):
        seed_state(state, stream_seed_jit(master, start + i))
        labeled_run(n, state, parent, size, out[i])


@njit(cache=True, nogil=True)
def classic_run(n, k, state, seen):
    """Single-coupon draws from k seen coupons (ids 0..k-1); returns (T_k, T'_k)."""
    for i in range(n):
        seen[i] = i < k
    have = k
    draws = 0
    t_almost = 0
    while have < n:
        draws += 1
        c = bounded(state, n)
        if not seen[c]:
            seen[c] = True
            have += 1
            if have == n - 1:
                t_almost = draws
    return draws, t_almost


@njit(cache=True, nogil=True)
def pair_cover_run(n, k, state, seen):
    """Pair draws from k seen coupons; returns pair counts to n and n-1 seen."""
    for i in range(n):
        seen[i] = i < k
    have = k
    draws = 0
    t_almost = 0
    while have < n:
        draws += 1
        u, v = draw_pair(state, n)
        if not seen[u]:
            seen[u] = True
            have += 1
        if not seen[v]:
            seen[v] = True
            have += 1
        if t_almost == 0 and have >= n - 1:
            t_almost = draws
    return draws, t_almost


@njit(cache=True, nogil=True)
def coverage_block(n, k, pairs, master, start, count, out):
    state = np.zeros(4, dtype=np.uint64)
    seen = np.empty(n, dtype=np.bool_)
    for i in range(count):
        seed_state(state, stream_seed_jit(master, start + i))
        if pairs:
            t, t_almost = pair_cover_run(n, k, state, seen)
        else:
            t, t_almost = classic_run(n, k, state, seen)
        out[i, 0] = t
        out[i, 1] = t_almost


@njit(cache=True, nogil=True)
def occupancy_block(bins, balls, in_i, in_j, master, start, count, out):
    """For each replicate throw balls into bins; record f = all bins in I
    nonempty and g = all bins in J nonempty (as 0/1)."""
    state = np.zeros(4, dtype=np.uint64)
    load = np.zeros(bins, dtype=np.int64)
    for r in range(count):
        seed_state(state, stream_seed_jit(master, start + r))
        load[:] = 0
        for _ in range(balls):
            load[bounded(state, bins)] += 1
        f = 1
        for b in in_i:
            if load[b] == 0:
                f = 0
        g = 1
        for b in in_j:
            if load[b] == 0:
                g = 0
        out[r, 0] = f
        out[r, 1] = g
