import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labeled_ccp.tracker import ComponentTracker, new_tracker


def naive_profile(n, edges):
    """Connected components by BFS over the full edge list."""
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, sizes = set(), []
    for start in range(n):
        if start in seen:
            continue
        stack, size = [start], 0
        seen.add(start)
        while stack:
            x = stack.pop()
            size += 1
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        sizes.append(size)
    s = sizes.count(1)
    p = sizes.count(2)
    return s, p, n - s - 2 * p


def edge_sequences(max_n=50, max_len=120):
    return st.integers(2, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(
                st.tuples(st.integers(0, n - 1), st.integers(0, n - 2)).map(
                    lambda t: (t[0], t[1] + (t[1] >= t[0]))
                ),
                max_size=max_len,
            ),
        )
    )


def test_initial_profiles():
    assert new_tracker(5).class_profile() == (5, 0, 0)
    assert new_tracker(1).class_profile() == (1, 0, 0)
    t = new_tracker(3)
    assert not t.is_covered() and not t.is_variant2_done()
    with pytest.raises(ValueError):
        new_tracker(0)


def test_edge_examples():
    t = new_tracker(5)
    step = t.add_edge(0, 1)
    assert t.class_profile() == (3, 1, 0) and step.merged
    t.add_edge(0, 2)
    assert t.class_profile() == (2, 0, 3)
    step = t.add_edge(0, 1)
    assert t.class_profile() == (2, 0, 3)
    assert not step.merged and step.before == step.after


@pytest.mark.parametrize("u,v", [(1, 1), (-1, 2), (0, 5)])
def test_bad_edges_rejected(u, v):
    with pytest.raises(ValueError):
        new_tracker(5).add_edge(u, v)


def forced(n, s, p):
    """Tracker with the requested profile, built from explicit edges."""
    t = ComponentTracker(n)
    v = 0
    for _ in range(p):
        t.add_edge(v, v + 1)
        v += 2
    rest = list(range(v, n - s))
    for a, b in zip(rest, rest[1:]):
        t.add_edge(a, b)
    assert t.class_profile()[:2] == (s, p)
    return t


def test_predicates_on_profiles():
    t = forced(4, 0, 2)
    assert t.is_covered() and not t.is_variant2_done()
    t = forced(4, 1, 0)
    assert t.is_variant1_done() and not t.is_variant2_done()
    t = forced(4, 0, 0)
    assert all([t.is_covered(), t.is_almost_covered(), t.is_variant1_done(), t.is_variant2_done()])


def test_matches_naive_recomputation():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(2, 50)
        t = ComponentTracker(n)
        edges = []
        for _ in range(rng.randint(0, 2 * n)):
            u, v = rng.sample(range(n), 2)
            t.add_edge(u, v)
            edges.append((u, v))
        assert t.class_profile() == naive_profile(n, edges)


@settings(max_examples=200, deadline=None)
@given(edge_sequences())
def test_conservation_implications_and_monotone_flags(case):
    n, edges = case
    t = ComponentTracker(n)
    history = []
    last_s = n
    for u, v in edges:
        t.add_edge(u, v)
        s, p, ell = t.class_profile()
        assert s + 2 * p + ell == n and ell not in (1, 2)
        assert s <= last_s
        last_s = s
        flags = (t.is_covered(), t.is_almost_covered(), t.is_variant1_done(), t.is_variant2_done())
        cov, almost, v1, v2 = flags
        assert (not v2 or cov) and (not cov or almost)
        assert (not v2 or v1) and (not v1 or almost)
        history.append(flags)
    for i in range(4):
        seq = [h[i] for h in history]
        assert seq == sorted(seq)


def test_dump_format():
    t = ComponentTracker(5)
    t.add_edge(3, 1)
    t.add_edge(4, 0)
    assert t.dump() == "0 4\n1 3\n2\n"
