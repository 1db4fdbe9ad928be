import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labeled_ccp.oracle import (
    DrawLog,
    InconsistentLog,
    KnowledgeVariant,
    RuleMismatch,
    check_rule_equivalence,
    count_consistent_bijections,
    deducible,
    simulate_general_run,
)
from labeled_ccp.rng import StreamRng
from labeled_ccp.simulator import simulate_labeled_run

KNOWN = KnowledgeVariant.LABELS_KNOWN
UNKNOWN = KnowledgeVariant.LABELS_UNKNOWN
X, Y, Z = 0, 1, 2


def brute_count(log, variant):
    """Enumerate every bijection of the relevant domain."""
    if variant is KNOWN:
        coupons, labels = list(range(log.n)), list(range(log.n))
    else:
        coupons = sorted(set().union(*[g for g, _ in log.draws]))
        labels = sorted(set().union(*[lab for _, lab in log.draws]))
    total = 0
    for image in itertools.permutations(labels, len(coupons)):
        sigma = dict(zip(coupons, image))
        if all(frozenset(sigma[c] for c in g) == lab for g, lab in log.draws):
            total += 1
    return total


def make_log(n, k, draws, truth=None):
    log = DrawLog(n, k, tuple(truth) if truth else tuple(range(n)))
    for g in draws:
        log.observe(g)
    return log


def test_single_pair_n3():
    log = DrawLog(3, 2)
    log.append({0, 1}, {X, Y})
    assert count_consistent_bijections(log, KNOWN) == 2
    assert brute_count(log, KNOWN) == 2
    assert not deducible(log, UNKNOWN)


def test_path_n3_unique():
    log = make_log(3, 2, [{0, 1}, {1, 2}])
    assert count_consistent_bijections(log, KNOWN) == 1
    assert count_consistent_bijections(log, UNKNOWN) == 1
    assert deducible(log, KNOWN) and deducible(log, UNKNOWN)


def test_empty_log_not_deducible():
    for n in (2, 3, 6):
        log = DrawLog(n, 2, tuple(range(n)))
        assert not deducible(log, KNOWN) and not deducible(log, UNKNOWN)


def test_spanning_path_n4():
    log = make_log(4, 2, [{0, 1}, {1, 2}, {2, 3}], truth=[2, 0, 3, 1])
    assert brute_count(log, KNOWN) == 1
    assert deducible(log, KNOWN) and deducible(log, UNKNOWN)


def test_single_pair_n2():
    log = make_log(2, 2, [{0, 1}])
    assert count_consistent_bijections(log, KNOWN) == 2
    assert not deducible(log, KNOWN)


def test_two_pairs_n4():
    log = make_log(4, 2, [{0, 1}, {2, 3}])
    assert count_consistent_bijections(log, KNOWN) == 4 == brute_count(log, KNOWN)
    assert not deducible(log, KNOWN) and not deducible(log, UNKNOWN)


def test_inconsistent_log():
    log = DrawLog(3, 2)
    log.append({0, 1}, {0, 1})
    log.append({0, 1}, {1, 2})
    assert count_consistent_bijections(log, KNOWN) == 0
    with pytest.raises(InconsistentLog):
        deducible(log, KNOWN)


def test_text_roundtrip():
    log = make_log(5, 3, [{0, 1, 4}, {2, 3, 4}], truth=[4, 3, 2, 1, 0])
    text = log.to_text()
    assert text == "5 3\n0 1 4 | 0 3 4\n2 3 4 | 0 1 2\n"
    again = DrawLog.from_text(text)
    assert again.draws == log.draws and (again.n, again.k) == (5, 3)
    with pytest.raises(ValueError):
        DrawLog.from_text("3 2\n0 1 2 3\n")


def random_logs():
    @st.composite
    def build(draw):
        n = draw(st.integers(2, 6))
        k = draw(st.integers(1, n - 1))
        truth = draw(st.permutations(range(n)))
        groups = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=k, max_size=k), max_size=6))
        return make_log(n, k, groups, truth)

    return build()


@settings(max_examples=300, deadline=None)
@given(random_logs())
def test_matches_enumeration_and_properties(log):
    counts = []
    for length in range(len(log.draws) + 1):
        prefix = log.prefix(length)
        for variant in (KNOWN, UNKNOWN):
            assert count_consistent_bijections(prefix, variant) == brute_count(prefix, variant)
        known = count_consistent_bijections(prefix, KNOWN)
        assert known >= 1  # honest logs
        counts.append(known)
        if deducible(prefix, UNKNOWN):
            assert deducible(prefix, KNOWN)
    assert counts == sorted(counts, reverse=True)


@pytest.mark.parametrize("n", range(3, 9))
def test_rule_equivalence(n):
    report = check_rule_equivalence(n, 500, master_seed=17)
    assert report.disagreements == 0 and report.runs == 500 and report.max_steps >= 2


def test_rule_equivalence_detects_a_broken_rule(monkeypatch):
    from labeled_ccp.tracker import ComponentTracker

    monkeypatch.setattr(ComponentTracker, "is_variant1_done", lambda self: self.s <= 1)
    with pytest.raises(RuleMismatch) as err:
        check_rule_equivalence(5, 200, master_seed=17)
    assert err.value.log.n == 5


def test_general_run_agrees_with_pair_simulator():
    for seed in range(100):
        for n in (3, 5, 8):
            q1, q2 = simulate_general_run(n, 2, StreamRng(seed), max_steps=10_000)
            rec = simulate_labeled_run(n, StreamRng(seed))
            assert (q1, q2) == (rec.q1, rec.q2)


def test_general_run_k_equals_n_minus_1():
    for seed in range(50):
        q1, q2 = simulate_general_run(4, 3, StreamRng(seed), max_steps=500)
        assert q1 is not None and q2 is not None and 2 <= q1 <= q2


def test_general_run_not_reached():
    assert simulate_general_run(4, 2, StreamRng(1), max_steps=1) == (None, None)
    with pytest.raises(ValueError):
        simulate_general_run(4, 4, StreamRng(1), 5)


def test_truth_does_not_change_deducibility():
    """Same draws, two fixed truths: deducibility depends only on the groups."""
    for seed in range(200):
        rng_a, rng_b = StreamRng(seed), StreamRng(seed)
        log_a = DrawLog(6, 3, (0, 1, 2, 3, 4, 5))
        log_b = DrawLog(6, 3, (5, 3, 1, 0, 2, 4))
        for _ in range(8):
            log_a.observe(rng_a.group(6, 3))
            log_b.observe(rng_b.group(6, 3))
            for variant in (KNOWN, UNKNOWN):
                assert deducible(log_a, variant) == deducible(log_b, variant)
