import random
from fractions import Fraction

import pytest

from matchforge.charging import (
    TraceMismatchError,
    build_ledger,
    target_ratio,
    theta,
    verify_all,
    verify_bounds,
)
from matchforge.decomposition import canonicalize, decompose
from matchforge.graphs import Graph, gen_random_bounded
from matchforge.matchers import (
    FirstPolicy,
    RandomPolicy,
    ScriptedPolicy,
    run_greedy,
    run_min_greedy,
    run_one_two_min_greedy,
    script_from_picks,
)
from matchforge.optimum import maximum_matching


def ledger_for(g, trace, delta=None):
    m_star = canonicalize(g, trace.result, maximum_matching(g))
    dec = decompose(g, trace.result, m_star)
    return build_ledger(trace, dec, delta or max(3, g.delta))


def random_ledger(seed, deltas=(3, 4, 5)):
    rng = random.Random(seed)
    delta = rng.choice(deltas)
    g = gen_random_bounded(rng.randint(4, 14), delta, rng.uniform(0.3, 0.9), seed)
    if g.m == 0:
        return None
    policy = [FirstPolicy(), RandomPolicy(seed)][seed % 2]
    trace = run_one_two_min_greedy(g, policy)
    return ledger_for(g, trace, max(3, delta))


def test_theta_values():
    assert theta(3) == Fraction(1, 6)
    assert theta(4) == Fraction(1, 10)
    assert target_ratio(3) == Fraction(2, 3)
    assert target_ratio(8) == Fraction(7, 13)


def test_p3_empty_ledger():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    led = ledger_for(g, run_min_greedy(g, FirstPolicy()))
    assert led.transfers == [] and led.donations == []
    rep = verify_bounds(led)
    assert rep.all_pass
    assert led.dec.global_ratio == 1


class TestThreeCreditCancellation:
    """An endpoint drawing three credits; the last one, arriving on the
    1 -> 0 degree drop, must be cancelled (degree bound 6)."""

    def build(self):
        edges = [
            (10, 11), (10, 12), (10, 13), (11, 13),
            (0, 6), (0, 1), (1, 2), (2, 3), (3, 9),
            (0, 12), (1, 12), (3, 12),
            (0, 4), (0, 5), (3, 7), (3, 8), (0, 2),
            (4, 5), (7, 8),
            (4, 6), (5, 6), (7, 9), (8, 9),
        ]
        g = Graph.from_edges(14, edges)
        assert g.delta == 6
        trace = run_one_two_min_greedy(g, FirstPolicy())
        return g, trace, ledger_for(g, trace, 6)

    def test_third_credit_cancelled(self):
        _, _, led = self.build()
        cancelled = [t for t in led.transfers if t.cancelled]
        assert len(cancelled) == 1
        (t,) = cancelled
        assert t.endpoint == 12 and t.source == 3 and t.step == 3
        assert led.credits_to_endpoint(12, include_cancelled=True) == 3
        assert led.credits_to_endpoint(12) == 2

    def test_all_bounds_hold(self):
        _, _, led = self.build()
        assert verify_all(led).all_pass

    def test_no_donation_since_next_step_stays_in_path(self):
        _, _, led = self.build()
        assert led.donations == []


class TestDynamicDonation:
    """A free-mode creation paying two debits whose follow-up step selects a
    degree-1 singleton node in another component (degree bound 4)."""

    def build(self):
        g = Graph.from_edges(6, [(0, 1), (0, 2), (0, 4), (0, 5), (1, 2),
                                 (1, 4), (1, 5), (2, 3), (3, 4), (3, 5)])
        assert g.delta == 4
        trace = run_one_two_min_greedy(g, FirstPolicy())
        return g, trace, ledger_for(g, trace, 4)

    def test_donation_recorded(self):
        _, _, led = self.build()
        (d,) = led.donations
        assert d.kind == "dynamic" and d.coins == 2
        assert d.source == 2 and d.recipient == 0

    def test_endpoint_classes(self):
        _, _, led = self.build()
        (info,) = [i for i in led.paths.values() if i.classes is not None]
        cls = info.classes
        assert cls.deg1_one_f == (4, 5)
        assert cls.deg1_two_f == () and cls.deg2 == ()
        assert len(cls.edges_to_adjacent) == 4

    def test_tight_singleton_balance(self):
        _, _, led = self.build()
        singleton = next(
            ci for ci, c in enumerate(led.dec.components) if c.kind == "singleton"
        )
        assert led.balance(singleton) == -4
        assert led.local_ratio(singleton) == target_ratio(4)
        assert verify_all(led).all_pass


class TestStaticDonation:
    """A degree-2 creation whose follow-up degree-1 node lives in another
    component: the donated amount is fixed by the degree bound.

    Frozen from a randomized run (degree bound 4): step 3 creates a path by
    selecting node 2 at degree 2, node 9 drops to degree 1 and is selected
    next inside another component, donating delta - 3 = 1 coin back.
    """

    def build(self):
        g = Graph.from_edges(14, [
            (0, 4), (0, 6), (0, 10), (0, 13), (1, 3), (1, 4), (1, 10),
            (1, 12), (2, 6), (2, 7), (2, 9), (2, 12), (3, 5), (3, 13),
            (4, 9), (4, 13), (5, 6), (5, 7), (5, 13), (6, 11), (7, 8),
            (8, 10), (8, 11), (8, 12), (9, 10), (9, 11), (11, 12),
        ])
        picks = [(0, 10), (8, 11), (2, 12), (4, 9), (5, 6), (1, 3)]
        trace = run_one_two_min_greedy(
            g, script_from_picks(g, picks, "one_two_mingreedy")
        )
        return g, trace, ledger_for(g, trace, 4)

    def test_static_donation(self):
        _, _, led = self.build()
        (d,) = [d for d in led.donations if d.kind == "static"]
        assert d.coins == led.delta - 3 == 1
        assert d.source == 9 and d.recipient == 2 and d.creation_step == 3
        assert verify_all(led).all_pass


class TestHardCoreWorstTrace:
    """The six-node core at degree bound 3: the worst adversarial run scores
    two of three, and every bound certifies that exact ratio."""

    def test_ledger_on_worst_trace(self):
        from matchforge.adversary import AdversaryB, play_game
        from matchforge.matchers import worst_case_size

        result = play_game("mingreedy", AdversaryB(3))
        g = result.graph
        size, witness = worst_case_size(g, "one_two_mingreedy")
        assert size == 2
        led = ledger_for(g, witness, 3)
        assert led.dec.global_ratio == Fraction(2, 3)
        assert verify_all(led).all_pass


class TestCorpusProperties:
    def test_random_runs_all_pass(self):
        for seed in range(800):
            led = random_ledger(seed)
            if led is None:
                continue
            rep = verify_all(led)
            assert rep.all_pass, rep.failures()

    def test_zero_sum_and_delta3_no_donations(self):
        for seed in range(300):
            led = random_ledger(seed)
            if led is None:
                continue
            assert sum(led.credits_in) == sum(led.debits_out)
            if led.delta == 3:
                assert led.donations == []

    def test_scripted_replays_verify_too(self):
        for seed in range(60):
            rng = random.Random(seed)
            g = gen_random_bounded(rng.randint(4, 12), 4, 0.6, seed)
            if g.m == 0:
                continue
            base = run_one_two_min_greedy(g, RandomPolicy(seed))
            picks = [st.edge for st in base.steps]
            replay = run_one_two_min_greedy(
                g, script_from_picks(g, picks, "one_two_mingreedy")
            )
            assert verify_all(ledger_for(g, replay)).all_pass

    def test_implied_ratio_bound(self):
        for seed in range(300):
            led = random_ledger(seed)
            if led is None or not led.dec.m_star:
                continue
            assert led.dec.global_ratio >= target_ratio(led.delta)
            for ci in range(len(led.dec.components)):
                assert led.local_ratio(ci) >= target_ratio(led.delta)


class TestInputValidation:
    def test_non_heuristic_trace_rejected(self):
        # A greedy run that violates the minimum-degree rule.
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        trace = run_greedy(g, ScriptedPolicy([1]))  # picks (1, 2), run ends
        m_star = canonicalize(g, trace.result, maximum_matching(g))
        dec = decompose(g, trace.result, m_star)
        with pytest.raises(TraceMismatchError, match="free step"):
            build_ledger(trace, dec, 3)

    def test_mismatched_decomposition_rejected(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        t1 = run_min_greedy(g, FirstPolicy())
        t2 = run_min_greedy(g, ScriptedPolicy([1, 0]))  # selects node 2
        m_star = canonicalize(g, t2.result, maximum_matching(g))
        dec = decompose(g, t2.result, m_star)
        with pytest.raises(TraceMismatchError, match="differs"):
            build_ledger(t1, dec, 3)

    def test_delta_below_graph_degree_rejected(self):
        g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
        t = run_min_greedy(g, FirstPolicy())
        m_star = canonicalize(g, t.result, maximum_matching(g))
        dec = decompose(g, t.result, m_star)
        with pytest.raises(ValueError):
            build_ledger(t, dec, 3)


def test_transfers_recheck_from_trace_alone():
    for seed in range(150):
        led = random_ledger(seed)
        if led is None:
            continue
        for t in led.transfers:
            e = (min(t.source, t.endpoint), max(t.source, t.endpoint))
            assert e in led.dec.f_edges
            rec = led.step_record(t.step)
            assert t.source in (rec.selected, rec.partner)
            assert e in rec.removed
            assert rec.deg_after[t.endpoint] <= 1
