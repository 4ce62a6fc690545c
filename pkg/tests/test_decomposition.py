import random
from fractions import Fraction

import pytest

from matchforge.decomposition import (
    CanonicalizationError,
    NonCanonicalError,
    canonicalize,
    decompose,
    endpoint_degrees,
    format_components,
)
from matchforge.graphs import Graph, Matching, gen_random_bounded
from matchforge.matchers import FirstPolicy, RandomPolicy, run_one_two_min_greedy
from matchforge.optimum import maximum_matching


def P3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


def P4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


def C4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


def C6():
    return Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])


class TestCanonicalize:
    def test_p3_mixed_path_collapses_to_singleton(self):
        m = Matching.from_pairs([(0, 1)])
        m_prime = Matching.from_pairs([(1, 2)])
        m_star = canonicalize(P3(), m, m_prime)
        assert m_star.pairs == {(0, 1)}
        dec = decompose(P3(), m, m_star)
        assert [c.kind for c in dec.components] == ["singleton"]

    def test_c4_cycle_elimination(self):
        m = Matching.from_pairs([(0, 1), (2, 3)])
        m_prime = Matching.from_pairs([(1, 2), (0, 3)])
        m_star = canonicalize(C4(), m, m_prime)
        assert m_star.pairs == m.pairs
        dec = decompose(C4(), m, m_star)
        assert [c.kind for c in dec.components] == ["singleton", "singleton"]

    def test_p4_already_canonical(self):
        m = Matching.from_pairs([(1, 2)])
        m_prime = Matching.from_pairs([(0, 1), (2, 3)])
        m_star = canonicalize(P4(), m, m_prime)
        assert m_star.pairs == m_prime.pairs
        (comp,) = decompose(P4(), m, m_star).components
        assert comp.kind == "path"
        assert comp.m_count == 1 and comp.opt_count == 2
        assert comp.local_ratio == Fraction(1, 2)
        assert comp.endpoints == (0, 3)

    def test_non_maximum_rejected(self):
        with pytest.raises(CanonicalizationError, match="not maximum"):
            canonicalize(P4(), Matching.from_pairs([(1, 2)]),
                         Matching.from_pairs([(0, 1)]))

    def test_idempotent_and_size_preserving(self):
        for seed in range(80):
            rng = random.Random(seed)
            g = gen_random_bounded(rng.randint(2, 12), rng.randint(1, 4),
                                   rng.uniform(0.2, 0.9), seed)
            if g.m == 0:
                continue
            m = run_one_two_min_greedy(g, RandomPolicy(seed)).result
            m_prime = maximum_matching(g)
            m_star = canonicalize(g, m, m_prime)
            assert len(m_star) == len(m_prime)
            again = canonicalize(g, m, m_star)
            assert again.pairs == m_star.pairs


class TestDecompose:
    def test_rejects_cycles(self):
        m = Matching.from_pairs([(0, 1), (2, 3)])
        other = Matching.from_pairs([(1, 2), (0, 3)])
        with pytest.raises(NonCanonicalError, match="cycle"):
            decompose(C4(), m, other)

    def test_rejects_mixed_paths(self):
        m = Matching.from_pairs([(0, 1)])
        other = Matching.from_pairs([(1, 2)])
        with pytest.raises(NonCanonicalError, match="mixed"):
            decompose(P3(), m, other)

    def test_counts_partition_the_matchings(self):
        for seed in range(120):
            rng = random.Random(seed)
            g = gen_random_bounded(rng.randint(2, 14), rng.randint(1, 5),
                                   rng.uniform(0.2, 0.9), seed)
            if g.m == 0:
                continue
            m = run_one_two_min_greedy(g, RandomPolicy(seed)).result
            m_star = canonicalize(g, m, maximum_matching(g))
            dec = decompose(g, m, m_star)
            assert sum(c.m_count for c in dec.components) == len(m)
            assert sum(c.opt_count for c in dec.components) == len(m_star)
            assert all(c.kind in ("singleton", "path") for c in dec.components)
            for comp in dec.components:
                if comp.kind == "path":
                    assert comp.opt_count == comp.m_count + 1
                    assert comp.nodes[0] == min(comp.endpoints)
                else:
                    assert comp.local_ratio == 1
            # Edge classes partition the graph's edges.
            assert dec.f_edges.isdisjoint(m.pairs)
            assert dec.f_edges.isdisjoint(m_star.pairs)
            assert dec.f_edges | m.pairs | m_star.pairs == g.edge_set
            assert m.pairs & m_star.pairs == {
                c.m_edges[0] for c in dec.components if c.kind == "singleton"
            }

    def test_global_ratio_matches_component_sums(self):
        g = C6()
        m = run_one_two_min_greedy(g, FirstPolicy()).result
        m_star = canonicalize(g, m, maximum_matching(g))
        dec = decompose(g, m, m_star)
        assert dec.global_ratio == Fraction(len(m), len(m_star))


class TestEndpointDegrees:
    def test_p4_handmade_matching_flagged_low(self):
        # This 1/2-path comes from a hand-made matching, not a run of the
        # heuristic, so endpoint degrees of one are possible here.
        m = Matching.from_pairs([(1, 2)])
        m_star = Matching.from_pairs([(0, 1), (2, 3)])
        dec = decompose(P4(), m, m_star)
        assert endpoint_degrees(dec) == {0: 1, 3: 1}

    def test_c6_run_has_no_endpoints(self):
        g = C6()
        m = run_one_two_min_greedy(g, FirstPolicy()).result
        m_star = canonicalize(g, m, maximum_matching(g))
        dec = decompose(g, m, m_star)
        assert endpoint_degrees(dec) == {}

    def test_traced_runs_have_endpoint_degree_at_least_two(self):
        for seed in range(200):
            rng = random.Random(seed)
            g = gen_random_bounded(rng.randint(3, 14), rng.randint(2, 5),
                                   rng.uniform(0.3, 0.9), seed)
            if g.m == 0:
                continue
            m = run_one_two_min_greedy(g, RandomPolicy(seed)).result
            m_star = canonicalize(g, m, maximum_matching(g))
            dec = decompose(g, m, m_star)
            assert all(d >= 2 for d in endpoint_degrees(dec).values())


def test_format_components():
    m = Matching.from_pairs([(1, 2)])
    m_star = Matching.from_pairs([(0, 1), (2, 3)])
    dec = decompose(P4(), m, m_star)
    assert format_components(dec) == "c path 1 2 0 1 2 3\n"
