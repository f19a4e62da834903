import itertools

import pytest

from helpers import brute_hall_sets, brute_perfect_matching, corpus
from metricvote.comparison import (
    BipartiteVoterGraph,
    ComparisonGraph,
    abm_winner,
    build_bipartite,
    build_compg,
    check_majority_subgraph,
    compg_monotone_under_restriction,
    has_perfect_matching,
    hall_witness,
    inequality3_holds,
    parse_edge_list,
    witness_certifies_no_matching,
)
from metricvote.distortion import w_opt_dist
from metricvote.profile import VoteProfile


def test_diagonal_graph_is_complete(cyclic3):
    g = build_bipartite(cyclic3, 1, 1)
    assert g.edges == frozenset(itertools.product(range(3), repeat=2))
    for v in range(3):
        for u in range(3):
            z = g.witness[v][u]
            assert cyclic3.weakly_prefers(v, 1, z) and cyclic3.weakly_prefers(u, z, 1)


def test_unanimous_bottom_vs_top_has_no_edges(unanimous3):
    assert build_bipartite(unanimous3, 2, 0).edges == frozenset()
    res = has_perfect_matching(build_bipartite(unanimous3, 2, 0))
    assert not res.perfect and res.contracting == frozenset({0, 1, 2})


def test_split_bipartite(split):
    g = build_bipartite(split, 0, 1)
    assert g.edges == frozenset({(0, 0), (0, 1), (1, 0)})
    res = has_perfect_matching(g)
    assert res.perfect and res.matching == {0: 1, 1: 0}


def test_complete_graph_matching():
    g = BipartiteVoterGraph(3, 0, 0, tuple(tuple(0 for _ in range(3)) for _ in range(3)))
    res = has_perfect_matching(g)
    assert res.perfect and sorted(res.matching.values()) == [0, 1, 2]


def test_witnesses_satisfy_both_conditions():
    for p in corpus(100, base=1100):
        for x in range(p.n):
            for y in range(p.n):
                g = build_bipartite(p, x, y)
                for v in range(p.m):
                    for u in range(p.m):
                        z = g.witness[v][u]
                        brute = any(p.weakly_prefers(v, x, t) and p.weakly_prefers(u, t, y) for t in range(p.n))
                        assert (z is not None) == brute
                        if z is not None:
                            assert p.weakly_prefers(v, x, z) and p.weakly_prefers(u, z, y)


def test_matching_against_permutation_oracle():
    for p in corpus(200, max_n=5, max_m=5, base=1200):
        for x in range(p.n):
            for y in range(p.n):
                g = build_bipartite(p, x, y)
                res = has_perfect_matching(g)
                assert res.perfect == brute_perfect_matching(g.edges, p.m)
                if res.perfect:
                    assert sorted(res.matching.values()) == list(range(p.m))
                    assert all((v, u) in g.edges for v, u in res.matching.items())
                else:
                    assert len(g.neighborhood(res.contracting)) < len(res.contracting)


def test_compg_small_cases(unanimous3, split):
    g = build_compg(unanimous3)
    assert g.edges == frozenset({(0, 1), (0, 2), (1, 2)})
    assert g.sources() == [0]
    assert build_compg(split).edges == frozenset()
    single = VoteProfile.from_rankings([[0], [0]])
    assert build_compg(single).edges == frozenset()
    assert abm_winner(single).winner == 0
    assert abm_winner(unanimous3).winner == 0


def test_hall_witness_examples(unanimous3):
    wit = hall_witness(unanimous3, 2, 0)
    assert wit.E == frozenset({2})
    assert wit.first_count == 3 and wit.last_count == 3
    assert hall_witness(unanimous3, 0, 2) is None


def test_hall_witness_both_directions_against_exhaustive_sets():
    for p in corpus(200, max_n=5, max_m=5, base=1300):
        g = build_compg(p)
        for x in range(p.n):
            for y in range(p.n):
                if x == y:
                    continue
                sets = brute_hall_sets(p, x, y)
                assert ((y, x) in g.edges) == bool(sets)
                for E in sets:
                    assert witness_certifies_no_matching(p, x, y, E)
                if (y, x) in g.edges:
                    wit = g.witnesses[(y, x)]
                    assert inequality3_holds(p, x, y, wit.E)
                    assert wit.E in sets


def test_majority_subgraph_and_monotonicity():
    for p in corpus(300, max_n=6, max_m=6, base=1400):
        assert check_majority_subgraph(p) is None
        for keep in itertools.combinations(range(p.n), 2):
            assert compg_monotone_under_restriction(p, keep) is None
    assert check_majority_subgraph(VoteProfile.from_rankings([[0, 1], [1, 0]])) is None


def test_restriction_examples(unanimous3):
    assert compg_monotone_under_restriction(unanimous3, range(3)) is None
    assert compg_monotone_under_restriction(unanimous3, [1, 2]) is None
    with pytest.raises(ValueError):
        compg_monotone_under_restriction(unanimous3, [])


def test_edge_list_roundtrip(unanimous3):
    g = build_compg(unanimous3)
    again = parse_edge_list(g.to_edge_list())
    assert again.edges == g.edges and again.n == g.n
    assert "0 -> 1" in g.to_dot()


def test_cycle_finder():
    g = ComparisonGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))
    cyc = g.find_cycle()
    assert cyc[0] == cyc[-1] and len(cyc) == 4
    assert ComparisonGraph(3, frozenset({(0, 1), (1, 2)})).find_cycle() is None


def test_abm_winner_is_at_most_three():
    for p in corpus(60, max_n=4, max_m=4, base=1500):
        out = abm_winner(p)
        assert out.ok
        assert w_opt_dist(p, out.winner) <= 3
