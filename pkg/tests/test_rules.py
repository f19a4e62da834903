import itertools
from fractions import Fraction

import pytest

from helpers import corpus
from metricvote.instances import gen_lower_bound
from metricvote.profile import VoteProfile, pairwise_matrix
from metricvote.rules import (
    ChainPropertyError,
    copeland_scores,
    copeland_winner,
    majority_graph,
    ranked_pairs_dag,
    ranked_pairs_winner,
    schulze_winner,
    single_hop_bound,
    uncovered_set,
    verify_chain_property,
    widest_path_widths,
)


def brute_widths(p):
    """Widest path by enumerating all simple paths."""
    mat = pairwise_matrix(p)
    n = p.n
    best = [[Fraction(0)] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            others = [z for z in range(n) if z not in (x, y)]
            for r in range(len(others) + 1):
                for mid in itertools.permutations(others, r):
                    path = (x, *mid, y)
                    width = min(mat[a][b] for a, b in zip(path, path[1:]))
                    best[x][y] = max(best[x][y], width)
    return best


def brute_ranked_pairs(p):
    mat = pairwise_matrix(p)
    n = p.n
    pairs = sorted(((x, y) for x in range(n) for y in range(n) if x != y), key=lambda e: (-mat[e[0]][e[1]], e))
    reach = [[x == y for y in range(n)] for x in range(n)]
    locked = set()
    for x, y in pairs:
        if reach[y][x]:
            continue
        locked.add((x, y))
        for a in range(n):
            for b in range(n):
                if reach[a][x] and reach[y][b]:
                    reach[a][b] = True
    return [x for x in range(n) if not any((z, x) in locked for z in range(n))]


def test_cycle_profile_all_rules_pick_zero(cyclic3):
    mat = pairwise_matrix(cyclic3)
    assert mat[0][1] == mat[1][2] == mat[2][0] == Fraction(2, 3)
    assert copeland_winner(cyclic3) == 0
    assert ranked_pairs_winner(cyclic3) == 0
    assert schulze_winner(cyclic3) == 0
    assert uncovered_set(cyclic3) == frozenset({0, 1, 2})


def test_unanimous(unanimous3):
    for rule in (copeland_winner, ranked_pairs_winner, schulze_winner):
        assert rule(unanimous3) == 0
    assert uncovered_set(unanimous3) == frozenset({0})
    assert copeland_scores(unanimous3) == [2, 1, 0]


def test_majority_graph_modes(split):
    assert majority_graph(split, "strict").edges == frozenset()
    assert majority_graph(split, "weak").edges == frozenset({(0, 1), (1, 0)})
    with pytest.raises(ValueError):
        majority_graph(split, "bogus")


def test_split_ties_go_to_lowest_index(split):
    assert copeland_winner(split) == 0
    assert ranked_pairs_winner(split) == 0
    assert schulze_winner(split) == 0


def test_rules_against_brute_force_oracles():
    for p in corpus(300, max_n=5, max_m=6, base=5000):
        assert widest_path_widths(p) == [
            [w if x != y else 0 for y, w in enumerate(row)] for x, row in enumerate(brute_widths(p))
        ]
        assert [ranked_pairs_winner(p)] == brute_ranked_pairs(p)
        s = brute_widths(p)
        schulze_set = [x for x in range(p.n) if all(s[x][y] >= s[y][x] for y in range(p.n) if y != x)]
        assert schulze_winner(p) == schulze_set[0]
        g = majority_graph(p, "weak")
        unc = {
            x for x in range(p.n)
            if all((x, y) in g.edges or any((x, z) in g.edges and (z, y) in g.edges for z in range(p.n))
                   for y in range(p.n) if y != x)
        }
        assert uncovered_set(p) == frozenset(unc)
        assert copeland_winner(p) in unc


def test_ranked_pairs_locks_a_transitive_order():
    for p in corpus(100, base=7000):
        adj = ranked_pairs_dag(p)
        # every pair is oriented exactly once after lock-in
        for x in range(p.n):
            for y in range(x + 1, p.n):
                assert (y in adj[x]) != (x in adj[y])


def test_lower_bound_widest_paths():
    inst = gen_lower_bound(4)
    s = widest_path_widths(inst.profile)
    assert s[0][7] == Fraction(5, 6)
    assert all(s[0][y] == Fraction(5, 6) for y in range(1, 8))


def test_chain_property_on_winners():
    for p in corpus(200, base=9000):
        for w in {ranked_pairs_winner(p), schulze_winner(p)}:
            for y in range(p.n):
                if y == w:
                    continue
                width, path = verify_chain_property(p, w, y)
                mat = pairwise_matrix(p)
                assert path[0] == w and path[-1] == y and len(set(path)) == len(path)
                assert all(mat[a][b] >= width for a, b in zip(path, path[1:]))
                assert mat[y][w] <= width


def test_chain_property_fails_for_a_loser(unanimous3):
    # candidate 2 has no positive-width path anywhere
    with pytest.raises(ChainPropertyError):
        verify_chain_property(unanimous3, 2, 0)


def test_single_hop_bound():
    assert single_hop_bound(1) == 1
    assert single_hop_bound(Fraction(1, 2)) == 3
    with pytest.raises(ValueError):
        single_hop_bound(0)
