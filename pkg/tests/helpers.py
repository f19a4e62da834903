"""Shared corpus and oracles for the test suite."""

import itertools
import random
from fractions import Fraction
from functools import lru_cache

from metricvote.distortion import opt_dist
from metricvote.instances import gen_random_profile


def corpus(count=1000, max_n=5, max_m=5, base=0):
    """Seeded random profiles with ``1 <= n <= max_n`` and ``1 <= m <= max_m``."""
    out = []
    for seed in range(base, base + count):
        rng = random.Random(("corpus", seed).__repr__())
        n = rng.randint(1, max_n)
        m = rng.randint(1, max_m)
        out.append(gen_random_profile(n, m, seed))
    return out


@lru_cache(maxsize=None)
def cached_opt_dist(profile, w, c):
    return opt_dist(profile, w, c)


def cached_w_opt_dist(profile, w):
    return max([Fraction(1)] + [cached_opt_dist(profile, w, c) for c in range(profile.n) if c != w])


def independent_sets(k):
    """All subsets of ``range(k)`` with no two consecutive members."""
    for r in range(k + 1):
        for S in itertools.combinations(range(k), r):
            if all(b - a > 1 for a, b in zip(S, S[1:])):
                yield S


def brute_lambda(taus):
    lam = [Fraction(1)] + [2 / Fraction(t) - (1 if k == 0 else 0) for k, t in enumerate(taus)]
    return max(sum((lam[i] for i in S), Fraction(0)) for S in independent_sets(len(lam)))


def brute_perfect_matching(edges, m):
    return any(all((v, perm[v]) in edges for v in range(m)) for perm in itertools.permutations(range(m)))


def brute_hall_sets(profile, x, y):
    """Every E with x in E, y not in E meeting the Hall inequality (exhaustive)."""
    others = [z for z in range(profile.n) if z not in (x, y)]
    found = []
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            E = {x, *extra}
            first = sum(1 for pos in profile.positions if all(pos[y] < pos[z] for z in E))
            last = sum(
                1 for pos in profile.positions
                if all(pos[z] < pos[x] for z in range(profile.n) if z not in E)
            )
            if first + last > profile.m:
                found.append(frozenset(E))
    return found
