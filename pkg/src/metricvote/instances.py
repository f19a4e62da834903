"""Instance generators: the block lower-bound family, random and Euclidean profiles."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .profile import PseudoMetric, VoteProfile


@dataclass(frozen=True)
class LowerBoundInstance:
    m: int
    B: int
    profile: VoteProfile
    metric: PseudoMetric
    predicted: Tuple[Fraction, Fraction]  # (cost of x_1, cost of x_n)

    @property
    def n(self) -> int:
        return self.profile.n


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 2 or m % 2:
        raise ValueError(f"m must be an even integer >= 2, got {m!r}")


def blocks(m: int, B: int, v: int) -> List[List[int]]:
    """Blocks ``0..B`` of voter ``v`` (1-based) as lists of 1-based candidate numbers.

    Block 0 is ``x_1..x_{v-1}``; block ``b`` (``1 <= b < B``) is the ``m``
    candidates starting at ``x_{(b-1)m+v}``; block ``B`` runs from
    ``x_{(B-1)m+v}`` to ``x_n``.
    """
    n = m * B
    out = [list(range(1, v))]
    for b in range(1, B):
        out.append(list(range((b - 1) * m + v, b * m + v)))
    out.append(list(range((B - 1) * m + v, n + 1)))
    return out


def predicted_costs(m: int, B: Optional[int] = None) -> Tuple[Fraction, Fraction]:
    """Closed-form social costs of ``x_1`` and ``x_n``.

    With ``B = m/2`` these are ``2Bm + 2B + m - 2`` and ``2B + m``.
    """
    _check_m(m)
    B = m // 2 if B is None else B
    # x_1 sits in block 0 (distance 2B+1) for voters 2..m and block 1 (2B-1) for voter 1
    first = (m - 1) * (2 * B + 1) + (2 * B - 1) + 2 * B
    last = m + 2 * B
    return Fraction(first), Fraction(last)


def gen_lower_bound(m: int, B: Optional[int] = None) -> LowerBoundInstance:
    """Block instance on ``n = mB`` candidates where Ranked Pairs and Schulze
    elect ``x_1`` although ``x_n`` is far cheaper.

    Candidate ``x_i`` is index ``i - 1``. Voters ``0..m-1`` rank their blocks
    from ``B`` down to ``0`` (default order inside each block); the last two
    voters use the default order ``x_1 > x_2 > ... > x_n``. Distances: ``B``
    from the two default voters, ``2(B - b) + 1`` from voter ``v`` to its
    block-``b`` candidates (tied distances, consistent with the rankings).
    """
    _check_m(m)
    B = m // 2 if B is None else B
    if B < 1:
        raise ValueError("B must be positive")
    n = m * B
    rankings, rows = [], []
    for v in range(1, m + 1):
        bl = blocks(m, B, v)
        rankings.append([x - 1 for b in reversed(bl) for x in b])
        row = [Fraction(0)] * n
        for b, members in enumerate(bl):
            for x in members:
                row[x - 1] = Fraction(2 * (B - b) + 1)
        rows.append(row)
    for _ in range(2):
        rankings.append(list(range(n)))
        rows.append([Fraction(B)] * n)
    profile = VoteProfile.from_rankings(rankings)
    metric = PseudoMetric.from_rows(rows)
    return LowerBoundInstance(m, B, profile, metric, predicted_costs(m, B))


def gen_random_profile(n: int, m: int, seed) -> VoteProfile:
    """``m`` independent uniform rankings from ``random.Random(seed)``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    rng = random.Random(seed)
    rankings = []
    for _ in range(m):
        r = list(range(n))
        rng.shuffle(r)
        rankings.append(r)
    return VoteProfile.from_rankings(rankings)


def gen_euclidean_profile(n: int, m: int, dim: int, seed, grid: int = 100) -> Tuple[VoteProfile, PseudoMetric]:
    """Voters and candidates at seeded rational points; L1 distances; rankings by
    distance with ties broken toward the lower candidate index."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    rng = random.Random(seed)
    point = lambda: [Fraction(rng.randrange(grid + 1), grid) for _ in range(dim)]  # noqa: E731
    cands = [point() for _ in range(n)]
    voters = [point() for _ in range(m)]
    return euclidean_profile(cands, voters)


def euclidean_profile(cands, voters) -> Tuple[VoteProfile, PseudoMetric]:
    """Profile and L1 metric for explicit candidate and voter coordinates."""
    rows = [[sum((abs(Fraction(a) - Fraction(b)) for a, b in zip(p, q)), Fraction(0)) for q in cands] for p in voters]
    rankings = [sorted(range(len(cands)), key=lambda x, row=row: (row[x], x)) for row in rows]
    return VoteProfile.from_rankings(rankings), PseudoMetric.from_rows(rows)
