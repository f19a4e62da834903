"""Majority-graph rules: Copeland, the uncovered set, Ranked Pairs, Schulze.

Every rule breaks ties toward the lowest candidate index so results are
reproducible. Pairwise weights are exact fractions ``p[x][y]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Tuple

from .profile import VoteProfile, pairwise_matrix

HALF = Fraction(1, 2)


class ChainPropertyError(AssertionError):
    """A rule's winner lacks the widest-path chain it is guaranteed to have."""


@dataclass(frozen=True)
class MajorityGraph:
    n: int
    edges: FrozenSet[Tuple[int, int]]
    mode: str  # "strict" or "weak"

    def successors(self, x: int) -> List[int]:
        return [y for y in range(self.n) if (x, y) in self.edges]


def majority_graph(profile: VoteProfile, mode: str = "weak") -> MajorityGraph:
    """Edge ``(x, y)`` iff ``p[x][y] > 1/2`` (strict) or ``>= 1/2`` (weak)."""
    if mode not in ("strict", "weak"):
        raise ValueError(f"unknown majority mode {mode!r}")
    p = pairwise_matrix(profile)
    n = profile.n
    if mode == "strict":
        edges = {(x, y) for x in range(n) for y in range(n) if x != y and p[x][y] > HALF}
    else:
        edges = {(x, y) for x in range(n) for y in range(n) if x != y and p[x][y] >= HALF}
    return MajorityGraph(n, frozenset(edges), mode)


def copeland_scores(profile: VoteProfile) -> List[Fraction]:
    p = pairwise_matrix(profile)
    n = profile.n
    scores = []
    for x in range(n):
        s = Fraction(0)
        for y in range(n):
            if x == y:
                continue
            if p[x][y] > HALF:
                s += 1
            elif p[x][y] == HALF:
                s += HALF
        scores.append(s)
    return scores


def copeland_winner(profile: VoteProfile) -> int:
    scores = copeland_scores(profile)
    best = max(scores)
    return scores.index(best)


def uncovered_set(profile: VoteProfile) -> FrozenSet[int]:
    """Candidates reaching every other one in at most two weak-majority hops."""
    g = majority_graph(profile, "weak")
    n = profile.n
    out = [set(g.successors(x)) for x in range(n)]
    result = set()
    for x in range(n):
        reach = set(out[x])
        for z in out[x]:
            reach |= out[z]
        if all(y in reach for y in range(n) if y != x):
            result.add(x)
    return frozenset(result)


def _reaches(adj: List[set], src: int, dst: int) -> bool:
    if src == dst:
        return True
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w == dst:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def ranked_pairs_dag(profile: VoteProfile) -> List[set]:
    """Lock in ordered pairs by non-increasing weight, skipping cycle-closing ones.

    Equal weights are taken in lexicographic ``(x, y)`` order.
    """
    p = pairwise_matrix(profile)
    n = profile.n
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    pairs.sort(key=lambda e: (-p[e[0]][e[1]], e[0], e[1]))
    adj: List[set] = [set() for _ in range(n)]
    for x, y in pairs:
        # inserting x -> y closes a cycle iff y already reaches x
        if not _reaches(adj, y, x):
            adj[x].add(y)
    return adj


def ranked_pairs_winner(profile: VoteProfile) -> int:
    adj = ranked_pairs_dag(profile)
    n = profile.n
    indeg = [0] * n
    for x in range(n):
        for y in adj[x]:
            indeg[y] += 1
    sources = [x for x in range(n) if indeg[x] == 0]
    if len(sources) != 1:
        raise AssertionError(f"ranked pairs produced {len(sources)} sources; expected exactly one")
    return sources[0]


def widest_path_widths(profile: VoteProfile) -> List[List[Fraction]]:
    """Max-min path widths over the complete digraph weighted by ``p``.

    Diagonal entries are 0 by convention (no self paths are considered).
    """
    p = pairwise_matrix(profile)
    n = profile.n
    s = [[p[x][y] if x != y else Fraction(0) for y in range(n)] for x in range(n)]
    for z in range(n):
        sz = s[z]
        for x in range(n):
            if x == z:
                continue
            sxz = s[x][z]
            sx = s[x]
            for y in range(n):
                if y == x or y == z:
                    continue
                via = sxz if sxz < sz[y] else sz[y]
                if via > sx[y]:
                    sx[y] = via
    return s


def schulze_winner(profile: VoteProfile) -> int:
    s = widest_path_widths(profile)
    n = profile.n
    for x in range(n):
        if all(s[x][y] >= s[y][x] for y in range(n) if y != x):
            return x
    raise AssertionError("no Schulze winner; widest-path matrix is inconsistent")


def verify_chain_property(profile: VoteProfile, w: int, y: int) -> Tuple[Fraction, List[int]]:
    """Widest path from ``w`` to ``y`` with its width ``p``.

    Checks that every hop has ``p[x_i][x_{i+1}] >= p`` and that at most a ``p``
    fraction of voters prefer ``y`` to ``w``. Raises :class:`ChainPropertyError`
    if either fails. The path is a fewest-hop path among width-``p`` edges.
    """
    if w == y:
        raise ValueError("chain property needs two distinct candidates")
    pm = pairwise_matrix(profile)
    s = widest_path_widths(profile)
    width = s[w][y]
    n = profile.n
    prev = {w: None}
    queue = deque([w])
    while queue and y not in prev:
        u = queue.popleft()
        for t in range(n):
            if t != u and t not in prev and pm[u][t] >= width:
                prev[t] = u
                queue.append(t)
    if y not in prev:
        raise ChainPropertyError(f"no path of width {width} from {w} to {y}")
    path = [y]
    while path[-1] != w:
        path.append(prev[path[-1]])
    path.reverse()
    if width <= 0:
        raise ChainPropertyError(f"widest path from {w} to {y} has zero width")
    if pm[y][w] > width:
        raise ChainPropertyError(
            f"{pm[y][w]} of voters prefer {y} to {w}, more than the chain width {width}"
        )
    return width, path


def single_hop_bound(q) -> Fraction:
    """Cost ratio bound ``1 + 2(1-q)/q`` when a ``q`` fraction prefers x to x'."""
    q = Fraction(q)
    if q <= 0 or q > 1:
        raise ValueError(f"single-hop bound needs 0 < q <= 1, got {q}")
    return 1 + 2 * (1 - q) / q
