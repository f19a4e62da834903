"""Vote profiles, voter-candidate pseudo-metrics, and the set/cost queries on them.

Candidates and voters are dense 0-based indices. All numbers are exact
(:class:`fractions.Fraction` or ``int``); nothing in here touches floats.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple


class ProfileFormatError(ValueError):
    """Malformed profile or metric text; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class VoteProfile:
    """``m`` strict rankings of ``n`` candidates, most preferred first."""

    n: int
    rankings: Tuple[Tuple[int, ...], ...]
    # positions[v][x] = rank of x in voter v's ballot (0 = top)
    positions: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rankings = tuple(tuple(int(c) for c in r) for r in self.rankings)
        if self.n < 1:
            raise ValueError("a profile needs at least one candidate")
        if not rankings:
            raise ValueError("a profile needs at least one voter")
        full = set(range(self.n))
        positions = []
        for v, r in enumerate(rankings):
            if len(r) != self.n or set(r) != full:
                raise ValueError(f"voter {v}: ranking {list(r)} is not a permutation of 0..{self.n - 1}")
            pos = [0] * self.n
            for i, c in enumerate(r):
                pos[c] = i
            positions.append(tuple(pos))
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "positions", tuple(positions))

    @classmethod
    def from_rankings(cls, rankings: Sequence[Sequence[int]]) -> "VoteProfile":
        rankings = [list(r) for r in rankings]
        if not rankings:
            raise ValueError("a profile needs at least one voter")
        return cls(len(rankings[0]), tuple(tuple(r) for r in rankings))

    @property
    def m(self) -> int:
        return len(self.rankings)

    def prefers(self, v: int, x: int, y: int) -> bool:
        """Strict preference ``x >_v y``."""
        return self.positions[v][x] < self.positions[v][y]

    def weakly_prefers(self, v: int, x: int, y: int) -> bool:
        return self.positions[v][x] <= self.positions[v][y]

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(" ".join(map(str, r)) for r in self.rankings)
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """Short content hash used to bind certificates to a profile."""
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PseudoMetric:
    """``dist[v][x]``: distance from voter ``v`` to candidate ``x``."""

    dist: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(d) for d in row) for row in self.dist)
        if not rows or not rows[0]:
            raise ValueError("empty metric")
        width = len(rows[0])
        for v, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"metric row {v} has {len(row)} entries, expected {width}")
            for x, d in enumerate(row):
                if d < 0:
                    raise ValueError(f"negative distance d({v},{x}) = {d}")
        object.__setattr__(self, "dist", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "PseudoMetric":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def m(self) -> int:
        return len(self.dist)

    @property
    def n(self) -> int:
        return len(self.dist[0])

    def __getitem__(self, v: int) -> Tuple[Fraction, ...]:
        return self.dist[v]

    def to_text(self) -> str:
        return "".join(" ".join(str(d) for d in row) + "\n" for row in self.dist)


# ---------------------------------------------------------------------------
# file formats


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_profile(text) -> VoteProfile:
    """Parse the ``n m`` header plus ``m`` ranking lines format.

    Accepts ``str`` or ``bytes``. Errors carry the offending line number.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    lines = list(_content_lines(text))
    if not lines:
        raise ProfileFormatError(1, "missing 'n m' header")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ProfileFormatError(lineno, f"malformed header {header!r}, expected 'n m'")
    n, m = int(parts[0]), int(parts[1])
    if n < 1 or m < 1:
        raise ProfileFormatError(lineno, "n and m must be positive")
    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise ProfileFormatError(where, f"expected {m} ranking lines, found {len(body)}")
    rankings = []
    for lineno, line in body:
        try:
            ranking = [int(tok) for tok in line.split()]
        except ValueError:
            raise ProfileFormatError(lineno, f"non-integer token in {line!r}") from None
        if len(ranking) != n:
            raise ProfileFormatError(lineno, f"expected {n} candidates, found {len(ranking)}")
        for c in ranking:
            if not 0 <= c < n:
                raise ProfileFormatError(lineno, f"candidate index {c} out of range 0..{n - 1}")
        if len(set(ranking)) != n:
            raise ProfileFormatError(lineno, "not a permutation")
        rankings.append(tuple(ranking))
    return VoteProfile(n, tuple(rankings))


def parse_metric(text) -> PseudoMetric:
    """Parse ``m`` lines of ``n`` rationals (``p/q`` or integers)."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    rows = []
    width = None
    for lineno, line in _content_lines(text):
        try:
            row = [Fraction(tok) for tok in line.split()]
        except (ValueError, ZeroDivisionError):
            raise ProfileFormatError(lineno, f"bad rational in {line!r}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ProfileFormatError(lineno, f"expected {width} entries, found {len(row)}")
        if any(d < 0 for d in row):
            raise ProfileFormatError(lineno, "negative distance")
        rows.append(row)
    if not rows:
        raise ProfileFormatError(1, "empty metric")
    return PseudoMetric.from_rows(rows)


# ---------------------------------------------------------------------------
# queries


def pairwise_fraction(profile: VoteProfile, x: int, y: int) -> Fraction:
    """Fraction of voters strictly preferring ``x`` to ``y``."""
    if x == y:
        raise ValueError("pairwise_fraction needs two distinct candidates")
    count = sum(1 for pos in profile.positions if pos[x] < pos[y])
    return Fraction(count, profile.m)


def pairwise_matrix(profile: VoteProfile):
    """``p[x][y]`` for all ordered pairs (diagonal left at 0)."""
    n, m = profile.n, profile.m
    counts = [[0] * n for _ in range(n)]
    for r in profile.rankings:
        for i, x in enumerate(r):
            row = counts[x]
            for y in r[i + 1:]:
                row[y] += 1
    return [[Fraction(c, m) for c in row] for row in counts]


def voters_ranking_first(profile: VoteProfile, x: int, Y: Iterable[int]) -> frozenset:
    """Voters ranking ``x`` strictly ahead of every candidate in ``Y``."""
    Y = tuple(Y)
    return frozenset(
        v for v, pos in enumerate(profile.positions) if all(pos[x] < pos[z] for z in Y)
    )


def voters_ranking_last(profile: VoteProfile, x: int, Y: Iterable[int]) -> frozenset:
    """Voters ranking ``x`` strictly behind every candidate in ``Y``."""
    Y = tuple(Y)
    return frozenset(
        v for v, pos in enumerate(profile.positions) if all(pos[z] < pos[x] for z in Y)
    )


def social_cost(metric: PseudoMetric, x: int) -> Fraction:
    return sum((row[x] for row in metric.dist), Fraction(0))


def _check_dims(metric: PseudoMetric, profile: VoteProfile):
    if metric.m != profile.m or metric.n != profile.n:
        raise ValueError(
            f"metric is {metric.m}x{metric.n} but profile has m={profile.m}, n={profile.n}"
        )


def check_consistency(metric: PseudoMetric, profile: VoteProfile) -> Optional[Tuple[int, int, int]]:
    """Return ``None`` if consistent, else the first ``(v, x, y)`` with ``x >_v y``
    but ``d(v,x) > d(v,y)``.

    Ties are allowed: a ballot only forbids ranking a strictly farther candidate
    ahead of a closer one. Checking adjacent ballot positions suffices.
    """
    _check_dims(metric, profile)
    for v, r in enumerate(profile.rankings):
        row = metric.dist[v]
        for i in range(len(r) - 1):
            if row[r[i]] > row[r[i + 1]]:
                return (v, r[i], r[i + 1])
    return None


def check_triangle(metric: PseudoMetric) -> Optional[Tuple[int, int, int, int]]:
    """Four-point check ``d(v,x) <= d(v,y) + d(v',y) + d(v',x)``.

    Returns ``None`` when it holds everywhere, else the first violating
    ``(v, v', x, y)`` in lexicographic scan order.
    """
    d = metric.dist
    m, n = metric.m, metric.n
    for v in range(m):
        dv = d[v]
        for w in range(m):
            dw = d[w]
            for x in range(n):
                lhs = dv[x] - dw[x]
                for y in range(n):
                    if lhs > dv[y] + dw[y]:
                        return (v, w, x, y)
    return None


def restrict_profile(profile: VoteProfile, keep: Iterable[int]):
    """Filter every ballot to ``keep`` and reindex densely.

    Returns ``(restricted_profile, index_map)`` where ``index_map`` sends old
    candidate ids to new ones (new ids follow increasing old id).
    """
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("cannot restrict a profile to no candidates")
    for c in keep:
        if not 0 <= c < profile.n:
            raise ValueError(f"candidate {c} out of range")
    index_map = {old: new for new, old in enumerate(keep)}
    rankings = tuple(tuple(index_map[c] for c in r if c in index_map) for r in profile.rankings)
    return VoteProfile(len(keep), rankings), index_map
