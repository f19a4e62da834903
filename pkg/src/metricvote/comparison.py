"""Bipartite voter graphs ``B(x, y)``, the comparison graph, and the matching mechanism.

``B(x, y)`` joins left voter ``v`` to right voter ``v'`` when some candidate
``z`` (possibly ``x`` or ``y``) has ``x >=_v z`` and ``z >=_{v'} y``. A perfect
matching in ``B(w, y)`` routes a flow certificate of cost at most 3, so a
candidate ``w`` whose graphs against every rival have perfect matchings is a
safe winner. The comparison graph records the failures: edge ``(y, x)`` means
``B(x, y)`` has no perfect matching.

A missing matching is witnessed by a candidate set ``E`` containing ``x`` but
not ``y`` with ``|first_y(E)| + |last_x(not E)| > m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .profile import VoteProfile, pairwise_fraction, restrict_profile, voters_ranking_first, voters_ranking_last
from .rules import HALF


@dataclass(frozen=True)
class BipartiteVoterGraph:
    m: int
    x: int
    y: int
    # witness[v][u] = lowest-index z joining left v to right u, or None if no edge
    witness: Tuple[Tuple[Optional[int], ...], ...]

    def neighbors(self, v: int) -> List[int]:
        return [u for u, z in enumerate(self.witness[v]) if z is not None]

    @property
    def edges(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(
            (v, u) for v in range(self.m) for u in range(self.m) if self.witness[v][u] is not None
        )

    def neighborhood(self, left: Sequence[int]) -> FrozenSet[int]:
        out = set()
        for v in left:
            out.update(self.neighbors(v))
        return frozenset(out)


def build_bipartite(profile: VoteProfile, x: int, y: int) -> BipartiteVoterGraph:
    n, m = profile.n, profile.m
    # below[v]: z with x >=_v z; above[u]: z with z >=_u y (as bitmasks)
    below, above = [], []
    for pos in profile.positions:
        below.append(sum(1 << z for z in range(n) if pos[x] <= pos[z]))
        above.append(sum(1 << z for z in range(n) if pos[z] <= pos[y]))
    witness = []
    for v in range(m):
        row = []
        for u in range(m):
            common = below[v] & above[u]
            row.append((common & -common).bit_length() - 1 if common else None)
        witness.append(tuple(row))
    return BipartiteVoterGraph(m, x, y, tuple(witness))


@dataclass(frozen=True)
class MatchingResult:
    perfect: bool
    matching: Dict[int, int]  # left -> right (maximum matching; perfect when ``perfect``)
    contracting: FrozenSet[int] = frozenset()  # left set with |N(S)| < |S| when not perfect


def has_perfect_matching(g: BipartiteVoterGraph) -> MatchingResult:
    """Augmenting-path maximum matching; on failure also a Hall-violating left set.

    The violating set is everything reachable from unmatched left voters by
    alternating paths; its neighbourhood is matched into it, one short.
    """
    m = g.m
    adj = [g.neighbors(v) for v in range(m)]
    match_right: List[Optional[int]] = [None] * m

    def augment(v: int, seen: List[bool]) -> bool:
        for u in adj[v]:
            if seen[u]:
                continue
            seen[u] = True
            if match_right[u] is None or augment(match_right[u], seen):
                match_right[u] = v
                return True
        return False

    for v in range(m):
        augment(v, [False] * m)
    matching = {v: u for u, v in enumerate(match_right) if v is not None}
    if len(matching) == m:
        return MatchingResult(True, matching)
    reached = {v for v in range(m) if v not in matching}
    stack = list(reached)
    while stack:
        v = stack.pop()
        for u in adj[v]:
            t = match_right[u]
            if t is not None and t not in reached:
                reached.add(t)
                stack.append(t)
    contracting = frozenset(reached)
    if len(g.neighborhood(contracting)) >= len(contracting):
        raise AssertionError("alternating-reachability set is not contracting")
    return MatchingResult(False, matching, contracting)


# ---------------------------------------------------------------------------
# Hall witnesses


@dataclass(frozen=True)
class HallWitness:
    x: int
    y: int
    E: FrozenSet[int]  # candidate set with x in E, y not in E
    V: FrozenSet[int]  # maximal contracting voter set, equal to last_x(complement of E)
    first_count: int  # |first_y(E)|
    last_count: int  # |last_x(complement of E)|


def inequality3_holds(profile: VoteProfile, x: int, y: int, E) -> bool:
    """``x in E``, ``y not in E`` and ``|first_y(E)| + |last_x(not E)| > m``."""
    E = frozenset(E)
    if x not in E or y in E:
        return False
    rest = [z for z in range(profile.n) if z not in E]
    return len(voters_ranking_first(profile, y, E)) + len(voters_ranking_last(profile, x, rest)) > profile.m


def candidates_below(profile: VoteProfile, x: int, voters) -> FrozenSet[int]:
    """``{z : x >=_v z for some v in voters}``."""
    out = set()
    for v in voters:
        r = profile.rankings[v]
        out.update(r[profile.positions[v][x]:])
    return frozenset(out)


def _maximize_contracting(profile: VoteProfile, g: BipartiteVoterGraph, V: FrozenSet[int]) -> FrozenSet[int]:
    """Grow a contracting set until no single voter can join and it is closed
    under ``V -> last_x(not E(V))``."""
    m, x = profile.m, g.x
    while True:
        changed = False
        for v in range(m):
            if v in V:
                continue
            bigger = V | {v}
            if len(g.neighborhood(bigger)) < len(bigger):
                V = frozenset(bigger)
                changed = True
        E = candidates_below(profile, x, V)
        closed = voters_ranking_last(profile, x, [z for z in range(profile.n) if z not in E])
        # the closure keeps the neighbourhood, so it stays contracting
        if not closed <= V:
            V = frozenset(V | closed)
            changed = True
        if not changed:
            return V


def hall_witness(profile: VoteProfile, x: int, y: int) -> Optional[HallWitness]:
    """Witness that ``B(x, y)`` has no perfect matching, or ``None`` if it has one."""
    g = build_bipartite(profile, x, y)
    res = has_perfect_matching(g)
    if res.perfect:
        return None
    V = _maximize_contracting(profile, g, res.contracting)
    E = candidates_below(profile, x, V)
    rest = [z for z in range(profile.n) if z not in E]
    first = voters_ranking_first(profile, y, E)
    last = voters_ranking_last(profile, x, rest)
    if last != V:
        raise AssertionError(f"maximal contracting set {sorted(V)} differs from last_x(not E) {sorted(last)}")
    if x not in E or y in E:
        raise AssertionError(f"witness set {sorted(E)} must contain {x} and not {y}")
    if len(first) + len(last) <= profile.m:
        raise AssertionError("witness fails the Hall inequality")
    return HallWitness(x, y, E, V, len(first), len(last))


def witness_certifies_no_matching(profile: VoteProfile, x: int, y: int, E) -> bool:
    """Converse direction: a set ``E`` satisfying the inequality yields a contracting
    voter set ``last_x(not E)`` in ``B(x, y)``."""
    if not inequality3_holds(profile, x, y, E):
        return False
    E = frozenset(E)
    V = voters_ranking_last(profile, x, [z for z in range(profile.n) if z not in E])
    g = build_bipartite(profile, x, y)
    return len(g.neighborhood(V)) < len(V)


# ---------------------------------------------------------------------------
# comparison graph and the matching mechanism


@dataclass(frozen=True)
class ComparisonGraph:
    n: int
    edges: FrozenSet[Tuple[int, int]]  # (y, x): B(x, y) has no perfect matching
    witnesses: Dict[Tuple[int, int], HallWitness] = field(default_factory=dict, compare=False)

    def sources(self) -> List[int]:
        has_in = {x for _, x in self.edges}
        return [x for x in range(self.n) if x not in has_in]

    def find_cycle(self) -> Optional[List[int]]:
        """A directed cycle ``[u0, u1, ..., u0]`` or ``None`` if acyclic."""
        succ = {u: sorted(b for a, b in self.edges if a == u) for u in range(self.n)}
        color = [0] * self.n  # 0 new, 1 on stack, 2 done
        parent: Dict[int, int] = {}
        for root in range(self.n):
            if color[root]:
                continue
            stack = [(root, iter(succ[root]))]
            color[root] = 1
            while stack:
                u, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[u] = 2
                    stack.pop()
                elif color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = u
                    stack.append((nxt, iter(succ[nxt])))
                elif color[nxt] == 1:
                    cyc = [nxt, u]
                    while cyc[-1] != nxt:
                        cyc.append(parent[cyc[-1]])
                    cyc.reverse()
                    return cyc
        return None

    def to_dot(self) -> str:
        lines = ["digraph compg {"]
        lines.extend(f"  {u};" for u in range(self.n))
        for y, x in sorted(self.edges):
            wit = self.witnesses.get((y, x))
            label = f' [label="E={{{",".join(map(str, sorted(wit.E)))}}}"]' if wit else ""
            lines.append(f"  {y} -> {x}{label};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_edge_list(self) -> str:
        """``y x | E=... | V=...`` per edge; the header carries ``n``."""
        lines = [f"# compg n={self.n} edges={len(self.edges)}"]
        for y, x in sorted(self.edges):
            wit = self.witnesses.get((y, x))
            if wit is None:
                lines.append(f"{y} {x}")
            else:
                lines.append(
                    f"{y} {x} | E={','.join(map(str, sorted(wit.E)))} | V={','.join(map(str, sorted(wit.V)))}"
                )
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> ComparisonGraph:
    n = None
    edges = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line.split():
                if tok.startswith("n="):
                    n = int(tok[2:])
            continue
        y, x = (int(t) for t in line.split("|")[0].split())
        edges.add((y, x))
    if n is None:
        raise ValueError("edge list lacks the '# compg n=...' header")
    return ComparisonGraph(n, frozenset(edges))


def build_compg(profile: VoteProfile, with_witnesses: bool = True) -> ComparisonGraph:
    n = profile.n
    edges = set()
    witnesses = {}
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            if with_witnesses:
                wit = hall_witness(profile, x, y)
                if wit is not None:
                    edges.add((y, x))
                    witnesses[(y, x)] = wit
            elif not has_perfect_matching(build_bipartite(profile, x, y)).perfect:
                edges.add((y, x))
    return ComparisonGraph(n, frozenset(edges), witnesses)


@dataclass(frozen=True)
class AbmOutcome:
    winner: Optional[int]
    compg: ComparisonGraph
    report: str = ""  # non-empty only when no source exists

    @property
    def ok(self) -> bool:
        return self.winner is not None


def abm_winner(profile: VoteProfile) -> AbmOutcome:
    """Lowest-index candidate with no incoming comparison-graph edge.

    If none exists the outcome carries a report with the profile and the full
    graph; that would be a counterexample to the acyclicity conjecture.
    """
    g = build_compg(profile)
    sources = g.sources()
    if sources:
        return AbmOutcome(sources[0], g)
    report = (
        "RESEARCH EVENT: comparison graph has no source\n"
        "## profile\n" + profile.to_text() + "## compg\n" + g.to_edge_list()
    )
    return AbmOutcome(None, g, report)


def abm_matching(profile: VoteProfile, w: int, c: int):
    """A perfect matching of ``B(w, c)`` and its per-voter witnesses, or ``None``."""
    g = build_bipartite(profile, w, c)
    res = has_perfect_matching(g)
    if not res.perfect:
        return None
    return res.matching, {v: g.witness[v][u] for v, u in res.matching.items()}


def check_majority_subgraph(profile: VoteProfile, g: Optional[ComparisonGraph] = None):
    """First comparison-graph edge ``(y, x)`` with ``p[y][x] <= 1/2``, or ``None``."""
    g = g if g is not None else build_compg(profile, with_witnesses=False)
    for y, x in sorted(g.edges):
        p = pairwise_fraction(profile, y, x)
        if p <= HALF:
            return (y, x, p)
    return None


def compg_monotone_under_restriction(profile: VoteProfile, keep):
    """First edge of the induced subgraph missing from the restricted profile's
    graph (in original labels), or ``None``."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be nonempty")
    full = build_compg(profile, with_witnesses=False)
    sub, index_map = restrict_profile(profile, keep)
    restricted = build_compg(sub, with_witnesses=False)
    for y, x in sorted(full.edges):
        if y in index_map and x in index_map and (index_map[y], index_map[x]) not in restricted.edges:
            return (y, x)
    return None
