"""Constraint-choice graphs and the searches for the acyclicity conjectures.

Indices are 0-based and taken mod ``n``. A constraint-choice graph has nodes
``y_i`` (candidates), ``a_i`` (a set ``E_i``) and ``b_i`` (its complement), the
fixed edges ``y_i -> a_{i-1}``, ``y_i -> b_{i-1}``, ``a_i -> y_i``,
``b_i -> y_i``, and for every ``j`` not in ``{i, i-1}`` exactly one of
``a_j -> y_i`` (choice bit 1, "``i`` in ``E_j``") or ``y_i -> b_j`` (bit 0).

Graphs are numbered by packing the ``n(n-2)`` choice bits into one integer,
bit ``k`` belonging to the ``k``-th pair ``(i, j)`` in lexicographic order.

The search question: is there a nonempty ``S`` such that, for every set ``T``
of ``|S|+1`` nodes drawn from ``{a_i, b_i : i in S}``, the subgraph induced by
all ``y`` nodes plus ``T`` has a directed cycle? Larger ``T`` inherit cycles,
so ``|S|+1`` suffices.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .comparison import build_compg, hall_witness
from .profile import VoteProfile


# ---------------------------------------------------------------------------
# set families and their graphs


@dataclass(frozen=True)
class SetFamily:
    """Sets ``E_0..E_{n-1}`` over ``0..n-1`` with ``i in E_i`` and ``i+1 not in E_i``."""

    sets: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        n = len(sets)
        if n < 2:
            raise ValueError("a set family needs n >= 2")
        for i, s in enumerate(sets):
            if any(not 0 <= e < n for e in s):
                raise ValueError(f"E_{i} = {sorted(s)} has elements outside 0..{n - 1}")
            if i not in s:
                raise ValueError(f"E_{i} must contain {i}")
            if (i + 1) % n in s:
                raise ValueError(f"E_{i} must not contain {(i + 1) % n}")
        object.__setattr__(self, "sets", sets)

    @property
    def n(self) -> int:
        return len(self.sets)

    @classmethod
    def from_one_based(cls, sets: Sequence[Sequence[int]]) -> "SetFamily":
        return cls(tuple(frozenset(e - 1 for e in s) for s in sets))


def choice_pairs(n: int) -> List[Tuple[int, int]]:
    """The ``(i, j)`` pairs carrying a choice bit, in bit order."""
    return [(i, j) for i in range(n) for j in range(n) if j != i and j != (i - 1) % n]


@dataclass(frozen=True)
class ConstraintChoiceGraph:
    n: int
    bits: int  # bit k set: edge a_j -> y_i for the k-th choice pair (i, j)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("constraint-choice graphs need n >= 3")
        if not 0 <= self.bits < 1 << (self.n * (self.n - 2)):
            raise ValueError(f"bit pattern {self.bits} out of range for n={self.n}")

    def sets(self) -> List[int]:
        """``E_j`` as bitmasks over ``y`` indices."""
        E = [1 << j for j in range(self.n)]
        for k, (i, j) in enumerate(choice_pairs(self.n)):
            if self.bits >> k & 1:
                E[j] |= 1 << i
        return E

    # node numbering for the literal graph: y_i = i, a_i = n + i, b_i = 2n + i
    def edges(self) -> List[Tuple[str, str]]:
        n = self.n
        names = lambda kind, i: f"{kind}{i}"  # noqa: E731
        out = []
        for i in range(n):
            out += [
                (names("y", i), names("a", (i - 1) % n)),
                (names("y", i), names("b", (i - 1) % n)),
                (names("a", i), names("y", i)),
                (names("b", i), names("y", i)),
            ]
        for k, (i, j) in enumerate(choice_pairs(n)):
            if self.bits >> k & 1:
                out.append((names("a", j), names("y", i)))
            else:
                out.append((names("y", i), names("b", j)))
        return out

    def adjacency(self) -> List[int]:
        """Successor bitmasks over the ``3n`` nodes."""
        n = self.n
        index = {}
        for i in range(n):
            index[f"y{i}"], index[f"a{i}"], index[f"b{i}"] = i, n + i, 2 * n + i
        adj = [0] * (3 * n)
        for u, v in self.edges():
            adj[index[u]] |= 1 << index[v]
        return adj


def ccg_from_sets(family: SetFamily) -> ConstraintChoiceGraph:
    n = family.n
    bits = 0
    for k, (i, j) in enumerate(choice_pairs(n)):
        if i in family.sets[j]:
            bits |= 1 << k
    return ConstraintChoiceGraph(n, bits)


def sets_from_ccg(g: ConstraintChoiceGraph) -> SetFamily:
    return SetFamily(tuple(frozenset(i for i in range(g.n) if E >> i & 1) for E in g.sets()))


# ---------------------------------------------------------------------------
# cycle tests


def has_cycle_masked(adj: Sequence[int], mask: int) -> bool:
    """Whether the subgraph induced by ``mask`` has a directed cycle (peel sinks)."""
    alive = mask
    while alive:
        sinks = 0
        rest = alive
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            if adj[u] & alive == 0:
                sinks |= low
            rest ^= low
        if not sinks:
            return True
        alive &= ~sinks
    return False


def _contributions(n: int, E: Sequence[int]):
    """Edges between ``y`` nodes that each ``a_j`` / ``b_j`` induces when present.

    ``a_j`` is entered only from ``y_{j+1}`` and leaves to ``E_j``; ``b_j`` is
    entered from every ``y_i`` outside ``E_j`` and leaves only to ``y_j``.
    A cycle through ``y`` nodes and chosen ``a``/``b`` nodes is exactly a cycle
    of these projected edges.
    """
    full = (1 << n) - 1
    a_contrib, b_contrib = [], []
    for j in range(n):
        rows = [0] * n
        rows[(j + 1) % n] = E[j]
        a_contrib.append(rows)
        rows = [0] * n
        outside = full & ~E[j]
        for i in range(n):
            if outside >> i & 1:
                rows[i] = 1 << j
        b_contrib.append(rows)
    return a_contrib, b_contrib


def _projected_cycle(n: int, contribs: Sequence[Sequence[int]]) -> bool:
    adj = [0] * n
    for rows in contribs:
        for i in range(n):
            adj[i] |= rows[i]
    return has_cycle_masked(adj, (1 << n) - 1)


def _literal_cycle(g: ConstraintChoiceGraph, T: Sequence[Tuple[str, int]]) -> bool:
    n = g.n
    mask = (1 << n) - 1
    for kind, i in T:
        mask |= 1 << ((n if kind == "a" else 2 * n) + i)
    return has_cycle_masked(g.adjacency(), mask)


@dataclass
class CcgResult:
    n: int
    bits: int
    witness: Optional[Tuple[int, ...]]  # the first S that works, or None (violation)
    audit: List[str] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.witness is not None


def _t_sets(S: Sequence[int]):
    nodes = [("a", i) for i in S] + [("b", i) for i in S]
    return itertools.combinations(nodes, len(S) + 1)


def _first_witness(n: int, E: Sequence[int]) -> Optional[Tuple[int, ...]]:
    a_c, b_c = _contributions(n, E)
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            ok = True
            for T in _t_sets(S):
                if not _projected_cycle(n, [a_c[i] if kind == "a" else b_c[i] for kind, i in T]):
                    ok = False
                    break
            if ok:
                return S
    return None


def check_ccg(g: ConstraintChoiceGraph, literal: bool = False) -> CcgResult:
    """Find the first ``S`` (by size, then lexicographically) meeting the condition.

    The audit lists, for the witness, every ``T`` with the cycle it induces; on
    a violation it lists for every ``S`` the first ``T`` leaving the subgraph
    acyclic. ``literal=True`` tests cycles on the full ``3n``-node graph instead
    of the projection onto ``y`` nodes.
    """
    n = g.n
    E = g.sets()
    a_c, b_c = _contributions(n, E)

    def cyclic(T) -> bool:
        if literal:
            return _literal_cycle(g, T)
        return _projected_cycle(n, [a_c[i] if kind == "a" else b_c[i] for kind, i in T])

    fmt = lambda T: "{" + ",".join(f"{k}{i}" for k, i in T) + "}"  # noqa: E731
    failures = []
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            bad = next((T for T in _t_sets(S) if not cyclic(T)), None)
            if bad is None:
                audit = [f"S={list(S)} T={fmt(T)} cyclic" for T in _t_sets(S)]
                return CcgResult(n, g.bits, S, audit)
            failures.append(f"S={list(S)} T={fmt(bad)} acyclic")
    return CcgResult(n, g.bits, None, failures)


def violation_dump(result: CcgResult) -> str:
    """Plain-text record of a violating graph, enough to replay it."""
    width = result.n * (result.n - 2)
    lines = [
        f"# ccg-violation n={result.n} graph={result.bits} bits={result.bits:0{width}b}",
        f"# replay: metricvote conjecture --n {result.n} --graph {result.bits}",
    ]
    lines += result.audit
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# exhaustive search


@dataclass
class SearchReport:
    n: int
    graphs_checked: int = 0
    violations: List[int] = field(default_factory=list)
    max_witness_size: int = 0
    witness_size_counts: Dict[int, int] = field(default_factory=dict)
    completed: List[Tuple[int, int]] = field(default_factory=list)  # counter ranges [lo, hi)
    runtime: float = 0.0

    @property
    def all_satisfied(self) -> bool:
        return not self.violations

    def merge_range(self, lo: int, hi: int, sizes: Dict[int, int], violations: List[int]) -> None:
        self.graphs_checked += hi - lo
        self.violations.extend(violations)
        for s, k in sizes.items():
            self.witness_size_counts[s] = self.witness_size_counts.get(s, 0) + k
            self.max_witness_size = max(self.max_witness_size, s)
        self.completed.append((lo, hi))

    def summary(self) -> str:
        return f"{self.graphs_checked} graphs, {len(self.violations)} violations"


def _check_range(n: int, lo: int, hi: int):
    pairs = choice_pairs(n)
    sizes: Dict[int, int] = {}
    violations = []
    for bits in range(lo, hi):
        E = [1 << j for j in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                E[j] |= 1 << i
        S = _first_witness(n, E)
        if S is None:
            violations.append(bits)
        else:
            sizes[len(S)] = sizes.get(len(S), 0) + 1
    return lo, hi, sizes, violations


def _write_checkpoint(path: str, report: SearchReport) -> None:
    lines = [f"# ccg-checkpoint n={report.n}"]
    for (lo, hi) in report.completed:
        lines.append(f"range {lo} {hi}")
    lines.append("sizes " + " ".join(f"{s}:{k}" for s, k in sorted(report.witness_size_counts.items())))
    lines.append("violations " + " ".join(map(str, report.violations)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_checkpoint(path: str) -> SearchReport:
    report = None
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                for tok in parts:
                    if tok.startswith("n="):
                        report = SearchReport(int(tok[2:]))
            elif report is None:
                raise ValueError(f"{path}: checkpoint lacks the '# ccg-checkpoint n=...' header")
            elif parts[0] == "range":
                lo, hi = int(parts[1]), int(parts[2])
                report.completed.append((lo, hi))
                report.graphs_checked += hi - lo
            elif parts[0] == "sizes":
                for tok in parts[1:]:
                    s, k = tok.split(":")
                    report.witness_size_counts[int(s)] = int(k)
                    report.max_witness_size = max(report.max_witness_size, int(s))
            elif parts[0] == "violations":
                report.violations = [int(t) for t in parts[1:]]
    if report is None:
        raise ValueError(f"{path}: empty checkpoint")
    return report


def exhaustive_search(
    n: int,
    lo: int = 0,
    hi: Optional[int] = None,
    chunk: int = 4096,
    checkpoint: Optional[str] = None,
    workers: int = 1,
    progress: Optional[Callable[[int, int, float], None]] = None,
) -> SearchReport:
    """Check every graph numbered in ``[lo, hi)`` (default: all ``2^(n(n-2))``).

    Work proceeds in chunks; with ``checkpoint`` the completed ranges and
    statistics are saved after every chunk and already-completed ranges are
    skipped on restart. Results do not depend on ``chunk`` or ``workers``.
    """
    if n < 3:
        raise ValueError("exhaustive search needs n >= 3")
    total = 1 << (n * (n - 2))
    hi = total if hi is None else hi
    if not 0 <= lo <= hi <= total:
        raise ValueError(f"range [{lo}, {hi}) outside [0, {total})")
    start = time.perf_counter()
    report = SearchReport(n)
    done: List[Tuple[int, int]] = []
    if checkpoint is not None:
        try:
            report = read_checkpoint(checkpoint)
        except FileNotFoundError:
            pass
        if report.n != n:
            raise ValueError(f"checkpoint is for n={report.n}, not n={n}")
        done = list(report.completed)

    def is_done(a: int, b: int) -> bool:
        return any(x <= a and b <= y for x, y in done)

    todo = [(a, min(a + chunk, hi)) for a in range(lo, hi, chunk) if not is_done(a, min(a + chunk, hi))]

    def absorb(res):
        report.merge_range(*res)
        if checkpoint is not None:
            _write_checkpoint(checkpoint, report)
        if progress is not None:
            progress(res[1], report.graphs_checked, time.perf_counter() - start)

    if workers > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            for res in pool.map(_check_range, [n] * len(todo), [a for a, _ in todo], [b for _, b in todo]):
                absorb(res)
    else:
        for a, b in todo:
            absorb(_check_range(n, a, b))
    report.violations.sort()
    report.completed.sort()
    report.runtime = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# profile-level checks


@dataclass(frozen=True)
class Conjecture1Verdict:
    acyclic: bool
    cycle: Optional[List[int]] = None


def check_profile_conjecture1(profile: VoteProfile) -> Conjecture1Verdict:
    """Is the comparison graph of ``profile`` acyclic? Reports a cycle if not."""
    g = build_compg(profile, with_witnesses=False)
    cycle = g.find_cycle()
    return Conjecture1Verdict(cycle is None, cycle)


@dataclass(frozen=True)
class Conjecture2Verdict:
    expectations: Tuple[Fraction, ...]
    argmin: int

    @property
    def satisfied(self) -> bool:
        return self.expectations[self.argmin] <= 1


def check_conjecture2_on_voters(rankings: Sequence[Sequence[int]], sets: SetFamily) -> Conjecture2Verdict:
    """``E[I+_i + I-_i]`` for a uniformly random ranking from ``rankings``.

    ``I+_i``: ``i+1`` is ranked ahead of all of ``E_i``; ``I-_i``: ``i`` is ranked
    behind all of the complement of ``E_i``.
    """
    if not rankings:
        raise ValueError("need at least one ranking")
    n = sets.n
    totals = [0] * n
    for r in rankings:
        if sorted(r) != list(range(n)):
            raise ValueError(f"ranking {list(r)} is not a permutation of 0..{n - 1}")
        pos = [0] * n
        for k, c in enumerate(r):
            pos[c] = k
        for i, E in enumerate(sets.sets):
            nxt = (i + 1) % n
            if all(pos[nxt] < pos[z] for z in E):
                totals[i] += 1
            if all(pos[z] < pos[i] for z in range(n) if z not in E):
                totals[i] += 1
    exps = tuple(Fraction(t, len(rankings)) for t in totals)
    best = min(range(n), key=lambda i: (exps[i], i))
    return Conjecture2Verdict(exps, best)


def cycle_set_family(profile: VoteProfile, cycle: Sequence[int]):
    """For a comparison-graph cycle ``x_0 <- x_1 <- ... <- x_{k-1} <- x_0`` (edges
    ``(x_{i+1}, x_i)``), relabel to ``0..k-1`` and return the witness sets and the
    restricted rankings, ready for :func:`check_conjecture2_on_voters`.
    """
    k = len(cycle)
    sets = []
    for i in range(k):
        wit = hall_witness(profile, cycle[i], cycle[(i + 1) % k])
        if wit is None:
            raise ValueError(f"no edge ({cycle[(i + 1) % k]}, {cycle[i]}) in the comparison graph")
        sets.append(frozenset(j for j in range(k) if cycle[j] in wit.E))
    label = {c: j for j, c in enumerate(cycle)}
    rankings = [[label[c] for c in r if c in label] for r in profile.rankings]
    return rankings, SetFamily(tuple(sets))
