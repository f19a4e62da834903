"""Flow certificates for distortion upper bounds.

The flow graph ``H`` has a node ``(v, x)`` for every voter ``v`` and candidate
``x``.  Preference edges ``(v, x) -> (v, y)`` exist when ``v`` strictly prefers
``x`` to ``y``; sideways edges ``(v, x) -> (v', x)`` connect the copies of one
candidate at two different voters.  One unit of flow starts at each
``(v, w)`` and may only be absorbed at the nodes ``(v, c)``.  For any such
flow,

    cost(w) <= cost(c) * max_v flcost(v)

where ``flcost(v)`` is the flow arriving at ``(v, c)`` plus all sideways flow
touching ``v`` at candidates other than ``c``. (When ``w == c`` the unit a sink
keeps for itself counts as arriving flow.)  :func:`verify_certificate`
recomputes that bound from the raw edge flows.

Two constructions are provided: the layered chain flow (whose cost is bounded
by :func:`lambda_bound`) and the matching flow (cost at most 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .profile import VoteProfile, pairwise_fraction

Node = Tuple[int, int]  # (voter, candidate)
Edge = Tuple[Node, Node]


class CertificateError(ValueError):
    """A flow certificate violates conservation, sign, or edge constraints."""


class FlowConstructionError(ValueError):
    """The inputs to a flow construction do not meet its preconditions."""


@dataclass(frozen=True)
class FlowGraph:
    profile: VoteProfile
    w: int
    c: int

    @property
    def nodes(self) -> List[Node]:
        return [(v, x) for v in range(self.profile.m) for x in range(self.profile.n)]

    def is_preference_edge(self, a: Node, b: Node) -> bool:
        return a[0] == b[0] and a[1] != b[1] and self.profile.prefers(a[0], a[1], b[1])

    def is_sideways_edge(self, a: Node, b: Node) -> bool:
        return a[1] == b[1] and a[0] != b[0]

    def has_edge(self, a: Node, b: Node) -> bool:
        m, n = self.profile.m, self.profile.n
        for v, x in (a, b):
            if not (0 <= v < m and 0 <= x < n):
                return False
        return self.is_preference_edge(a, b) or self.is_sideways_edge(a, b)

    def preference_edges(self) -> List[Edge]:
        out = []
        for v, r in enumerate(self.profile.rankings):
            for i, x in enumerate(r):
                for y in r[i + 1:]:
                    out.append(((v, x), (v, y)))
        return out

    def sideways_edges(self) -> List[Edge]:
        m = self.profile.m
        return [
            ((v, x), (u, x))
            for x in range(self.profile.n)
            for v in range(m)
            for u in range(m)
            if u != v
        ]


def build_flow_graph(profile: VoteProfile, w: int, c: int) -> FlowGraph:
    for name, x in (("w", w), ("c", c)):
        if not 0 <= x < profile.n:
            raise ValueError(f"{name}={x} is not a candidate of a {profile.n}-candidate profile")
    return FlowGraph(profile, w, c)


@dataclass(frozen=True)
class FlowCertificate:
    """Sparse nonzero edge flows for the pair ``(w, c)``."""

    profile: VoteProfile
    w: int
    c: int
    flows: Mapping[Edge, Fraction] = field(default_factory=dict)

    def dumps(self) -> str:
        lines = [f"# flow-certificate profile={self.profile.digest()} w={self.w} c={self.c}"]
        for ((v, x), (u, y)), amount in sorted(self.flows.items()):
            lines.append(f"{v} {x} {u} {y} {amount}")
        return "\n".join(lines) + "\n"


def load_certificate(text: str, profile: VoteProfile) -> FlowCertificate:
    """Parse :meth:`FlowCertificate.dumps` output, checking it belongs to ``profile``."""
    header = None
    flows: Dict[Edge, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None and "flow-certificate" in line:
                header = dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
            continue
        parts = line.split()
        if len(parts) != 5:
            raise CertificateError(f"line {lineno}: expected 'v x v2 x2 amount'")
        try:
            v, x, u, y = (int(p) for p in parts[:4])
            amount = Fraction(parts[4])
        except (ValueError, ZeroDivisionError):
            raise CertificateError(f"line {lineno}: malformed entry {line!r}") from None
        edge = ((v, x), (u, y))
        flows[edge] = flows.get(edge, Fraction(0)) + amount
    if header is None:
        raise CertificateError("missing '# flow-certificate' header")
    if header.get("profile") != profile.digest():
        raise CertificateError(
            f"certificate is bound to profile {header.get('profile')}, not {profile.digest()}"
        )
    return FlowCertificate(profile, int(header["w"]), int(header["c"]), flows)


def per_voter_costs(cert: FlowCertificate) -> List[Fraction]:
    """Check ``cert`` and return ``flcost(v)`` for every voter.

    Raises :class:`CertificateError` naming the first offending edge or node.
    """
    profile, w, c = cert.profile, cert.w, cert.c
    g = build_flow_graph(profile, w, c)
    m, n = profile.m, profile.n
    balance = [[Fraction(0)] * n for _ in range(m)]
    for v in range(m):
        balance[v][w] += 1
    into_sink = [Fraction(0)] * m
    sideways = [Fraction(0)] * m
    for (a, b), amount in cert.flows.items():
        amount = Fraction(amount)
        if amount < 0:
            raise CertificateError(f"negative flow {amount} on edge {a} -> {b}")
        if not g.has_edge(a, b):
            raise CertificateError(f"flow {amount} on {a} -> {b}, which is not an edge of H")
        if amount == 0:
            continue
        balance[a[0]][a[1]] -= amount
        balance[b[0]][b[1]] += amount
        if b[1] == c:
            into_sink[b[0]] += amount
        if a[1] == b[1] and a[1] != c:
            sideways[a[0]] += amount
            sideways[b[0]] += amount
    for v in range(m):
        for x in range(n):
            if x == c:
                if balance[v][x] < 0:
                    raise CertificateError(f"node ({v}, {x}) sends out {-balance[v][x]} more than it receives")
            elif balance[v][x] != 0:
                raise CertificateError(f"flow not conserved at node ({v}, {x}): imbalance {balance[v][x]}")
    # when w == c each sink also starts with its own unit; the part of it that
    # never leaves is absorbed in place and is charged like arriving flow
    retained = [Fraction(0)] * m
    if w == c:
        out_of_sink = [Fraction(0)] * m
        for (a, b), amount in cert.flows.items():
            if a[1] == c:
                out_of_sink[a[0]] += amount
        retained = [max(Fraction(0), 1 - out_of_sink[v]) for v in range(m)]
    return [into_sink[v] + sideways[v] + retained[v] for v in range(m)]


def verify_certificate(cert: FlowCertificate) -> Fraction:
    """Max per-voter cost of a valid certificate: an upper bound on ``cost(w)/cost(c)``."""
    return max(per_voter_costs(cert))


# ---------------------------------------------------------------------------
# chain flow


def chain_voter_sets(profile: VoteProfile, path: Sequence[int]) -> List[frozenset]:
    """``V_i`` for each position: all voters at 0, then voters with ``x_{i-1} > x_i``."""
    sets = [frozenset(range(profile.m))]
    for a, b in zip(path, path[1:]):
        sets.append(frozenset(v for v in range(profile.m) if profile.prefers(v, a, b)))
    return sets


def chain_taus(profile: VoteProfile, path: Sequence[int]) -> List[Fraction]:
    """Preference fractions along the path, one per hop."""
    return [pairwise_fraction(profile, a, b) for a, b in zip(path, path[1:])]


def _check_path(profile: VoteProfile, path: Sequence[int]) -> None:
    if not path:
        raise FlowConstructionError("empty path")
    if len(set(path)) != len(path):
        raise FlowConstructionError(f"path {list(path)} repeats a candidate")
    for x in path:
        if not 0 <= x < profile.n:
            raise FlowConstructionError(f"candidate {x} out of range")


def chain_flow(profile: VoteProfile, path: Sequence[int]) -> FlowCertificate:
    """Layered flow from ``path[0]`` to ``path[-1]``.

    Layer ``i`` holds ``m / |V_i|`` units at each ``(v, x_i)`` with ``v`` in
    ``V_i``. Voters in both ``V_i`` and ``V_{i+1}`` keep what they can; the
    surplus moves sideways to the remaining ``V_{i+1}`` voters, pairing donors
    and receivers greedily in voter order; then every ``V_{i+1}`` voter pushes
    its share down one preference edge.
    """
    path = list(path)
    _check_path(profile, path)
    sets = chain_voter_sets(profile, path)
    for i, vs in enumerate(sets[1:], start=1):
        if not vs:
            raise FlowConstructionError(
                f"hop {i} ({path[i - 1]} -> {path[i]}): no voter prefers {path[i - 1]} to {path[i]}"
            )
    m = profile.m
    flows: Dict[Edge, Fraction] = {}

    def add(a: Node, b: Node, amount: Fraction) -> None:
        if amount:
            flows[(a, b)] = flows.get((a, b), Fraction(0)) + amount

    hold = {v: Fraction(1) for v in range(m)}
    for i in range(len(path) - 1):
        x, nxt = path[i], path[i + 1]
        share = Fraction(m, len(sets[i + 1]))
        donors, receivers = [], []
        for v in range(m):
            have = hold.get(v, Fraction(0))
            want = share if v in sets[i + 1] else Fraction(0)
            keep = min(have, want)
            if have > keep:
                donors.append([v, have - keep])
            if want > keep:
                receivers.append([v, want - keep])
        di = 0
        for r in receivers:
            while r[1] > 0:
                d = donors[di]
                amount = min(d[1], r[1])
                add((d[0], x), (r[0], x), amount)
                d[1] -= amount
                r[1] -= amount
                if d[1] == 0:
                    di += 1
        for v in sets[i + 1]:
            add((v, x), (v, nxt), share)
        hold = {v: share for v in sets[i + 1]}
    return FlowCertificate(profile, path[0], path[-1], flows)


# ---------------------------------------------------------------------------
# matching flow


def matching_flow(
    profile: VoteProfile,
    w: int,
    c: int,
    matching: Mapping[int, int],
    intermediates: Mapping[int, int],
) -> FlowCertificate:
    """Route each voter's unit ``(v,w) -> (v,z_v) -> (M(v),z_v) -> (M(v),c)``.

    ``matching`` must be a bijection on voters with ``w >=_v z_v`` and
    ``z_v >=_{M(v)} c``; zero-length hops are dropped.
    """
    m = profile.m
    if sorted(matching) != list(range(m)):
        raise FlowConstructionError(f"matching must be defined on exactly the voters 0..{m - 1}")
    seen: Dict[int, int] = {}
    for v in range(m):
        u = matching[v]
        if not 0 <= u < m:
            raise FlowConstructionError(f"voter {v} is matched to {u}, which is not a voter")
        if u in seen:
            raise FlowConstructionError(f"voters {seen[u]} and {v} are both matched to {u}")
        seen[u] = v
    flows: Dict[Edge, Fraction] = {}

    def add(a: Node, b: Node) -> None:
        if a != b:
            flows[(a, b)] = flows.get((a, b), Fraction(0)) + 1

    for v in range(m):
        if v not in intermediates:
            raise FlowConstructionError(f"voter {v} has no intermediate candidate")
        z, u = intermediates[v], matching[v]
        if not 0 <= z < profile.n:
            raise FlowConstructionError(f"voter {v}: intermediate {z} is not a candidate")
        if not profile.weakly_prefers(v, w, z):
            raise FlowConstructionError(f"voter {v} ranks intermediate {z} above {w}")
        if not profile.weakly_prefers(u, z, c):
            raise FlowConstructionError(
                f"voter {v}: partner {u} ranks {c} above intermediate {z}"
            )
        add((v, w), (v, z))
        add((v, z), (u, z))
        add((u, z), (u, c))
    return FlowCertificate(profile, w, c, flows)


# ---------------------------------------------------------------------------
# the Lambda bound


def _as_number(t):
    if isinstance(t, float):
        return t
    return Fraction(t)


def lambda_weights(taus: Sequence) -> list:
    """Per-position penalties; ``taus[k]`` is the fraction for hop ``k+2``."""
    taus = [_as_number(t) for t in taus]
    for k, t in enumerate(taus, start=2):
        if not t > 0 or t > 1:
            raise ValueError(f"tau_{k} = {t} is outside (0, 1]")
    weights = [Fraction(1)]
    for k, t in enumerate(taus, start=2):
        weights.append(2 / t - 1 if k == 2 else 2 / t)
    return weights


def lambda_bound(taus: Sequence):
    """Max total penalty over position sets with no two consecutive members.

    Exact when every ``tau`` is rational, a float otherwise.
    """
    weights = lambda_weights(taus)
    take, skip = weights[0], 0  # best sums ending with / without the last position
    for wgt in weights[1:]:
        take, skip = skip + wgt, max(take, skip)
    return max(take, skip)


def uniform_lambda(tau, ell: int):
    """Closed form of :func:`lambda_bound` for a constant fraction ``tau``."""
    tau = _as_number(tau)
    if not tau > 0 or tau > 1:
        raise ValueError(f"tau = {tau} is outside (0, 1]")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if ell % 2 == 0:
        return ell / tau - 1
    return (ell - 1) / tau + 1


# ---------------------------------------------------------------------------
# chain-based bound for rules with the widest-path chain property


@dataclass(frozen=True)
class ChainRuleBound:
    width: Fraction  # p: every hop of the chain is preferred by at least this fraction
    path: Tuple[int, ...]
    case: str  # "single-hop" or "blocks"
    bound: Fraction  # the case's closed-form bound
    lambda_of_path: Fraction  # lambda_bound of the chain's actual fractions
    sampled_path: Tuple[int, ...] = ()  # the every-k-th subsequence used in the "blocks" case


def chain_rule_bound(profile: VoteProfile, w: int, y: int) -> ChainRuleBound:
    """Instance-level version of the sqrt(n) upper-bound argument.

    With ``p`` the widest-path width from ``w`` to ``y``: if ``p <= 1 - 1/sqrt(2n)``
    at least ``1 - p`` of voters prefer ``w`` to ``y`` and the single-hop bound
    ``2/(1-p) - 1`` applies. Otherwise every ``k = floor(sqrt(n/2))``-th chain
    candidate is kept; each sampled hop is preferred by at least half of the
    voters (checked), so the uniform bound with ``tau = 1/2`` over the ``B + 1``
    sampled candidates gives ``2B + 1`` with ``B = ceil(l / k)``.
    """
    from .rules import verify_chain_property

    n = profile.n
    p, path = verify_chain_property(profile, w, y)
    lam_path = lambda_bound(chain_taus(profile, path))
    if (1 - p) ** 2 * 2 * n >= 1:
        bound = 2 / (1 - p) - 1
        return ChainRuleBound(p, tuple(path), "single-hop", bound, lam_path)
    k = math.isqrt(n // 2)
    if k < 1:
        raise AssertionError("block size must be positive for n >= 2")
    ell = len(path)
    B = -(-ell // k)
    sampled = [path[j * k] for j in range(B) if j * k < ell]
    if sampled[-1] != path[-1]:
        sampled.append(path[-1])
    for a, b in zip(sampled, sampled[1:]):
        if pairwise_fraction(profile, a, b) < Fraction(1, 2):
            raise AssertionError(f"sampled hop {a} -> {b} is preferred by fewer than half of the voters")
    bound = Fraction(2 * B + 1)
    # the sampled chain is at most B + 1 long, so its uniform bound never exceeds 2B + 1
    if uniform_lambda(Fraction(1, 2), len(sampled)) > bound:
        raise AssertionError("sampled chain longer than the block count allows")
    return ChainRuleBound(p, tuple(path), "blocks", bound, lam_path, tuple(sampled))
