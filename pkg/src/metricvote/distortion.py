"""The adversary's LP: the worst metric for a (winner, optimum) pair.

Variables are the distances ``d[x][v]``, flattened as ``x * m + v``. The LP
maximizes the winner's cost with the putative optimum's cost pinned to 1.

A ranking never bounds the winner's cost when no chain of voter preferences
leads from the winner down to the optimum (e.g. everyone ranks the optimum
first); the LP is then unbounded and :func:`opt_dist` returns ``math.inf``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .lp import EQ, GE, LE, OPTIMAL, UNBOUNDED, LinearProgram, LpInternalError, solve_lp, solve_lp_with_cuts
from .profile import PseudoMetric, VoteProfile

Value = Union[Fraction, float]  # float only ever means math.inf


def var_index(profile: VoteProfile, x: int, v: int) -> int:
    return x * profile.m + v


def build_distortion_lp(profile: VoteProfile, w: int, c: int) -> LinearProgram:
    """Triangle, consistency, normalization and optimality rows.

    Triangle rows with ``x == y`` or ``v == v'`` are implied by
    non-negativity and are not emitted. Consistency rows cover only
    ranking-adjacent pairs; transitivity supplies the rest.
    """
    n, m = profile.n, profile.m
    idx = lambda x, v: x * m + v  # noqa: E731
    lp = LinearProgram(n * m, var_names=[f"d[{x}][{v}]" for x in range(n) for v in range(m)])
    lp.objective = {idx(w, v): Fraction(1) for v in range(m)}
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            for v in range(m):
                for u in range(m):
                    if u == v:
                        continue
                    lp.add(
                        [(idx(x, v), 1), (idx(x, u), -1), (idx(y, u), -1), (idx(y, v), -1)],
                        LE, 0, f"tri {x} {y} {v} {u}",
                    )
    for v, r in enumerate(profile.rankings):
        for a, b in zip(r, r[1:]):
            lp.add([(idx(a, v), 1), (idx(b, v), -1)], LE, 0, f"cons {v} {a} {b}")
    lp.add([(idx(c, v), 1) for v in range(m)], EQ, 1, f"norm {c}")
    for x in range(n):
        lp.add([(idx(x, v), 1) for v in range(m)], GE, 1, f"opt {x}")
    return lp


def reaches_optimum(profile: VoteProfile, w: int, c: int) -> bool:
    """Whether some chain ``w = x_1, ..., x_l = c`` has every hop preferred by a voter.

    Exactly the pairs for which :func:`opt_dist` is finite.
    """
    if w == c:
        return True
    n = profile.n
    below = [set() for _ in range(n)]
    for r in profile.rankings:
        for i, x in enumerate(r):
            below[x].update(r[i + 1:])
    seen = {w}
    stack = [w]
    while stack:
        u = stack.pop()
        for t in below[u]:
            if t == c:
                return True
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False


def build_relaxed_lp(profile: VoteProfile, w: int, c: int) -> LinearProgram:
    """A homogeneous relaxation used as the starting point of row generation.

    Keeps only the triangle rows through ``c`` (``y == c``), all consistency
    rows, ``cost(c) <= 1`` and ``cost(c) <= cost(x)``. The origin is feasible,
    and because the true optimum is at least 1 every optimal point has
    ``cost(c) = 1``, so optima of the full LP and of this relaxation plus the
    missing triangle rows coincide. The ``y == c`` rows alone already bound
    the objective whenever :func:`reaches_optimum` holds.
    """
    n, m = profile.n, profile.m
    idx = lambda x, v: x * m + v  # noqa: E731
    lp = LinearProgram(n * m, var_names=[f"d[{x}][{v}]" for x in range(n) for v in range(m)])
    lp.objective = {idx(w, v): Fraction(1) for v in range(m)}
    for x in range(n):
        if x == c:
            continue
        for v in range(m):
            for u in range(m):
                if u != v:
                    lp.add(
                        [(idx(x, v), 1), (idx(x, u), -1), (idx(c, u), -1), (idx(c, v), -1)],
                        LE, 0, f"tri {x} {c} {v} {u}",
                    )
    for v, r in enumerate(profile.rankings):
        for a, b in zip(r, r[1:]):
            lp.add([(idx(a, v), 1), (idx(b, v), -1)], LE, 0, f"cons {v} {a} {b}")
    lp.add([(idx(c, v), 1) for v in range(m)], LE, 1, f"norm {c}")
    for x in range(n):
        if x != c:
            lp.add([(idx(c, v), 1) for v in range(m)] + [(idx(x, v), -1) for v in range(m)], LE, 0, f"opt {x}")
    return lp


def _triangle_separator(profile: VoteProfile):
    """Exact oracle: for each ``(x, v, u)`` the most violated triangle row, if any."""
    n, m = profile.n, profile.m

    def separate(d):
        cuts = []
        for v in range(m):
            for u in range(m):
                if u == v:
                    continue
                s = [d[y * m + u] + d[y * m + v] for y in range(n)]
                order = sorted(range(n), key=lambda y: (s[y], y))
                for x in range(n):
                    y = order[0] if order[0] != x else order[1]
                    if d[x * m + v] - d[x * m + u] > s[y]:
                        cuts.append((
                            {x * m + v: Fraction(1), x * m + u: Fraction(-1),
                             y * m + u: Fraction(-1), y * m + v: Fraction(-1)},
                            Fraction(0),
                        ))
        return cuts

    return separate


def _solve(profile: VoteProfile, w: int, c: int, method: str = "rowgen"):
    if method == "full":
        sol = solve_lp(build_distortion_lp(profile, w, c))
    elif method == "rowgen":
        if profile.n < 2:
            raise ValueError("row generation needs two candidates")
        sol = solve_lp_with_cuts(
            build_relaxed_lp(profile, w, c), _triangle_separator(profile),
            full=build_distortion_lp(profile, w, c),
        )
    else:
        raise ValueError(f"unknown LP method {method!r}")
    if sol.status == OPTIMAL:
        return sol
    if sol.status == UNBOUNDED:
        if reaches_optimum(profile, w, c):
            raise LpInternalError(f"LP unbounded for ({w}, {c}) although a preference chain exists")
        return sol
    # the rank metric d(v,x) = n + rank_v(x), rescaled, is always feasible
    raise LpInternalError(f"distortion LP infeasible for ({w}, {c})")


def opt_dist(profile: VoteProfile, w: int, c: int, method: str = "rowgen") -> Value:
    """Worst-case ``cost(w) / cost(c)`` over consistent metrics (``inf`` if unbounded).

    ``method="rowgen"`` (default) adds triangle rows lazily; ``"full"`` solves
    the complete LP. Both are exact and agree.
    """
    if w == c:
        return Fraction(1)
    if method == "rowgen" and not reaches_optimum(profile, w, c):
        return math.inf
    sol = _solve(profile, w, c, method)
    return sol.objective if sol.status == OPTIMAL else math.inf


def worst_case_metric(profile: VoteProfile, w: int, c: int, method: str = "rowgen") -> Optional[PseudoMetric]:
    """An LP-optimal metric with ``cost(c) = 1``; ``None`` when the ratio is unbounded."""
    if w == c or not reaches_optimum(profile, w, c):
        if w != c:
            return None
        method = "full"
    sol = _solve(profile, w, c, method)
    if sol.status != OPTIMAL:
        return None
    m = profile.m
    x = sol.assignment
    return PseudoMetric.from_rows(
        [[x[cand * m + v] for cand in range(profile.n)] for v in range(m)]
    )


def _opt_dist_task(args):
    profile, w, c = args
    return opt_dist(profile, w, c)


def w_opt_dist(profile: VoteProfile, w: int, workers: int = 1) -> Value:
    """Distortion of electing ``w``: the max of :func:`opt_dist` over all rivals."""
    rivals = [c for c in range(profile.n) if c != w]
    if not rivals:
        return Fraction(1)
    # unbounded pairs need no LP
    if any(not reaches_optimum(profile, w, c) for c in rivals):
        return math.inf
    tasks = [(profile, w, c) for c in rivals]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            values = list(pool.map(_opt_dist_task, tasks))
    else:
        values = [_opt_dist_task(t) for t in tasks]
    return max([Fraction(1)] + values)


def all_w_opt_dist(profile: VoteProfile, workers: int = 1) -> List[Value]:
    return [w_opt_dist(profile, w, workers) for w in range(profile.n)]


def lp_optimal_winner(profile: VoteProfile, workers: int = 1) -> Tuple[int, Value]:
    """Lowest-index minimizer of :func:`w_opt_dist`."""
    values = all_w_opt_dist(profile, workers)
    best = min(values)
    w = values.index(best)
    return w, best
