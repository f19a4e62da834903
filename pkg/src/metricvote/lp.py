"""Exact rational linear programming.

``solve_lp`` is a two-phase dictionary simplex under Bland's rule. The
tableau keeps each row as Python integers over one positive row
denominator, which is exact and, unlike a grid of ``Fraction`` objects,
leaves rows with a zero pivot-column entry untouched.

All variables are implicitly non-negative. Only maximization is supported;
minimize by negating the objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

LE, EQ, GE = "<=", "=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: Tuple[Tuple[int, Fraction], ...]  # sparse (variable, coefficient)
    relation: str
    rhs: Fraction
    label: str = ""


@dataclass
class LinearProgram:
    """``maximize objective . x`` subject to ``constraints`` and ``x >= 0``."""

    num_vars: int
    objective: Dict[int, Fraction] = field(default_factory=dict)
    constraints: List[Constraint] = field(default_factory=list)
    var_names: Optional[List[str]] = None

    def add(self, coeffs, relation: str, rhs, label: str = "") -> None:
        if relation not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {relation!r}")
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = coeffs
        merged: Dict[int, Fraction] = {}
        for j, a in items:
            if not 0 <= j < self.num_vars:
                raise IndexError(f"variable {j} out of range 0..{self.num_vars - 1}")
            merged[j] = merged.get(j, Fraction(0)) + Fraction(a)
        packed = tuple(sorted((j, a) for j, a in merged.items() if a != 0))
        self.constraints.append(Constraint(packed, relation, Fraction(rhs), label))

    def count(self, label_prefix: str) -> int:
        return sum(1 for c in self.constraints if c.label.startswith(label_prefix))

    def dumps(self) -> str:
        """Plain-text dump: one constraint per line, ``var:coef`` terms."""
        lines = [f"vars {self.num_vars}"]
        lines.append("max " + " ".join(f"{j}:{a}" for j, a in sorted(self.objective.items())))
        for c in self.constraints:
            terms = " ".join(f"{j}:{a}" for j, a in c.coeffs)
            tag = f"{c.label} " if c.label else ""
            lines.append(f"{tag}| {terms} {c.relation} {c.rhs}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "LinearProgram":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        num_vars = int(lines[0].split()[1])
        lp = cls(num_vars)
        for tok in lines[1].split()[1:]:
            j, a = tok.split(":")
            lp.objective[int(j)] = Fraction(a)
        for ln in lines[2:]:
            label, _, body = ln.partition("|")
            toks = body.split()
            rel, rhs = toks[-2], toks[-1]
            coeffs = []
            for tok in toks[:-2]:
                j, a = tok.split(":")
                coeffs.append((int(j), Fraction(a)))
            lp.add(coeffs, rel, Fraction(rhs), label.strip())
        return lp

    def check(self, x: Sequence[Fraction]) -> Optional[Constraint]:
        """First constraint violated by ``x`` (or ``None``); exact."""
        if any(v < 0 for v in x):
            raise ValueError("assignment has a negative variable")
        for c in self.constraints:
            lhs = sum((a * x[j] for j, a in c.coeffs), Fraction(0))
            ok = lhs <= c.rhs if c.relation == LE else lhs >= c.rhs if c.relation == GE else lhs == c.rhs
            if not ok:
                return c
        return None

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * x[j] for j, a in self.objective.items()), Fraction(0))


@dataclass(frozen=True)
class LpSolution:
    status: str
    objective: Optional[Fraction] = None
    assignment: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0


class LpInternalError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# integer-row tableau


def _int_row(values: Sequence[Fraction]):
    """Fractions -> (integer numerators, common positive denominator)."""
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    nums = [v.numerator * (den // v.denominator) for v in values]
    return _reduce(nums, den)


def _reduce(nums: List[int], den: int):
    if den < 0:
        nums = [-a for a in nums]
        den = -den
    g = math.gcd(den, *nums)
    if g > 1:
        nums = [a // g for a in nums]
        den //= g
    return nums, den


class _Tableau:
    """Rows ``x_B + sum_j a_j x_{N_j} = b``; the objective row stores ``-c``."""

    def __init__(self, rows, dens, basic, nonbasic):
        self.rows = rows  # list of int lists; last entry is the rhs
        self.dens = dens
        self.basic = basic  # variable label per row
        self.nonbasic = nonbasic  # variable label per column
        self.obj: List[int] = []
        self.obj_den = 1
        self.pivots = 0
        self.next_label = max(basic + nonbasic, default=-1) + 1

    def pivot(self, r: int, s: int) -> None:
        rows, dens = self.rows, self.dens
        Nr, Dr = rows[r], dens[r]
        prs = Nr[s]
        width = len(Nr)
        for i in range(len(rows)):
            if i == r:
                continue
            Ni = rows[i]
            a = Ni[s]
            if a == 0:
                continue
            new = [Ni[j] * prs - a * Nr[j] for j in range(width)]
            new[s] = -a * Dr
            rows[i], dens[i] = _reduce(new, dens[i] * prs)
        a = self.obj[s]
        if a != 0:
            new = [self.obj[j] * prs - a * Nr[j] for j in range(width)]
            new[s] = -a * Dr
            self.obj, self.obj_den = _reduce(new, self.obj_den * prs)
        piv = list(Nr)
        piv[s] = Dr
        rows[r], dens[r] = _reduce(piv, prs)
        self.basic[r], self.nonbasic[s] = self.nonbasic[s], self.basic[r]
        self.pivots += 1

    # -- primal simplex -----------------------------------------------------

    def entering(self) -> Optional[int]:
        """Bland: lowest-labelled column with a positive reduced profit."""
        best = None
        obj, labels = self.obj, self.nonbasic
        for j in range(len(labels)):
            if obj[j] < 0 and (best is None or labels[j] < labels[best]):
                best = j
        return best

    def leaving(self, s: int) -> Optional[int]:
        """Min-ratio row; ties go to the lowest basic label (Bland)."""
        best = None
        bnum = bden = 0
        for i, Ni in enumerate(self.rows):
            a = Ni[s]
            if a <= 0:
                continue
            b = Ni[-1]
            if best is None:
                best, bnum, bden = i, b, a
                continue
            lhs, rhs = b * bden, bnum * a
            if lhs < rhs or (lhs == rhs and self.basic[i] < self.basic[best]):
                best, bnum, bden = i, b, a
        return best

    def run(self) -> str:
        while True:
            s = self.entering()
            if s is None:
                return OPTIMAL
            r = self.leaving(s)
            if r is None:
                return UNBOUNDED
            self.pivot(r, s)

    # -- dual simplex, used after appending cut rows ------------------------

    def dual_run(self) -> str:
        """Restore primal feasibility while keeping the objective row optimal.

        Bland-style: leave on the lowest-labelled infeasible row, enter on the
        min-ratio column with ties to the lowest label.
        """
        while True:
            r = None
            for i, Ni in enumerate(self.rows):
                if Ni[-1] < 0 and (r is None or self.basic[i] < self.basic[r]):
                    r = i
            if r is None:
                return OPTIMAL
            Nr = self.rows[r]
            obj = self.obj
            s = None
            snum = sden = 0
            for j in range(len(self.nonbasic)):
                a = Nr[j]
                if a >= 0:
                    continue
                # ratio obj_j / (-a_rj); obj and row denominators are constant per row
                num, den = obj[j], -a
                if s is None:
                    s, snum, sden = j, num, den
                    continue
                lhs, rhs = num * sden, snum * den
                if lhs < rhs or (lhs == rhs and self.nonbasic[j] < self.nonbasic[s]):
                    s, snum, sden = j, num, den
            if s is None:
                return INFEASIBLE
            self.pivot(r, s)

    def add_le_row(self, coeffs: Dict[int, Fraction], rhs: Fraction) -> None:
        """Append ``coeffs . x <= rhs`` expressed in the current nonbasic columns."""
        ncols = len(self.nonbasic)
        col_of = {lab: j for j, lab in enumerate(self.nonbasic)}
        row_of = {lab: i for i, lab in enumerate(self.basic)}
        vals = [Fraction(0)] * (ncols + 1)
        vals[-1] = Fraction(rhs)
        for var, a in coeffs.items():
            if var in col_of:
                vals[col_of[var]] += a
            else:
                i = row_of[var]
                Ni, Di = self.rows[i], self.dens[i]
                for j in range(ncols + 1):
                    if Ni[j]:
                        vals[j] -= a * Fraction(Ni[j], Di)
        nums, den = _int_row(vals)
        self.rows.append(nums)
        self.dens.append(den)
        self.basic.append(self.next_label)
        self.next_label += 1

    def set_objective(self, objective: Dict[int, Fraction]) -> None:
        ncols = len(self.nonbasic)
        col_of = {lab: j for j, lab in enumerate(self.nonbasic)}
        row_of = {lab: i for i, lab in enumerate(self.basic)}
        obj = [Fraction(0)] * (ncols + 1)
        for var, c in objective.items():
            c = Fraction(c)
            if c == 0:
                continue
            if var in col_of:
                obj[col_of[var]] -= c
            else:
                # x_var = b_r - sum_j a_rj x_j contributes c*a_rj to column j, c*b_r to the rhs
                Nr, Dr = self.rows[row_of[var]], self.dens[row_of[var]]
                for j in range(ncols + 1):
                    if Nr[j]:
                        obj[j] += c * Fraction(Nr[j], Dr)
        self.obj, self.obj_den = _int_row(obj)

    def primal(self, nv: int) -> List[Fraction]:
        x = [Fraction(0)] * nv
        for r, var in enumerate(self.basic):
            if var < nv:
                x[var] = Fraction(self.rows[r][-1], self.dens[r])
        return x

    def value(self) -> Fraction:
        return Fraction(self.obj[-1], self.obj_den)


def _le_rows(lp: LinearProgram):
    out: List[Tuple[Dict[int, Fraction], Fraction]] = []
    for c in lp.constraints:
        coeffs = dict(c.coeffs)
        if c.relation in (LE, EQ):
            out.append((coeffs, c.rhs))
        if c.relation in (GE, EQ):
            out.append(({j: -a for j, a in coeffs.items()}, -c.rhs))
    return out


def _feasible_tableau(lp: LinearProgram) -> Optional[_Tableau]:
    """A primal-feasible dictionary for ``lp`` (phase one if needed), or ``None``."""
    nv = lp.num_vars
    le_rows = _le_rows(lp)
    nrows = len(le_rows)
    need_phase1 = any(b < 0 for _, b in le_rows)
    art = nv + nrows  # label of the phase-one artificial variable
    ncols = nv + (1 if need_phase1 else 0)

    rows, dens = [], []
    for coeffs, b in le_rows:
        vals = [Fraction(0)] * (ncols + 1)
        for j, a in coeffs.items():
            vals[j] = a
        if need_phase1:
            vals[nv] = Fraction(-1)
        vals[-1] = b
        nums, den = _int_row(vals)
        rows.append(nums)
        dens.append(den)
    nonbasic = list(range(nv)) + ([art] if need_phase1 else [])
    tab = _Tableau(rows, dens, list(range(nv, nv + nrows)), nonbasic)
    if not need_phase1:
        return tab

    # maximize -x_art; the objective row stores -c, so +1 in the artificial column
    tab.obj = [0] * (ncols + 1)
    tab.obj[nv] = 1
    tab.obj_den = 1
    worst = min(range(nrows), key=lambda i: (Fraction(rows[i][-1], dens[i]), tab.basic[i]))
    tab.pivot(worst, nv)
    if tab.run() != OPTIMAL:
        raise LpInternalError("phase one cannot be unbounded")
    if tab.obj[-1] != 0:
        return None
    if art in tab.basic:
        r = tab.basic.index(art)
        s = next((j for j in range(ncols) if tab.rows[r][j] != 0), None)
        if s is not None:
            tab.pivot(r, s)
        else:
            # redundant all-zero row at value zero
            del tab.rows[r], tab.dens[r], tab.basic[r]
    s = tab.nonbasic.index(art)
    for row in tab.rows:
        del row[s]
    del tab.nonbasic[s]
    return tab


def _finish(lp: LinearProgram, tab: _Tableau) -> LpSolution:
    x = tab.primal(lp.num_vars)
    value = tab.value()
    bad = lp.check(x)
    if bad is not None or lp.value(x) != value:
        raise LpInternalError(f"simplex returned an invalid optimum (violates {bad})")
    return LpSolution(OPTIMAL, value, tuple(x), tab.pivots)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly. Terminates by Bland's rule."""
    tab = _feasible_tableau(lp)
    if tab is None:
        return LpSolution(INFEASIBLE)
    tab.set_objective(lp.objective)
    if tab.run() == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)
    return _finish(lp, tab)


Separator = Callable[[Sequence[Fraction]], List[Tuple[Dict[int, Fraction], Fraction]]]


def solve_lp_with_cuts(lp: LinearProgram, separate: Separator, full: Optional[LinearProgram] = None) -> LpSolution:
    """Row generation: optimize ``lp``, then append the ``<=`` rows ``separate``
    reports as violated and re-optimize by dual simplex until none remain.

    ``separate`` must be exact; the returned optimum satisfies ``lp`` plus every
    row the oracle can produce, and is additionally checked against ``full``
    when given. An unbounded relaxation is reported as unbounded.
    """
    tab = _feasible_tableau(lp)
    if tab is None:
        return LpSolution(INFEASIBLE)
    tab.set_objective(lp.objective)
    if tab.run() == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)
    while True:
        cuts = separate(tab.primal(lp.num_vars))
        if not cuts:
            break
        for coeffs, rhs in cuts:
            tab.add_le_row(coeffs, rhs)
        if tab.dual_run() == INFEASIBLE:
            return LpSolution(INFEASIBLE, pivots=tab.pivots)
    sol = _finish(lp, tab)
    if full is not None:
        bad = full.check(sol.assignment)
        if bad is not None or full.value(sol.assignment) != sol.objective:
            raise LpInternalError(f"row generation ended at a point violating {bad}")
    return sol
