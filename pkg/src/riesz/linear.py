"""Exact two-phase simplex over Fractions (Bland's rule, so it always terminates).

All variables are implicitly non-negative.  Rows are dense lists.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class LPResult:
    status: str
    x: list | None = None
    value: Fraction | None = None

    @property
    def feasible(self):
        return self.status != INFEASIBLE


def _pivot(tab, basis, obj, row, col):
    pr = tab[row]
    pv = pr[col]
    if pv != 1:
        tab[row] = pr = [v / pv for v in pr]
    for i, r in enumerate(tab):
        if i != row and r[col] != 0:
            f = r[col]
            tab[i] = [a - f * b for a, b in zip(r, pr)]
    if obj[col] != 0:
        f = obj[col]
        obj[:] = [a - f * b for a, b in zip(obj, pr)]
    basis[row] = col


def _iterate(tab, basis, obj, allowed):
    """Minimise; obj holds reduced costs with the negated value in the last slot."""
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for i, r in enumerate(tab):
            if r[col] > 0:
                ratio = r[-1] / r[col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(tab, basis, obj, best[1], col)


def solve_lp(n, a_eq=(), b_eq=(), a_ub=(), b_ub=(), objective=None, maximize=False):
    """Optimise objective over {x >= 0 : a_eq x = b_eq, a_ub x <= b_ub}.

    With objective None this is a pure feasibility check that returns a
    basic feasible solution.
    """
    rows = [[Fraction(v) for v in r] + [Fraction(0)] * len(a_ub) + [Fraction(b)]
            for r, b in zip(a_eq, b_eq)]
    for k, (r, b) in enumerate(zip(a_ub, b_ub)):
        slack = [Fraction(0)] * len(a_ub)
        slack[k] = Fraction(1)
        rows.append([Fraction(v) for v in r] + slack + [Fraction(b)])
    nv = n + len(a_ub)
    for r in rows:
        if len(r) != nv + 1:
            raise ValueError("row length does not match variable count")
        if r[-1] < 0:
            r[:] = [-v for v in r]
    m = len(rows)
    # artificial columns
    tab = []
    for i, r in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(r[:-1] + art + [r[-1]])
    basis = [nv + i for i in range(m)]
    width = nv + m
    obj = [Fraction(0)] * nv + [Fraction(1)] * m + [Fraction(0)]
    for r in tab:
        obj = [a - b for a, b in zip(obj, r)]
    _iterate(tab, basis, obj, range(width))
    if -obj[-1] != 0:
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= nv:
            col = next((j for j in range(nv) if tab[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(tab, basis, obj, i, col)
        keep.append(i)
    tab = [tab[i][:nv] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    if objective is None:
        return LPResult(OPTIMAL, _extract(tab, basis, n), Fraction(0))
    cost = [Fraction(v) * (-1 if maximize else 1) for v in objective] + [Fraction(0)] * len(a_ub)
    obj = cost + [Fraction(0)]
    for i, b in enumerate(basis):
        if obj[b] != 0:
            f = obj[b]
            obj = [a - f * v for a, v in zip(obj, tab[i])]
    status = _iterate(tab, basis, obj, range(nv))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = _extract(tab, basis, n)
    value = sum((Fraction(c) * v for c, v in zip(objective, x)), Fraction(0))
    return LPResult(OPTIMAL, x, value)


def _extract(tab, basis, n):
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][-1]
    return x


def feasible_point(n, a_eq=(), b_eq=(), a_ub=(), b_ub=()):
    res = solve_lp(n, a_eq, b_eq, a_ub, b_ub)
    return res.x if res.status == OPTIMAL else None
