"""Exact two-phase simplex over the rationals, for small dense problems.

Solves ``maximize c·x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0``.
Bland's rule rules out cycling; all arithmetic is ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["LPResult", "solve_lp"]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None
    x: tuple | None


def _pivot(tableau, basis, row, col):
    pr = tableau[row]
    inv = 1 / pr[col]
    tableau[row] = pr = [v * inv for v in pr]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            tableau[r] = [a - factor * b for a, b in zip(line, pr)]
    basis[row] = col


def _run(tableau, basis, allowed):
    # objective row is last; entries are reduced costs of a minimisation
    obj = tableau[-1]
    while True:
        obj = tableau[-1]
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best_row, best_ratio = None, None
        for r in range(len(tableau) - 1):
            a = tableau[r][col]
            if a > 0:
                ratio = tableau[r][-1] / a
                if best_ratio is None or ratio < best_ratio or (
                        ratio == best_ratio and basis[r] < basis[best_row]):
                    best_row, best_ratio = r, ratio
        if best_row is None:
            return "unbounded"
        _pivot(tableau, basis, best_row, col)


def solve_lp(c, A_eq=(), b_eq=(), A_ub=(), b_ub=()) -> LPResult:
    c = [Fraction(v) for v in c]
    nvar = len(c)
    rows = [([Fraction(v) for v in a], Fraction(b), None) for a, b in zip(A_eq, b_eq)]
    rows += [([Fraction(v) for v in a], Fraction(b), "slack") for a, b in zip(A_ub, b_ub)]
    nslack = sum(1 for r in rows if r[2] == "slack")
    m = len(rows)
    width = nvar + nslack + m  # structural, slack, artificial
    tableau, basis = [], []
    slack_at = nvar
    for i, (a, b, kind) in enumerate(rows):
        line = a + [Fraction(0)] * (nslack + m) + [b]
        if kind == "slack":
            line[slack_at] = Fraction(1)
            slack_at += 1
        if b < 0:
            line = [-v for v in line]
        line[nvar + nslack + i] = Fraction(1)
        tableau.append(line)
        basis.append(nvar + nslack + i)
    # phase one: minimise the sum of artificials
    phase1 = [Fraction(0)] * (width + 1)
    for line in tableau:
        for j in range(nvar + nslack):
            phase1[j] -= line[j]
        phase1[-1] -= line[-1]
    tableau.append(phase1)
    _run(tableau, basis, range(nvar + nslack))
    if tableau[-1][-1] != 0:
        return LPResult("infeasible", None, None)
    # drive remaining artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= nvar + nslack:
            col = next((j for j in range(nvar + nslack) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    tableau.pop()
    # phase two: minimise -c·x
    obj = [-v for v in c] + [Fraction(0)] * (nslack + m) + [Fraction(0)]
    for r in range(m):
        cb = obj[basis[r]]
        if cb != 0:
            obj = [o - cb * t for o, t in zip(obj, tableau[r])]
    tableau.append(obj)
    status = _run(tableau, basis, range(nvar + nslack))
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [Fraction(0)] * nvar
    for r in range(m):
        if basis[r] < nvar:
            x[basis[r]] = tableau[r][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", value, tuple(x))
