"""Exact rational two-phase simplex with Bland's rule.

Dense and slow; meant for models with at most a few dozen variables, where
it serves as an independent check on the floating-point solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import LpModel


@dataclass
class ExactSolution:
    status: str
    values: list[Fraction]
    objective: Fraction | None


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = tab[r]
    p = row[c]
    tab[r] = row = [v / p for v in row]
    for i, other in enumerate(tab):
        if i != r and other[c] != 0:
            f = other[c]
            tab[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _run(tab, basis, cost_row: int, allowed: int) -> str:
    """Minimise with the objective stored as reduced costs in ``tab[cost_row]``."""
    m = len(basis)
    while True:
        z = tab[cost_row]
        enter = next((j for j in range(allowed) if z[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], enter)


def solve_exact(model: LpModel) -> ExactSolution:
    """Minimise ``objective . x`` over ``A x >= rhs``, ``lower <= x <= upper`` exactly.

    Finite upper bounds become extra rows; lower bounds are shifted to zero.
    """
    nv = model.num_vars
    lower = [Fraction(v) for v in model.lower]
    rows = []
    for cols, coefs, r in model.rows():
        coeff = [Fraction(0)] * nv
        for j, c in zip(cols, coefs):
            coeff[j] = Fraction(c)
        shifted = Fraction(r) - sum((coeff[j] * lower[j] for j in range(nv)), Fraction(0))
        rows.append((coeff, shifted))
    for j in range(nv):
        coeff = [Fraction(0)] * nv
        coeff[j] = Fraction(-1)
        rows.append((coeff, -(Fraction(model.upper[j]) - lower[j])))

    m = len(rows)
    # columns: x (nv) | surplus (m) | artificial (m) | rhs
    width = nv + 2 * m + 1
    tab: list[list[Fraction]] = []
    for i, (coeff, r) in enumerate(rows):
        line = coeff + [Fraction(0)] * (2 * m) + [r]
        line[nv + i] = Fraction(-1)
        if r < 0:
            line = [-v for v in line]
        line[nv + m + i] = Fraction(1)
        tab.append(line)
    basis = [nv + m + i for i in range(m)]

    phase1 = [Fraction(0)] * width
    for line in tab:
        for j in range(nv + m):
            phase1[j] -= line[j]
        phase1[-1] -= line[-1]
    tab.append(phase1)
    _run(tab, basis, m, nv + m)
    if tab[m][-1] != 0:
        return ExactSolution("infeasible", [], None)
    # drive leftover artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= nv + m:
            j = next((j for j in range(nv + m) if tab[i][j] != 0), None)
            if j is not None:
                _pivot(tab, basis, i, j)
    tab.pop()

    cost = [Fraction(0)] * width
    for j in range(nv):
        cost[j] = Fraction(model.objective[j])
    for i, b in enumerate(basis):
        if cost[b] != 0:
            f = cost[b]
            cost = [a - f * v for a, v in zip(cost, tab[i])]
    tab.append(cost)
    status = _run(tab, basis, m, nv + m)
    if status != "optimal":
        return ExactSolution(status, [], None)
    x = [Fraction(0)] * nv
    for i, b in enumerate(basis):
        if b < nv:
            x[b] = tab[i][-1]
    x = [v + lo for v, lo in zip(x, lower)]
    value = sum((Fraction(c) * v for c, v in zip(model.objective, x)), Fraction(0))
    return ExactSolution("optimal", x, value)
