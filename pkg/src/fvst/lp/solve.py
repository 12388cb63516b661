"""Solving the relaxations.

The numerical work is delegated to HiGHS through :func:`scipy.optimize.linprog`.
``mode="vertex"`` forces the dual simplex so the returned point is a basic
solution; that matters for the integral-polytope path, where a basic optimum
of the triangle relaxation is automatically 0/1.  Every optimal answer is
re-checked against the model rows here, independently of the solver's own
status report.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..errors import SolverError
from ..tournament import WeightedTournament
from .model import (
    LpModel,
    _pair_var,
    _triangle_array,
    _triangle_fourths,
    ROW_LIFT_MINUS,
    ROW_LIFT_TIMES,
    add_rows,
    build_basic,
    build_sa1,
)

log = logging.getLogger(__name__)

SA1_MAX_N = 40
MAX_ITERATIONS = 1_000_000


@dataclass(frozen=True)
class Tolerances:
    feas: float = 1e-7
    obj: float = 1e-6
    int: float = 1e-4


DEFAULT_TOL = Tolerances()


@dataclass
class LpSolution:
    status: str
    values: np.ndarray
    objective: float
    is_vertex: bool
    max_violation: float = 0.0
    rounds: int = 1
    rows_used: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


_STATUS = {0: "optimal", 1: "iteration-limit", 2: "infeasible", 3: "unbounded"}


def max_violation(model: LpModel, x: np.ndarray) -> float:
    """Largest amount by which ``x`` breaks a row or a bound (0 if feasible)."""
    worst = 0.0
    if model.num_rows:
        worst = max(worst, float(np.max(model.rhs - model.A @ x, initial=0.0)))
    if len(x):
        worst = max(worst, float(np.max(model.lower - x)), float(np.max(x - model.upper)))
    return max(worst, 0.0)


def solve(model: LpModel, mode: str = "vertex", tol: Tolerances = DEFAULT_TOL) -> LpSolution:
    """Minimise the model objective.

    Infeasible, unbounded and iteration-limit outcomes are reported through
    ``status``; an "optimal" answer that fails the independent row check
    raises :class:`SolverError`.
    """
    if mode not in ("vertex", "any"):
        raise ValueError(f"unknown mode {mode!r}")
    c = model.objective_float()
    if model.num_vars == 0:
        return LpSolution("optimal", np.zeros(0), 0.0, True)
    if model.num_rows == 0:
        # minimum of a nonnegative objective over a box sits at the lower bounds
        x = np.where(c >= 0, model.lower, model.upper).astype(float)
        return LpSolution("optimal", x, float(c @ x), True)
    res = linprog(
        c,
        A_ub=-model.A,
        b_ub=-model.rhs,
        bounds=np.stack([model.lower, model.upper], axis=1),
        method="highs-ds" if mode == "vertex" else "highs",
        options={
            "maxiter": MAX_ITERATIONS,
            "primal_feasibility_tolerance": min(tol.feas, 1e-9),
            "dual_feasibility_tolerance": 1e-9,
            "presolve": True,
        },
    )
    status = _STATUS.get(res.status, "error")
    if status != "optimal":
        return LpSolution(status, np.zeros(model.num_vars), float("nan"), False, info={"message": res.message})
    x = np.asarray(res.x, dtype=float)
    viol = max_violation(model, x)
    obj = float(c @ x)
    if viol > tol.feas:
        raise SolverError(f"solver returned a point violating the model by {viol:.3g}")
    if abs(obj - res.fun) > tol.obj * max(1.0, abs(obj)):
        raise SolverError(f"objective mismatch: {obj} vs reported {res.fun}")
    return LpSolution(
        "optimal", x, obj, mode == "vertex", max_violation=viol, rows_used=model.num_rows,
        info={"iterations": int(res.nit)},
    )


def balanced_optimum(model: LpModel, sol: LpSolution, tol: Tolerances = DEFAULT_TOL) -> LpSolution:
    """Among optimal points, one minimising the largest vertex variable.

    Solved as one more LP over the optimal face (the row ``c.x <= z*`` plus an
    auxiliary ``s >= x_v`` for every vertex).  Any optimum carries the
    rounding guarantees; this one spreads mass evenly, so it is typically
    fractional where a basic optimum would be 0/1.
    """
    if not sol.optimal or model.num_rows == 0 or model.n == 0:
        return sol
    c = model.objective_float()
    z = sol.objective
    nv, n = model.num_vars, model.n
    cap = z + 1e-9 * max(1.0, abs(z))
    cap_rows = sparse.csr_matrix(
        (np.concatenate([np.ones(n), -np.ones(n)]),
         (np.concatenate([np.arange(n), np.arange(n)]), np.concatenate([np.arange(n), np.full(n, nv)]))),
        shape=(n, nv + 1),
    )
    A_ub = sparse.vstack([
        sparse.hstack([-model.A, sparse.csr_matrix((model.num_rows, 1))]),
        sparse.csr_matrix(np.append(c, 0.0).reshape(1, -1)),
        cap_rows,
    ], format="csr")
    b_ub = np.concatenate([-model.rhs, [cap], np.zeros(n)])
    bounds = np.vstack([np.stack([model.lower, model.upper], axis=1), [[0.0, 1.0]]])
    obj = np.zeros(nv + 1)
    obj[nv] = 1.0
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs-ds",
                  options={"primal_feasibility_tolerance": min(tol.feas, 1e-9)})
    if res.status != 0:
        log.warning("balanced optimum failed (%s); keeping the basic optimum", res.message)
        return sol
    x = np.asarray(res.x[:nv], dtype=float)
    viol = max_violation(model, x)
    if viol > tol.feas:
        raise SolverError(f"balanced optimum violates the model by {viol:.3g}")
    return LpSolution("optimal", x, float(c @ x), False, viol, sol.rounds, sol.rows_used,
                      {**sol.info, "balanced": True})


def _separate_sa1(n: int, tri: np.ndarray, x: np.ndarray, eps: float, limit: int):
    """Per-(triangle, d) rows violated by ``x`` by more than ``eps``."""
    ti, d = _triangle_fourths(n, tri)
    a, b, c = tri[ti, 0], tri[ti, 1], tri[ti, 2]
    pad, pbd, pcd = _pair_var(n, a, d), _pair_var(n, b, d), _pair_var(n, c, d)
    pairs_sum = x[pad] + x[pbd] + x[pcd]
    times_gap = x[d] - pairs_sum
    minus_gap = 1 + pairs_sum - (x[a] + x[b] + x[c] + x[d])
    blocks = []
    for gap, kind in ((times_gap, ROW_LIFT_TIMES), (minus_gap, ROW_LIFT_MINUS)):
        hit = np.nonzero(gap > eps)[0]
        if len(hit) > limit:
            hit = hit[np.argsort(-gap[hit], kind="stable")[:limit]]
            hit.sort()
        if not len(hit):
            continue
        if kind == ROW_LIFT_TIMES:
            cols = np.stack([pad[hit], pbd[hit], pcd[hit], d[hit]], axis=1)
            blocks.append((cols, [1, 1, 1, -1], np.zeros(len(hit)), kind))
        else:
            cols = np.stack([a[hit], b[hit], c[hit], d[hit], pad[hit], pbd[hit], pcd[hit]], axis=1)
            blocks.append((cols, [1, 1, 1, 1, -1, -1, -1], np.ones(len(hit)), kind))
    return blocks


def solve_sa1_lazy(wt: WeightedTournament, mode: str = "vertex", tol: Tolerances = DEFAULT_TOL,
                   batch: int = 20000) -> LpSolution:
    """Solve the lifted LP by adding violated per-d rows in rounds.

    Starts from the per-triangle and pair-bound rows only.  Termination means
    the last point satisfies every row of the full model within ``tol.feas``,
    and it is optimal for a relaxation of that model, hence optimal for it.
    """
    model = build_sa1(wt, with_d_rows=False)
    tri = _triangle_array(wt)
    rounds = 0
    while True:
        rounds += 1
        sol = solve(model, mode, tol)
        if not sol.optimal:
            return sol
        blocks = _separate_sa1(wt.n, tri, sol.values, tol.feas, batch)
        if not blocks:
            sol.rounds = rounds
            sol.rows_used = model.num_rows
            return sol
        model = add_rows(model, blocks)
        log.debug("lazy SA1 round %d: %d rows", rounds, model.num_rows)


def solve_level(wt: WeightedTournament, level: int, mode: str = "vertex",
                tol: Tolerances = DEFAULT_TOL, lazy: bool = False, max_n: int | None = SA1_MAX_N) -> LpSolution:
    if level == 0:
        return solve(build_basic(wt), mode, tol)
    if level != 1:
        raise ValueError("only levels 0 and 1 are supported")
    if max_n is not None and wt.n > max_n:
        raise SolverError(f"lifted model capped at n <= {max_n}, got {wt.n}; raise the cap explicitly")
    if lazy:
        return solve_sa1_lazy(wt, mode, tol)
    return solve(build_sa1(wt), mode, tol)


def lp_value(wt: WeightedTournament, level: int, tol: Tolerances = DEFAULT_TOL, lazy: bool = False,
             max_n: int | None = SA1_MAX_N) -> float:
    """Optimal value of the basic relaxation (level 0) or its lift (level 1)."""
    sol = solve_level(wt, level, "vertex", tol, lazy, max_n)
    if not sol.optimal:
        raise SolverError(f"level-{level} relaxation returned status {sol.status}")
    return sol.objective


def all_three_sevenths(n: int) -> list[Fraction]:
    """x_v = 3/7 on vertices and x_uv = 1/7 on pairs, in model variable order."""
    return [Fraction(3, 7)] * n + [Fraction(1, 7)] * (n * (n - 1) // 2)
