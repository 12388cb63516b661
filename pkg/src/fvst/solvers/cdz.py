"""Exact FVS for T5-free tournaments through the integral triangle relaxation."""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError, SolverError
from ..lp import DEFAULT_TOL, Tolerances, build_basic, solve
from ..structure import is_t5_free
from ..tournament import FvsSolution, WeightedTournament, verify_fvs
from .exact import EXACT_MAX_N, exact_fvs

log = logging.getLogger(__name__)


def cdz(wt: WeightedTournament, tol: Tolerances = DEFAULT_TOL, check: bool = True,
        stats: dict | None = None) -> FvsSolution:
    """Minimum-weight FVS of a T5-free tournament.

    Solves the triangle relaxation to a basic optimum, snaps it to 0/1 and
    verifies the result.  If snapping or verification fails (which the
    theory rules out on T5-free input) and n is small enough, the exact
    solver is used instead and ``stats["fallbacks"]`` is incremented.
    """
    if check:
        bad = is_t5_free(wt.t)
        if bad is not None:
            raise PreconditionError(f"input contains a T5 subtournament on {list(bad)}", witness=bad)
    sol = solve(build_basic(wt), "vertex", tol)
    reason = None
    if not sol.optimal:
        reason = f"LP status {sol.status}"
    else:
        x = sol.values
        snapped = np.rint(x)
        if np.max(np.abs(x - snapped), initial=0.0) > tol.int:
            reason = "fractional basic solution"
        else:
            res = verify_fvs(wt, [v for v in range(wt.n) if snapped[v] == 1])
            if not isinstance(res, FvsSolution):
                reason = f"snapped set misses triangle {tuple(res.triangle)}"
            elif abs(float(res.weight) - sol.objective) > tol.obj * max(1.0, abs(sol.objective)):
                reason = f"weight {res.weight} differs from LP value {sol.objective}"
            else:
                return FvsSolution(res.chosen, res.weight, res.certificate, (0, sol.objective))
    if stats is not None:
        stats["fallbacks"] = stats.get("fallbacks", 0) + 1
    if wt.n > EXACT_MAX_N:
        raise SolverError(f"cdz rounding failed ({reason}) and n={wt.n} is too large for the exact fallback")
    log.warning("cdz rounding failed (%s); falling back to the exact solver", reason)
    return exact_fvs(wt)


def cdz_value(wt: WeightedTournament, **kw) -> Fraction:
    return cdz(wt, **kw).weight
