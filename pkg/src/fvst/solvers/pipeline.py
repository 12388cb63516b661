"""The 7/3-approximation: round the lifted LP, then layer the light residual.

Phase one solves the one-round lift, takes every vertex at value >= 3/7,
and then repeatedly (a) sets aside vertices that lie on no remaining
triangle and (b) takes every vertex at value >= 1/2 in an optimum of the
plain triangle relaxation of what is left.  Phase two runs :func:`layers`
on the residual, which is light.

Thresholds are applied as ``x >= tau - tol.int`` so solver noise never
causes under-rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import InvariantError, PreconditionError
from ..lp import DEFAULT_TOL, LpSolution, Tolerances, build_sa1, balanced_optimum, solve_level
from ..lp.solve import SA1_MAX_N
from ..structure import first_heavy_triangle
from ..tournament import (
    FvsSolution,
    WeightedTournament,
    first_triangle,
    iter_bits,
    to_mask,
    triangles_in,
    verify_fvs,
)
from .layers import LayeringTrace, layers

THREE_SEVENTHS = Fraction(3, 7)
ONE_HALF = Fraction(1, 2)


@dataclass
class RoundingTrace:
    sa1_solution: LpSolution
    F_steps: list[frozenset[int]] = field(default_factory=list)
    Z_steps: list[frozenset[int]] = field(default_factory=list)
    sa0_values: list[float] = field(default_factory=list)
    residual: frozenset[int] = frozenset()
    early_exit: bool = False
    preselected: frozenset[int] = frozenset()  # zero-weight vertices taken up front

    @property
    def F(self) -> frozenset[int]:
        return frozenset().union(*self.F_steps)

    @property
    def Z(self) -> frozenset[int]:
        return frozenset().union(*self.Z_steps)

    @property
    def sa1_value(self) -> float:
        return self.sa1_solution.objective

    @property
    def residual_sa0(self) -> float:
        """SA0 of the final residual (0 when it is empty)."""
        if not self.residual or not self.sa0_values:
            return 0.0
        return self.sa0_values[-1]

    def relabel(self, mapping: dict[int, int]) -> "RoundingTrace":
        def m(s):
            return frozenset(mapping[v] for v in s)

        return RoundingTrace(
            self.sa1_solution,
            [m(s) for s in self.F_steps],
            [m(s) for s in self.Z_steps],
            list(self.sa0_values),
            m(self.residual),
            self.early_exit,
            m(self.preselected),
        )

    def to_dict(self) -> dict:
        return {
            "sa1_value": self.sa1_value,
            "F_steps": [sorted(s) for s in self.F_steps],
            "Z_steps": [sorted(s) for s in self.Z_steps],
            "sa0_values": self.sa0_values,
            "residual": sorted(self.residual),
            "early_exit": self.early_exit,
            "preselected": sorted(self.preselected),
        }


def _gate(values, tau: Fraction, tol: Tolerances) -> list[int]:
    cut = float(tau) - tol.int
    return [v for v, x in enumerate(values) if x >= cut]


def _sa0_on(wt: WeightedTournament, mask: int, tol: Tolerances) -> tuple[LpSolution, dict[int, int]]:
    sub, idx = wt.induced(iter_bits(mask))
    return solve_level(sub, 0, "vertex", tol), idx


def rounding_phase(wt: WeightedTournament, tol: Tolerances = DEFAULT_TOL, lazy: bool = False,
                   stop_if_fvs: bool = False, max_n: int | None = SA1_MAX_N,
                   balanced: bool = False) -> RoundingTrace:
    """Iterative rounding; the returned trace partitions V into F, Z and the residual.

    By default the lifted LP is solved to a basic optimum.  With ``balanced``
    the optimum minimising the largest vertex value is rounded instead; the
    guarantees hold for any optimum.
    """
    if any(x <= 0 for x in wt.w):
        raise PreconditionError("rounding needs strictly positive weights")
    t = wt.t
    sa1 = solve_level(wt, 1, "vertex", tol, lazy=lazy, max_n=max_n)
    if not sa1.optimal:
        raise InvariantError(f"lifted LP returned status {sa1.status}")
    if balanced:
        sa1 = balanced_optimum(build_sa1(wt), sa1, tol)
    F0 = frozenset(_gate(sa1.values[: t.n], THREE_SEVENTHS, tol))
    trace = RoundingTrace(sa1, [F0])
    F = to_mask(F0)
    if stop_if_fvs and first_triangle(t, t.all_mask & ~F) is None:
        trace.early_exit = True
        trace.residual = frozenset(iter_bits(t.all_mask & ~F))
        return trace
    Z = 0
    while True:
        rest = t.all_mask & ~F & ~Z
        on_tri = 0
        for tri in triangles_in(t, rest):
            on_tri |= to_mask(tri)
        trace.Z_steps.append(frozenset(iter_bits(rest & ~on_tri)))
        Z |= rest & ~on_tri
        rest = on_tri
        if not rest:
            break
        sol, idx = _sa0_on(wt, rest, tol)
        if not sol.optimal:
            raise InvariantError(f"triangle relaxation returned status {sol.status}")
        trace.sa0_values.append(sol.objective)
        back = {new: old for old, new in idx.items()}
        added = frozenset(back[v] for v in _gate(sol.values, ONE_HALF, tol))
        trace.F_steps.append(added)
        F |= to_mask(added)
        if not added or not t.all_mask & ~F & ~Z:
            break
    trace.residual = frozenset(iter_bits(t.all_mask & ~F & ~Z))
    return trace


@dataclass
class PipelineResult:
    solution: FvsSolution
    rounding: RoundingTrace
    layering: LayeringTrace | None
    stats: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.solution, self.rounding, self.layering))


def fvst_7_3(wt: WeightedTournament, tol: Tolerances = DEFAULT_TOL, lazy: bool = False, check: bool = True,
             max_n: int | None = SA1_MAX_N, balanced: bool = False) -> PipelineResult:
    """Feedback vertex set of weight at most 7/3 times the lifted LP value.

    Zero-weight vertices are put in the solution first and removed; the
    algorithm then runs on the positive-weight rest.  With ``check`` on, the
    intermediate guarantees (residual light, residual LP = w/3, layering and
    rounding weight bounds) are verified and an :class:`InvariantError`
    carrying the instance and traces is raised on any breach.
    """
    t = wt.t
    zero = frozenset(v for v in range(t.n) if wt.w[v] == 0)
    pos, idx = wt.induced(v for v in range(t.n) if v not in zero)
    back = {new: old for old, new in idx.items()}
    stats: dict = {"fallbacks": 0}

    rtrace = rounding_phase(pos, tol, lazy=lazy, stop_if_fvs=True, max_n=max_n, balanced=balanced)
    ltrace = None
    chosen_pos = set(rtrace.F)
    problems: list[str] = []
    if not rtrace.early_exit and rtrace.residual:
        res_wt, res_idx = pos.induced(rtrace.residual)
        if check:
            problems += _rounding_checks(pos, rtrace, res_wt, tol)
        f_prime, ltrace_res = layers(res_wt, tol, check=check, stats=stats)
        res_back = {new: old for old, new in res_idx.items()}
        chosen_pos |= {res_back[v] for v in f_prime.chosen}
        ltrace = ltrace_res.relabel({new: back[old] for new, old in res_back.items()})
        if check and rtrace.sa0_values:
            bound = Fraction(9, 4) * Fraction(rtrace.residual_sa0)
            if float(f_prime.weight) > float(bound) * (1 + tol.obj) + tol.obj:
                problems.append(f"layering weight {f_prime.weight} exceeds 9/4 * SA0 = {float(bound)}")
    rtrace = rtrace.relabel(back)
    rtrace.preselected = zero
    chosen = {back[v] for v in chosen_pos} | zero
    res = verify_fvs(wt, chosen)
    sa1 = rtrace.sa1_value
    bundle = {"instance": t.bitstring(), "weights": [str(x) for x in wt.w], "rounding": rtrace.to_dict(),
              "layering": ltrace.to_dict() if ltrace else None}
    if not isinstance(res, FvsSolution):
        raise InvariantError(f"output misses triangle {tuple(res.triangle)}", bundle)
    if float(res.weight) > 7 / 3 * sa1 * (1 + tol.obj) + tol.obj:
        problems.append(f"weight {res.weight} exceeds 7/3 * SA1 = {7 / 3 * sa1}")
    if problems:
        raise InvariantError("; ".join(problems), bundle)
    sol = FvsSolution(res.chosen, res.weight, res.certificate, (1, sa1))
    return PipelineResult(sol, rtrace, ltrace, stats)


def _rounding_checks(pos: WeightedTournament, rtrace: RoundingTrace, res_wt: WeightedTournament,
                     tol: Tolerances) -> list[str]:
    problems = []
    t = pos.t
    after_gate = t.all_mask & ~to_mask(rtrace.F_steps[0])
    gate_wt, _ = pos.induced(iter_bits(after_gate))
    if first_heavy_triangle(gate_wt.t) is not None:
        problems.append("tournament left after the 3/7 gate is heavy")
    sa0 = rtrace.residual_sa0
    third = float(res_wt.total()) / 3
    if abs(sa0 - third) > tol.obj * max(1.0, third):
        problems.append(f"residual LP value {sa0} differs from w/3 = {third}")
    wF = float(pos.weight(rtrace.F))
    factor = 1 / (3 / 7 - tol.int)
    if wF > factor * (rtrace.sa1_value - sa0) * (1 + tol.obj) + tol.obj:
        problems.append(f"w(F)={wF} exceeds 7/3 * (SA1 - SA0(residual))")
    return problems
