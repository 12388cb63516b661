from .exact import ExactSolution, solve_exact
from .model import LpModel, build_basic, build_sa1, check_point_exact, dump_lp
from .solve import (
    DEFAULT_TOL,
    LpSolution,
    Tolerances,
    all_three_sevenths,
    balanced_optimum,
    lp_value,
    max_violation,
    solve,
    solve_level,
    solve_sa1_lazy,
)

__all__ = [
    "DEFAULT_TOL",
    "ExactSolution",
    "LpModel",
    "LpSolution",
    "Tolerances",
    "all_three_sevenths",
    "build_basic",
    "build_sa1",
    "check_point_exact",
    "dump_lp",
    "balanced_optimum",
    "lp_value",
    "max_violation",
    "solve",
    "solve_exact",
    "solve_level",
    "solve_sa1_lazy",
]
