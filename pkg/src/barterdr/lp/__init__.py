from .problem import (
    INFEASIBLE,
    OPTIMAL,
    Constraint,
    InfeasibleWithFairness,
    LpDefect,
    LpProblem,
    LpSolution,
    build_lp,
    check_solution,
    dump_lp,
    solve_lp,
)

__all__ = [
    "INFEASIBLE",
    "OPTIMAL",
    "Constraint",
    "InfeasibleWithFairness",
    "LpDefect",
    "LpProblem",
    "LpSolution",
    "build_lp",
    "check_solution",
    "dump_lp",
    "solve_lp",
]
