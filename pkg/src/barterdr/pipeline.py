"""End-to-end solve: instance to VBM graph, LP optimum, dependent rounding, allocation."""
from __future__ import annotations

from dataclasses import dataclass

from .lp import LpProblem, LpSolution, build_lp, solve_lp
from .model import Allocation, BarterInstance, NetValueReport, evaluate_allocation
from .rounding import ALGORITHMS, BARTER, RoundingResult
from .vbm import VbmGraph, allocation_from_integral, build_vbm


@dataclass
class Prepared:
    """Everything that stays fixed across repeated roundings of one instance."""

    instance: BarterInstance
    graph: VbmGraph
    problem: LpProblem
    lp: LpSolution


@dataclass
class Solved:
    prepared: Prepared
    rounding: RoundingResult
    allocation: Allocation
    report: NetValueReport


def prepare(instance: BarterInstance, fairness: bool = True, optimum: str = "central") -> Prepared:
    """Build the graph and solve the LP; raises InfeasibleWithFairness when floors cannot be met."""
    graph = build_vbm(instance)
    problem = build_lp(graph, instance.fairness if fairness else ())
    lp = solve_lp(problem, optimum).require_optimal()
    return Prepared(instance, graph, problem, lp)


def round_prepared(prep: Prepared, seed=0, algorithm: str = BARTER, check: bool = True) -> Solved:
    res = ALGORITHMS[algorithm](prep.graph, prep.lp.x, seed=seed, check=check)
    alloc = allocation_from_integral(prep.graph, res.x)
    return Solved(prep, res, alloc, evaluate_allocation(prep.instance, alloc))


def solve(
    instance: BarterInstance,
    seed=0,
    fairness: bool = True,
    algorithm: str = BARTER,
    optimum: str = "central",
) -> Solved:
    return round_prepared(prepare(instance, fairness, optimum), seed, algorithm)
