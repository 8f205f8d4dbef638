"""LP relaxation of the value-balanced matching program."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..model import FairnessGroup, format_fraction
from ..vbm import LEFT, RIGHT, VbmGraph
from . import simplex

OPTIMAL = simplex.OPTIMAL
INFEASIBLE = simplex.INFEASIBLE


class InfeasibleWithFairness(RuntimeError):
    """The fairness floors cannot be met by any fractional allocation."""


class LpDefect(RuntimeError):
    """The solver reached a state the formulation rules out (e.g. unboundedness)."""


@dataclass(frozen=True)
class Constraint:
    name: str
    kind: str  # "degree", "barter" or "fairness"
    coeffs: dict[int, Fraction]
    sense: str
    rhs: Fraction


@dataclass(frozen=True)
class LpProblem:
    graph: VbmGraph
    names: tuple[str, ...]
    upper: tuple[int, ...]
    constraints: tuple[Constraint, ...]
    objective: dict[int, Fraction]

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def count(self, kind: str) -> int:
        return sum(1 for c in self.constraints if c.kind == kind)


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: tuple[Fraction, ...] = ()
    objective: Fraction | None = None
    vertices: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False)

    def require_optimal(self) -> "LpSolution":
        if self.status != OPTIMAL:
            raise InfeasibleWithFairness("fairness floors cannot be met")
        return self


def build_lp(graph: VbmGraph, fairness: Iterable[FairnessGroup] | None = None) -> LpProblem:
    names = tuple(f"x{k}" for k in range(len(graph.edges)))
    upper = tuple(
        min(graph.vertices[e.left].cap, graph.vertices[e.right].cap) for e in graph.edges
    )
    cons: list[Constraint] = []
    for idx, v in enumerate(graph.vertices):
        coeffs = {k: Fraction(1) for k in graph.incident[idx]}
        cons.append(Constraint(f"deg_{v.label}", "degree", coeffs, "<=", Fraction(v.cap)))
    for agent in graph.agents:
        members = graph.kappa[agent]
        if not members:
            continue
        coeffs: dict[int, Fraction] = {}
        for idx in members:
            v = graph.vertices[idx]
            sign = 1 if v.side == LEFT else -1
            for k in graph.incident[idx]:
                coeffs[k] = coeffs.get(k, Fraction(0)) + sign * v.value
        coeffs = {k: c for k, c in coeffs.items() if c}
        cons.append(Constraint(f"barter_{agent}", "barter", coeffs, "=", Fraction(0)))
    for p, group in enumerate(fairness or ()):
        coeffs = {}
        for idx, v in enumerate(graph.vertices):
            if v.side == RIGHT and v.agent in group.agents:
                for k in graph.incident[idx]:
                    coeffs[k] = coeffs.get(k, Fraction(0)) + v.value
        cons.append(Constraint(f"fair_{p}", "fairness", coeffs, ">=", group.floor))
    objective = {k: e.weight for k, e in enumerate(graph.edges) if e.weight}
    return LpProblem(graph, names, upper, tuple(cons), objective)


def solve_lp(problem: LpProblem, optimum: str = "central") -> LpSolution:
    """Solve exactly.

    ``optimum="vertex"`` returns the basic optimum reached by Bland pivoting;
    ``"central"`` (default) returns the barycentre of a deterministic set of
    optimal vertices, which lies in the relative interior of the optimal face.
    Variable upper bounds are implied by the degree rows and are not added.
    """
    if optimum not in ("central", "vertex"):
        raise ValueError(f"unknown optimum mode {optimum!r}")
    rows = [c.coeffs for c in problem.constraints]
    senses = [c.sense for c in problem.constraints]
    rhs = [c.rhs for c in problem.constraints]
    args = (problem.n_vars, rows, senses, rhs, problem.objective)
    if optimum == "vertex":
        res = simplex.solve_max(*args)
        verts = [res.x] if res.x is not None else []
    else:
        res, verts = simplex.central_optimum(*args)
    if res.status == simplex.UNBOUNDED:
        raise LpDefect("LP reported unbounded although every variable is box-bounded")
    if res.status == INFEASIBLE:
        if problem.count("fairness") == 0:
            raise LpDefect("LP infeasible without fairness rows; x = 0 should be feasible")
        return LpSolution(INFEASIBLE)
    return LpSolution(OPTIMAL, tuple(res.x), res.objective, tuple(tuple(v) for v in verts))


def check_solution(problem: LpProblem, x: Sequence[Fraction]) -> list[str]:
    """Names of violated constraints (exact); empty when ``x`` is feasible."""
    bad = []
    for k, val in enumerate(x):
        if val < 0 or val > problem.upper[k]:
            bad.append(f"bound_{problem.names[k]}")
    for c in problem.constraints:
        lhs = sum((v * x[k] for k, v in c.coeffs.items()), Fraction(0))
        ok = {"<=": lhs <= c.rhs, "=": lhs == c.rhs, ">=": lhs >= c.rhs}[c.sense]
        if not ok:
            bad.append(c.name)
    return bad


def _term(coef: Fraction, name: str, first: bool) -> str:
    mag = abs(coef)
    body = name if mag == 1 else f"{format_fraction(mag)} {name}"
    if first:
        return f"- {body}" if coef < 0 else body
    return f"{'-' if coef < 0 else '+'} {body}"


def dump_lp(problem: LpProblem) -> str:
    """Plain-text LP in CPLEX-like layout, with exact ``p/q`` coefficients."""
    lines = ["\\ edges: " + ", ".join(
        f"{problem.names[k]}={problem.graph.edge_label(k)}" for k in range(problem.n_vars)
    )]

    def expr(coeffs: dict[int, Fraction]) -> str:
        items = sorted(coeffs.items())
        if not items:
            return "0"
        return " ".join(_term(c, problem.names[k], i == 0) for i, (k, c) in enumerate(items))

    lines += ["Maximize", f" obj: {expr(problem.objective)}", "Subject To"]
    for c in problem.constraints:
        lines.append(f" {c.name}: {expr(c.coeffs)} {c.sense} {format_fraction(c.rhs)}")
    lines.append("Bounds")
    for name, ub in zip(problem.names, problem.upper):
        lines.append(f" 0 <= {name} <= {ub}")
    lines.append("End")
    return "\n".join(lines) + "\n"
