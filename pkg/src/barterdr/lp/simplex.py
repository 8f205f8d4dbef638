"""Dense two-phase tableau simplex over exact rationals.

Bland's rule is used for both the entering and leaving choice, so the pivot
sequence (and therefore the returned vertex) is a deterministic function of
the input.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class SimplexResult:
    status: str
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    pivots: int = 0


class Tableau:
    """Standard-form tableau ``A z = b, z >= 0`` with an explicit basis."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows  # each row has ncols entries followed by the rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def copy(self) -> "Tableau":
        t = Tableau([r[:] for r in self.rows], self.basis[:], self.ncols)
        t.pivots = self.pivots
        return t

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        """``d_j = c_j - c_B B^-1 A_j``; the last entry is minus the objective value."""
        d = list(cost) + [ZERO]
        for row, b in zip(self.rows, self.basis):
            cb = cost[b]
            if cb:
                for j, v in enumerate(row):
                    if v:
                        d[j] -= cb * v
        return d

    def pivot(self, r: int, c: int, extra: list[list[Fraction]] = ()) -> None:
        row = self.rows[r]
        p = row[c]
        if p != ONE:
            row = [v / p for v in row]
            self.rows[r] = row
        nz = [j for j, v in enumerate(row) if v]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        for other in extra:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
        self.basis[r] = c
        self.pivots += 1

    def maximize(self, d: list[Fraction], allowed: Sequence[bool]) -> str:
        """Run Bland's rule on reduced-cost row ``d`` (mutated in place)."""
        while True:
            enter = next((j for j in range(self.ncols) if allowed[j] and d[j] > 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter, [d])

    def values(self) -> list[Fraction]:
        z = [ZERO] * self.ncols
        for row, b in zip(self.rows, self.basis):
            z[b] = row[-1]
        return z


class StandardForm:
    """``max c x`` subject to sparse rows with senses ``<=``, ``=``, ``>=`` and ``x >= 0``."""

    def __init__(
        self,
        n: int,
        rows: Sequence[Mapping[int, Fraction]],
        senses: Sequence[str],
        rhs: Sequence[Fraction],
        cost: Mapping[int, Fraction],
    ):
        self.n = n
        self.cost = [Fraction(cost.get(j, 0)) for j in range(n)]
        norm = []
        for coeffs, sense, b in zip(rows, senses, rhs):
            coeffs = {j: Fraction(v) for j, v in coeffs.items() if v}
            b = Fraction(b)
            if sense not in ("<=", "=", ">="):
                raise ValueError(f"bad sense {sense!r}")
            if not coeffs:
                if (sense == "<=" and b < 0) or (sense == ">=" and b > 0) or (sense == "=" and b):
                    norm.append(None)  # trivially infeasible
                continue
            if b < 0:
                coeffs = {j: -v for j, v in coeffs.items()}
                b = -b
                sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
            norm.append((coeffs, sense, b))
        self.trivially_infeasible = any(r is None for r in norm)
        self.norm = [r for r in norm if r is not None]
        self.n_slack = sum(1 for _, s, _ in self.norm if s != "=")
        self.n_art = sum(1 for _, s, _ in self.norm if s != "<=")

    def _initial(self) -> tuple[Tableau, list[bool]]:
        ncols = self.n + self.n_slack + self.n_art
        rows, basis = [], []
        slack = self.n
        art = self.n + self.n_slack
        is_art = [False] * ncols
        for coeffs, sense, b in self.norm:
            row = [ZERO] * (ncols + 1)
            for j, v in coeffs.items():
                row[j] = v
            row[-1] = b
            if sense == "<=":
                row[slack] = ONE
                basis.append(slack)
                slack += 1
            else:
                if sense == ">=":
                    row[slack] = -ONE
                    slack += 1
                row[art] = ONE
                is_art[art] = True
                basis.append(art)
                art += 1
            rows.append(row)
        return Tableau(rows, basis, ncols), is_art

    def phase_one(self) -> tuple[str, Tableau | None, list[bool]]:
        tab, is_art = self._initial()
        if self.trivially_infeasible:
            return INFEASIBLE, None, is_art
        if self.n_art:
            cost = [(-ONE if a else ZERO) for a in is_art]
            d = tab.reduced_costs(cost)
            allowed = [True] * tab.ncols
            tab.maximize(d, allowed)
            if d[-1] != 0:  # -(phase-one objective) = sum of artificials
                return INFEASIBLE, None, is_art
            # drive zero-level artificials out of the basis; drop redundant rows
            r = 0
            while r < len(tab.rows):
                if is_art[tab.basis[r]]:
                    row = tab.rows[r]
                    c = next((j for j in range(tab.ncols) if not is_art[j] and row[j]), None)
                    if c is None:
                        del tab.rows[r]
                        del tab.basis[r]
                        continue
                    tab.pivot(r, c)
                r += 1
        return OPTIMAL, tab, is_art

    def solve(self) -> tuple[SimplexResult, Tableau | None, list[bool] | None]:
        status, tab, is_art = self.phase_one()
        if status != OPTIMAL:
            return SimplexResult(INFEASIBLE), None, None
        allowed = [not a for a in is_art]
        cost = self.cost + [ZERO] * (tab.ncols - self.n)
        d = tab.reduced_costs(cost)
        status = tab.maximize(d, allowed)
        if status == UNBOUNDED:
            return SimplexResult(UNBOUNDED, pivots=tab.pivots), None, None
        z = tab.values()
        # columns whose reduced cost is strictly negative are zero on every optimum
        face = [allowed[j] and not d[j] < 0 for j in range(tab.ncols)]
        result = SimplexResult(OPTIMAL, z[: self.n], -d[-1], tab.pivots)
        self._face = face
        return result, tab, face


def solve_max(
    n: int,
    rows: Sequence[Mapping[int, Fraction]],
    senses: Sequence[str],
    rhs: Sequence[Fraction],
    cost: Mapping[int, Fraction],
) -> SimplexResult:
    """Basic optimal solution of ``max cost.x`` (Bland pivoting)."""
    return StandardForm(n, rows, senses, rhs, cost).solve()[0]


def central_optimum(
    n: int,
    rows: Sequence[Mapping[int, Fraction]],
    senses: Sequence[str],
    rhs: Sequence[Fraction],
    cost: Mapping[int, Fraction],
) -> tuple[SimplexResult, list[list[Fraction]]]:
    """Optimum in the relative interior of the optimal face.

    Starting from the Bland optimum, every standard-form coordinate that is
    zero at all vertices found so far is maximized over the optimal face; the
    result is the average of the distinct vertices collected.  Any coordinate
    that is not identically zero on the face is therefore positive at the
    returned point.  Returns the result and the vertices used.
    """
    form = StandardForm(n, rows, senses, rhs, cost)
    result, tab, face = form.solve()
    if result.status != OPTIMAL:
        return result, []
    found = [tab.values()]
    pivots = tab.pivots
    for k in range(tab.ncols):
        if not face[k] or any(z[k] > 0 for z in found):
            continue
        t = tab.copy()
        unit = [ZERO] * t.ncols
        unit[k] = ONE
        d = t.reduced_costs(unit)
        status = t.maximize(d, face)
        pivots += t.pivots - tab.pivots
        if status != OPTIMAL:
            raise RuntimeError("optimal face is unbounded in a standard-form coordinate")
        z = t.values()
        if z[k] > 0 and z not in found:
            found.append(z)
    m = len(found)
    center = [sum((z[j] for z in found), ZERO) / m for j in range(n)]
    verts = [z[:n] for z in found]
    return SimplexResult(OPTIMAL, center, result.objective, pivots), verts
