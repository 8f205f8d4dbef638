"""Exhaustive integral solver for small instances and the adversarial instance families."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (
    UNIT,
    Allocation,
    BarterInstance,
    ValidationError,
    make_instance,
)
from .vbm import VbmGraph, allocation_from_integral, build_vbm


class TooLarge(ValueError):
    """The instance exceeds the enumeration budget."""


class OddSum(ValueError):
    """A partition input whose total is odd has no balanced split."""


@dataclass(frozen=True)
class OracleResult:
    best_utility: Fraction | None
    best_allocation: Allocation | None
    has_nonempty_balanced: bool
    enumerated_count: int


def _ranges(graph: VbmGraph) -> list[int]:
    return [min(graph.vertices[e.left].cap, graph.vertices[e.right].cap) for e in graph.edges]


def _check_budget(graph: VbmGraph, edge_limit: int) -> list[int]:
    ub = _ranges(graph)
    # a vector of unit edges counts as 2^|E|; capacitated edges count (ub+1) each
    if math.prod(u + 1 for u in ub) > 2 ** edge_limit:
        raise TooLarge(f"{len(ub)} edges with caps {ub} exceed 2^{edge_limit} vectors")
    return ub


def _fairness_rows(instance: BarterInstance, graph: VbmGraph):
    rows = []
    for group in instance.fairness:
        coef = [
            graph.vertices[e.right].value if graph.vertices[e.right].agent in group.agents else 0
            for e in graph.edges
        ]
        rows.append((coef, group.floor))
    return rows


class _Best:
    def __init__(self, graph: VbmGraph, fair):
        self.graph = graph
        self.fair = fair
        self.utility: Fraction | None = None
        self.vector: tuple[int, ...] | None = None
        self.nonempty = False
        self.count = 0

    def offer(self, x: Sequence[int]) -> None:
        """Record ``x``, which already satisfies the degree and barter rows."""
        self.count += 1
        for coef, floor in self.fair:
            if sum(c * v for c, v in zip(coef, x) if v) < floor:
                return
        if any(x):
            self.nonempty = True
        u = self.graph.objective(x)
        if self.utility is None or u > self.utility:
            self.utility, self.vector = u, tuple(x)

    def result(self) -> OracleResult:
        alloc = None if self.vector is None else allocation_from_integral(self.graph, self.vector)
        return OracleResult(self.utility, alloc, self.nonempty, self.count)


def _int_values(graph: VbmGraph) -> list[int]:
    scale = math.lcm(*(e.value.denominator for e in graph.edges)) if graph.edges else 1
    return [int(e.value * scale) for e in graph.edges]


def brute_force(instance: BarterInstance, edge_limit: int = 24) -> OracleResult:
    """Best integral allocation by depth-first enumeration with exact pruning.

    A branch is cut only when some vertex is over capacity or some agent's
    running net value can no longer return to zero with the remaining edges.
    """
    graph = build_vbm(instance)
    ub = _check_budget(graph, edge_limit)
    m = len(graph.edges)
    val = _int_values(graph)
    agent_ix = {a: i for i, a in enumerate(graph.agents)}
    giver = [agent_ix[graph.vertices[e.left].agent] for e in graph.edges]
    taker = [agent_ix[graph.vertices[e.right].agent] for e in graph.edges]
    # remaining value each agent could still give / receive from edge k onward
    give_rem = [[0] * len(agent_ix) for _ in range(m + 1)]
    recv_rem = [[0] * len(agent_ix) for _ in range(m + 1)]
    for k in range(m - 1, -1, -1):
        give_rem[k] = give_rem[k + 1][:]
        recv_rem[k] = recv_rem[k + 1][:]
        give_rem[k][giver[k]] += val[k] * ub[k]
        recv_rem[k][taker[k]] += val[k] * ub[k]
    cap = [v.cap for v in graph.vertices]
    deg = [0] * len(graph.vertices)
    net = [0] * len(agent_ix)
    x = [0] * m
    best = _Best(graph, _fairness_rows(instance, graph))

    def viable(k: int) -> bool:
        g, r = give_rem[k], recv_rem[k]
        return all(-g[i] <= d <= r[i] for i, d in enumerate(net))

    def visit(k: int) -> None:
        if k == m:
            best.offer(x)
            return
        e = graph.edges[k]
        for c in range(ub[k] + 1):
            if deg[e.left] + c > cap[e.left] or deg[e.right] + c > cap[e.right]:
                break
            x[k] = c
            deg[e.left] += c
            deg[e.right] += c
            net[giver[k]] += c * val[k]
            net[taker[k]] -= c * val[k]
            if viable(k + 1):
                visit(k + 1)
            deg[e.left] -= c
            deg[e.right] -= c
            net[giver[k]] -= c * val[k]
            net[taker[k]] += c * val[k]
        x[k] = 0

    visit(0)
    return best.result()


def brute_force_unpruned(instance: BarterInstance, edge_limit: int = 16) -> OracleResult:
    """Reference enumeration of every vector in the box, filtered afterwards."""
    graph = build_vbm(instance)
    ub = _check_budget(graph, edge_limit)
    best = _Best(graph, _fairness_rows(instance, graph))
    for x in itertools.product(*(range(u + 1) for u in ub)):
        if any(d > v.cap for d, v in zip(graph.degrees(x), graph.vertices)):
            continue
        if any(graph.net_values(x).values()):
            continue
        best.offer(x)
    return best.result()


def subset_sum_exists(numbers: Sequence[int], target: int) -> bool:
    """Bitset dynamic program over non-negative integers."""
    if target < 0:
        return False
    reach = 1
    mask = (1 << (target + 1)) - 1
    for a in numbers:
        if a < 0:
            raise ValueError("subset_sum_exists expects non-negative integers")
        reach = (reach | (reach << a)) & mask
    return bool(reach >> target & 1)


def partition_to_bsv(numbers: Sequence[int]) -> BarterInstance:
    """Two-agent instance with a non-empty balanced allocation iff ``numbers`` splits evenly.

    Agent 1 owns one item per number (valued by it) and wants a single item
    worth half the total, which agent 2 owns and trades for any of them.
    """
    nums = [int(a) for a in numbers]
    if not nums or any(a <= 0 for a in nums):
        raise ValidationError("partition input must be a non-empty list of positive integers")
    total = sum(nums)
    if total % 2:
        raise OddSum(f"sum {total} is odd")
    small = [f"i{j + 1}" for j in range(len(nums))]
    big = f"i{len(nums) + 1}"
    values = dict(zip(small, nums))
    values[big] = total // 2
    return make_instance(values, {"1": (small, [big]), "2": ([big], small)})


def gap_family(n: int) -> BarterInstance:
    """Two agents, one item each (values 1 and 1/n), each wanting the other's."""
    if n < 1:
        raise ValueError("gap_family needs n >= 1")
    return make_instance(
        {"j1": 1, "j2": Fraction(1, n)},
        {"1": (["j1"], ["j2"]), "2": (["j2"], ["j1"])},
    )


def gkps_worst_case() -> BarterInstance:
    """Two agents and items 1..4 valued 10, 10, 20, 20 with unit weights.

    Agent 1 owns 3, 4 and wants 1, 2; agent 2 the reverse.  Edge-only dependent
    rounding of its LP optimum can leave agent 2 giving both 20-valued items
    and receiving nothing.
    """
    return make_instance(
        {"1": 10, "2": 10, "3": 20, "4": 20},
        {"1": (["3", "4"], ["1", "2"]), "2": (["1", "2"], ["3", "4"])},
        weights=UNIT,
    )


def random_instance(
    agents: int,
    items: int,
    density: Fraction | float = Fraction(1, 2),
    value_range: tuple[int, int] = (1, 5),
    cap_range: tuple[int, int] = (1, 1),
    seed=0,
    weights: str = UNIT,
) -> BarterInstance:
    """Reproducible random instance.

    Each item gets an owner set and a wisher set; every (agent, item) pair
    joins the owners with probability ``density / 2`` and otherwise the
    wishers with probability ``density / 2``.  Values are integers drawn from
    ``value_range`` and capacities from ``cap_range`` (both inclusive).
    """
    density = Fraction(density)
    if agents < 1 or items < 1:
        raise ValueError("agents and items must be positive")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    lo, hi = value_range
    clo, chi = cap_range
    ids = [f"j{k + 1}" for k in range(items)]
    values = {j: int(rng.integers(lo, hi + 1)) for j in ids}
    table = {}
    half = float(density) / 2
    for a in range(agents):
        have, wish = {}, {}
        for j in ids:
            u = rng.random()
            if u < half:
                have[j] = int(rng.integers(clo, chi + 1))
            elif u < 2 * half:
                wish[j] = int(rng.integers(clo, chi + 1))
        table[f"a{a + 1}"] = (have, wish)
    return make_instance(values, table, weights=weights)
