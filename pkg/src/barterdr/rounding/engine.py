"""Dependent rounding drivers: the value-balanced rounding and the edge-only baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..vbm import Expansion, VbmGraph, expand_floating
from .state import Decider, DefectError, RandomDecider, RoundingState, ScriptedDecider, TraceStep, ceil, floor
from .step import (
    alternating_signs,
    compute_alpha_beta,
    edge_only_magnitudes,
    round_alternating,
    round_pathseq,
    roundable_coloring,
)
from .walks import check_pathseq, find_ccc, find_cycle, tree_path

BARTER = "barter"
GKPS = "gkps"


@dataclass
class RoundingResult:
    x: tuple[int, ...]
    trace: list[TraceStep] = field(default_factory=list)


class _Checker:
    """Invariant checks evaluated between iterations."""

    def __init__(self, state: RoundingState, base_net: dict[str, Fraction], balance: bool = True):
        self.state = state
        self.base_net = base_net
        self.start_deg = list(state.deg)
        self.progress = state.progress()
        net = self.net()
        # agents whose net value is exactly zero stay balanced while they have
        # two or more floating vertices
        self.protected = {a for a, d in net.items() if d == 0} if balance else set()
        self.boundary(net)

    def net(self) -> dict[str, Fraction]:
        res = self.state.graph.net_values(self.state.x)
        return {a: self.base_net.get(a, Fraction(0)) + res[a] for a in self.state.graph.agents}

    def boundary(self, net=None) -> None:
        st = self.state
        net = net if net is not None else self.net()
        for a in sorted(self.protected):
            if net[a] != 0:
                raise DefectError(f"agent {a} lost balance (D = {net[a]}) while still protected")
            if st.agent_floating_count(a) <= 1:
                self.protected.discard(a)

    def after_step(self, preserve_degrees: bool) -> None:
        st = self.state
        prog = st.progress()
        if prog >= self.progress:
            raise DefectError("iteration made no progress")
        self.progress = prog
        for v, (d0, d) in enumerate(zip(self.start_deg, st.deg)):
            if preserve_degrees and d0 != d and not (floor(d0) <= d <= ceil(d0)):
                raise DefectError(f"degree of {st.graph.vertices[v].label} left [floor, ceil]")
            if d > st.graph.vertices[v].cap:
                raise DefectError(f"degree of {st.graph.vertices[v].label} exceeds its cap")
        self.boundary()


def preprocess_cycles(state: RoundingState, checker: _Checker | None = None) -> None:
    """Round cycles of G^r until it is a forest; vertex degrees are unchanged."""
    while True:
        cycle = find_cycle(state)
        if cycle is None:
            return
        signs = alternating_signs(len(cycle))
        alpha, beta = edge_only_magnitudes(state, cycle, signs)
        deg0 = list(state.deg)
        first = state.graph.edges[cycle[0]]
        round_alternating(state, "cycle", cycle, [(first.left, first.right)], alpha, beta)
        if state.deg != deg0:
            raise DefectError("cycle rounding changed a vertex degree")
        if checker:
            checker.after_step(True)


def _barter_loop(state: RoundingState, checker: _Checker | None) -> None:
    while state.floating_edges():
        adj = state.adjacency()
        ps = find_ccc(state, adj)
        if checker:
            check_pathseq(state, ps, adj)
        col = roundable_coloring(state, ps)
        alpha, beta = compute_alpha_beta(state, ps, col)
        round_pathseq(state, ps, col, alpha, beta)
        if checker:
            checker.after_step(True)


def _gkps_loop(state: RoundingState, checker: _Checker | None) -> None:
    while True:
        adj = state.adjacency()
        cycle = find_cycle(state, adj)
        if cycle is not None:
            edges = cycle
            e = state.graph.edges[cycle[0]]
            ends = [(e.left, e.right)]
            phase = "cycle"
        else:
            leaves = [v for v, nb in enumerate(adj) if len(nb) == 1]
            if not leaves:
                return
            u = leaves[0]
            comp = state.components(adj)
            w = next(v for v in leaves if v != u and comp[v] == comp[u])
            edges = list(tree_path(adj, u, w))
            ends = [(u, w)]
            phase = "path"
        alpha, beta = edge_only_magnitudes(state, edges, alternating_signs(len(edges)))
        round_alternating(state, phase, edges, ends, alpha, beta)
        if checker:
            checker.after_step(True)


def _run(graph: VbmGraph, x, decider: Decider, algorithm: str, check: bool) -> RoundingResult:
    exp: Expansion = expand_floating(graph, x)
    state = RoundingState(exp.graph, exp.x, decider)
    checker = _Checker(state, graph.net_values(exp.base), algorithm == BARTER) if check else None
    if algorithm == BARTER:
        preprocess_cycles(state, checker)
        _barter_loop(state, checker)
    elif algorithm == GKPS:
        _gkps_loop(state, checker)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if any(v.denominator != 1 for v in state.x):
        raise DefectError("rounding stopped with a fractional edge")
    return RoundingResult(exp.combine(state.x), state.trace)


def _decider_for(seed, decider):
    if decider is not None:
        return decider
    return RandomDecider(0 if seed is None else seed)


def barter_dr(
    graph: VbmGraph,
    x: Sequence[Fraction],
    seed=None,
    decider: Decider | None = None,
    check: bool = True,
) -> RoundingResult:
    """Round a feasible fractional vector to an integral one.

    Marginals are preserved in expectation, every vertex degree ends at its
    floor or ceiling, and each agent's net value moves by less than its
    largest item value.  With ``check`` on, internal invariants are asserted
    after every iteration and a violation raises :class:`DefectError`.
    """
    return _run(graph, x, _decider_for(seed, decider), BARTER, check)


def gkps_dr(
    graph: VbmGraph,
    x: Sequence[Fraction],
    seed=None,
    decider: Decider | None = None,
    check: bool = True,
) -> RoundingResult:
    """Edge-only bipartite dependent rounding (no value balancing)."""
    return _run(graph, x, _decider_for(seed, decider), GKPS, check)


ALGORITHMS = {BARTER: barter_dr, GKPS: gkps_dr}


class TooManyOutcomes(RuntimeError):
    pass


def enumerate_outcomes(
    graph: VbmGraph,
    x: Sequence[Fraction],
    algorithm: str = BARTER,
    max_leaves: int = 1 << 16,
    check: bool = True,
) -> dict[tuple[int, ...], Fraction]:
    """Exact output distribution, by walking every branch of the decision tree."""
    run = ALGORITHMS[algorithm]
    dist: dict[tuple[int, ...], Fraction] = {}
    stack: list[tuple[bool, ...]] = [()]
    leaves = 0
    while stack:
        prefix = stack.pop()
        dec = ScriptedDecider(prefix)
        res = run(graph, x, decider=dec, check=check)
        leaves += 1
        if leaves > max_leaves:
            raise TooManyOutcomes(f"more than {max_leaves} decision paths")
        prob = Fraction(1)
        for a, b, c in dec.log:
            prob *= b / (a + b) if c else a / (a + b)
        dist[res.x] = dist.get(res.x, Fraction(0)) + prob
        choices = tuple(c for _, _, c in dec.log)
        for j in range(len(prefix), len(choices)):
            stack.append(choices[:j] + (False,))
    return dist


class OutcomeTree:
    """Memoized decision tree for repeated sampling of one rounding problem.

    A sample consumes exactly the same random draws as a direct run with the
    same seed and returns the same vector; known branches are walked without
    re-running the rounding.
    """

    def __init__(self, graph: VbmGraph, x: Sequence[Fraction], algorithm: str = BARTER, check: bool = True):
        self.graph = graph
        self.x = tuple(x)
        self.run = ALGORITHMS[algorithm]
        self.check = check
        self.nodes: dict[tuple[bool, ...], tuple] = {}
        self.runs = 0

    def sample(self, seed) -> tuple[int, ...]:
        rng = RandomDecider(seed)
        prefix: tuple[bool, ...] = ()
        while True:
            node = self.nodes.get(prefix)
            if node is None:
                return self._expand(prefix, rng)
            if node[0] == "leaf":
                return node[1]
            _, a, b = node
            prefix += (rng.decide(a, b),)

    def _expand(self, prefix, rng) -> tuple[int, ...]:
        dec = ScriptedDecider(prefix, fallback=rng)
        res = self.run(self.graph, self.x, decider=dec, check=self.check)
        self.runs += 1
        path: tuple[bool, ...] = ()
        for a, b, c in dec.log:
            self.nodes.setdefault(path, ("node", a, b))
            path += (c,)
        self.nodes[path] = ("leaf", res.x)
        return res.x
