"""Mutable rounding state, random deciders and the per-iteration trace."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence

import numpy as np

from ..model import format_fraction
from ..vbm import VbmGraph

TWO64 = 1 << 64


class DefectError(AssertionError):
    """An internal invariant of the rounding procedure was violated."""


class Decider(Protocol):
    def decide(self, alpha: Fraction, beta: Fraction) -> bool:
        """True selects the alpha event, which must happen w.p. beta / (alpha + beta)."""


def alpha_event(draw: int, alpha: Fraction, beta: Fraction) -> bool:
    """Exact comparison ``draw / 2**64 < beta / (alpha + beta)``."""
    total = alpha + beta
    # draw * total < beta * 2**64, cleared of denominators
    return draw * total.numerator * beta.denominator < beta.numerator * total.denominator * TWO64


class RandomDecider:
    """One uniform 64-bit draw per decision from a PCG64 stream."""

    def __init__(self, seed=0):
        self._bits = np.random.default_rng(seed).bit_generator
        self.draws = 0

    def draw(self) -> int:
        self.draws += 1
        return int(self._bits.random_raw())

    def decide(self, alpha: Fraction, beta: Fraction) -> bool:
        return alpha_event(self.draw(), alpha, beta)


class ScriptedDecider:
    """Follows a fixed prefix of choices, then defaults to the alpha event.

    Every decision is recorded as ``(alpha, beta, choice)`` so a run can be
    replayed or expanded into its sibling branches.
    """

    def __init__(self, prefix: Sequence[bool] = (), fallback: Decider | None = None):
        self.prefix = tuple(prefix)
        self.fallback = fallback
        self.log: list[tuple[Fraction, Fraction, bool]] = []

    def decide(self, alpha: Fraction, beta: Fraction) -> bool:
        pos = len(self.log)
        if pos < len(self.prefix):
            choice = self.prefix[pos]
        elif self.fallback is not None:
            choice = self.fallback.decide(alpha, beta)
        else:
            choice = True
        self.log.append((alpha, beta, choice))
        return choice


@dataclass
class TraceStep:
    iteration: int
    phase: str  # "cycle", "CCC", "CCW" or "path"
    paths: list[tuple[str, str]]
    alpha: Fraction
    beta: Fraction
    branch: str
    settled_edges: list[str] = field(default_factory=list)
    settled_vertices: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["alpha"] = format_fraction(self.alpha)
        d["beta"] = format_fraction(self.beta)
        d["paths"] = [list(p) for p in self.paths]
        return json.dumps(d, sort_keys=True)


def write_trace(steps: Sequence[TraceStep], fh) -> None:
    for step in steps:
        fh.write(step.to_json() + "\n")


def is_integer(q: Fraction) -> bool:
    return q.denominator == 1


def floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


class RoundingState:
    """Edge values x^r (all in [0, 1]) over a residual graph and their degrees."""

    def __init__(self, graph: VbmGraph, x: Sequence[Fraction], decider: Decider):
        self.graph = graph
        self.x = [Fraction(v) for v in x]
        for k, v in enumerate(self.x):
            if not 0 <= v <= 1:
                raise DefectError(f"edge {graph.edge_label(k)} starts outside [0, 1]: {v}")
        self.deg = graph.degrees(self.x)
        self.decider = decider
        self.iteration = 0
        self.trace: list[TraceStep] = []
        self.agent_of = [v.agent for v in graph.vertices]

    def edge_floating(self, k: int) -> bool:
        return 0 < self.x[k] < 1

    def vertex_floating(self, v: int) -> bool:
        return self.deg[v].denominator != 1

    def floating_edges(self) -> list[int]:
        return [k for k, v in enumerate(self.x) if 0 < v < 1]

    def floating_vertices(self) -> list[int]:
        return [v for v, d in enumerate(self.deg) if d.denominator != 1]

    def progress(self) -> int:
        """|E^r| + |L^r| + |R^r|."""
        return len(self.floating_edges()) + len(self.floating_vertices())

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Floating-edge adjacency: ``adj[v]`` lists ``(neighbour, edge)``."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.deg]
        for k, val in enumerate(self.x):
            if 0 < val < 1:
                e = self.graph.edges[k]
                adj[e.left].append((e.right, k))
                adj[e.right].append((e.left, k))
        return adj

    def components(self, adj) -> list[int]:
        """Component id per vertex of G^r; -1 for vertices with no floating edge."""
        comp = [-1] * len(adj)
        cid = 0
        for s in range(len(adj)):
            if comp[s] != -1 or not adj[s]:
                continue
            comp[s] = cid
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u, _ in adj[v]:
                    if comp[u] == -1:
                        comp[u] = cid
                        queue.append(u)
            cid += 1
        return comp

    def floating_partners(self, v: int) -> list[int]:
        """Other floating vertices of v's agent, in index order."""
        return [
            u
            for u in self.graph.kappa[self.agent_of[v]]
            if u != v and self.deg[u].denominator != 1
        ]

    def agent_floating_count(self, agent: str) -> int:
        return sum(1 for u in self.graph.kappa[agent] if self.deg[u].denominator != 1)

    def apply(self, deltas: dict[int, Fraction]) -> None:
        for k, dv in deltas.items():
            val = self.x[k] + dv
            if not 0 <= val <= 1:
                raise DefectError(f"edge {self.graph.edge_label(k)} left [0, 1]: {val}")
            e = self.graph.edges[k]
            self.x[k] = val
            self.deg[e.left] += dv
            self.deg[e.right] += dv

    def record(self, phase, paths, alpha, beta, choice, before_e, before_v) -> TraceStep:
        label = self.graph.vertices
        step = TraceStep(
            iteration=self.iteration,
            phase=phase,
            paths=[(label[s].label, label[t].label) for s, t in paths],
            alpha=alpha,
            beta=beta,
            branch="alpha" if choice else "beta",
            settled_edges=[self.graph.edge_label(k) for k in before_e if not self.edge_floating(k)],
            settled_vertices=[label[v].label for v in before_v if not self.vertex_floating(v)],
        )
        self.trace.append(step)
        self.iteration += 1
        return step
