"""Value-balanced matching graph built from a barter instance.

Vertices and edges are addressed by integer index.  Ordering is fixed by the
instance: vertices sort by (agent position, item position, side), edges by
(left index, right index).  All randomized code downstream depends on this
ordering for reproducibility.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import Allocation, BarterInstance, Transfer, validate_instance

LEFT = "L"
RIGHT = "R"


class NonIntegral(ValueError):
    pass


class InfeasibleInput(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    side: str
    agent: str
    item: str
    value: Fraction
    cap: int
    copy_index: int | None = None

    @property
    def label(self) -> str:
        return f"{self.side}:{self.agent}:{self.item}"


@dataclass(frozen=True)
class Edge:
    left: int
    right: int
    item: str
    weight: Fraction
    value: Fraction


class VbmGraph:
    """Bipartite graph with per-agent vertex groups (the agent's kappa set)."""

    def __init__(self, vertices: Sequence[Vertex], edges: Sequence[Edge], agents: Sequence[str]):
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.agents = tuple(agents)
        self.incident: list[list[int]] = [[] for _ in self.vertices]
        for k, e in enumerate(self.edges):
            self.incident[e.left].append(k)
            self.incident[e.right].append(k)
        self.kappa: dict[str, tuple[int, ...]] = {a: () for a in self.agents}
        for idx, v in enumerate(self.vertices):
            self.kappa[v.agent] = self.kappa[v.agent] + (idx,)
        self._index = {(v.side, v.agent, v.item): i for i, v in enumerate(self.vertices)}

    def __repr__(self):
        return f"VbmGraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @property
    def left(self) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if v.side == LEFT]

    @property
    def right(self) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if v.side == RIGHT]

    def vertex_index(self, side: str, agent: str, item: str) -> int:
        return self._index[(side, agent, item)]

    def edge_index(self, giver: str, receiver: str, item: str) -> int:
        left = self.vertex_index(LEFT, giver, item)
        for k in self.incident[left]:
            if self.vertices[self.edges[k].right].agent == receiver:
                return k
        raise KeyError((giver, receiver, item))

    def edge_label(self, k: int) -> str:
        e = self.edges[k]
        return f"{self.vertices[e.left].agent}->{self.vertices[e.right].agent}:{e.item}"

    def other(self, k: int, v: int) -> int:
        e = self.edges[k]
        return e.right if e.left == v else e.left

    def degrees(self, x: Sequence[Fraction]) -> list[Fraction]:
        deg = [Fraction(0)] * len(self.vertices)
        for k, e in enumerate(self.edges):
            if x[k]:
                deg[e.left] += x[k]
                deg[e.right] += x[k]
        return deg

    def net_values(self, x: Sequence[Fraction]) -> dict[str, Fraction]:
        """D_i evaluated on a (possibly fractional) edge vector."""
        net = {a: Fraction(0) for a in self.agents}
        for k, e in enumerate(self.edges):
            if x[k]:
                flow = e.value * x[k]
                net[self.vertices[e.left].agent] += flow
                net[self.vertices[e.right].agent] -= flow
        return net

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((e.weight * x[k] for k, e in enumerate(self.edges) if x[k]), Fraction(0))

    def components(self) -> list[list[int]]:
        """Connected components (vertex index lists) of the whole graph."""
        seen = [False] * len(self.vertices)
        comps = []
        for s in range(len(self.vertices)):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], deque([s])
            while queue:
                v = queue.popleft()
                comp.append(v)
                for k in self.incident[v]:
                    u = self.other(k, v)
                    if not seen[u]:
                        seen[u] = True
                        queue.append(u)
            comps.append(comp)
        return comps

    def assert_item_homogeneous(self) -> None:
        for comp in self.components():
            items = {self.vertices[v].item for v in comp}
            if len(items) != 1:
                raise AssertionError(f"component mixes items {sorted(items)}")
        for e in self.edges:
            lv, rv = self.vertices[e.left], self.vertices[e.right]
            assert lv.side == LEFT and rv.side == RIGHT, "edge does not join L to R"
            assert lv.item == rv.item == e.item and lv.agent != rv.agent


def build_vbm(instance: BarterInstance) -> VbmGraph:
    validate_instance(instance)
    values = instance.values
    item_pos = {it.item_id: k for k, it in enumerate(instance.items)}
    vertices: list[Vertex] = []
    for a in instance.agents:
        entries = [(item_pos[j], 0, j, cap) for j, cap in a.have.items()]
        entries += [(item_pos[j], 1, j, cap) for j, cap in a.wish.items()]
        for _, side, j, cap in sorted(entries):
            vertices.append(Vertex(LEFT if side == 0 else RIGHT, a.agent_id, j, values[j], cap))
    rights_by_item: dict[str, list[int]] = {}
    for idx, v in enumerate(vertices):
        if v.side == RIGHT:
            rights_by_item.setdefault(v.item, []).append(idx)
    edges = []
    for idx, v in enumerate(vertices):
        if v.side != LEFT:
            continue
        for r in rights_by_item.get(v.item, ()):
            rv = vertices[r]
            if rv.agent == v.agent:
                continue
            w = instance.weight(v.agent, rv.agent, v.item)
            edges.append(Edge(idx, r, v.item, w, v.value))
    graph = VbmGraph(vertices, edges, [a.agent_id for a in instance.agents])
    graph.assert_item_homogeneous()
    return graph


def allocation_from_integral(graph: VbmGraph, x: Sequence) -> Allocation:
    transfers = []
    for k, e in enumerate(graph.edges):
        val = Fraction(x[k])
        if val.denominator != 1:
            raise NonIntegral(f"edge {graph.edge_label(k)} has fractional value {val}")
        if val < 0 or val > min(graph.vertices[e.left].cap, graph.vertices[e.right].cap):
            raise InfeasibleInput(f"edge {graph.edge_label(k)} value {val} outside its caps")
        if val:
            transfers.append(
                Transfer(graph.vertices[e.left].agent, graph.vertices[e.right].agent, e.item, int(val))
            )
    return Allocation(tuple(transfers))


@dataclass(frozen=True)
class Expansion:
    """Split of a capacitated fractional vector into integral and residual parts.

    ``graph`` holds one residual copy for every vertex touched by a fractional
    edge (cap = remaining capacity) and one edge per fractional original edge,
    carrying only the fractional residue.  ``edge_origin[k]`` is the original
    index of residual edge ``k``; ``vertex_origin`` likewise for vertices.
    """

    base: tuple[int, ...]
    graph: VbmGraph
    x: tuple[Fraction, ...]
    edge_origin: tuple[int, ...]
    vertex_origin: tuple[int, ...]

    def combine(self, rounded: Sequence[int]) -> tuple[int, ...]:
        """Original-graph integral vector from a rounding of the residual edges."""
        out = list(self.base)
        for k, orig in enumerate(self.edge_origin):
            out[orig] += int(rounded[k])
        return tuple(out)


def check_feasible(graph: VbmGraph, x: Sequence[Fraction]) -> None:
    if len(x) != len(graph.edges):
        raise InfeasibleInput("vector length does not match edge count")
    for k, val in enumerate(x):
        if val < 0:
            raise InfeasibleInput(f"negative value on edge {graph.edge_label(k)}")
    for v, d in zip(graph.vertices, graph.degrees(x)):
        if d > v.cap:
            raise InfeasibleInput(f"degree {d} exceeds cap {v.cap} at {v.label}")


def expand_floating(graph: VbmGraph, x: Sequence[Fraction]) -> Expansion:
    x = [Fraction(val) for val in x]
    check_feasible(graph, x)
    base = []
    frac_edges = []
    for k, val in enumerate(x):
        whole = val.numerator // val.denominator
        base.append(whole)
        if val != whole:
            frac_edges.append(k)
    used = [0] * len(graph.vertices)
    for k, e in enumerate(graph.edges):
        used[e.left] += base[k]
        used[e.right] += base[k]
    touched = sorted({v for k in frac_edges for v in (graph.edges[k].left, graph.edges[k].right)})
    new_index = {v: n for n, v in enumerate(touched)}
    vertices = []
    for v in touched:
        orig = graph.vertices[v]
        vertices.append(
            Vertex(orig.side, orig.agent, orig.item, orig.value, orig.cap - used[v], copy_index=1)
        )
    edges = []
    residue = []
    for k in frac_edges:
        e = graph.edges[k]
        edges.append(Edge(new_index[e.left], new_index[e.right], e.item, e.weight, e.value))
        residue.append(x[k] - base[k])
    residual = VbmGraph(vertices, edges, graph.agents)
    return Expansion(tuple(base), residual, tuple(residue), tuple(frac_edges), tuple(touched))
