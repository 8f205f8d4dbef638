"""Discovery of cycles, closed walks (CCC) and open walks (CCW) on G^r.

A path sequence is a list of endpoint pairs ``(s_i, t_i)``; consecutive pairs
are linked by the partner relation (two distinct floating vertices of the same
agent) and each pair is joined by the unique tree path of its component.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

from .state import DefectError, RoundingState

CCC = "CCC"
CCW = "CCW"


@dataclass(frozen=True)
class PathSeq:
    kind: str
    ends: tuple[tuple[int, int], ...]
    paths: tuple[tuple[int, ...], ...]  # edge indices from s_i to t_i

    @property
    def vertices(self) -> list[int]:
        return [v for pair in self.ends for v in pair]


def find_cycle(state: RoundingState, adj=None) -> list[int] | None:
    """Edge list of some cycle of G^r, in cyclic order, or None if acyclic."""
    adj = adj if adj is not None else state.adjacency()
    n = len(adj)
    parent_edge = [-1] * n
    parent = [-1] * n
    visited = [False] * n
    on_stack = [False] * n
    for root in range(n):
        if visited[root] or not adj[root]:
            continue
        visited[root] = on_stack[root] = True
        stack = [(root, 0)]
        while stack:
            v, i = stack[-1]
            if i == len(adj[v]):
                on_stack[v] = False
                stack.pop()
                continue
            stack[-1] = (v, i + 1)
            u, k = adj[v][i]
            if k == parent_edge[v]:
                continue
            if visited[u]:
                if not on_stack[u]:
                    continue
                cycle = []
                w = v
                while w != u:
                    cycle.append(parent_edge[w])
                    w = parent[w]
                cycle.append(k)
                return cycle
            visited[u] = on_stack[u] = True
            parent[u], parent_edge[u] = v, k
            stack.append((u, 0))
    return None


def tree_path(adj, s: int, t: int) -> tuple[int, ...]:
    """Edge indices of the s-t path in an acyclic floating graph."""
    prev = {s: None}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            break
        for u, k in adj[v]:
            if u not in prev:
                prev[u] = (v, k)
                queue.append(u)
    if t not in prev:
        raise DefectError(f"no floating path between vertices {s} and {t}")
    path = []
    while prev[t] is not None:
        t, k = prev[t]
        path.append(k)
    return tuple(reversed(path))


def first_floating_in_component(state: RoundingState, adj, s: int) -> int | None:
    """First floating vertex other than ``s`` met by a DFS from ``s`` over floating edges."""
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        if v != s and state.vertex_floating(v):
            return v
        for u, _ in reversed(adj[v]):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return None


def _walk(
    start: int,
    comp: list[int],
    agent_of: list[str],
    next_partner: Callable[[int], int | None],
    next_in_component: Callable[[int], int],
):
    """Core walk loop shared by live discovery and the uncrossing replay.

    ``V = [t_1, s_2, t_2, ..., s_i, t_i]``.  Returns ``(CCW, V)`` when the last
    vertex has no partner, otherwise ``(CCC, pairs)``.
    """
    V = [start]
    seen = {comp[start]: 1}
    i = 2
    while True:
        s = next_partner(V[-1])
        if s is None:
            return CCW, V
        c = comp[s]
        if c in seen:
            k = seen[c]
            pairs = [(s, V[2 * k - 2])]
            pairs += [(V[2 * j - 3], V[2 * j - 2]) for j in range(k + 1, i)]
            return CCC, pairs
        t = next_in_component(s)
        V.append(s)
        hit = None
        for pos in range(len(V) - 1, -1, -1):
            if agent_of[V[pos]] == agent_of[t]:
                hit = pos
                break
        if hit is not None:
            if hit % 2 == 0:
                raise DefectError("partner conflict at a walk endpoint t_p")
            p = (hit + 3) // 2
            pairs = [(V[2 * j - 3], V[2 * j - 2]) for j in range(p, i)]
            pairs.append((s, t))
            return CCC, pairs
        V.append(t)
        seen[c] = i
        i += 1


def _finish(state: RoundingState, adj, kind: str, pairs) -> PathSeq:
    paths = tuple(tree_path(adj, s, t) for s, t in pairs)
    return PathSeq(kind, tuple((s, t) for s, t in pairs), paths)


def _live(state: RoundingState, adj):
    def partner(v):
        partners = state.floating_partners(v)
        return partners[0] if partners else None

    def next_in_component(s):
        t = first_floating_in_component(state, adj, s)
        if t is None:
            raise DefectError("component with a single floating vertex")
        return t

    return partner, next_in_component


def cc_walk(state: RoundingState, start: int, adj=None):
    """Walk from ``start`` through partners and components.

    Returns ``(CCC, PathSeq)`` when a component is revisited or a new endpoint
    has a partner already on the walk, else ``(CCW, endpoints)`` where the
    endpoint list ``[t_1, s_2, t_2, ..., t_q]`` ends at a partnerless vertex.
    """
    adj = adj if adj is not None else state.adjacency()
    if not state.vertex_floating(start):
        raise DefectError("walk must start at a floating vertex")
    comp = state.components(adj)
    kind, out = _walk(start, comp, state.agent_of, *_live(state, adj))
    if kind == CCC:
        return CCC, _finish(state, adj, CCC, out)
    return CCW, out


def find_ccc(state: RoundingState, adj=None) -> PathSeq:
    """Find a closed (CCC) or open (CCW) connected-component walk.

    Requires G^r to be acyclic with at least one floating vertex.
    """
    adj = adj if adj is not None else state.adjacency()
    comp = state.components(adj)
    floating = state.floating_vertices()
    if not floating:
        raise DefectError("find_ccc called with no floating vertex")
    s1 = floating[0]
    t1 = next((v for v in floating if v != s1 and comp[v] == comp[s1]), None)
    if t1 is None:
        raise DefectError("component with a single floating vertex")
    kind, O1 = cc_walk(state, t1, adj)
    if kind == CCC:
        return O1
    kind, O2 = cc_walk(state, s1, adj)
    if kind == CCC:
        return O2
    # uncrossing: replay reverse(O2) + O1 through the same loop
    full = list(reversed(O2)) + O1
    rest = iter(full[2:])
    kind, out = _walk(full[1], comp, state.agent_of, lambda _v: next(rest, None), lambda _s: next(rest))
    if kind == CCC:
        return _finish(state, adj, CCC, out)
    pairs = [(full[j], full[j + 1]) for j in range(0, len(full), 2)]
    return _finish(state, adj, CCW, pairs)


def check_pathseq(state: RoundingState, ps: PathSeq, adj=None) -> None:
    """Raise DefectError unless ``ps`` is a valid CCC or CCW of the current state."""
    adj = adj if adj is not None else state.adjacency()
    comp = state.components(adj)
    agent_of = state.agent_of
    verts = ps.vertices
    if len(set(verts)) != len(verts):
        raise DefectError("path sequence repeats a vertex")
    for v in verts:
        if not state.vertex_floating(v):
            raise DefectError(f"endpoint {v} is not floating")
    comps = [comp[s] for s, _ in ps.ends]
    if len(set(comps)) != len(comps):
        raise DefectError("two paths share a component")
    for (s, t), path in zip(ps.ends, ps.paths):
        if comp[s] != comp[t]:
            raise DefectError("path endpoints lie in different components")
        cur = s
        for k in path:
            if not state.edge_floating(k):
                raise DefectError("path uses a settled edge")
            cur = state.graph.other(k, cur)
        if cur != t:
            raise DefectError("path does not join its endpoints")
    q = len(ps.ends)
    links = range(q) if ps.kind == CCC else range(q - 1)
    for i in links:
        t, s_next = ps.ends[i][1], ps.ends[(i + 1) % q][0]
        if agent_of[t] != agent_of[s_next]:
            raise DefectError("consecutive paths are not partner-linked")
    vs = set(verts)
    for v in verts:
        mates = sum(1 for u in state.graph.kappa[agent_of[v]] if u in vs)
        if ps.kind == CCC or v not in (ps.ends[0][0], ps.ends[-1][1]):
            if mates != 2:
                raise DefectError(f"agent {agent_of[v]} meets the sequence {mates} times")
    if ps.kind == CCW:
        for v in (ps.ends[0][0], ps.ends[-1][1]):
            if state.floating_partners(v):
                raise DefectError("open walk endpoint has a floating partner")
