"""Coloring, step magnitudes and the randomized update for one path sequence."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .state import DefectError, RoundingState, ceil, floor
from .walks import CCC, PathSeq


@dataclass(frozen=True)
class Coloring:
    """Endpoint colors ``f`` and, per path, the matching sign of each edge.

    In the alpha branch edges of sign -1 gain and edges of sign +1 lose.
    """

    colors: dict[int, int]
    signs: tuple[tuple[int, ...], ...]


def roundable_coloring(state: RoundingState, ps: PathSeq) -> Coloring:
    """Greedy coloring from ``f(s_1) = +1`` along the sequence."""
    side = [v.side for v in state.graph.vertices]
    colors: dict[int, int] = {}
    f = 1
    for i, (s, t) in enumerate(ps.ends):
        if i > 0:
            prev_t = ps.ends[i - 1][1]
            f = colors[prev_t] if side[prev_t] != side[s] else -colors[prev_t]
        colors[s] = f
        colors[t] = f if side[s] != side[t] else -f
    if ps.kind == CCC:
        last_t, s1 = ps.ends[-1][1], ps.ends[0][0]
        closing = colors[last_t] if side[last_t] != side[s1] else -colors[last_t]
        if closing != colors[s1]:
            raise DefectError("closed walk admits no roundable coloring")
    signs = []
    for (s, t), path in zip(ps.ends, ps.paths):
        row = tuple(colors[s] * (-1) ** k for k in range(len(path)))
        if row and row[-1] != colors[t]:
            raise DefectError("path parity disagrees with endpoint colors")
        signs.append(row)
    return Coloring(colors, tuple(signs))


def path_value(state: RoundingState, path) -> Fraction:
    values = {state.graph.edges[k].value for k in path}
    if len(values) != 1:
        raise DefectError("path mixes item values")
    return values.pop()


def compute_alpha_beta(state: RoundingState, ps: PathSeq, col: Coloring) -> tuple[Fraction, Fraction]:
    """Largest value-scaled steps keeping every edge in [0, 1] and endpoint
    degrees between their floor and ceiling, in each direction."""
    alpha = beta = None
    for (s, t), path, signs in zip(ps.ends, ps.paths, col.signs):
        grow_a, grow_b = [], []  # slack in the alpha / beta direction
        for k, sg in zip(path, signs):
            xe = state.x[k]
            if sg < 0:
                grow_a.append(1 - xe)
                grow_b.append(xe)
            else:
                grow_a.append(xe)
                grow_b.append(1 - xe)
        for a in {s, t}:
            d = state.deg[a]
            up, down = ceil(d) - d, d - floor(d)
            if col.colors[a] < 0:
                grow_a.append(up)
                grow_b.append(down)
            else:
                grow_a.append(down)
                grow_b.append(up)
        v = path_value(state, path)
        a_i, b_i = v * min(grow_a), v * min(grow_b)
        alpha = a_i if alpha is None else min(alpha, a_i)
        beta = b_i if beta is None else min(beta, b_i)
    if not alpha > 0 or not beta > 0:
        raise DefectError(f"non-positive step magnitudes alpha={alpha} beta={beta}")
    return alpha, beta


def round_pathseq(state: RoundingState, ps: PathSeq, col: Coloring, alpha, beta) -> bool:
    """Apply one randomized update; returns True for the alpha branch."""
    choice = state.decider.decide(alpha, beta)
    step = alpha if choice else -beta
    deltas: dict[int, Fraction] = {}
    for path, signs in zip(ps.paths, col.signs):
        v = path_value(state, path)
        for k, sg in zip(path, signs):
            deltas[k] = -sg * step / v
    before_e = [k for path in ps.paths for k in path]
    before_v = ps.vertices
    state.apply(deltas)
    state.record(ps.kind, ps.ends, alpha, beta, choice, before_e, before_v)
    return choice


def edge_only_magnitudes(state: RoundingState, edges, signs) -> tuple[Fraction, Fraction]:
    """Step sizes for an alternating cycle or path using edge bounds only."""
    alpha = min((1 - state.x[k]) if sg < 0 else state.x[k] for k, sg in zip(edges, signs))
    beta = min(state.x[k] if sg < 0 else (1 - state.x[k]) for k, sg in zip(edges, signs))
    return alpha, beta


def round_alternating(state: RoundingState, phase: str, edges, ends, alpha, beta) -> bool:
    """Unit-rate update on an alternating cycle or path (first edge gains in alpha)."""
    signs = alternating_signs(len(edges))
    choice = state.decider.decide(alpha, beta)
    step = alpha if choice else -beta
    before_v = sorted({v for k in edges for v in (state.graph.edges[k].left, state.graph.edges[k].right)})
    state.apply({k: -sg * step for k, sg in zip(edges, signs)})
    state.record(phase, ends, alpha, beta, choice, list(edges), before_v)
    return choice


def alternating_signs(n: int) -> list[int]:
    return [(-1) ** (k + 1) for k in range(n)]

