"""Property tests over random instances and random fractional points."""
from fractions import Fraction as F

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from barterdr import io
from barterdr.oracle import random_instance
from barterdr.pipeline import prepare
from barterdr.rounding import barter_dr, gkps_dr
from barterdr.rounding.state import ceil, floor
from barterdr.vbm import build_vbm, expand_floating
from barterdr.verify import v_star

instances = st.builds(
    random_instance,
    agents=st.integers(2, 5),
    items=st.integers(1, 4),
    density=st.sampled_from([F(1, 2), F(3, 4), F(9, 10), F(1)]),
    value_range=st.sampled_from([(1, 1), (1, 4), (2, 9)]),
    cap_range=st.sampled_from([(1, 1), (1, 3)]),
    seed=st.integers(0, 10**6),
)

settings.register_profile("barter", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("barter")


def _degree_feasible(graph, raw):
    """Scale raw edge weights so every vertex stays within capacity."""
    x = [F(r, 8) for r in raw]
    deg = graph.degrees(x)
    for k, e in enumerate(graph.edges):
        load = max(deg[e.left] / graph.vertices[e.left].cap, deg[e.right] / graph.vertices[e.right].cap, 1)
        x[k] = x[k] / load
    return x


@given(instances, st.integers(0, 2**32))
def test_lp_rounding_keeps_degrees_and_net_bound(inst, seed):
    prep = prepare(inst)
    g, x0 = prep.graph, prep.lp.x
    X = barter_dr(g, x0, seed=seed).x
    for d0, d, v in zip(g.degrees(x0), g.degrees(X), g.vertices):
        assert floor(d0) <= d <= ceil(d0) and d <= v.cap
    vs = v_star(g)
    for a, d in g.net_values(X).items():
        assert abs(d) < vs[a] or d == 0
    for k in range(len(X)):
        assert floor(x0[k]) <= X[k] <= ceil(x0[k])


@given(instances, st.data())
def test_rounding_any_degree_feasible_point(inst, data):
    g = build_vbm(inst)
    raw = data.draw(st.lists(st.integers(0, 8), min_size=len(g.edges), max_size=len(g.edges)))
    x = _degree_feasible(g, raw)
    seed = data.draw(st.integers(0, 2**32))
    for algo in (barter_dr, gkps_dr):
        X = algo(g, x, seed=seed).x
        for d0, d in zip(g.degrees(x), g.degrees(X)):
            assert floor(d0) <= d <= ceil(d0)


@given(instances)
def test_equal_values_never_unbalance(inst):
    doc = io.instance_to_dict(inst)
    flat = io.instance_from_dict({**doc, "items": [{"id": j, "value": 1} for j in inst.values]})
    prep = prepare(flat)
    X = barter_dr(prep.graph, prep.lp.x, seed=0).x
    assert all(d == 0 for d in prep.graph.net_values(X).values())


@given(instances)
def test_expansion_preserves_flows(inst):
    prep = prepare(inst)
    g, x = prep.graph, prep.lp.x
    exp = expand_floating(g, x)
    assert len(exp.graph.edges) <= len(g.edges)
    assert all(0 < v < 1 for v in exp.x)
    res = exp.graph.net_values(exp.x)
    base = g.net_values(exp.base)
    assert {a: base[a] + res.get(a, 0) for a in g.agents} == g.net_values(x)
    assert g.objective(exp.base) + exp.graph.objective(exp.x) == g.objective(x)


@given(instances)
def test_instance_json_round_trip(inst):
    assert io.parse_instance(io.dump_instance(inst)) == inst
