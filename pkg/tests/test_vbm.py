from fractions import Fraction as F

import pytest

from barterdr.model import Transfer, evaluate_allocation, make_instance
from barterdr.oracle import gap_family, gkps_worst_case, random_instance
from barterdr.vbm import (
    LEFT,
    RIGHT,
    InfeasibleInput,
    NonIntegral,
    allocation_from_integral,
    build_vbm,
    expand_floating,
)


def test_three_agent_graph_shape(three_agent):
    g = build_vbm(three_agent)
    assert [g.vertices[v].label for v in g.left] == ["L:1:a", "L:1:b", "L:2:c", "L:3:d"]
    assert len(g.right) == 6
    assert len(g.edges) == 6
    g.assert_item_homogeneous()


def test_single_agent_has_no_edges():
    g = build_vbm(make_instance({"a": 1, "b": 2}, {"1": (["a", "b"], ["a", "b"])}))
    assert g.edges == ()


def test_gap_family_graph():
    g = build_vbm(gap_family(3))
    assert (len(g.left), len(g.right), len(g.edges)) == (2, 2, 2)


def test_kappa_partitions_vertices(three_agent):
    g = build_vbm(three_agent)
    seen = sorted(v for a in g.agents for v in g.kappa[a])
    assert seen == list(range(len(g.vertices)))
    for a in g.agents:
        assert all(g.vertices[v].agent == a for v in g.kappa[a])


def test_edges_join_left_to_right_of_distinct_agents(three_agent):
    g = build_vbm(three_agent)
    for e in g.edges:
        assert g.vertices[e.left].side == LEFT and g.vertices[e.right].side == RIGHT
        assert g.vertices[e.left].agent != g.vertices[e.right].agent


def test_allocation_from_integral_zero_is_empty(three_agent):
    g = build_vbm(three_agent)
    assert allocation_from_integral(g, [0] * len(g.edges)).is_empty


def test_allocation_from_integral_worst_case():
    inst = gkps_worst_case()
    g = build_vbm(inst)
    alloc = allocation_from_integral(g, [1, 0, 1, 1])
    assert set(alloc.transfers) == {
        Transfer("1", "2", "3"),
        Transfer("2", "1", "1"),
        Transfer("2", "1", "2"),
    }
    assert evaluate_allocation(inst, alloc).utility == 3


def test_allocation_from_single_edge(three_agent):
    g = build_vbm(three_agent)
    x = [0] * len(g.edges)
    x[g.edge_index("1", "2", "a")] = 1
    assert allocation_from_integral(g, x).transfers == (Transfer("1", "2", "a", 1),)


def test_allocation_from_fractional_rejected(three_agent):
    g = build_vbm(three_agent)
    with pytest.raises(NonIntegral):
        allocation_from_integral(g, [F(1, 2)] + [0] * (len(g.edges) - 1))


def _capacitated():
    return make_instance(
        {"a": 2, "b": 3},
        {"1": ({"a": 5}, {"b": 4}), "2": ({"b": 5}, {"a": 5}), "3": ([], {"a": 2})},
    )


def test_expand_integral_edge_goes_to_base():
    g = build_vbm(_capacitated())
    x = [F(0)] * len(g.edges)
    x[g.edge_index("1", "2", "a")] = F(3)
    exp = expand_floating(g, x)
    assert exp.base[g.edge_index("1", "2", "a")] == 3
    assert exp.graph.edges == () and exp.x == ()


def test_expand_splits_fraction():
    g = build_vbm(_capacitated())
    k = g.edge_index("1", "2", "a")
    x = [F(0)] * len(g.edges)
    x[k] = F(12, 5)
    exp = expand_floating(g, x)
    assert exp.base[k] == 2
    assert exp.x == (F(2, 5),)
    assert exp.edge_origin == (k,)
    left = exp.graph.vertices[exp.graph.edges[0].left]
    assert left.cap == 3 and left.copy_index == 1


def test_expand_preserves_flows_and_objective():
    g = build_vbm(_capacitated())
    x = [F(0)] * len(g.edges)
    x[g.edge_index("1", "2", "a")] = F(12, 5)
    x[g.edge_index("1", "3", "a")] = F(3, 2)
    x[g.edge_index("2", "1", "b")] = F(7, 3)
    exp = expand_floating(g, x)
    net_base = g.net_values(exp.base)
    net_res = exp.graph.net_values(exp.x)
    assert {a: net_base[a] + net_res[a] for a in g.agents} == g.net_values(x)
    assert g.objective(exp.base) + exp.graph.objective(exp.x) == g.objective(x)
    assert len(exp.graph.edges) <= len(g.edges)


def test_expand_rejects_over_capacity():
    g = build_vbm(_capacitated())
    x = [F(0)] * len(g.edges)
    x[g.edge_index("1", "3", "a")] = F(5, 2)
    with pytest.raises(InfeasibleInput):
        expand_floating(g, x)


def test_random_graphs_are_item_homogeneous():
    for seed in range(20):
        build_vbm(random_instance(5, 4, 0.8, seed=seed)).assert_item_homogeneous()
