from decimal import Decimal
from fractions import Fraction as F

import pytest

from barterdr.model import (
    AgentSpec,
    Allocation,
    BarterInstance,
    InvalidTransfer,
    ItemSpec,
    TransferWeight,
    Transfer,
    ValidationError,
    check_allocation,
    evaluate_allocation,
    format_fraction,
    make_instance,
    to_fraction,
    validate_instance,
)
from barterdr.oracle import gap_family, gkps_worst_case


def test_to_fraction_is_exact():
    assert to_fraction("0.1") == F(1, 10)
    assert to_fraction(0.1) == F(1, 10)
    assert to_fraction(Decimal("2.50")) == F(5, 2)
    assert to_fraction("3/6") == F(1, 2)
    assert to_fraction(7) == 7
    with pytest.raises(TypeError):
        to_fraction(True)
    with pytest.raises(ValueError):
        to_fraction("abc")


def test_format_fraction():
    assert format_fraction(F(6, 4)) == "3/2"
    assert format_fraction(F(4, 2)) == "2"
    assert format_fraction(F(-1, 3)) == "-1/3"


def test_three_agent_instance_is_valid(three_agent):
    assert validate_instance(three_agent) is three_agent
    assert three_agent.v_star("1") == 100
    assert three_agent.v_star("3") == 1


def test_zero_value_rejected():
    with pytest.raises(ValidationError, match="non-positive"):
        make_instance({"a": 0}, {"1": (["a"], [])})


def test_dangling_wish_rejected():
    with pytest.raises(ValidationError, match="dangling"):
        make_instance({"a": 1}, {"1": (["a"], ["zz"])})


def test_duplicate_ids_rejected():
    with pytest.raises(ValidationError, match="duplicate agent"):
        validate_instance(BarterInstance((ItemSpec("a", 1),), (AgentSpec("1"), AgentSpec("1"))))
    with pytest.raises(ValidationError, match="duplicate item"):
        validate_instance(BarterInstance((ItemSpec("a", 1), ItemSpec("a", 2)), ()))


def test_bad_capacity_rejected():
    with pytest.raises(ValidationError, match="positive integer"):
        make_instance({"a": 1}, {"1": ({"a": 0}, [])})


def test_fairness_group_must_name_known_agents():
    with pytest.raises(ValidationError, match="unknown agents"):
        make_instance({"a": 1}, {"1": (["a"], [])}, fairness=[(["9"], 1)])


def test_explicit_weight_must_be_possible_transfer():
    w = TransferWeight("item_value", {("1", "2", "a"): 3})
    with pytest.raises(ValidationError, match="not a possible transfer"):
        make_instance({"a": 1}, {"1": ([], ["a"]), "2": (["a"], [])}, weights=w)


def test_overlap_between_have_and_wish_is_allowed():
    inst = make_instance({"a": 1}, {"1": (["a"], ["a"])})
    assert inst.agent("1").have == inst.agent("1").wish == {"a": 1}


def test_weight_rules():
    inst = gkps_worst_case()
    assert inst.weight("1", "2", "3") == 1
    inst2 = inst.with_weights(TransferWeight("item_value", {("1", "2", "3"): F(7, 2)}))
    assert inst2.weight("1", "2", "3") == F(7, 2)
    assert inst2.weight("1", "2", "4") == 20


def test_empty_allocation_has_zero_net_and_utility(three_agent):
    rep = evaluate_allocation(three_agent, Allocation())
    assert all(d == 0 for d in rep.net.values())
    assert rep.utility == 0
    assert rep.balanced


def test_worst_case_three_transfer_allocation():
    inst = gkps_worst_case()
    alloc = Allocation((Transfer("2", "1", "1"), Transfer("2", "1", "2"), Transfer("1", "2", "3")))
    rep = evaluate_allocation(inst, alloc)
    assert rep.net == {"1": 0, "2": 0}
    assert rep.given == {"1": 20, "2": 20}
    assert rep.utility == 3


def test_gap_family_swap_net_value():
    inst = gap_family(4)
    rep = evaluate_allocation(inst, Allocation((Transfer("1", "2", "j1"), Transfer("2", "1", "j2"))))
    assert rep.net["1"] == F(3, 4)
    assert sum(rep.net.values()) == 0


def test_allocation_merges_and_sorts():
    a = Allocation((Transfer("b", "a", "x"), Transfer("a", "b", "y"), Transfer("a", "b", "y")))
    assert a.transfers == (Transfer("a", "b", "y", 2), Transfer("b", "a", "x", 1))


@pytest.mark.parametrize(
    "transfer, message",
    [
        (Transfer("1", "1", "3"), "self-transfer"),
        (Transfer("2", "1", "3"), "does not own"),
        (Transfer("1", "2", "1"), "does not own"),
        (Transfer("1", "9", "3"), "unknown agent"),
        (Transfer("1", "2", "3", 2), "gives 2 copies"),
    ],
)
def test_invalid_transfers(transfer, message):
    with pytest.raises(InvalidTransfer, match=message):
        check_allocation(gkps_worst_case(), Allocation((transfer,)))


def test_wish_capacity_enforced():
    inst = make_instance({"a": 1}, {"1": ({"a": 3}, []), "2": ([], {"a": 1})})
    with pytest.raises(InvalidTransfer, match="receives 2"):
        check_allocation(inst, Allocation((Transfer("1", "2", "a", 2),)))
