import itertools

import numpy as np
import pytest

from barterdr.lp import build_lp, solve_lp
from barterdr.model import ValidationError, check_allocation, make_instance
from barterdr.oracle import (
    OddSum,
    TooLarge,
    brute_force,
    brute_force_unpruned,
    gap_family,
    gkps_worst_case,
    partition_to_bsv,
    random_instance,
    subset_sum_exists,
)
from barterdr.vbm import build_vbm


def _subset_sum_naive(nums, target):
    return any(
        sum(c) == target for r in range(len(nums) + 1) for c in itertools.combinations(nums, r)
    )


def test_worst_case_best_allocation():
    res = brute_force(gkps_worst_case())
    assert res.best_utility == 3
    assert res.has_nonempty_balanced
    check_allocation(gkps_worst_case(), res.best_allocation)
    assert len(res.best_allocation) == 3


@pytest.mark.parametrize("n", [2, 3, 100])
def test_gap_family_has_only_the_empty_allocation(n):
    res = brute_force(gap_family(n))
    assert res.best_utility == 0
    assert not res.has_nonempty_balanced
    assert res.best_allocation.is_empty


def test_gap_family_one_swaps():
    assert brute_force(gap_family(1)).has_nonempty_balanced


def test_empty_instance():
    res = brute_force(make_instance({}, {}))
    assert res.best_utility == 0 and res.enumerated_count == 1


@pytest.mark.parametrize(
    "nums, expected",
    [([2, 4, 6], True), ([1, 1, 4], False), ([5, 5], True), ([3, 1, 1, 2, 2, 1], True), ([2, 6], False)],
)
def test_partition_reduction_small_sets(nums, expected):
    res = brute_force(partition_to_bsv(nums))
    assert res.has_nonempty_balanced is expected
    assert subset_sum_exists(nums, sum(nums) // 2) is expected


def test_partition_rejects_odd_total_and_bad_numbers():
    with pytest.raises(OddSum):
        partition_to_bsv([1, 2])
    with pytest.raises(ValidationError):
        partition_to_bsv([0, 2])
    with pytest.raises(ValidationError):
        partition_to_bsv([])


def test_subset_sum_matches_naive_enumeration():
    rng = np.random.default_rng(1)
    for _ in range(200):
        nums = [int(a) for a in rng.integers(0, 12, size=int(rng.integers(0, 7)))]
        target = int(rng.integers(-1, 30))
        assert subset_sum_exists(nums, target) == _subset_sum_naive(nums, target)


def test_pruned_and_unpruned_enumeration_agree():
    checked = 0
    for seed in range(80):
        inst = random_instance(4, 3, 0.8, (1, 4), (1, 2), seed=seed)
        try:
            ref = brute_force_unpruned(inst)
        except TooLarge:
            continue
        got = brute_force(inst)
        assert got.best_utility == ref.best_utility
        assert got.has_nonempty_balanced == ref.has_nonempty_balanced
        assert got.enumerated_count == ref.enumerated_count
        checked += 1
    assert checked >= 40


def test_lp_bounds_the_integral_optimum():
    for seed in range(40):
        inst = random_instance(4, 4, 0.7, (1, 5), seed=seed)
        g = build_vbm(inst)
        if len(g.edges) > 16:
            continue
        assert solve_lp(build_lp(g)).objective >= brute_force(inst).best_utility


def test_fairness_floor_filters_allocations():
    inst = make_instance(
        {"a": 1, "b": 1},
        {"1": (["a"], ["b"]), "2": (["b"], ["a"])},
        fairness=[(["1"], 2)],
    )
    res = brute_force(inst)
    assert res.best_utility is None and not res.has_nonempty_balanced


def test_budget_exceeded():
    inst = random_instance(6, 6, 1, seed=0)
    assert len(build_vbm(inst).edges) > 10
    with pytest.raises(TooLarge):
        brute_force(inst, edge_limit=10)


def test_random_instance_is_reproducible_and_validated():
    a = random_instance(5, 4, 0.6, (1, 9), (1, 3), seed=42)
    b = random_instance(5, 4, 0.6, (1, 9), (1, 3), seed=42)
    assert a == b
    assert a != random_instance(5, 4, 0.6, (1, 9), (1, 3), seed=43)
    for it in a.items:
        assert 1 <= it.value <= 9
    for ag in a.agents:
        assert not set(ag.have) & set(ag.wish)
        assert all(1 <= c <= 3 for c in list(ag.have.values()) + list(ag.wish.values()))
    with pytest.raises(ValueError):
        random_instance(3, 3, 0)
    with pytest.raises(ValueError):
        random_instance(0, 3)
