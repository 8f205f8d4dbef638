from fractions import Fraction as F
import json

import numpy as np
import pytest

from barterdr.oracle import gap_family, gkps_worst_case, random_instance
from barterdr.pipeline import prepare
from barterdr.rounding import GKPS, barter_dr
from barterdr.verify import (
    FAIL,
    PASS,
    WARN,
    TrialBatch,
    check_degrees,
    check_marginals,
    check_neg_corr,
    check_net_values,
    check_objective,
    neighbourhood_subsets,
    run_trials,
    trial_seed,
    v_star,
    verify,
    verify_exact,
)


def _fixed_batch(prep, rows):
    g = prep.graph
    X = np.array(rows, dtype=np.int64)
    nets = np.empty((len(rows), len(g.agents)), dtype=object)
    for t, x in enumerate(rows):
        net = g.net_values(x)
        nets[t] = [net[a] for a in g.agents]
    return TrialBatch(prep, len(rows), 0, "barter", X, nets, [g.objective(x) for x in rows])


def test_trial_seed_extends_base():
    assert trial_seed(3, 7) == (3, 7)
    assert trial_seed((3, 10), 7) == (3, 10, 7)


def test_run_trials_matches_direct_runs():
    prep = prepare(gkps_worst_case())
    batch = run_trials(prep, 40, seed=5)
    for t in range(40):
        assert tuple(batch.X[t]) == barter_dr(prep.graph, prep.lp.x, seed=(5, t)).x
    with pytest.raises(ValueError):
        run_trials(prep, 0)


def test_checks_pass_on_balanced_outcomes():
    prep = prepare(gkps_worst_case())
    batch = _fixed_batch(prep, [(1, 0, 1, 1), (0, 1, 1, 1)] * 50)
    assert check_marginals(batch).status == PASS
    assert check_degrees(batch).status == PASS
    bound, mean = check_net_values(batch)
    assert bound.status == PASS and mean.status == PASS
    assert check_objective(batch).status == PASS


def test_biased_marginals_warn():
    prep = prepare(gkps_worst_case())
    batch = _fixed_batch(prep, [(1, 0, 1, 1)] * 90 + [(0, 1, 1, 1)] * 10)
    sec = check_marginals(batch)
    assert sec.status == WARN and not sec.hard
    assert {r["edge"] for r in sec.failures} == {"1->2:3", "1->2:4"}


def test_degree_violation_is_hard_failure():
    prep = prepare(gap_family(4))
    # the second edge is settled at 1, so dropping it breaks its endpoint degrees
    batch = _fixed_batch(prep, [(0, 1), (0, 0)])
    sec = check_degrees(batch)
    assert sec.status == FAIL and sec.hard
    assert {r["vertex"] for r in sec.failures} == {"L:2:j2", "R:1:j2"}


def test_stripped_agent_breaks_net_value_bound():
    prep = prepare(gkps_worst_case())
    batch = _fixed_batch(prep, [(0, 0, 1, 1), (1, 1, 1, 1)])
    bound, _ = check_net_values(batch)
    assert bound.status == FAIL
    assert {r["agent"] for r in bound.failures} == {"1", "2"}
    assert v_star(prep.graph) == {"1": 20, "2": 20}


def test_negative_correlation_check_flags_positive_dependence():
    prep = prepare(random_instance(5, 4, 0.9, (1, 6), (1, 3), seed=2))
    subsets = neighbourhood_subsets(prep)
    assert subsets
    v, S = subsets[0]
    base = [int(x) for x in prep.lp.x]
    together = [tuple(base[k] + (1 if k in S and t % 2 else 0) for k in range(len(base))) for t in range(200)]
    sec = check_neg_corr(_fixed_batch(prep, together), [(v, S)])
    assert sec.status == WARN


def test_neighbourhood_subsets_cover_small_sizes():
    prep = prepare(random_instance(5, 4, 0.9, (1, 6), (1, 3), seed=17))
    subsets = neighbourhood_subsets(prep, max_size=2, extra=2)
    assert all(len(S) >= 2 for _, S in subsets)
    for v, S in subsets:
        assert all(k in prep.graph.incident[v] for k in S)
        assert all(prep.lp.x[k].denominator != 1 for k in S)


def test_verify_worst_case_barter_passes_and_baseline_fails():
    report = verify(gkps_worst_case(), trials=2000, seed=1)
    assert report.passed
    assert [s.name for s in report.sections] == [
        "marginals", "degrees", "negative_correlation", "net_value_bound", "net_value_mean", "objective",
    ]
    base = verify(gkps_worst_case(), trials=2000, seed=1, algorithm=GKPS)
    assert not base.passed
    assert base.section("net_value_bound").status == FAIL
    assert base.section("degrees").status == PASS


def test_report_is_deterministic_json():
    a = verify(gap_family(4), trials=500, seed=3)
    b = verify(gap_family(4), trials=500, seed=3)
    assert a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert doc["passed"] and doc["lp_objective"] == "1/2"
    assert "overall: PASS" in a.table()


def test_warn_triggers_rerun(monkeypatch):
    import barterdr.verify as vmod

    calls = []
    orig = vmod.run_trials

    def spy(prep, trials, seed, algorithm, tree):
        calls.append((trials, seed))
        return orig(prep, trials, seed, algorithm, tree)

    real_marg = vmod.check_marginals

    def flaky(batch):
        sec = real_marg(batch)
        if batch.trials == 100:
            sec.status = WARN
        return sec

    monkeypatch.setattr(vmod, "run_trials", spy)
    monkeypatch.setattr(vmod, "check_marginals", flaky)
    report = vmod.verify(gkps_worst_case(), trials=100, seed=2)
    assert calls == [(100, 2), (1000, (2, 10))]
    sec = report.section("marginals")
    assert sec.status == PASS and "rerun" in sec.note


def test_verify_exact_barter_and_baseline():
    assert verify_exact(gkps_worst_case()).passed
    rep = verify_exact(gap_family(4))
    assert rep.passed and rep.distribution == {(1, 1): F(1, 4), (0, 1): F(3, 4)}
    base = verify_exact(gkps_worst_case(), GKPS)
    assert not base.net_bound_ok and base.marginals_ok and base.degrees_ok


def test_verify_exact_random_capacitated():
    for seed in (2, 4, 13):
        rep = verify_exact(random_instance(4, 3, 0.9, (1, 5), (1, 2), seed=seed))
        assert rep.passed
