"""Monte Carlo and exact certification of the rounding guarantees.

Checks cover marginal preservation, degree preservation, negative
correlation within vertex neighbourhoods, the per-agent net-value bound and
zero mean, and the expected objective.  Hard checks (degrees, net-value
bound) fail on a single violation; statistical checks use 3 sigma and are
reported as WARN, then rerun once with ten times the trials before failing.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import BarterInstance, format_fraction
from .pipeline import Prepared, prepare
from .rounding import BARTER, OutcomeTree, enumerate_outcomes
from .rounding.state import ceil, floor

PASS, WARN, FAIL = "PASS", "WARN", "FAIL"


def trial_seed(base, t: int) -> tuple[int, ...]:
    """Seed of trial ``t``: the base seed (int or tuple) followed by ``t``."""
    base = tuple(base) if isinstance(base, (tuple, list)) else (base,)
    return base + (t,)


@dataclass
class TrialBatch:
    prepared: Prepared
    trials: int
    seed: object
    algorithm: str
    X: np.ndarray  # trials x edges, integral
    nets: np.ndarray  # trials x agents, exact values held as Fractions (object dtype)
    utilities: list[Fraction]

    @property
    def graph(self):
        return self.prepared.graph


def run_trials(
    instance: BarterInstance | Prepared,
    trials: int,
    seed=0,
    algorithm: str = BARTER,
    tree: OutcomeTree | None = None,
) -> TrialBatch:
    """``trials`` seeded roundings of one LP optimum (the LP is solved once).

    Runs share a memoized decision tree; each sample equals a direct run with
    seed ``trial_seed(seed, t)``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    prep = instance if isinstance(instance, Prepared) else prepare(instance)
    g = prep.graph
    tree = tree or OutcomeTree(g, prep.lp.x, algorithm)
    X = np.zeros((trials, len(g.edges)), dtype=np.int64)
    nets = np.empty((trials, len(g.agents)), dtype=object)
    utilities = []
    cache: dict[tuple[int, ...], tuple[list[Fraction], Fraction]] = {}
    for t in range(trials):
        x = tree.sample(trial_seed(seed, t))
        if x not in cache:
            net = g.net_values(x)
            cache[x] = ([net[a] for a in g.agents], g.objective(x))
        X[t] = x
        nets[t] = cache[x][0]
        utilities.append(cache[x][1])
    return TrialBatch(prep, trials, seed, algorithm, X, nets, utilities)


@dataclass
class Section:
    name: str
    status: str
    hard: bool
    rows: list[dict] = field(default_factory=list)
    note: str = ""

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.rows if not r["ok"]]


def _status(rows, hard: bool) -> str:
    if all(r["ok"] for r in rows):
        return PASS
    return FAIL if hard else WARN


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd


def check_marginals(batch: TrialBatch) -> Section:
    x0 = batch.prepared.lp.x
    n = batch.trials
    rows = []
    for k, xe in enumerate(x0):
        emp = float(batch.X[:, k].mean())
        frac = float(xe - floor(xe))
        sigma = math.sqrt(frac * (1 - frac) / n)
        if sigma == 0:
            ok = bool((batch.X[:, k] == int(xe)).all())
            z = 0.0
        else:
            z = (emp - float(xe)) / sigma
            ok = abs(z) <= 3
        rows.append({"edge": batch.graph.edge_label(k), "x0": xe, "empirical": emp, "z": z, "ok": ok})
    return Section("marginals", _status(rows, False), False, rows)


def check_degrees(batch: TrialBatch) -> Section:
    g = batch.graph
    deg0 = g.degrees(batch.prepared.lp.x)
    inc = np.zeros((len(g.edges), len(g.vertices)), dtype=np.int64)
    for k, e in enumerate(g.edges):
        inc[k, e.left] = inc[k, e.right] = 1
    D = batch.X @ inc
    rows = []
    for v, d0 in enumerate(deg0):
        lo, hi = floor(d0), ceil(d0)
        bad = int(((D[:, v] < lo) | (D[:, v] > hi) | (D[:, v] > g.vertices[v].cap)).sum())
        rows.append({"vertex": g.vertices[v].label, "x0": d0, "violations": bad, "ok": bad == 0})
    return Section("degrees", _status(rows, True), True, rows)


def neighbourhood_subsets(batch_or_prep, max_size: int = 4, extra: int = 4, seed: int = 0):
    """``(vertex, subset)`` pairs of fractional edges incident to one vertex.

    All subsets with 2..max_size edges, plus ``extra`` random larger subsets
    per vertex whose fractional degree exceeds ``max_size``.
    """
    prep = batch_or_prep.prepared if isinstance(batch_or_prep, TrialBatch) else batch_or_prep
    g, x0 = prep.graph, prep.lp.x
    rng = np.random.default_rng(seed)
    out = []
    for v in range(len(g.vertices)):
        frac = [k for k in g.incident[v] if x0[k].denominator != 1]
        if len(frac) < 2:
            continue
        for size in range(2, min(max_size, len(frac)) + 1):
            out += [(v, S) for S in itertools.combinations(frac, size)]
        if len(frac) > max_size:
            seen = set()
            for _ in range(extra):
                size = int(rng.integers(max_size + 1, len(frac) + 1))
                S = tuple(sorted(rng.choice(frac, size=size, replace=False).tolist()))
                if S not in seen:
                    seen.add(S)
                    out.append((v, S))
    return out


def check_neg_corr(batch: TrialBatch, subsets=None) -> Section:
    """One-sided test of ``Pr(all X_s = c) <= prod Pr(X_s = c)`` on fractional parts."""
    g = batch.graph
    subsets = subsets if subsets is not None else neighbourhood_subsets(batch)
    x0 = batch.prepared.lp.x
    bits = batch.X - np.array([floor(v) for v in x0], dtype=np.int64)
    n = batch.trials
    rows = []
    for v, S in subsets:
        cols = bits[:, list(S)]
        for c in (0, 1):
            hit = cols == c
            joint = float(hit.all(axis=1).mean())
            prod = float(np.prod(hit.mean(axis=0)))
            q = max(joint, prod)
            slack = 3 * math.sqrt(q * (1 - q) / n)
            rows.append({
                "vertex": g.vertices[v].label,
                "edges": [g.edge_label(k) for k in S],
                "c": c,
                "joint": joint,
                "product": prod,
                "ok": joint <= prod + slack,
            })
    return Section("negative_correlation", _status(rows, False), False, rows)


def v_star(graph) -> dict[str, Fraction]:
    return {
        a: max((graph.vertices[v].value for v in graph.kappa[a]), default=Fraction(0))
        for a in graph.agents
    }


def check_net_values(batch: TrialBatch) -> tuple[Section, Section]:
    """Hard bound ``|D_i| < v_i*`` per trial and a 3-sigma zero-mean test."""
    g = batch.graph
    vs = v_star(g)
    n = batch.trials
    hard_rows, stat_rows = [], []
    for i, a in enumerate(g.agents):
        col = batch.nets[:, i]
        worst = max(abs(d) for d in col)
        ok = worst < vs[a] or worst == 0
        hard_rows.append({"agent": a, "max_abs_D": worst, "v_star": vs[a], "ok": ok})
        mean, sd = _mean_sd([float(d) for d in col])
        half = 3 * sd / math.sqrt(n)
        okm = abs(mean) <= half if sd > 0 else all(d == 0 for d in col)
        stat_rows.append({"agent": a, "mean_D": mean, "sd": sd, "half_width": half, "ok": okm})
    return (
        Section("net_value_bound", _status(hard_rows, True), True, hard_rows),
        Section("net_value_mean", _status(stat_rows, False), False, stat_rows),
    )


def check_objective(batch: TrialBatch, lp=None) -> Section:
    lp = lp or batch.prepared.lp
    mean, sd = _mean_sd([float(u) for u in batch.utilities])
    half = 3 * sd / math.sqrt(batch.trials)
    target = float(lp.objective)
    ok = abs(mean - target) <= half if sd > 0 else all(u == lp.objective for u in batch.utilities)
    row = {"lp_objective": lp.objective, "mean_utility": mean, "sd": sd, "half_width": half, "ok": ok}
    return Section("objective", _status([row], False), False, [row])


def _sections(batch: TrialBatch, subset_seed: int) -> list[Section]:
    bound, mean = check_net_values(batch)
    return [
        check_marginals(batch),
        check_degrees(batch),
        check_neg_corr(batch, neighbourhood_subsets(batch, seed=subset_seed)),
        bound,
        mean,
        check_objective(batch),
    ]


@dataclass
class VerificationReport:
    trials: int
    seed: object
    algorithm: str
    lp_objective: Fraction
    sections: list[Section]

    @property
    def passed(self) -> bool:
        return all(s.status == PASS for s in self.sections)

    def section(self, name: str) -> Section:
        return next(s for s in self.sections if s.name == name)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return format_fraction(v)
            if isinstance(v, float):
                return round(v, 9)
            if isinstance(v, (np.bool_, bool)):
                return bool(v)
            if isinstance(v, list):
                return [enc(u) for u in v]
            return v

        return {
            "trials": self.trials,
            "seed": list(self.seed) if isinstance(self.seed, tuple) else self.seed,
            "algorithm": self.algorithm,
            "lp_objective": format_fraction(self.lp_objective),
            "passed": self.passed,
            "sections": [
                {
                    "name": s.name,
                    "status": s.status,
                    "hard": s.hard,
                    "note": s.note,
                    "checked": len(s.rows),
                    "failures": [{k: enc(v) for k, v in r.items()} for r in s.failures],
                }
                for s in self.sections
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{'check':<22} {'kind':<12} {'status':<6} {'rows':>6} {'fail':>5}  note"]
        for s in self.sections:
            kind = "hard" if s.hard else "statistical"
            lines.append(
                f"{s.name:<22} {kind:<12} {s.status:<6} {len(s.rows):>6} {len(s.failures):>5}  {s.note}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({self.trials} trials)")
        return "\n".join(lines) + "\n"


def verify(
    instance: BarterInstance | Prepared,
    trials: int = 10_000,
    seed=0,
    algorithm: str = BARTER,
    subset_seed: int = 0,
) -> VerificationReport:
    prep = instance if isinstance(instance, Prepared) else prepare(instance)
    tree = OutcomeTree(prep.graph, prep.lp.x, algorithm)
    batch = run_trials(prep, trials, seed, algorithm, tree)
    sections = _sections(batch, subset_seed)
    if any(s.status == WARN for s in sections):
        big = run_trials(prep, 10 * trials, trial_seed(seed, 10), algorithm, tree)
        rerun = {s.name: s for s in _sections(big, subset_seed)}
        for k, s in enumerate(sections):
            if s.status == WARN:
                again = rerun[s.name]
                again.status = PASS if again.status == PASS else FAIL
                again.note = f"rerun with {10 * trials} trials after WARN"
                sections[k] = again
    return VerificationReport(trials, seed, algorithm, prep.lp.objective, sections)


@dataclass
class ExactReport:
    distribution: dict[tuple[int, ...], Fraction]
    marginals_ok: bool
    degrees_ok: bool
    neg_corr_ok: bool
    net_bound_ok: bool
    net_mean_ok: bool
    objective_ok: bool

    @property
    def passed(self) -> bool:
        return all((self.marginals_ok, self.degrees_ok, self.neg_corr_ok,
                    self.net_bound_ok, self.net_mean_ok, self.objective_ok))


def verify_exact(instance: BarterInstance | Prepared, algorithm: str = BARTER, max_leaves: int = 1 << 16) -> ExactReport:
    """Exact verification from the full output distribution of the rounding."""
    prep = instance if isinstance(instance, Prepared) else prepare(instance)
    g, x0 = prep.graph, prep.lp.x
    dist = enumerate_outcomes(g, x0, algorithm, max_leaves)
    outcomes = list(dist.items())

    def expect(f):
        return sum((p * f(X) for X, p in outcomes), Fraction(0))

    marg = all(expect(lambda X, k=k: X[k]) == x0[k] for k in range(len(x0)))
    deg0 = g.degrees(x0)
    degs = all(
        floor(d0) <= d <= ceil(d0)
        for X, _ in outcomes
        for d0, d in zip(deg0, g.degrees(X))
    )
    neg = True
    base = [floor(v) for v in x0]
    for v in range(len(g.vertices)):
        frac = [k for k in g.incident[v] if x0[k].denominator != 1]
        for size in range(2, len(frac) + 1):
            for S in itertools.combinations(frac, size):
                for c in (0, 1):
                    joint = expect(lambda X: int(all(X[k] - base[k] == c for k in S)))
                    prod = Fraction(1)
                    for k in S:
                        prod *= expect(lambda X, k=k: int(X[k] - base[k] == c))
                    neg = neg and joint <= prod
    vs = v_star(g)
    bound = all(
        abs(d) < vs[a] or d == 0 for X, _ in outcomes for a, d in g.net_values(X).items()
    )
    mean = all(expect(lambda X, a=a: g.net_values(X)[a]) == 0 for a in g.agents)
    obj = expect(g.objective) == prep.lp.objective
    return ExactReport(dist, marg, degs, neg, bound, mean, obj)
