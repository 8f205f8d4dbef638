"""Command-line entry point: ``barterdr {solve,verify,oracle,gen}``.

Exit codes: 0 success, 1 invalid input or flags, 2 fairness floors
infeasible, 3 instance too large for the oracle, 4 verification failed.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .lp import InfeasibleWithFairness, dump_lp
from .model import ITEM_VALUE, UNIT, TransferWeight, ValidationError
from .oracle import OddSum, TooLarge, brute_force, gap_family, gkps_worst_case, partition_to_bsv, random_instance
from .pipeline import prepare, round_prepared
from .rounding import ALGORITHMS, BARTER, write_trace
from .verify import verify

EXIT_OK, EXIT_INPUT, EXIT_FAIRNESS, EXIT_TOO_LARGE, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


def _read_instance(path: str):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return io.parse_instance(text)


def _pair(text: str, name: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"--{name} expects 'lo,hi'") from None
    if lo > hi or lo < 1:
        raise UsageError(f"--{name} needs 1 <= lo <= hi")
    return lo, hi


def cmd_solve(args, out) -> int:
    inst = _read_instance(args.instance)
    if args.weights:
        inst = inst.with_weights(TransferWeight(args.weights, inst.weights.explicit))
    prep = prepare(inst, fairness=args.fairness == "on", optimum=args.optimum)
    if args.lp_out:
        with open(args.lp_out, "w", encoding="utf-8") as fh:
            fh.write(dump_lp(prep.problem))
    solved = round_prepared(prep, seed=args.seed, algorithm=args.algorithm)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            write_trace(solved.rounding.trace, fh)
    doc = io.allocation_document(solved.allocation, solved.report, args.seed, prep.lp.objective)
    out.write(io.dumps(doc))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    inst = _read_instance(args.instance)
    report = verify(inst, args.trials, args.seed, args.algorithm)
    out.write(report.to_json() if args.json else report.table())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_oracle(args, out) -> int:
    inst = _read_instance(args.instance)
    out.write(io.dumps(io.oracle_document(brute_force(inst, args.edge_limit))))
    return EXIT_OK


def cmd_gen(args, out) -> int:
    if args.family == "partition":
        if not args.set:
            raise UsageError("gen partition needs --set a,b,c")
        try:
            nums = [int(p) for p in args.set.split(",")]
        except ValueError:
            raise UsageError("--set expects comma-separated integers") from None
        inst = partition_to_bsv(nums)
    elif args.family == "gap":
        if args.n < 1:
            raise UsageError("--n must be positive")
        inst = gap_family(args.n)
    elif args.family == "worstcase":
        inst = gkps_worst_case()
    else:
        try:
            density = Fraction(args.density)
        except ValueError:
            raise UsageError("--density expects a number") from None
        if not 0 < density <= 1:
            raise UsageError("--density must lie in (0, 1]")
        inst = random_instance(
            args.agents,
            args.items,
            density,
            _pair(args.values, "values"),
            _pair(args.caps, "caps"),
            seed=args.seed,
            weights=args.weights or UNIT,
        )
    out.write(io.dump_instance(inst))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barterdr", description="Value-balanced barter allocation by dependent rounding.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="LP plus randomized rounding; prints an allocation")
    s.add_argument("instance", help="instance JSON file, or - for stdin")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace", help="write per-iteration JSON lines here")
    s.add_argument("--weights", choices=[ITEM_VALUE, UNIT], help="override the weight rule")
    s.add_argument("--fairness", choices=["on", "off"], default="on")
    s.add_argument("--algorithm", choices=sorted(ALGORITHMS), default=BARTER)
    s.add_argument("--optimum", choices=["central", "vertex"], default="central")
    s.add_argument("--lp-out", help="write the LP in plain-text form here")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="Monte Carlo certification of the rounding guarantees")
    v.add_argument("instance")
    v.add_argument("--trials", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--algorithm", choices=sorted(ALGORITHMS), default=BARTER)
    v.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive best integral allocation")
    o.add_argument("instance")
    o.add_argument("--edge-limit", type=int, default=24)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="emit an instance from a named family")
    g.add_argument("family", choices=["partition", "gap", "worstcase", "random"])
    g.add_argument("--set", help="partition: comma-separated positive integers")
    g.add_argument("--n", type=int, default=2, help="gap: value ratio")
    g.add_argument("--agents", type=int, default=4)
    g.add_argument("--items", type=int, default=4)
    g.add_argument("--density", default="1/2")
    g.add_argument("--values", default="1,5", help="random: value range lo,hi")
    g.add_argument("--caps", default="1,1", help="random: capacity range lo,hi")
    g.add_argument("--weights", choices=[ITEM_VALUE, UNIT])
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args, out)
    except InfeasibleWithFairness as exc:
        err.write(f"error: {exc}\n")
        return EXIT_FAIRNESS
    except TooLarge as exc:
        err.write(f"error: {exc}\n")
        return EXIT_TOO_LARGE
    except (io.ParseError, ValidationError, UsageError, OddSum, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
