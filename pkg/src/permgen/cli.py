"""Command line interface: ``permgen <subcommand> ...``.

Exit codes: 0 success, 2 infeasible configuration, 3 capacity or budget error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import asymptotics, harness, partitions
from .asymptotics import LimitParams
from .errors import (BudgetError, CapacityError, CycleTypeError, DegenerateDegreeError,
                     IndeterminateLimitError, InfeasibleConfigError)
from .perm import CycleType

EXIT_INFEASIBLE = 2
EXIT_CAPACITY = 3


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return "" if v is None else v


def _emit(rows: list[dict], fmt: str, out=None, extra: dict | None = None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        payload = rows[0] if len(rows) == 1 and not extra else {"rows": rows, **(extra or {})}
        json.dump(payload, out, default=str, indent=2)
        out.write("\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})


def _x(text: str):
    return asymptotics.INF if text.strip().lower() in ("inf", "infinity") else float(text)


def _cmd_estimate(args) -> int:
    if args.type is not None or args.type2 is not None:
        if args.type is None or args.type2 is None:
            raise SystemExit("--type and --type2 must be given together")
        spec = CycleType.parse(args.type, args.n)
        spec2 = CycleType.parse(args.type2, args.n)
    else:
        spec = harness.ScaledSpec(args.x, args.y, args.filler)
        spec2 = harness.ScaledSpec(args.xp, args.yp, args.filler)
    cfg = harness.ExperimentConfig(args.n, spec, spec2, args.event, args.samples, args.seed, args.threads,
                                   args.max_exact_degree)
    result = harness.estimate_event(cfg)
    if args.event == "classify":
        rows = []
        for tag in ("intransitive", "transitive_proper", "alternating", "symmetric"):
            hits = result.counts.get(tag, 0)
            lo, hi = harness.wilson_interval(hits, result.samples)
            rows.append({"event": f"classify:{tag}", "n": result.n, "samples": result.samples,
                         "estimate": hits / result.samples if result.samples else 0.0,
                         "ci_low": lo, "ci_high": hi, "limit": None, "seed": result.seed})
        rows.insert(0, result.row())
    else:
        rows = [result.row()]
    if result.unknown:
        print(f"warning: {result.unknown} samples undecided above the recognition budget",
              file=sys.stderr)
    _emit(rows, args.format)
    return 0


def _cmd_exact(args) -> int:
    report = harness.exact_report(args.n, CycleType.parse(args.type, args.n),
                                  CycleType.parse(args.type2, args.n), args.kmax)
    rows = [r.as_dict() for r in report.rows]
    if args.format == "json":
        _emit(rows, "json", extra=report.summary())
    else:
        _emit(rows, "csv")
        summary = report.summary()
        sys.stdout.write("# " + ", ".join(f"{k}={_fmt(v)}" for k, v in summary.items()) + "\n")
    return 0


def _cmd_limit(args) -> int:
    p = LimitParams(_x(args.x), args.y, _x(args.xp), args.yp)
    prob = asymptotics.generation_probability_limit(p)
    en = asymptotics.expected_N_limit(p)
    print(f"probability {prob:.6f}")
    print(f"expected_N {en:.6f}" if math.isfinite(en) else "expected_N inf")
    return 0


def _cmd_random_class(args) -> int:
    report = harness.random_class_experiment(args.n, args.samples, args.seed, threads=args.threads,
                                             max_exact_degree=args.max_exact_degree)
    _emit(report.rows(), args.format)
    return 0


def _cmd_constants(args) -> int:
    rep = asymptotics.application_constant_report()
    p_alt, p_sym = asymptotics.split_constants()
    print(f"a {asymptotics.A:.6f}")
    print(f"b {asymptotics.B:.6f}")
    print(f"b^2 {asymptotics.B_SQUARED:.6f}")
    print(f"E1(b^2) {rep.exp1_b2:.6f}")
    print(f"generation_constant {rep.value:.6f}")
    print(f"generation_constant_quadrature {rep.quadrature:.6f}")
    print(f"P(G=A_n) {p_alt:.6f}")
    print(f"P(G=S_n) {p_sym:.6f}")
    return 0


def _cmd_partition(args) -> int:
    n = args.n
    if args.tail is not None:
        t = partitions.PartitionTail(*args.tail)
        print(f"limit {partitions.tail_probability_limit(t):.6f}")
        print(f"exact {float(partitions.tail_probability_exact(n, t)):.6f}")
    elif args.sample is not None:
        rng = np.random.default_rng(args.seed)
        for _ in range(args.sample):
            print(partitions.sample_uniform_partition(n, rng))
    else:
        print(partitions.partition_count(n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permgen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="Monte Carlo estimate of a generation event")
    est.add_argument("--n", type=int, required=True)
    est.add_argument("--x", type=float, default=0.0)
    est.add_argument("--y", type=float, default=0.0)
    est.add_argument("--xp", type=float, default=0.0)
    est.add_argument("--yp", type=float, default=0.0)
    est.add_argument("--type")
    est.add_argument("--type2")
    est.add_argument("--filler", choices=("long-cycle", "three-cycles", "mixed"), default="long-cycle")
    est.add_argument("--event", choices=harness.EVENTS, default="transitive")
    est.add_argument("--samples", type=int, default=10_000)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--threads", type=int, default=1)
    est.add_argument("--max-exact-degree", type=int, default=harness.MAX_EXACT_DEGREE)
    est.add_argument("--format", choices=("json", "csv"), default="csv")
    est.set_defaults(func=_cmd_estimate)

    ex = sub.add_parser("exact", help="exact expected orbit counts")
    ex.add_argument("--n", type=int, required=True)
    ex.add_argument("--type", required=True)
    ex.add_argument("--type2", required=True)
    ex.add_argument("--kmax", type=int, required=True)
    ex.add_argument("--format", choices=("json", "csv"), default="csv")
    ex.set_defaults(func=_cmd_exact)

    lim = sub.add_parser("limit", help="limiting generation probability")
    for name in ("--x", "--xp"):
        lim.add_argument(name, default="0")
    lim.add_argument("--y", type=float, default=0.0)
    lim.add_argument("--yp", type=float, default=0.0)
    lim.set_defaults(func=_cmd_limit)

    rc = sub.add_parser("random-class", help="two random elements of random classes")
    rc.add_argument("--n", type=int, required=True)
    rc.add_argument("--samples", type=int, default=10_000)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--threads", type=int, default=1)
    rc.add_argument("--max-exact-degree", type=int, default=harness.MAX_EXACT_DEGREE)
    rc.add_argument("--format", choices=("json", "csv"), default="csv")
    rc.set_defaults(func=_cmd_random_class)

    const = sub.add_parser("constants", help="random-class constants")
    const.set_defaults(func=_cmd_constants)

    part = sub.add_parser("partition", help="partition counts, samples and tails")
    part.add_argument("--n", type=int, required=True)
    mode = part.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--sample", type=int, metavar="S")
    mode.add_argument("--tail", type=float, nargs=2, metavar=("X", "Y"))
    part.add_argument("--seed", type=int, default=0)
    part.set_defaults(func=_cmd_partition)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleConfigError, CycleTypeError, DegenerateDegreeError, IndeterminateLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CapacityError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
