"""Command-line front end: generate instances, run rules, check notions,
query the exact oracle, and sweep benchmarks.

Exit codes: 0 success, 1 a `check` verdict came back false, 2 errors.
All randomness flows from --seed; rational arguments accept "p/q" and
decimal strings and are converted exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import fairness, instances, oracle, rules
from .instances import Allocation, Instance, SchemaError, format_rational


RULE_NAMES = ("pick", "transfer", "mwhw")

# the notion each rule is guaranteed to satisfy at parameter x
GUARANTEED_NOTION = {"pick": "WMEF", "transfer": "TWEF", "mwhw": "TWEF"}


def _parse_rational(text: str) -> Fraction:
    try:
        return instances.parse_rational(text)
    except SchemaError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_instance(args) -> Instance:
    if getattr(args, "fixture", None):
        return instances.fixture(args.fixture, m=getattr(args, "fixture_m", None)).instance
    if getattr(args, "instance", None):
        return instances.load(Path(args.instance))
    raise ValueError("provide --instance FILE or --fixture NAME")


def _load_allocation(args, instance: Instance) -> Allocation:
    if getattr(args, "allocation", None):
        doc = json.loads(Path(args.allocation).read_text())
        return Allocation.from_json(doc)
    if getattr(args, "fixture", None):
        fx = instances.fixture(args.fixture, m=getattr(args, "fixture_m", None))
        if fx.allocation is not None:
            return fx.allocation
    raise ValueError("provide --allocation FILE (this fixture has no reference allocation)")


def cmd_gen(args) -> int:
    if args.fixture:
        inst = instances.fixture(args.fixture, m=args.fixture_m).instance
    else:
        if not args.klass:
            raise ValueError("provide --class or --fixture")
        params = {"weights": args.weights}
        if args.vmax is not None:
            params["vmax"] = args.vmax
        inst = instances.generate(args.klass, args.n, args.m, args.seed, params)
    _write_output(instances.saves(inst), args.output)
    return 0


def cmd_solve(args) -> int:
    inst = _load_instance(args)
    x = args.x
    if args.rule == "pick":
        allocation, trace = rules.picking_sequence(inst, x, tie_break=args.tie_break, seed=args.seed)
        trace_doc = trace.to_json()
    elif args.rule == "transfer":
        allocation, trace = rules.transfer_algorithm(inst, x)
        trace_doc = trace.to_json()
    else:
        allocation = rules.mwhw_gain(inst, x)
        trace_doc = None
    doc = allocation.to_json()
    if args.trace and trace_doc is not None:
        doc["trace"] = trace_doc
    _write_output(_dump_json(doc), args.output)
    return 0


def cmd_check(args) -> int:
    inst = _load_instance(args)
    allocation = _load_allocation(args, inst)
    params = fairness.NotionParams(notion=args.notion, x=args.x, y=args.y)
    report = fairness.check_notion(allocation, inst, params)
    _write_output(_dump_json(report.to_json()), args.output)
    return 0 if report.verdict else 1


def cmd_oracle(args) -> int:
    inst = _load_instance(args)
    budget = oracle.SearchBudget.default()
    value, argmax = oracle.exact_optimum(
        inst, args.objective, x=args.x, budget=budget, complete_only=args.complete_only
    )
    doc = {
        "optimum": value.to_json(),
        "argmax_count": len(argmax),
    }
    if args.maximizers:
        doc["maximizers"] = [a.to_json() for a in argmax]
    _write_output(_dump_json(doc), args.output)
    return 0


def cmd_bench(args) -> int:
    x_grid = [_parse_rational(tok) for tok in args.x_grid.split(",")]
    rule_names = args.rules.split(",")
    for r in rule_names:
        if r not in RULE_NAMES:
            raise ValueError(f"unknown rule {r!r}; choose from {RULE_NAMES}")
    rows = []
    for seed in range(args.seeds):
        inst = instances.generate(args.klass, args.n, args.m, seed, {"weights": args.weights})
        for x in sorted(x_grid):
            for rule_name in sorted(rule_names):
                if rule_name == "pick":
                    allocation, trace = rules.picking_sequence(inst, x)
                    steps = len(trace.steps)
                elif rule_name == "transfer":
                    allocation, trace = rules.transfer_algorithm(inst, x)
                    steps = len(trace.steps)
                else:
                    allocation = rules.mwhw_gain(inst, x)
                    steps = sum(len(allocation.bundle(i)) for i in inst.agents())
                notion = GUARANTEED_NOTION[rule_name]
                params = fairness.NotionParams(notion=notion, x=x)
                verdict = fairness.check_notion(allocation, inst, params).verdict
                util = sum(
                    (inst.valuation(i).value(allocation.bundle(i)) for i in inst.agents()),
                    Fraction(0),
                )
                rows.append(
                    {
                        "seed": seed,
                        "n": inst.n,
                        "m": inst.m,
                        "class": args.klass,
                        "rule": rule_name,
                        "x": format_rational(x),
                        "notion": notion,
                        "verdict": verdict,
                        "transfers_picks": steps,
                        "welfare": format_rational(util),
                    }
                )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _write_output(buf.getvalue(), args.output)
    # satisfaction rates per (rule, notion) pair
    summary = {}
    for row in rows:
        key = (row["rule"], row["notion"])
        hits, total = summary.get(key, (0, 0))
        summary[key] = (hits + (1 if row["verdict"] else 0), total + 1)
    for (rule_name, notion), (hits, total) in sorted(summary.items()):
        sys.stderr.write(f"rate rule={rule_name} notion={notion} {hits / total:.3f}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairshare", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_source(p, allocation=False):
        p.add_argument("--instance", help="instance JSON file")
        p.add_argument("--fixture", choices=instances.FIXTURE_NAMES, help="built-in instance")
        p.add_argument("--fixture-m", type=int, default=None, dest="fixture_m",
                       help="good count for the example1 fixture")
        if allocation:
            p.add_argument("--allocation", help="allocation JSON file")

    gen = sub.add_parser("gen", help="write a generated or fixture instance as JSON")
    gen.add_argument("--class", dest="klass", choices=instances.GENERATOR_CLASSES)
    gen.add_argument("--fixture", choices=instances.FIXTURE_NAMES)
    gen.add_argument("--fixture-m", type=int, default=None, dest="fixture_m")
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--m", type=int, default=6)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--weights", choices=("random", "equal"), default="random")
    gen.add_argument("--vmax", type=int, default=None)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run an allocation rule")
    add_instance_source(solve)
    solve.add_argument("--rule", choices=RULE_NAMES, required=True)
    solve.add_argument("--x", type=_parse_rational, default=Fraction(1))
    solve.add_argument("--tie-break", choices=("index", "random"), default="index", dest="tie_break")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--trace", action="store_true")
    solve.add_argument("-o", "--output", default=None)
    solve.set_defaults(func=cmd_solve)

    check = sub.add_parser("check", help="check a fairness notion; exit 1 if it fails")
    add_instance_source(check, allocation=True)
    check.add_argument("--notion", choices=fairness.NOTIONS, required=True)
    check.add_argument("--x", type=_parse_rational, default=None)
    check.add_argument("--y", type=_parse_rational, default=None)
    check.add_argument("-o", "--output", default=None)
    check.set_defaults(func=cmd_check)

    orc = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    add_instance_source(orc)
    orc.add_argument("--objective", choices=fairness.OBJECTIVES, required=True)
    orc.add_argument("--x", type=_parse_rational, default=None)
    orc.add_argument("--complete-only", action="store_true", dest="complete_only")
    orc.add_argument("--maximizers", action="store_true", help="include all maximizers")
    orc.add_argument("-o", "--output", default=None)
    orc.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="sweep seeds x grid x rules, write CSV")
    bench.add_argument("--class", dest="klass", choices=instances.GENERATOR_CLASSES,
                       default="matroid-rank-random")
    bench.add_argument("--n", type=int, default=3)
    bench.add_argument("--m", type=int, default=6)
    bench.add_argument("--seeds", type=int, default=10)
    bench.add_argument("--x-grid", default="0,1/4,1/2,3/4,1", dest="x_grid")
    bench.add_argument("--rules", default="pick,transfer,mwhw")
    bench.add_argument("--weights", choices=("random", "equal"), default="random")
    bench.add_argument("-o", "--output", default=None)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, SchemaError, oracle.BudgetExceededError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
