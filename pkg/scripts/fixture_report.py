#!/usr/bin/env python3
"""Walk the built-in fixtures and print what each one demonstrates:
feasibility gaps, rule outputs, and the welfare/fairness verdicts behind them.
"""

import sys
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fairshare import (  # noqa: E402
    NotionParams,
    check_ef1,
    check_mef1,
    check_twef,
    clean,
    exact_optimum,
    fixture,
    notion_exists,
    picking_sequence,
    transfer_algorithm,
    welfare,
)

X_GRID = (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))


def show(allocation):
    return " | ".join("{" + ",".join(f"g{g}" for g in sorted(b)) + "}" for b in allocation.bundles)


def main() -> int:
    print("== example1: weighted envy is unavoidable, transferability is not ==")
    fx = fixture("example1")
    exists, _ = notion_exists(fx.instance, NotionParams("WEF", F(1), F(0)), complete_only=True)
    print(f"  complete WEF(1,0) allocation exists: {exists}")
    exists, witness = notion_exists(fx.instance, NotionParams("TWEF", F(1), F(0)), complete_only=True)
    print(f"  complete TWEF(1,0) allocation exists: {exists}  e.g. {show(witness)}")
    alloc, trace = transfer_algorithm(fx.instance, F(0))
    print(f"  transfer rule at x=0: {show(alloc)} after {len(trace.steps)} transfers, "
          f"TWEF(0,1)={check_twef(alloc, fx.instance, F(0)).verdict}")

    print("== mwhw-nonclean: an optimal but redundant allocation loses the guarantee ==")
    fx = fixture("mwhw-nonclean")
    for x in X_GRID:
        _, argmax = exact_optimum(fx.instance, "whw", x=x)
        in_argmax = fx.allocation in argmax
        raw = check_twef(fx.allocation, fx.instance, x).verdict
        cleaned = clean(fx.allocation, fx.instance)
        fixed = check_twef(cleaned, fx.instance, x).verdict
        print(f"  x={str(x):>3}: optimal={in_argmax}  TWEF raw={raw}  TWEF after clean={fixed}")

    print("== roundrobin-ef1: alternating picks give MEF1 but not EF1 ==")
    fx = fixture("roundrobin-ef1")
    alloc, trace = picking_sequence(fx.instance, F(1))
    print(f"  picks: {', '.join(f'agent {s.agent} takes g{s.good}' for s in trace.steps)}")
    ef1 = check_ef1(alloc, fx.instance)
    print(f"  EF1: {ef1.verdict} (violated pairs {[(v.i, v.j) for v in ef1.violations]}), "
          f"MEF1: {check_mef1(alloc, fx.instance).verdict}")

    print("== extended-harmonic: the real-argument welfare can abandon EF1 ==")
    fx = fixture("extended-harmonic")
    value, argmax = exact_optimum(fx.instance, "hw-extended")
    print(f"  unique optimum: {show(argmax[0])} with welfare {value.key.value:.6f}")
    for bundles in ([[2], [1, 3]], [[], [1, 2, 3]]):
        from fairshare import Allocation

        w = welfare(Allocation.from_lists(bundles), fx.instance, "hw-extended")
        print(f"  alternative {show(Allocation.from_lists(bundles))}: welfare {w.key.value:.6f}")
    ef1 = check_ef1(argmax[0], fx.instance)
    print(f"  EF1 on the optimum: {ef1.verdict} (violations {[(v.i, v.j) for v in ef1.violations]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
