#!/usr/bin/env python3
"""Canned benchmark sweep: for each rule and each x on the grid, run seeded
instances and record whether the rule's guaranteed notion held, writing one
CSV per instance class under bench_out/.

Usage: python scripts/bench_sweep.py [--seeds K] [--out DIR]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fairshare.cli import main as cli_main  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=25)
    parser.add_argument("--out", default="bench_out")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweeps = [
        ("matroid-rank-random", "pick,transfer,mwhw", 3, 7),
        ("submodular-table-random", "pick", 3, 7),
        ("binary-additive", "pick,transfer,mwhw", 4, 8),
    ]
    for cls, rules, n, m in sweeps:
        out_csv = out_dir / f"{cls}.csv"
        code = cli_main([
            "bench",
            "--class", cls,
            "--n", str(n),
            "--m", str(m),
            "--seeds", str(args.seeds),
            "--x-grid", "0,1/4,1/2,3/4,1",
            "--rules", rules,
            "-o", str(out_csv),
        ])
        if code != 0:
            return code
        print(f"wrote {out_csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
