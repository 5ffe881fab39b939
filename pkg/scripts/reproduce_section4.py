"""Run the full acceptance battery and print the check table and verdict rows.

    python scripts/reproduce_section4.py [--dense] [--seed N]
"""

import argparse
import time

from crossedhom import section4 as s4


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dense", action="store_true", help="use the dense pair grid")
    ap.add_argument("--seed", type=int, default=None, help="randomise families and catalog coefficients")
    args = ap.parse_args()

    cfg = s4.Section4Config(grid="dense" if args.dense else "default", seed=args.seed)
    t0 = time.perf_counter()
    checks, rows = s4.run_section4(cfg)
    width = max(len(c.name) for c in checks)
    for c in checks:
        res = "" if c.residual is None else f"{c.residual:.2e}"
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {res:>9}  {c.detail}")
    print()
    for r in rows:
        print(f"{r['path']:<40} expected={r['expected']:<14} got={r['verdict']}")
    failed = sum(not c.passed for c in checks)
    print(f"\n{len(checks) - failed}/{len(checks)} checks passed in {time.perf_counter() - t0:.2f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
