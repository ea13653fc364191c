"""Run the full verification suite and print the pass/fail table.

    python3 scripts/verify_suite.py [--quick] [--seed N]
"""

import argparse
import sys
import time

from steindecomp.checks import format_table, run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    start = time.perf_counter()
    results = run_all(quick=args.quick, seed=args.seed)
    sys.stdout.write(format_table(results))
    print(f"elapsed {time.perf_counter() - start:.1f}s")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
