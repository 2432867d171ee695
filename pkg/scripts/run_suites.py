"""Run every verification suite and print one PASS/FAIL line each, plus a JSON dump.

    python scripts/run_suites.py --out results.json
    python scripts/run_suites.py --only lclt,detscaling
"""

import argparse
import json
import sys
import time

from chroma import suites


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--only", default=None, help="comma-separated suite names")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    names = args.only.split(",") if args.only else list(suites.SUITES)
    report = {}
    failed = 0
    for name in names:
        t0 = time.perf_counter()
        res = suites.SUITES[name]()
        dt = time.perf_counter() - t0
        print(f"{res.line():<24} {dt:7.1f}s", flush=True)
        failed += not res.passed
        report[name] = {**res.to_json(), "seconds": dt}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
