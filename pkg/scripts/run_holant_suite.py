#!/usr/bin/env python3
"""Run the seeded acceptance suites and print one line per suite.

    python3 scripts/run_holant_suite.py            # all eight at full size
    python3 scripts/run_holant_suite.py --quick    # tenth-size smoke run
    python3 scripts/run_holant_suite.py --only 2 6
"""
import argparse
import sys

from qholant import suites

FULL = [
    dict(seeds=1000),
    dict(seeds=500),
    dict(maps=200),
    dict(pairs=200, corrupted=200),
    dict(star_pairs=500, odot_trials=100, trotter_pairs=50),
    dict(graphs=100),
    dict(graphs=200),
    dict(trials=100),
]


def shrink(kwargs):
    keep = {"odot_trials"}
    return {k: (v if k in keep else max(1, v // 10)) for k, v in kwargs.items()}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only", type=int, nargs="*", choices=range(1, 9))
    args = ap.parse_args(argv)
    ok = True
    for n, (suite, kwargs) in enumerate(zip(suites.ALL, FULL), start=1):
        if args.only and n not in args.only:
            continue
        res = suite(**(shrink(kwargs) if args.quick else kwargs))
        print(f"{n}. {res.line()}", flush=True)
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
