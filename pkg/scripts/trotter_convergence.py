#!/usr/bin/env python3
"""Convergence of the n-step star product to odot on random full-rank qubit pairs.

Prints err(n) for each n and the ratio err(n)/err(2n); a ratio near 4
means the error falls like 1/n^2.
"""
import argparse

import numpy as np

from qholant.linalg import LabeledOperator, SpaceLabel
from qholant.quantum import trotter_errors
from qholant.sampling import random_psd


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--ns", type=int, nargs="+", default=[16, 32, 64, 128])
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    lab = SpaceLabel("A", 0, args.dim)
    errs = []
    for _ in range(args.pairs):
        a = LabeledOperator([lab], random_psd(rng, args.dim))
        b = LabeledOperator([lab], random_psd(rng, args.dim))
        errs.append(trotter_errors(a, b, args.ns))
    errs = np.array(errs)
    ratios = errs[:, :-1] / errs[:, 1:]
    print("n      median err   ratio min   ratio max")
    for j, n in enumerate(args.ns):
        r = f"{ratios[:, j].min():10.4f}  {ratios[:, j].max():10.4f}" if j < len(args.ns) - 1 else ""
        print(f"{n:<6d} {np.median(errs[:, j]):.4e}   {r}")


if __name__ == "__main__":
    main()
