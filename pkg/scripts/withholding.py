#!/usr/bin/env python3
"""Receiver fidelity when one controller withholds its outcome and the receiver guesses.

Usage: python3 scripts/withholding.py --n 1..3 --inputs 20
"""
import argparse

import numpy as np

from mpct.cli import parse_n_range
from mpct.qss import average_withheld_fidelity
from mpct.statevec import TwoQubitInput


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="1..3")
    ap.add_argument("--inputs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    inputs = [TwoQubitInput.random(rng) for _ in range(args.inputs)]
    for n in parse_n_range(args.n):
        fids = np.array([average_withheld_fidelity(inp, n, controller=n) for inp in inputs])
        print(f"n={n}: mean {fids.mean():.4f}  min {fids.min():.4f}  max {fids.max():.4f}  (all < 1: {bool((fids < 1).all())})")


if __name__ == "__main__":
    main()
