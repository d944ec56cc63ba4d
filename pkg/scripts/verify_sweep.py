#!/usr/bin/env python3
"""Exhaustive branch verification over n and channel variants, as a table.

Usage: python3 scripts/verify_sweep.py --n 0..4 --inputs 5
"""
import argparse
import time

import numpy as np

from mpct.channel import ChannelVariant
from mpct.cli import parse_n_range
from mpct.protocol import verify_all_branches
from mpct.statevec import TwoQubitInput


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="0..4")
    ap.add_argument("--inputs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    inputs = [TwoQubitInput.random(rng) for _ in range(args.inputs)]
    print(f"{'variant':<10} {'n':>2} {'branches':>9} {'pass':>5} {'max|1-F|':>9} {'pred dev':>9} {'sec':>6}")
    for variant in ChannelVariant:
        for n in parse_n_range(args.n):
            t0 = time.perf_counter()
            reps = [verify_all_branches(inp, n, variant) for inp in inputs]
            pred = [r.max_predictor_dev for r in reps if r.max_predictor_dev is not None]
            print(
                f"{variant.value:<10} {n:>2} {reps[0].expected_branches:>9} "
                f"{sum(r.passed for r in reps):>2}/{len(reps):<2} "
                f"{max(r.max_fidelity_dev for r in reps):>9.1e} "
                f"{(max(pred) if pred else float('nan')):>9.1e} {time.perf_counter() - t0:>6.2f}"
            )


if __name__ == "__main__":
    main()
