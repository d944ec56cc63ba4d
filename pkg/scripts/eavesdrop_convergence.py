#!/usr/bin/env python3
"""Measured check error rate vs. rounds and attack fraction, against the analytic oracle.

Usage: python3 scripts/eavesdrop_convergence.py --rounds 1000 3000 10000
"""
import argparse

from mpct.qss import InterceptResend, expected_error_rate, setup_channel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, nargs="+", default=[1000, 3000, 10000])
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.0, 0.25, 0.5, 1.0])
    ap.add_argument("--parties", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'fraction':>8} {'rounds':>7} {'checks':>7} {'rate':>7} {'oracle':>7} {'decision':>8}")
    for f in args.fractions:
        eve = InterceptResend(f) if f > 0 else None
        for r in args.rounds:
            rep = setup_channel(r, 0.5, 0.2, eve, seed=args.seed, parties=args.parties)
            print(
                f"{f:>8.2f} {r:>7} {rep.checks:>7} {rep.error_rate:>7.4f} "
                f"{expected_error_rate(eve):>7.4f} {rep.decision:>8}"
            )


if __name__ == "__main__":
    main()
