#!/usr/bin/env python3
"""Why the z-basis second channel with a single late Hadamard is not correctable.

For each n, classify every branch map M (input -> receiver amplitudes):
unitary up to scale (M^dag M ∝ I), and if so whether some U_a ⊗ U_b [+ CNOT]
from the Pauli-like family inverts it. Then brute-force which subsets of
b-wires need a Hadamard before the channel becomes fully correctable.

Usage: python3 scripts/zlateh_diagnostic.py --n 0..3
"""
import argparse
import itertools

import numpy as np

from mpct.bellcodec import BELL_ORDER, Forced
from mpct.channel import ChannelVariant, WireMap, assemble_composite
from mpct.cli import parse_n_range
from mpct.protocol import ALL_RULES, branch_map, is_correctable, rule_matrix
from mpct.statevec import Gate, TwoQubitInput, apply_single, fidelity
from mpct.bellcodec import bell_measure


def in_family(m: np.ndarray) -> bool:
    m = m / np.sqrt(abs((m.conj().T @ m)[0, 0]))
    for r in ALL_RULES:
        p = rule_matrix(r) @ m
        # p must be a scalar multiple of the identity
        if np.allclose(p, p[0, 0] * np.eye(4), atol=1e-9):
            return True
    return False


def classify(n: int) -> tuple[int, int, int]:
    unitary = family = total = 0
    for outs in itertools.product(BELL_ORDER, repeat=n + 2):
        m = branch_map(n, ChannelVariant.Z_LATE_H, outs)
        total += 1
        if is_correctable(m):
            unitary += 1
            family += in_family(m)
    return total, unitary, family


def subsets_that_work(n: int, inp: TwoQubitInput) -> list[tuple[str, ...]]:
    """H-on-b-wire subsets (applied to the z channel before any measurement) giving fidelity 1 via the tables."""
    from mpct.protocol import apply_correction, correction_lookup, ledger_key
    from mpct.bellcodec import OutcomeLedger

    wires = WireMap.standard(n)
    b_wires = [f"b{i}" for i in range(1, n + 3)]
    good = []
    for r in range(len(b_wires) + 1):
        for subset in itertools.combinations(b_wires, r):
            state, _ = assemble_composite(inp, n, ChannelVariant.DIRECT)
            for w in subset:
                state = apply_single(state, Gate.H, state.index(w))
            ok = True
            for outs in itertools.product(BELL_ORDER, repeat=n + 2):
                s, led = state, OutcomeLedger()
                try:
                    for (party, w1, w2), o in zip(wires.measurements(), outs):
                        (br,) = bell_measure(s, s.index(w1), s.index(w2), Forced(o))
                        s, led = br.state, led.add(f"{w1},{w2}", party, o)
                except ValueError:
                    ok = False
                    break
                rule = correction_lookup(*ledger_key(led), odd=n % 2 == 1)
                if fidelity(apply_correction(s, rule), inp.state(s.labels)) < 1 - 1e-9:
                    ok = False
                    break
            if ok:
                good.append(subset)
    return good


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="0..3")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    inp = TwoQubitInput.random(np.random.default_rng(args.seed))
    for n in parse_n_range(args.n):
        total, unitary, family = classify(n)
        print(f"n={n}: {total} branches, {unitary} unitary, {family} correctable by U_a⊗U_b[+CNOT]")
        if n <= 2:
            print(f"      H subsets matching the tables: {subsets_that_work(n, inp)}")


if __name__ == "__main__":
    main()
