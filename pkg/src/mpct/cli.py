"""Command-line front end.

Exit codes: 0 success/accept, 1 verification failure/abort, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import serialize, tables
from .bellcodec import BellOutcome, Forced, Sample, sign_symbol
from .channel import ChannelVariant
from .netsim import efficiency_report, simulate_session
from .protocol import (
    OracleFailure,
    derive_correction_table,
    golden_table,
    table_state_deviation,
    verify_all_branches,
)
from .qss import InterceptResend, derive_classical_table, expected_error_rate, qss_run, setup_channel
from .statevec import TwoQubitInput

log = logging.getLogger("mpct")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
RENORMALIZE_TOL = 1e-6
MAX_SEED = 2**64 - 1


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int
    variant: str = ChannelVariant.X_SECOND.value
    amplitudes: list[list[float]] | None = None
    random_input: bool = False
    forced: list[str] | None = None
    receiver: int | None = None
    silent: list[int] = field(default_factory=list)
    output: str | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse amplitude {text!r}; use 're' or 're,im'")


def parse_input(values: list[str]) -> TwoQubitInput:
    amps = np.array([parse_complex(v) for v in values])
    norm = float(np.linalg.norm(amps))
    if abs(norm**2 - 1) > RENORMALIZE_TOL:
        raise UsageError(f"input amplitudes have |psi|^2 = {norm**2:.6g}; refusing to renormalize")
    if norm**2 != 1:
        log.warning("renormalizing input amplitudes (|psi|^2 = %.12g)", norm**2)
    return TwoQubitInput.from_array(amps / norm)


def parse_n_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad n range {text!r}; use e.g. 2, 0..3 or 1,3") from None
    if not out or min(out) < 0:
        raise UsageError(f"bad n range {text!r}")
    return out


def seed_type(text: str) -> int:
    v = int(text)
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_run(args) -> int:
    if args.state is not None and args.random_input:
        raise UsageError("--state and --random-input are mutually exclusive")
    if args.state is not None:
        inp = parse_input(args.state)
    else:
        inp = TwoQubitInput.random(np.random.default_rng([args.seed, 1]))
    forced = None
    if args.forced:
        forced = [BellOutcome.parse(t) for t in args.forced.split(",")]
    variant = ChannelVariant(args.variant)
    cfg = RunConfig(
        subcommand="run",
        n=args.n,
        variant=variant.value,
        amplitudes=[[z.real, z.imag] for z in inp.as_array()],
        random_input=args.state is None,
        forced=[o.value for o in forced] if forced else None,
        receiver=args.receiver,
        silent=list(args.silent),
        output=args.output,
        seed=args.seed,
    )
    modes = [Forced(o) for o in forced] if forced else Sample.from_seed(args.seed)
    result = simulate_session(inp, args.n, variant, args.receiver, modes, silent=args.silent)
    transcript = [b.to_dict() for b in result.transcript]
    if result.trace is None:
        doc = {
            "schema": serialize.SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "status": result.status,
            "transcript": transcript,
            "guess_fidelity": result.guess_fidelity,
            "efficiency": result.efficiency.to_dict(),
        }
        _emit(serialize.dumps(doc), args.output)
        return EXIT_FAIL
    doc = serialize.trace_to_dict(result.trace, cfg.to_dict())
    doc["status"] = result.status
    doc["transcript"] = transcript
    _emit(serialize.dumps(doc), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    variant = ChannelVariant(args.variant)
    ok = True
    rows = []
    for n in parse_n_range(args.n):
        for k in range(args.inputs):
            rep = verify_all_branches(TwoQubitInput.random(rng), n, variant)
            ok &= rep.passed
            rows.append({"n": n, "input": k, "passed": rep.passed, "summary": rep.summary(),
                         "failures": rep.failures[:5]})
            if not args.json:
                print(f"[input {k}] {rep.summary()}")
    if args.json:
        print(serialize.dumps({"schema": serialize.SCHEMA_VERSION, "variant": variant.value, "rows": rows}))
    else:
        print("ALL PASS" if ok else "FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_FAIL


def _fmt_key(key) -> str:
    vx, vt, py, pt = key
    return f"V_xa1={vx} V_total={vt} P_yb1={sign_symbol(py)} P_total={sign_symbol(pt)}"


def cmd_tables(args) -> int:
    variant = ChannelVariant(args.variant)
    parities = {"odd": [True], "even": [False], "both": [True, False]}[args.parity]
    rng = np.random.default_rng(args.seed)
    inputs = [TwoQubitInput.random(rng) for _ in range(args.inputs)]
    ok = True
    for odd in parities:
        name = "Table I (odd n)" if odd else "Table III (even n)"
        try:
            derived = derive_correction_table(odd, variant=variant, inputs=inputs)
        except OracleFailure as exc:
            print(f"{name}: derivation failed: {exc}")
            ok = False
            continue
        golden = golden_table(odd)
        matches = sum(derived[k] == golden[k] for k in golden)
        for k in golden:
            mark = "ok " if derived[k] == golden[k] else "XX "
            print(f"  {mark}{_fmt_key(k)}  derived {derived[k]}  golden {golden[k]}")
        dev = table_state_deviation(odd, inputs, variant=variant)
        print(f"{name}: {matches}/16 rows match; max state-column deviation {dev:.1e}")
        ok &= matches == 16 and dev <= 1e-10
    if variant is ChannelVariant.X_SECOND:
        for odd in parities:
            name = "Table V (odd n)" if odd else "Table IV (even n)"
            derived = derive_classical_table(odd)
            matches = sum(derived[k] == g for k, g in tables.TABLE_CLASSICAL.items())
            print(f"{name}: {matches}/4 rows match")
            ok &= matches == 4
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qss(args) -> int:
    if args.channel:
        eve = InterceptResend(args.eve) if args.eve > 0 else None
        rep = setup_channel(args.rounds, args.sample_fraction, args.decoy_fraction, eve, args.threshold, args.seed)
        doc = {
            "rounds": rep.rounds,
            "sample_checks": rep.sample_checks,
            "decoy_checks": rep.decoy_checks,
            "error_rate": rep.error_rate,
            "expected_error_rate": expected_error_rate(eve),
            "threshold": rep.threshold,
            "decision": rep.decision,
        }
        print(serialize.dumps(doc))
        return EXIT_OK if rep.decision == "accept" else EXIT_FAIL
    res = qss_run(args.message, args.n, Sample.from_seed(args.seed))
    rec = res.bob_record
    doc = {
        "message": res.message,
        "carrier": res.carrier.value,
        "ledger": [{"label": e.label, "party": e.party, "outcome": e.outcome.value} for e in res.ledger.entries],
        "v_total": res.ledger.v_total,
        "p_total": sign_symbol(res.ledger.p_total),
        "bob_record": rec.value if isinstance(rec, BellOutcome) else {"x": sign_symbol(rec.x_sign), "z": rec.z_bit},
        "decoded": res.decoded,
        "ok": res.ok,
    }
    print(serialize.dumps(doc))
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_efficiency(args) -> int:
    reports = [efficiency_report(n) for n in parse_n_range(args.n)]
    if args.json:
        print(serialize.dumps([r.to_dict() for r in reports]))
        return EXIT_OK
    for r in reports:
        print(
            f"n={r.n} q_u={r.q_u} q_t={r.q_t} b_t={r.b_t} "
            f"eta_q = {float(r.eta_q):.4f} ({r.eta_q}) eta_t = {float(r.eta_t):.4f} ({r.eta_t})"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpct", description="Multiparty-controlled teleportation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    variants = [v.value for v in ChannelVariant]

    r = sub.add_parser("run", help="simulate one session and print its JSON trace")
    r.add_argument("--n", type=int, default=1, help="number of controllers")
    r.add_argument("--variant", choices=variants, default=ChannelVariant.X_SECOND.value)
    r.add_argument("--state", nargs=4, metavar="AMP", help="a b c d, each 're' or 're,im'")
    r.add_argument("--random-input", action="store_true", help="random input derived from --seed (default)")
    r.add_argument("--forced", help="comma-separated outcomes, e.g. 'Ψ-,Φ-,Ψ-' or 'psi-,phi-,psi-'")
    r.add_argument("--receiver", type=int, help="receiving agent 1..n+1 (default n+1)")
    r.add_argument("--silent", type=int, nargs="*", default=[], help="controller agents that never publish")
    r.add_argument("--output", help="write the trace here instead of stdout")
    r.add_argument("--seed", type=seed_type, default=0)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="exhaustive branch verification")
    v.add_argument("--n", default="0..3", help="n, range 'lo..hi' or list '1,3'")
    v.add_argument("--variant", choices=variants, default=ChannelVariant.X_SECOND.value)
    v.add_argument("--inputs", type=int, default=3, help="random inputs per n")
    v.add_argument("--seed", type=seed_type, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tables", help="re-derive the correction tables and diff against the golden ones")
    t.add_argument("--parity", choices=["odd", "even", "both"], default="both")
    t.add_argument("--variant", choices=variants, default=ChannelVariant.X_SECOND.value)
    t.add_argument("--inputs", type=int, default=20)
    t.add_argument("--seed", type=seed_type, default=0)
    t.set_defaults(func=cmd_tables)

    q = sub.add_parser("qss", help="classical-secret round trip or channel-setup check")
    mode = q.add_mutually_exclusive_group(required=True)
    mode.add_argument("--message", help="one of 0+, 1-, 0-, 1+")
    mode.add_argument("--channel", action="store_true", help="simulate channel setup with sample checks")
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--rounds", type=int, default=10_000)
    q.add_argument("--sample-fraction", type=float, default=0.5)
    q.add_argument("--decoy-fraction", type=float, default=0.2)
    q.add_argument("--eve", type=float, default=0.0, help="intercept-resend fraction in [0, 1]")
    q.add_argument("--threshold", type=float, default=None)
    q.add_argument("--seed", type=seed_type, default=0)
    q.set_defaults(func=cmd_qss)

    e = sub.add_parser("efficiency", help="qubit and total efficiency over n")
    e.add_argument("--n", default="0..6")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_efficiency)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"mpct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run_cli(argv: list[str] | None = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
