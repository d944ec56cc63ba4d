"""JSON trace schema (version "1")."""
from __future__ import annotations

import json

from .bellcodec import BellOutcome, OutcomeLedger, bit_value, parity, sign_symbol
from .channel import ChannelVariant
from .netsim import efficiency_report
from .protocol import CorrectionRule, TeleportTrace
from .statevec import Gate, StateVector, TwoQubitInput

SCHEMA_VERSION = "1"


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _z(pair) -> complex:
    return complex(pair[0], pair[1])


def _state(s: StateVector) -> dict:
    return {"labels": list(s.labels), "amplitudes": [_c(v) for v in s.amplitudes]}


def _unstate(d: dict) -> StateVector:
    return StateVector([_z(v) for v in d["amplitudes"]], tuple(d["labels"]))


def trace_to_dict(trace: TeleportTrace, config: dict | None = None) -> dict:
    rule = trace.rule
    return {
        "schema": SCHEMA_VERSION,
        "config": config or {},
        "n": trace.n,
        "variant": trace.variant.value,
        "receiver": trace.receiver,
        "input": [_c(v) for v in trace.input.as_array()],
        "ledger": [
            {
                "label": e.label,
                "party": e.party,
                "outcome": e.outcome.value,
                "v": bit_value(e.outcome),
                "p": sign_symbol(parity(e.outcome)),
            }
            for e in trace.ledger.entries
        ],
        "v_total": trace.v_total,
        "p_total": sign_symbol(trace.p_total),
        "probability": trace.probability,
        "correction": None
        if rule is None
        else {"ua": rule.u_on_a.value, "ub": rule.u_on_b.value, "cnot": rule.cnot},
        "pre_state": _state(trace.pre_state),
        "post_state": _state(trace.post_state),
        "fidelity": trace.fidelity,
        "global_phase": None if trace.global_phase is None else _c(trace.global_phase),
        "efficiency": efficiency_report(trace.n).to_dict(),
        "note": trace.note,
    }


def trace_from_dict(d: dict) -> TeleportTrace:
    if d.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported trace schema {d.get('schema')!r}")
    ledger = OutcomeLedger()
    for e in d["ledger"]:
        ledger = ledger.add(e["label"], e["party"], BellOutcome.parse(e["outcome"]))
    c = d["correction"]
    return TeleportTrace(
        input=TwoQubitInput(*(_z(v) for v in d["input"])),
        n=d["n"],
        variant=ChannelVariant(d["variant"]),
        receiver=d["receiver"],
        ledger=ledger,
        probability=d["probability"],
        rule=None if c is None else CorrectionRule(Gate(c["ua"]), Gate(c["ub"]), c["cnot"]),
        pre_state=_unstate(d["pre_state"]),
        post_state=_unstate(d["post_state"]),
        global_phase=None if d["global_phase"] is None else _z(d["global_phase"]),
        fidelity=d["fidelity"],
        note=d.get("note", ""),
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def trace_to_json(trace: TeleportTrace, config: dict | None = None) -> str:
    return dumps(trace_to_dict(trace, config))


def trace_from_json(text: str) -> TeleportTrace:
    return trace_from_dict(json.loads(text))
