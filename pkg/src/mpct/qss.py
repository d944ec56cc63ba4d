"""Secret sharing on top of the controlled-teleportation network.

Classical secrets ride on a Bell-state carrier coded as
Φ+ -> "0+", Φ- -> "1-", Ψ+ -> "0-", Ψ- -> "1+" (sign symbols read as bits
+ -> 0, - -> 1). After the cascade the receiver measures his pair in the
Bell basis (even n) or with σx on a and σz on b (odd n), and the group
decodes with the published (V_total, P_total).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import tables
from .bellcodec import (
    BELL_ORDER,
    BellOutcome,
    Enumerate,
    MeasureMode,
    OutcomeLedger,
    bell_measure,
    bell_state,
    classify_bell,
)
from .channel import ChannelVariant, WireMap, make_ghz
from .protocol import (
    OracleFailure,
    TeleportTrace,
    apply_correction,
    correction_lookup,
    ledger_key,
    run_teleport,
    walk_branches,
)
from .statevec import (
    PAULIS,
    ZERO_PROB,
    Gate,
    StateVector,
    TwoQubitInput,
    fidelity,
    measure_single,
)

CODE = {
    BellOutcome.PHI_PLUS: "0+",
    BellOutcome.PHI_MINUS: "1-",
    BellOutcome.PSI_PLUS: "0-",
    BellOutcome.PSI_MINUS: "1+",
}
_DECODE = {v: k for k, v in CODE.items()}
MESSAGES = tuple(CODE.values())


def _normalize_message(msg: str) -> str:
    m = msg.strip().replace("−", "-")
    if m not in _DECODE:
        raise ValueError(f"unknown message code {msg!r}; expected one of {MESSAGES}")
    return m


def message_bits(msg: str) -> tuple[int, int]:
    m = _normalize_message(msg)
    return int(m[0]), 0 if m[1] == "+" else 1


def encode_classical(msg: str) -> BellOutcome:
    return _DECODE[_normalize_message(msg)]


def decode_classical(outcome: BellOutcome) -> str:
    return CODE[outcome]


@dataclass(frozen=True)
class ProductRecord:
    """Receiver's σx ⊗ σz result: sign of σx on a, z bit of b."""

    x_sign: int
    z_bit: int

    def state(self) -> np.ndarray:
        x = np.array([1, self.x_sign]) / np.sqrt(2)
        z = np.array([1, 0]) if self.z_bit == 0 else np.array([0, 1])
        return np.kron(x, z).astype(complex)


BobRecord = Union[BellOutcome, ProductRecord]

_CNOT = np.eye(4)[[0, 1, 3, 2]]


def carrier_map(v_total: int, p_total: int, odd: bool) -> np.ndarray:
    """Map Psi_c -> Psi_f from the classical-secret tables."""
    gate = tables.TABLE_CLASSICAL[(v_total, p_total)]
    m = np.kron(np.eye(2), gate.matrix)
    return _CNOT @ m if odd else m


def decode(v_total: int, p_total: int, bob_result: BobRecord, odd: bool) -> str:
    if odd and not isinstance(bob_result, ProductRecord):
        raise ValueError("odd controller count needs a σx⊗σz record")
    if not odd and not isinstance(bob_result, BellOutcome):
        raise ValueError("even controller count needs a Bell-outcome record")
    final = bob_result.state() if odd else bell_state(bob_result).amplitudes
    carrier = carrier_map(v_total, p_total, odd).conj().T @ final
    outcome = classify_bell(StateVector(carrier))
    if outcome is None:
        raise ValueError(f"record {bob_result} is inconsistent with totals ({v_total}, {p_total:+d})")
    return decode_classical(outcome)


def _product_distribution(state: StateVector) -> dict[ProductRecord, float]:
    out = {}
    for xb in (0, 1):
        try:
            _, px, after = measure_single(state, 0, "x", outcome=xb)
        except ValueError:
            continue
        for zb in (0, 1):
            try:
                _, pz, _ = measure_single(after, 1, "z", outcome=zb)
            except ValueError:
                continue
            out[ProductRecord(1 if xb == 0 else -1, zb)] = px * pz
    return out


def bob_measure(state: StateVector, odd: bool, rng: np.random.Generator | None = None) -> BobRecord:
    """Receiver's final measurement; without an rng the result must be deterministic."""
    if odd:
        dist = _product_distribution(state)
    else:
        dist = {br.outcome: br.probability for br in bell_measure(state, 0, 1, Enumerate())}
    dist = {k: p for k, p in dist.items() if p > ZERO_PROB}
    if rng is None:
        best = max(dist, key=dist.get)
        if abs(dist[best] - 1) > 1e-10:
            raise ValueError(f"receiver measurement is not deterministic: {dist}")
        return best
    keys = list(dist)
    probs = np.array([dist[k] for k in keys])
    return keys[int(rng.choice(len(keys), p=probs / probs.sum()))]


@dataclass(frozen=True)
class QSSResult:
    message: str
    decoded: str
    carrier: BellOutcome
    ledger: OutcomeLedger
    bob_record: BobRecord
    final_state: StateVector

    @property
    def ok(self) -> bool:
        return self.message == self.decoded


def qss_run(
    msg: str,
    n: int,
    modes: MeasureMode | Sequence[MeasureMode],
    bob_rng: np.random.Generator | None = None,
) -> QSSResult:
    carrier = encode_classical(msg)
    inp = TwoQubitInput.from_array(bell_state(carrier).amplitudes)
    trace = run_teleport(inp, n, ChannelVariant.X_SECOND, modes)
    odd = n % 2 == 1
    record = bob_measure(trace.pre_state, odd, bob_rng)
    decoded = decode(trace.v_total, trace.p_total, record, odd)
    return QSSResult(_normalize_message(msg), decoded, carrier, trace.ledger, record, trace.pre_state)


def share_quantum_secret(
    inp: TwoQubitInput, n: int, receiver: int, modes: MeasureMode | Sequence[MeasureMode]
) -> TeleportTrace:
    """Teleport to agent ``receiver`` (1..n+1); every other agent controls."""
    return run_teleport(inp, n, ChannelVariant.X_SECOND, modes, receiver=receiver)


def withheld_guess_fidelities(trace: TeleportTrace, withheld_label: str) -> list[float]:
    """Fidelity for each guess of one missing outcome, in BELL_ORDER."""
    if withheld_label not in {e.label for e in trace.ledger.entries}:
        raise KeyError(withheld_label)
    target = trace.input.state(trace.pre_state.labels)
    out = []
    for guess in BELL_ORDER:
        ledger = OutcomeLedger()
        for e in trace.ledger.entries:
            ledger = ledger.add(e.label, e.party, guess if e.label == withheld_label else e.outcome)
        rule = correction_lookup(*ledger_key(ledger), odd=trace.n % 2 == 1)
        out.append(fidelity(apply_correction(trace.pre_state, rule), target))
    return out


def average_withheld_fidelity(inp: TwoQubitInput, n: int, controller: int = 1) -> float:
    """Branch-averaged fidelity when controller ``controller`` (1-based) stays silent
    and the receiver guesses its outcome uniformly."""
    wires = WireMap.standard(n)
    if not 1 <= controller <= n:
        raise ValueError(f"controller must be in 1..{n}")
    _, a, b = wires.measurements()[1 + controller]
    label = f"{a},{b}"
    total = 0.0
    for ledger, prob, pre in walk_branches(inp, n, ChannelVariant.X_SECOND):
        tr = TeleportTrace(inp, n, ChannelVariant.X_SECOND, wires.receiver, ledger, prob, None, pre, pre, None, 0.0)
        total += prob * float(np.mean(withheld_guess_fidelities(tr, label)))
    return total


def outcome_marginals(inp: TwoQubitInput, n: int, label: str) -> dict[BellOutcome, float]:
    """Exact marginal distribution of one measurement's outcome over all branches."""
    dist: Counter = Counter()
    for ledger, prob, _ in walk_branches(inp, n, ChannelVariant.X_SECOND):
        dist[ledger[label]] += prob
    return {o: dist.get(o, 0.0) for o in BELL_ORDER}


# --- channel setup with sample checks and decoys ---------------------------


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures a transiting particle in a random z/x basis and resends it."""

    fraction: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"intercept fraction must lie in [0, 1], got {self.fraction}")


EavesdropModel = Union[None, InterceptResend]


def expected_error_rate(eve: EavesdropModel) -> float:
    """Wrong-basis interception (prob 1/2) randomizes the check (error 1/2)."""
    if eve is None:
        return 0.0
    return eve.fraction * 0.5 * 0.5


DEFAULT_THRESHOLD = expected_error_rate(InterceptResend(1.0)) / 2


@dataclass(frozen=True)
class ChannelReport:
    rounds: int
    sample_checks: int
    decoy_checks: int
    sample_errors: int
    decoy_errors: int
    threshold: float

    @property
    def checks(self) -> int:
        return self.sample_checks + self.decoy_checks

    @property
    def sampled_fraction(self) -> float:
        return self.sample_checks / self.rounds

    @property
    def error_rate(self) -> float:
        return (self.sample_errors + self.decoy_errors) / self.checks if self.checks else 0.0

    @property
    def decision(self) -> str:
        return "accept" if self.error_rate <= self.threshold else "abort"


def _check_round(state: StateVector, rng: np.random.Generator, eve: EavesdropModel) -> bool:
    """One correlation check; wire 0 stays with Alice, the rest travel. True on error."""
    if eve is not None and rng.random() < eve.fraction:
        wire = int(rng.integers(1, state.num_qubits))
        _, _, state = measure_single(state, wire, "z" if rng.random() < 0.5 else "x", rng=rng)
    basis = "z" if rng.random() < 0.5 else "x"
    bits = []
    for q in range(state.num_qubits):
        bit, _, state = measure_single(state, q, basis, rng=rng)
        bits.append(bit)
    if basis == "z":
        return len(set(bits)) != 1
    # x-basis GHZ/Φ+ correlations: even number of |-x> results
    return sum(bits) % 2 == 1


def setup_channel(
    rounds: int,
    sample_fraction: float,
    decoy_fraction: float,
    eve: EavesdropModel = None,
    threshold: float | None = None,
    seed: int | None = 0,
    parties: int = 3,
) -> ChannelReport:
    """Distribute ``rounds`` GHZ states, checking a random sample and inserted decoys."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    for name, f in (("sample_fraction", sample_fraction), ("decoy_fraction", decoy_fraction)):
        if not 0.0 < f < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {f}")
    if sample_fraction + decoy_fraction > 1.0:
        raise ValueError("sample and decoy fractions exceed the round budget")
    if parties < 2:
        raise ValueError("need at least two parties")
    threshold = DEFAULT_THRESHOLD if threshold is None else threshold
    ghz = make_ghz(parties, "z")
    bell = bell_state(BellOutcome.PHI_PLUS)
    counts = Counter()
    for child in np.random.SeedSequence(seed).spawn(rounds):
        rng = np.random.default_rng(child)
        u = rng.random()
        if u < sample_fraction:
            counts["sample"] += 1
            counts["sample_err"] += _check_round(ghz, rng, eve)
        elif u < sample_fraction + decoy_fraction:
            counts["decoy"] += 1
            counts["decoy_err"] += _check_round(bell, rng, eve)
    return ChannelReport(
        rounds=rounds,
        sample_checks=counts["sample"],
        decoy_checks=counts["decoy"],
        sample_errors=counts["sample_err"],
        decoy_errors=counts["decoy_err"],
        threshold=threshold,
    )


def derive_classical_table(odd: bool, n: int | None = None, tol: float = 1e-10) -> dict[tuple[int, int], Gate]:
    """Search the U_j in Psi_f = [CNOT] (U0 ⊗ U_j) Psi_c for every (V_total, P_total) class."""
    if n is None:
        n = 1 if odd else 2
    if (n % 2 == 1) != odd:
        raise ValueError(f"n={n} does not have the requested parity")
    votes: dict[tuple[int, int], set] = {}
    for carrier in BELL_ORDER:
        psi = bell_state(carrier).amplitudes
        inp = TwoQubitInput.from_array(psi)
        for ledger, _, pre in walk_branches(inp, n, ChannelVariant.X_SECOND):
            ok = set()
            for g in PAULIS:
                m = np.kron(np.eye(2), g.matrix)
                if odd:
                    m = _CNOT @ m
                if abs(abs(np.vdot(m @ psi, pre.amplitudes)) - 1) <= tol:
                    ok.add(g)
            key = (ledger.v_total, ledger.p_total)
            votes[key] = votes.get(key, ok) & ok
    out = {}
    for key in ((0, 1), (0, -1), (1, 1), (1, -1)):
        if len(votes.get(key, ())) != 1:
            raise OracleFailure(f"classical class {key} at n={n}: candidates {votes.get(key)}")
        (out[key],) = votes[key]
    return out
