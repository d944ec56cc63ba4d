"""Parties as small state machines exchanging broadcasts over an in-memory bus.

Quantum wires never travel over the bus: "sending" a particle is an
ownership change in the shared register, and every register operation is
checked against ownership. A fixed round-robin scheduler (Alice, the
controllers in index order, Bob) advances each party one phase per sweep,
so sampled runs consume random draws in the same order as
:func:`mpct.protocol.run_teleport`.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bellcodec import BELL_ORDER, BellOutcome, MeasureMode, OutcomeLedger, Sample, bell_measure, resolve_modes
from .channel import ChannelVariant, WireMap, assemble_composite
from .protocol import TeleportTrace, apply_correction, correction_lookup, finish_trace, ledger_key
from .statevec import Gate, StateVector, TwoQubitInput, apply_single, fidelity

log = logging.getLogger(__name__)

BITS_PER_OUTCOME = 2


class Phase(Enum):
    AWAITING_QUBITS = "awaiting-qubits"
    MEASURING = "measuring"
    PUBLISHING = "publishing"
    AWAITING_BROADCASTS = "awaiting-broadcasts"
    CORRECTING = "correcting"
    DONE = "done"
    UNRECONSTRUCTABLE = "unreconstructable"


class OwnershipError(PermissionError):
    pass


@dataclass(frozen=True)
class Broadcast:
    seq: int
    sender: str
    label: str
    outcome: BellOutcome

    @property
    def bits(self) -> int:
        return BITS_PER_OUTCOME

    def to_dict(self) -> dict:
        return {"seq": self.seq, "sender": self.sender, "label": self.label, "outcome": self.outcome.value}

    @classmethod
    def from_dict(cls, d: dict) -> Broadcast:
        return cls(d["seq"], d["sender"], d["label"], BellOutcome.parse(d["outcome"]))


class MessageBus:
    """Delivers every broadcast to every subscriber in sequence-number order."""

    def __init__(self):
        self.log: list[Broadcast] = []
        self._subscribers: list[Party] = []

    def subscribe(self, party: Party) -> None:
        self._subscribers.append(party)

    def publish(self, sender: str, label: str, outcome: BellOutcome) -> Broadcast:
        if any(b.label == label for b in self.log):
            raise ValueError(f"measurement {label!r} already published")
        msg = Broadcast(len(self.log), sender, label, outcome)
        self.log.append(msg)
        log.debug("bus: %s", msg)
        for sub in self._subscribers:
            sub.receive(msg)
        return msg


class QuantumRegister:
    """Shared state plus the wire -> party ownership table."""

    def __init__(self, state: StateVector, owner: str):
        self.state = state
        self.owners = {w: owner for w in state.labels}
        self.probability = 1.0

    def transfer(self, wire: str, sender: str, receiver: str) -> None:
        self._check(sender, wire)
        self.owners[wire] = receiver

    def holds(self, party: str, wires: Sequence[str]) -> bool:
        return all(self.owners.get(w) == party for w in wires)

    def _check(self, party: str, *wires: str) -> None:
        for w in wires:
            if self.owners.get(w) != party:
                raise OwnershipError(f"{party} does not own wire {w!r}")

    def apply(self, party: str, gate: Gate, wire: str) -> None:
        self._check(party, wire)
        self.state = apply_single(self.state, gate, self.state.index(wire))

    def bell_measure(self, party: str, w1: str, w2: str, mode: MeasureMode) -> BellOutcome:
        self._check(party, w1, w2)
        (br,) = bell_measure(self.state, self.state.index(w1), self.state.index(w2), mode)
        self.state = br.state
        self.probability *= br.probability
        for w in (w1, w2):
            del self.owners[w]
        return br.outcome

    def local_state(self, party: str) -> StateVector:
        """The full remaining register, which must belong to ``party`` alone."""
        self._check(party, *self.state.labels)
        return self.state


@dataclass
class Party:
    name: str
    session: Session
    phase: Phase = Phase.AWAITING_QUBITS

    def receive(self, msg: Broadcast) -> None:
        pass

    def step(self) -> bool:
        raise NotImplementedError

    def _goto(self, phase: Phase) -> bool:
        log.debug("%s: %s -> %s", self.name, self.phase.value, phase.value)
        self.phase = phase
        return True


@dataclass
class Measurer(Party):
    """Alice or a controller: measure owned pairs, then publish the outcomes."""

    jobs: list[tuple[str, str, MeasureMode]] = field(default_factory=list)
    silent: bool = False
    results: list[tuple[str, BellOutcome]] = field(default_factory=list)

    def owned(self) -> list[str]:
        return [w for w1, w2, _ in self.jobs for w in (w1, w2)]

    def step(self) -> bool:
        s = self.session
        if self.phase is Phase.AWAITING_QUBITS:
            if self.name == "Alice":
                s.distribute()
            if s.register.holds(self.name, self.owned()):
                return self._goto(Phase.MEASURING)
            return False
        if self.phase is Phase.MEASURING:
            for w1, w2, mode in self.jobs:
                if s.variant is ChannelVariant.Z_LATE_H and w2 == s.wires.late_h_wire:
                    s.register.apply(self.name, Gate.H, w2)
                self.results.append((f"{w1},{w2}", s.register.bell_measure(self.name, w1, w2, mode)))
            return self._goto(Phase.PUBLISHING)
        if self.phase is Phase.PUBLISHING:
            if not self.silent:
                for label, outcome in self.results:
                    s.bus.publish(self.name, label, outcome)
            return self._goto(Phase.DONE)
        return False


@dataclass
class Receiver(Party):
    wires: tuple[str, str] = ("", "")
    inbox: list[Broadcast] = field(default_factory=list)
    trace: TeleportTrace | None = None

    def receive(self, msg: Broadcast) -> None:
        self.inbox.append(msg)

    def step(self) -> bool:
        s = self.session
        if self.phase is Phase.AWAITING_QUBITS:
            if s.register.holds(self.name, self.wires):
                return self._goto(Phase.AWAITING_BROADCASTS)
            return False
        if self.phase is Phase.AWAITING_BROADCASTS:
            if len(self.inbox) == s.expected_broadcasts and not s.pending_measurements():
                return self._goto(Phase.CORRECTING)
            return False
        if self.phase is Phase.CORRECTING:
            ledger = OutcomeLedger()
            for msg in sorted(self.inbox, key=lambda m: m.seq):
                ledger = ledger.add(msg.label, msg.sender, msg.outcome)
            pre = s.register.local_state(self.name)
            self.trace = finish_trace(s.input, s.wires, s.variant, ledger, s.register.probability, pre)
            return self._goto(Phase.DONE)
        return False


@dataclass(frozen=True)
class EfficiencyReport:
    n: int
    q_u: int
    q_t: int
    b_t: int

    @property
    def eta_q(self) -> Fraction:
        return Fraction(self.q_u, self.q_t)

    @property
    def eta_t(self) -> Fraction:
        return Fraction(self.q_u, self.q_t + self.b_t)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q_u": self.q_u,
            "q_t": self.q_t,
            "b_t": self.b_t,
            "eta_q": str(self.eta_q),
            "eta_t": str(self.eta_t),
            "b_t_convention": "2 bits per published Bell outcome; setup and check traffic excluded",
        }


def efficiency_report(n: int) -> EfficiencyReport:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    m = n + 2
    return EfficiencyReport(n=n, q_u=2, q_t=2 * m, b_t=BITS_PER_OUTCOME * m)


class Session:
    def __init__(
        self,
        inp: TwoQubitInput,
        n: int,
        variant: ChannelVariant,
        receiver: int | None,
        modes: Sequence[MeasureMode],
        silent: Sequence[int] = (),
    ):
        self.input = inp
        self.variant = variant
        state, self.wires = assemble_composite(inp, n, variant, receiver)
        self.register = QuantumRegister(state, "Alice")
        self.bus = MessageBus()
        steps = self.wires.measurements()
        self.expected_broadcasts = len(steps)
        modes = resolve_modes(modes, len(steps))
        self.alice = Measurer("Alice", self, jobs=[(w1, w2, m) for (_, w1, w2), m in zip(steps[:2], modes[:2])])
        self.controllers = []
        for agent, ((name, w1, w2), mode) in zip(self.wires.controller_agents, zip(steps[2:], modes[2:])):
            self.controllers.append(Measurer(name, self, jobs=[(w1, w2, mode)], silent=agent in silent))
        self.bob = Receiver("Bob", self, wires=self.wires.receiver_wires)
        self.parties: list[Party] = [self.alice, *self.controllers, self.bob]
        for p in self.parties:
            self.bus.subscribe(p)
        self._distributed = False

    def distribute(self) -> None:
        if self._distributed:
            return
        for wire, owner in self.wires.owners.items():
            if owner != "Alice":
                self.register.transfer(wire, "Alice", owner)
        self._distributed = True

    def pending_measurements(self) -> bool:
        return any(p.phase in (Phase.AWAITING_QUBITS, Phase.MEASURING) for p in self.parties if p is not self.bob)

    def run(self, max_sweeps: int = 64) -> None:
        for _ in range(max_sweeps):
            progressed = False
            for p in self.parties:
                progressed |= p.step()
            if all(p.phase is Phase.DONE for p in self.parties):
                return
            if not progressed:
                self.bob.phase = Phase.UNRECONSTRUCTABLE
                return
        raise RuntimeError("session did not settle")


@dataclass(frozen=True)
class SessionResult:
    status: str
    trace: TeleportTrace | None
    transcript: tuple[Broadcast, ...]
    efficiency: EfficiencyReport
    receiver_state: StateVector
    guess_fidelity: float | None = None

    @property
    def classical_bits(self) -> int:
        return sum(b.bits for b in self.transcript)


def _guess_fidelity(session: Session) -> float:
    """Mean fidelity when Bob guesses every missing outcome uniformly."""
    heard = {m.label: m for m in session.bob.inbox}
    steps = session.wires.measurements()
    missing = [f"{w1},{w2}" for _, w1, w2 in steps if f"{w1},{w2}" not in heard]
    pre = session.register.state
    target = session.input.state(pre.labels)
    fids = []
    for guesses in itertools.product(BELL_ORDER, repeat=len(missing)):
        filled = dict(zip(missing, guesses))
        ledger = OutcomeLedger()
        for party, w1, w2 in steps:
            label = f"{w1},{w2}"
            ledger = ledger.add(label, party, heard[label].outcome if label in heard else filled[label])
        rule = correction_lookup(*ledger_key(ledger), odd=session.wires.n % 2 == 1)
        fids.append(fidelity(apply_correction(pre, rule), target))
    return float(np.mean(fids))


def simulate_session(
    inp: TwoQubitInput,
    n: int,
    variant: ChannelVariant = ChannelVariant.X_SECOND,
    receiver: int | None = None,
    modes: MeasureMode | Sequence[MeasureMode] | None = None,
    seed: int | None = None,
    silent: Sequence[int] = (),
) -> SessionResult:
    """Run the full choreography; ``silent`` lists controller agents that never publish."""
    if modes is None:
        modes = Sample.from_seed(seed)
    session = Session(inp, n, variant, receiver, modes, silent)
    session.run()
    eff = efficiency_report(n)
    transcript = tuple(session.bus.log)
    if session.bob.phase is Phase.UNRECONSTRUCTABLE:
        return SessionResult(
            "unreconstructable", None, transcript, eff, session.register.state, _guess_fidelity(session)
        )
    return SessionResult("reconstructed", session.bob.trace, transcript, eff, session.bob.trace.pre_state)
