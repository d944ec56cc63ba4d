"""GHZ resources and the composite register for the teleportation network.

Register layout is ``x, y, a_1..a_{n+2}, b_1..b_{n+2}``. Alice holds x, y,
a_1 and b_1; agent ``i`` (1..n+1) holds ``a_{i+1}, b_{i+1}``. One agent is
the receiver (Bob, agent n+1 unless overridden); the rest are controllers.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .statevec import SQRT1_2, Gate, StateVector, TwoQubitInput, apply_single


class ChannelVariant(Enum):
    X_SECOND = "x-second"  # second GHZ Hadamard-rotated on every wire
    Z_LATE_H = "z-late-h"  # both GHZ in z; last controller applies H to its b wire
    DIRECT = "direct"  # both GHZ in z; no H anywhere

    def __str__(self) -> str:
        return self.value


def make_ghz(k: int, basis: str = "z", labels: tuple[str, ...] = ()) -> StateVector:
    if k < 2:
        raise ValueError(f"GHZ state needs at least 2 qubits, got {k}")
    if basis not in ("z", "x"):
        raise ValueError(f"unknown basis {basis!r}")
    amps = np.zeros(2**k, dtype=complex)
    amps[0] = amps[-1] = SQRT1_2
    state = StateVector(amps, labels)
    if basis == "x":
        for q in range(k):
            state = apply_single(state, Gate.H, q)
    return state


@dataclass(frozen=True)
class WireMap:
    n: int
    receiver: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"controller count must be >= 0, got {self.n}")
        if not 1 <= self.receiver <= self.n + 1:
            raise ValueError(f"receiver must be an agent in 1..{self.n + 1}, got {self.receiver}")

    @classmethod
    def standard(cls, n: int, receiver: int | None = None) -> WireMap:
        return cls(n, n + 1 if receiver is None else receiver)

    @property
    def labels(self) -> tuple[str, ...]:
        m = self.n + 2
        return ("x", "y") + tuple(f"a{i}" for i in range(1, m + 1)) + tuple(f"b{i}" for i in range(1, m + 1))

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @staticmethod
    def agent_wires(agent: int) -> tuple[str, str]:
        return f"a{agent + 1}", f"b{agent + 1}"

    @property
    def controller_agents(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 2) if i != self.receiver)

    def party_name(self, agent: int) -> str:
        if agent == self.receiver:
            return "Bob"
        return f"Charlie_{self.controller_agents.index(agent) + 1}"

    @property
    def receiver_wires(self) -> tuple[str, str]:
        return self.agent_wires(self.receiver)

    @property
    def owners(self) -> dict[str, str]:
        own = {w: "Alice" for w in ("x", "y", "a1", "b1")}
        for agent in range(1, self.n + 2):
            for w in self.agent_wires(agent):
                own[w] = self.party_name(agent)
        return own

    def measurements(self) -> list[tuple[str, str, str]]:
        """(party, first wire, second wire) in cascade order: Alice, then controllers."""
        out = [("Alice", "x", "a1"), ("Alice", "y", "b1")]
        for agent in self.controller_agents:
            a, b = self.agent_wires(agent)
            out.append((self.party_name(agent), a, b))
        return out

    @property
    def late_h_wire(self) -> str | None:
        """b wire of the last controller, or None with no controllers."""
        if not self.controller_agents:
            return None
        return self.agent_wires(self.controller_agents[-1])[1]


def assemble_composite(
    inp: TwoQubitInput, n: int, variant: ChannelVariant, receiver: int | None = None
) -> tuple[StateVector, WireMap]:
    wires = WireMap.standard(n, receiver)
    m = n + 2
    second_basis = "x" if variant is ChannelVariant.X_SECOND else "z"
    state = (
        inp.state(("x", "y"))
        .tensor(make_ghz(m, "z", tuple(f"a{i}" for i in range(1, m + 1))))
        .tensor(make_ghz(m, second_basis, tuple(f"b{i}" for i in range(1, m + 1))))
    )
    assert state.labels == wires.labels
    return state, wires
