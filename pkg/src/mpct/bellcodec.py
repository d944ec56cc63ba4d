"""Bell basis, Bell-basis measurement and the bit-value/parity bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

from .statevec import (
    SQRT1_2,
    ZERO_PROB,
    ImpossibleBranch,
    StateVector,
    partial_inner,
    _remaining_labels,
)


class BellOutcome(Enum):
    PHI_PLUS = "Φ+"
    PHI_MINUS = "Φ-"
    PSI_PLUS = "Ψ+"
    PSI_MINUS = "Ψ-"

    @property
    def bit_value(self) -> int:
        return bit_value(self)

    @property
    def parity(self) -> int:
        return parity(self)

    @classmethod
    def parse(cls, text: str) -> BellOutcome:
        """Accepts the symbol ("Φ+", "psi-", "phi+") or the member name."""
        t = text.strip().replace("−", "-")
        if t in cls.__members__:
            return cls[t]
        aliases = {"phi": "Φ", "psi": "Ψ", "Phi": "Φ", "Psi": "Ψ", "PHI": "Φ", "PSI": "Ψ"}
        for k, v in aliases.items():
            if t.startswith(k):
                t = v + t[len(k):]
                break
        for o in cls:
            if t in (o.value, o.name):
                return o
        raise ValueError(f"unknown Bell outcome {text!r}")

    def __str__(self) -> str:
        return self.value


# Fixed enumeration order; sampling walks the cumulative distribution in it.
BELL_ORDER = (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS)

_BELL_AMPS = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1]) * SQRT1_2,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1]) * SQRT1_2,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0]) * SQRT1_2,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0]) * SQRT1_2,
}


def bell_state(outcome: BellOutcome, labels: tuple[str, str] = ()) -> StateVector:
    return StateVector(_BELL_AMPS[outcome], labels)


def bit_value(outcome: BellOutcome) -> int:
    """0 for Φ± (parallel bits), 1 for Ψ± (antiparallel)."""
    return 0 if outcome in (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS) else 1


def parity(outcome: BellOutcome) -> int:
    """The sign inside the superposition, as +1 or -1."""
    return 1 if outcome in (BellOutcome.PHI_PLUS, BellOutcome.PSI_PLUS) else -1


def ledger_totals(outcomes: Iterable[BellOutcome]) -> tuple[int, int]:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("ledger_totals needs at least one outcome")
    v = reduce(lambda acc, o: acc ^ bit_value(o), outcomes, 0)
    p = reduce(lambda acc, o: acc * parity(o), outcomes, 1)
    return v, p


def sign_symbol(p: int) -> str:
    return "+" if p > 0 else "-"


@dataclass(frozen=True)
class LedgerEntry:
    label: str
    party: str
    outcome: BellOutcome


@dataclass(frozen=True)
class OutcomeLedger:
    entries: tuple[LedgerEntry, ...] = ()

    def add(self, label: str, party: str, outcome: BellOutcome) -> OutcomeLedger:
        if any(e.label == label for e in self.entries):
            raise ValueError(f"measurement {label!r} already recorded")
        return OutcomeLedger(self.entries + (LedgerEntry(label, party, outcome),))

    @property
    def outcomes(self) -> tuple[BellOutcome, ...]:
        return tuple(e.outcome for e in self.entries)

    @property
    def v_total(self) -> int:
        return ledger_totals(self.outcomes)[0]

    @property
    def p_total(self) -> int:
        return ledger_totals(self.outcomes)[1]

    def __getitem__(self, label: str) -> BellOutcome:
        for e in self.entries:
            if e.label == label:
                return e.outcome
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.entries)


# Measurement modes ---------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    """Born-rule sampling from a caller-owned generator."""

    rng: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int | None) -> Sample:
        return cls(np.random.default_rng(seed))


@dataclass(frozen=True)
class Forced:
    outcome: BellOutcome


@dataclass(frozen=True)
class Enumerate:
    pass


MeasureMode = Union[Sample, Forced, Enumerate]


@dataclass(frozen=True)
class Branch:
    outcome: BellOutcome
    probability: float
    state: StateVector


def bell_probabilities(state: StateVector, i: int, j: int) -> dict[BellOutcome, float]:
    out = {}
    for o in BELL_ORDER:
        rest = partial_inner(state, bell_state(o), i, j)
        out[o] = float(np.vdot(rest, rest).real)
    return out


def bell_measure(state: StateVector, i: int, j: int, mode: MeasureMode) -> list[Branch]:
    """Bell-basis measurement of wires ``(i, j)``; the measured wires are removed.

    ``Enumerate`` returns every branch with nonzero probability, ``Sample``
    and ``Forced`` return a single branch.
    """
    labels = _remaining_labels(state, i, j)
    raw = {o: partial_inner(state, bell_state(o), i, j) for o in BELL_ORDER}
    probs = {o: float(np.vdot(v, v).real) for o, v in raw.items()}

    def branch(o: BellOutcome) -> Branch:
        p = probs[o]
        if p < ZERO_PROB:
            raise ImpossibleBranch(f"Bell outcome {o} on wires ({i}, {j}) has zero probability")
        return Branch(o, p, StateVector(raw[o] / np.sqrt(p), labels))

    if isinstance(mode, Enumerate):
        return [branch(o) for o in BELL_ORDER if probs[o] >= ZERO_PROB]
    if isinstance(mode, Forced):
        return [branch(mode.outcome)]
    if isinstance(mode, Sample):
        weights = np.array([probs[o] if probs[o] >= ZERO_PROB else 0.0 for o in BELL_ORDER])
        u = mode.rng.random() * weights.sum()
        k = int(np.searchsorted(np.cumsum(weights), u, side="right"))
        k = min(k, 3)
        while weights[k] == 0.0:
            k -= 1
        return [branch(BELL_ORDER[k])]
    raise TypeError(f"unknown measure mode {mode!r}")


def classify_bell(state: StateVector, tol: float = 1e-10) -> BellOutcome | None:
    """The Bell state equal to ``state`` up to global phase, if any."""
    for o in BELL_ORDER:
        if abs(abs(np.vdot(_BELL_AMPS[o], state.amplitudes)) - 1) <= tol:
            return o
    return None


def resolve_modes(modes: MeasureMode | Sequence[MeasureMode], count: int) -> list[MeasureMode]:
    """Broadcast a single mode or check a per-measurement list."""
    if isinstance(modes, (Sample, Forced, Enumerate)):
        return [modes] * count
    modes = list(modes)
    if modes and all(isinstance(m, BellOutcome) for m in modes):
        modes = [Forced(m) for m in modes]
    if len(modes) != count:
        raise ValueError(f"expected {count} measurement modes, got {len(modes)}")
    return modes
