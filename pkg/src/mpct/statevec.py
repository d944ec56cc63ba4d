"""Dense pure-state simulation over labeled qubit wires.

Amplitude indexing is big-endian in wire order: wire 0 is the most
significant bit of the basis index, so ``|10>`` on two wires is index 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

SQRT1_2 = 1 / np.sqrt(2)

NORM_TOL = 1e-12
STATE_TOL = 1e-10
# Branch probabilities below this are treated as exactly zero.
ZERO_PROB = 1e-20


class ImpossibleBranch(ValueError):
    """A projection or forced outcome with zero probability."""


class Gate(Enum):
    U0 = "U0"
    U1 = "U1"
    U2 = "U2"
    U3 = "U3"
    H = "H"

    @property
    def matrix(self) -> np.ndarray:
        return _GATES[self]

    def __str__(self) -> str:
        return self.value


_GATES = {
    Gate.U0: np.array([[1, 0], [0, 1]], dtype=complex),
    Gate.U1: np.array([[1, 0], [0, -1]], dtype=complex),
    Gate.U2: np.array([[0, 1], [1, 0]], dtype=complex),
    # |0><1| - |1><0|; deliberately not Pauli Y.
    Gate.U3: np.array([[0, 1], [-1, 0]], dtype=complex),
    Gate.H: np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2,
}
for _m in _GATES.values():
    _m.setflags(write=False)

PAULIS = (Gate.U0, Gate.U1, Gate.U2, Gate.U3)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        labels = tuple(self.labels)
        n = int(round(np.log2(amps.size))) if amps.size else -1
        if amps.size == 0 or 2**n != amps.size:
            raise ValueError(f"amplitude count {amps.size} is not a power of two")
        if not labels:
            labels = tuple(f"q{i}" for i in range(n))
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} qubits")
        if len(set(labels)) != n:
            raise ValueError(f"duplicate wire labels in {labels}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no wire labeled {label!r}") from None

    def tensor(self, other: StateVector) -> StateVector:
        return StateVector(np.kron(self.amplitudes, other.amplitudes), self.labels + other.labels)

    def relabel(self, labels: Sequence[str]) -> StateVector:
        return StateVector(self.amplitudes, tuple(labels))

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def __repr__(self) -> str:
        return f"StateVector({self.num_qubits} qubits {self.labels})"


@dataclass(frozen=True)
class TwoQubitInput:
    """The unknown state a|00> + b|01> + c|10> + d|11>."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm2 = sum(abs(v) ** 2 for v in self.as_array())
        if abs(norm2 - 1) > NORM_TOL:
            raise ValueError(f"input amplitudes are not normalized (sum |.|^2 = {norm2!r})")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    def state(self, labels: tuple[str, str] = ("x", "y")) -> StateVector:
        return StateVector(self.as_array(), labels)

    @classmethod
    def from_array(cls, amps) -> TwoQubitInput:
        amps = np.asarray(amps, dtype=complex).reshape(4)
        return cls(*amps)

    @classmethod
    def random(cls, rng: np.random.Generator) -> TwoQubitInput:
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        return cls.from_array(v / np.linalg.norm(v))


def make_basis_state(num_qubits: int, bits: str, labels: Sequence[str] = ()) -> StateVector:
    if num_qubits < 1 or len(bits) != num_qubits or set(bits) - {"0", "1"}:
        raise ValueError(f"bit string {bits!r} does not describe {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(bits, 2)] = 1
    return StateVector(amps, tuple(labels))


def _check_wire(state: StateVector, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise IndexError(f"wire {q} out of range for {state.num_qubits} qubits")


def _apply_matrix(amps: np.ndarray, n: int, matrix: np.ndarray, target: int) -> np.ndarray:
    t = amps.reshape((2,) * n)
    t = np.tensordot(matrix, t, axes=([1], [target]))
    return np.moveaxis(t, 0, target).reshape(-1)


def apply_single(state: StateVector, gate: Gate, target: int) -> StateVector:
    _check_wire(state, target)
    return StateVector(_apply_matrix(state.amplitudes, state.num_qubits, gate.matrix, target), state.labels)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_wire(state, control)
    _check_wire(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    t = np.array(state.tensor_view())
    idx = [slice(None)] * state.num_qubits
    idx[control] = 1
    sub = t[tuple(idx)]
    # target axis shifts down by one once the control axis is indexed away
    ax = target if target < control else target - 1
    t[tuple(idx)] = np.flip(sub, axis=ax)
    return StateVector(t.reshape(-1), state.labels)


def partial_inner(state: StateVector, basis_state: StateVector, i: int, j: int) -> np.ndarray:
    """Unnormalized <basis|_{ij} |state>, as a flat array over the remaining wires."""
    _check_wire(state, i)
    _check_wire(state, j)
    if i == j:
        raise ValueError("projection wires must differ")
    if basis_state.num_qubits != 2:
        raise ValueError("basis_state must span two qubits")
    bra = basis_state.amplitudes.conj().reshape(2, 2)
    return np.tensordot(bra, state.tensor_view(), axes=([0, 1], [i, j])).reshape(-1)


def _remaining_labels(state: StateVector, *drop: int) -> tuple[str, ...]:
    return tuple(l for k, l in enumerate(state.labels) if k not in drop)


def project_pair(
    state: StateVector, basis_state: StateVector, i: int, j: int
) -> tuple[float, StateVector]:
    """Project wires ``(i, j)`` onto a two-qubit state and drop them.

    Returns the Born probability and the renormalized state on the
    remaining wires. Raises :class:`ImpossibleBranch` when the probability
    vanishes.
    """
    rest = partial_inner(state, basis_state, i, j)
    prob = float(np.vdot(rest, rest).real)
    if prob < ZERO_PROB:
        raise ImpossibleBranch(f"projection onto wires ({i}, {j}) has zero probability")
    return prob, StateVector(rest / np.sqrt(prob), _remaining_labels(state, i, j))


def measure_single(
    state: StateVector,
    target: int,
    basis: str = "z",
    rng: np.random.Generator | None = None,
    outcome: int | None = None,
) -> tuple[int, float, StateVector]:
    """Measure one wire in the z or x basis, leaving it in the eigenstate.

    Exactly one of ``rng`` (Born sampling) or ``outcome`` (forced) is used;
    0 denotes ``|0>`` / ``|+x>`` and 1 denotes ``|1>`` / ``|-x>``.
    """
    if basis not in ("z", "x"):
        raise ValueError(f"unknown basis {basis!r}")
    _check_wire(state, target)
    amps = state.amplitudes
    n = state.num_qubits
    if basis == "x":
        amps = _apply_matrix(amps, n, Gate.H.matrix, target)
    t = amps.reshape((2,) * n)
    probs = [float(np.sum(np.abs(np.take(t, k, axis=target)) ** 2)) for k in (0, 1)]
    probs = [0.0 if p < ZERO_PROB else p for p in probs]
    if outcome is None:
        if rng is None:
            raise ValueError("need an rng or a forced outcome")
        outcome = 0 if rng.random() < probs[0] / (probs[0] + probs[1]) else 1
    if probs[outcome] == 0.0:
        raise ImpossibleBranch(f"outcome {outcome} on wire {target} has zero probability")
    keep = np.zeros_like(t)
    idx = [slice(None)] * n
    idx[target] = outcome
    keep[tuple(idx)] = t[tuple(idx)]
    out = keep.reshape(-1) / np.sqrt(probs[outcome])
    if basis == "x":
        out = _apply_matrix(out, n, Gate.H.matrix, target)
    return outcome, probs[outcome], StateVector(out, state.labels)


def _check_sizes(s1: StateVector, s2: StateVector) -> None:
    if s1.num_qubits != s2.num_qubits:
        raise ValueError(f"size mismatch: {s1.num_qubits} vs {s2.num_qubits} qubits")


def fidelity(s1: StateVector, s2: StateVector) -> float:
    _check_sizes(s1, s2)
    f = abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2
    return float(min(1.0, f))


def global_phase(s1: StateVector, s2: StateVector) -> complex | None:
    """Unit scalar ``lam`` minimising ``||s1 - lam * s2||``; None if orthogonal."""
    _check_sizes(s1, s2)
    ov = np.vdot(s2.amplitudes, s1.amplitudes)
    if abs(ov) < ZERO_PROB:
        return None
    return complex(ov / abs(ov))


def equal_up_to_global_phase(s1: StateVector, s2: StateVector, tol: float = STATE_TOL) -> bool:
    lam = global_phase(s1, s2)
    if lam is None:
        return bool(np.linalg.norm(s1.amplitudes - s2.amplitudes) <= tol)
    return bool(np.linalg.norm(s1.amplitudes - lam * s2.amplitudes) <= tol)
