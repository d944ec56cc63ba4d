import sys

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from mpct.statevec import StateVector, TwoQubitInput

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def unit_vectors(dim: int):
    comp = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
    return (
        st.lists(st.tuples(comp, comp), min_size=dim, max_size=dim)
        .map(lambda xs: np.array([complex(r, i) for r, i in xs]))
        .filter(lambda v: np.linalg.norm(v) > 1e-3)
        .map(lambda v: v / np.linalg.norm(v))
    )


def states(num_qubits: int):
    return unit_vectors(2**num_qubits).map(StateVector)


def inputs():
    return unit_vectors(4).map(TwoQubitInput.from_array)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_input():
    # distinct moduli and nontrivial phases
    v = np.array([0.1 + 0.2j, 0.3 - 0.1j, -0.5 + 0.05j, 0.4 + 0.6j])
    return TwoQubitInput.from_array(v / np.linalg.norm(v))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
