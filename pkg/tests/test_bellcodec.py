import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import states
from mpct.bellcodec import (
    BELL_ORDER,
    BellOutcome,
    Enumerate,
    Forced,
    OutcomeLedger,
    Sample,
    bell_measure,
    bell_state,
    bit_value,
    classify_bell,
    ledger_totals,
    parity,
    resolve_modes,
)
from mpct.channel import ChannelVariant, assemble_composite
from mpct.protocol import subsystem_coeffs
from mpct.statevec import PAULIS, ImpossibleBranch, StateVector, TwoQubitInput, apply_single, make_basis_state

PHI_P, PHI_M, PSI_P, PSI_M = BELL_ORDER
S = 1 / np.sqrt(2)


def test_bell_state_amplitudes():
    assert np.allclose(bell_state(PHI_P).amplitudes, [S, 0, 0, S])
    assert np.allclose(bell_state(PSI_M).amplitudes, [0, S, -S, 0])


def test_bit_values_and_parities():
    assert [bit_value(o) for o in BELL_ORDER] == [0, 0, 1, 1]
    assert [parity(o) for o in BELL_ORDER] == [1, -1, 1, -1]
    assert PSI_M.bit_value == 1 and PSI_M.parity == -1


def test_parse_aliases():
    assert BellOutcome.parse("psi-") is PSI_M
    assert BellOutcome.parse("Φ−") is PHI_M
    assert BellOutcome.parse("PHI_PLUS") is PHI_P
    with pytest.raises(ValueError):
        BellOutcome.parse("chi+")


def test_local_paulis_permute_bell_states():
    # (U_i ⊗ U0) Φ+ lands on each Bell state exactly once
    hits = set()
    for g in PAULIS:
        out = apply_single(bell_state(PHI_P), g, 0)
        o = classify_bell(out)
        assert o is not None
        hits.add(o)
    assert hits == set(BELL_ORDER)


def test_ledger_totals_examples():
    assert ledger_totals([PSI_M, PHI_M, PSI_M]) == (0, -1)
    for k in range(1, 7):
        assert ledger_totals([PHI_P] * k) == (0, 1)
    with pytest.raises(ValueError):
        ledger_totals([])


@given(st.lists(st.sampled_from(BELL_ORDER), min_size=6, max_size=6))
def test_ledger_totals_by_definition(outs):
    v = 0
    p = 1
    for o in outs:
        v ^= 1 if o in (PSI_P, PSI_M) else 0
        p *= -1 if o in (PHI_M, PSI_M) else 1
    assert ledger_totals(outs) == (v, p)


def test_ledger_rejects_duplicate_labels():
    led = OutcomeLedger().add("x,a1", "Alice", PHI_P)
    with pytest.raises(ValueError):
        led.add("x,a1", "Alice", PSI_P)
    assert led["x,a1"] is PHI_P and len(led) == 1


def test_enumerate_examples():
    (br,) = bell_measure(bell_state(PHI_P), 0, 1, Enumerate())
    assert br.outcome is PHI_P and br.probability == pytest.approx(1) and br.state.num_qubits == 0
    brs = bell_measure(make_basis_state(2, "00"), 0, 1, Enumerate())
    assert [(b.outcome, round(b.probability, 12)) for b in brs] == [(PHI_P, 0.5), (PHI_M, 0.5)]


def test_forced_zero_probability_raises():
    with pytest.raises(ImpossibleBranch):
        bell_measure(make_basis_state(2, "00"), 0, 1, Forced(PSI_M))


def test_forced_step_matches_subsystem_coefficients(generic_input):
    # after Φ+ at (x,a1) and Φ+ at (y,b1), projecting the remaining channel wires onto
    # |0..0>_a |+x..+x>_b etc. isolates alpha..delta
    inp = generic_input
    state, wires = assemble_composite(inp, 1, ChannelVariant.X_SECOND)
    (br,) = bell_measure(state, wires.index("x"), wires.index("a1"), Forced(PHI_P))
    assert br.state.num_qubits == 6
    st1 = br.state
    (br,) = bell_measure(st1, st1.index("y"), st1.index("b1"), Forced(PHI_P))
    t = br.state.tensor_view()
    labels = br.state.labels
    a2, a3, b2, b3 = (labels.index(w) for w in ("a2", "a3", "b2", "b3"))
    plus, minus = np.array([S, S]), np.array([S, -S])
    extracted = []
    for abit, bvec in [(0, plus), (0, minus), (1, plus), (1, minus)]:
        amp = t
        # contract b-wires first (higher indices) so earlier axes keep their position
        for ax in sorted((b2, b3), reverse=True):
            amp = np.tensordot(amp, bvec.conj(), axes=([ax], [0]))
        amp = amp[abit, abit]
        extracted.append(complex(amp))
    expected = subsystem_coeffs(inp, PHI_P, PHI_P).as_array()
    ratio = np.array(extracted) / expected
    assert np.allclose(ratio, ratio[0], atol=1e-10)


@given(states(3))
def test_enumerate_probabilities_sum_to_one(s):
    total = sum(b.probability for b in bell_measure(s, 0, 2, Enumerate()))
    assert abs(total - 1) < 1e-12


def _uniform_state():
    # Φ+ on (0,2) and Φ+ on (1,3): measuring (0,1) gives all four outcomes with 1/4
    v = np.kron(bell_state(PHI_P).amplitudes, bell_state(PHI_P).amplitudes)
    t = v.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1)
    return StateVector(t)


def test_sampling_is_seed_deterministic():
    s = _uniform_state()
    a = [bell_measure(s, 0, 1, Sample.from_seed(9))[0].outcome for _ in range(3)]
    b = [bell_measure(s, 0, 1, Sample.from_seed(9))[0].outcome for _ in range(3)]
    assert a == b
    m1, m2 = Sample.from_seed(11), Sample.from_seed(11)
    seq1 = [bell_measure(s, 0, 1, m1)[0].outcome for _ in range(50)]
    seq2 = [bell_measure(s, 0, 1, m2)[0].outcome for _ in range(50)]
    assert seq1 == seq2


def test_sampling_frequencies_are_uniform():
    s = _uniform_state()
    probs = {b.outcome: b.probability for b in bell_measure(s, 0, 1, Enumerate())}
    assert all(abs(p - 0.25) < 1e-12 for p in probs.values())
    mode = Sample.from_seed(2024)
    counts = Counter(bell_measure(s, 0, 1, mode)[0].outcome for _ in range(10_000))
    for o in BELL_ORDER:
        assert abs(counts[o] / 10_000 - 0.25) < 0.05 * 0.25


def test_resolve_modes():
    assert resolve_modes(Enumerate(), 3) == [Enumerate()] * 3
    assert resolve_modes([PHI_P, PSI_M], 2) == [Forced(PHI_P), Forced(PSI_M)]
    with pytest.raises(ValueError):
        resolve_modes([Forced(PHI_P)], 2)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_every_cascade_measurement_is_uniform(n, generic_input):
    state, wires = assemble_composite(generic_input, n, ChannelVariant.X_SECOND)
    for outs in itertools.islice(itertools.product(BELL_ORDER, repeat=len(wires.measurements())), 0, None, 7):
        st_ = state
        for (_, w1, w2), o in zip(wires.measurements(), outs):
            probs = {b.outcome: b.probability for b in bell_measure(st_, st_.index(w1), st_.index(w2), Enumerate())}
            assert all(abs(probs.get(x, 0) - 0.25) < 1e-10 for x in BELL_ORDER)
            (br,) = bell_measure(st_, st_.index(w1), st_.index(w2), Forced(o))
            st_ = br.state
