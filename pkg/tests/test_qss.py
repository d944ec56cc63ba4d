import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mpct import tables
from mpct.bellcodec import BELL_ORDER, BellOutcome, Forced, bell_state, classify_bell
from mpct.channel import ChannelVariant
from mpct.qss import (
    DEFAULT_THRESHOLD,
    MESSAGES,
    InterceptResend,
    ProductRecord,
    average_withheld_fidelity,
    bob_measure,
    carrier_map,
    decode,
    decode_classical,
    derive_classical_table,
    encode_classical,
    expected_error_rate,
    message_bits,
    outcome_marginals,
    qss_run,
    setup_channel,
    share_quantum_secret,
    withheld_guess_fidelities,
)
from mpct.protocol import run_teleport, walk_branches
from mpct.statevec import Gate, StateVector, TwoQubitInput, equal_up_to_global_phase

PHI_P, PHI_M, PSI_P, PSI_M = BELL_ORDER
S = 1 / np.sqrt(2)


def test_code_examples():
    assert encode_classical("0+") is PHI_P
    assert encode_classical("1−") is PHI_M
    assert encode_classical("0-") is PSI_P
    assert encode_classical("1+") is PSI_M
    for m in MESSAGES:
        assert decode_classical(encode_classical(m)) == m
    assert message_bits("1-") == (1, 1)
    with pytest.raises(ValueError):
        encode_classical("2+")


def test_even_decode_examples():
    assert decode(0, 1, PHI_P, odd=False) == "0+"
    # carrier Φ+ under U0⊗U3, as the (1, -) class maps it
    final = StateVector(np.kron(np.eye(2), Gate.U3.matrix) @ bell_state(PHI_P).amplitudes)
    assert decode(1, -1, classify_bell(final), odd=False) == "0+"


def test_odd_decode_example():
    # CNOT Φ+ = |+x>|0>, a σx⊗σz eigenstate
    rec = ProductRecord(1, 0)
    assert np.allclose(rec.state(), np.array([1, 0, 1, 0]) * S)
    assert decode(0, 1, rec, odd=True) == "0+"


def test_decode_type_checks():
    with pytest.raises(ValueError):
        decode(0, 1, PHI_P, odd=True)
    with pytest.raises(ValueError):
        decode(0, 1, ProductRecord(1, 0), odd=False)


def test_table_iv_row_one():
    res = qss_run("0+", 2, [Forced(PHI_P)] * 4)
    assert res.bob_record is PHI_P and res.decoded == "0+"
    assert equal_up_to_global_phase(res.final_state, bell_state(PHI_P, res.final_state.labels))


def test_table_v_last_row():
    # find a branch with (V_total, P_total) = (1, -) at n=1 carrying "0+"
    outs = [PSI_M, PHI_P, PHI_P]
    res = qss_run("0+", 1, [Forced(o) for o in outs])
    assert (res.ledger.v_total, res.ledger.p_total) == (1, -1)
    expected = carrier_map(1, -1, odd=True) @ bell_state(PHI_P).amplitudes
    assert tables.TABLE_CLASSICAL[(1, -1)] is Gate.U3
    assert equal_up_to_global_phase(res.final_state, StateVector(expected, res.final_state.labels))
    assert res.ok


@pytest.mark.parametrize("odd", [True, False])
def test_classical_tables_derive(odd):
    assert derive_classical_table(odd) == tables.TABLE_CLASSICAL


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_classical_round_trip_every_branch(n):
    odd = n % 2 == 1
    for msg in MESSAGES:
        inp = TwoQubitInput.from_array(bell_state(encode_classical(msg)).amplitudes)
        for ledger, _, pre in walk_branches(inp, n, ChannelVariant.X_SECOND):
            rec = bob_measure(pre, odd)  # deterministic, raises otherwise
            assert decode(ledger.v_total, ledger.p_total, rec, odd) == msg


def test_sampled_qss_runs():
    rng = np.random.default_rng(4)
    for seed in range(10):
        from mpct.bellcodec import Sample

        res = qss_run(MESSAGES[seed % 4], 1 + seed % 3, Sample.from_seed(seed), bob_rng=rng)
        assert res.ok


def test_quantum_secret_to_middle_agent(generic_input):
    for outs in [[PHI_P] * 4, [PSI_M, PHI_M, PSI_P, PHI_M]]:
        tr = share_quantum_secret(generic_input, 2, 2, [Forced(o) for o in outs])
        assert tr.receiver == 2 and tr.rule.cnot is False
        assert tr.fidelity == pytest.approx(1, abs=1e-10)


def test_quantum_secret_sole_agent(generic_input):
    tr = share_quantum_secret(generic_input, 0, 1, [Forced(PSI_P), Forced(PHI_M)])
    assert tr.fidelity == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("n,label", [(1, "a2,b2"), (2, "a3,b3"), (2, "x,a1")])
def test_single_outcome_marginals_are_uniform(n, label, generic_input):
    m = outcome_marginals(generic_input, n, label)
    assert all(abs(p - 0.25) < 1e-12 for p in m.values())


def test_marginals_are_message_independent():
    for n in (1, 2):
        ref = None
        for msg in MESSAGES:
            inp = TwoQubitInput.from_array(bell_state(encode_classical(msg)).amplitudes)
            m = outcome_marginals(inp, n, "a2,b2")
            if ref is not None:
                assert all(abs(m[o] - ref[o]) < 1e-12 for o in BELL_ORDER)
            ref = m


def test_withholding_breaks_reconstruction(generic_input):
    avg = average_withheld_fidelity(generic_input, 1)
    assert avg < 1 - 1e-3
    tr = run_teleport(generic_input, 1, ChannelVariant.X_SECOND, [PSI_M, PHI_M, PSI_M])
    fids = withheld_guess_fidelities(tr, "a2,b2")
    assert max(fids) == pytest.approx(1)  # the right guess works
    assert min(fids) < 1
    with pytest.raises(KeyError):
        withheld_guess_fidelities(tr, "a9,b9")
    with pytest.raises(ValueError):
        average_withheld_fidelity(generic_input, 1, controller=2)


def test_error_rate_oracle():
    assert expected_error_rate(None) == 0
    assert expected_error_rate(InterceptResend(1.0)) == 0.25
    assert expected_error_rate(InterceptResend(0.0)) == 0
    assert DEFAULT_THRESHOLD == 0.125
    with pytest.raises(ValueError):
        InterceptResend(1.5)


def test_channel_without_eve_is_clean():
    rep = setup_channel(2000, 0.5, 0.2, None, seed=1)
    assert rep.error_rate == 0 and rep.decision == "accept"
    assert rep.checks == rep.sample_checks + rep.decoy_checks > 0
    rep0 = setup_channel(500, 0.5, 0.2, InterceptResend(0.0), seed=1)
    assert rep0.error_rate == 0 and rep0.decision == "accept"


def test_channel_with_eve_aborts():
    rep = setup_channel(4000, 0.5, 0.2, InterceptResend(1.0), seed=5)
    assert abs(rep.error_rate - 0.25) < 0.04
    assert rep.decision == "abort"


def test_channel_is_seed_deterministic():
    a = setup_channel(300, 0.4, 0.3, InterceptResend(0.5), seed=12)
    b = setup_channel(300, 0.4, 0.3, InterceptResend(0.5), seed=12)
    assert a == b


@pytest.mark.parametrize(
    "args", [(0, 0.5, 0.2), (10, 0.0, 0.2), (10, 0.5, 1.0), (10, 0.7, 0.5)]
)
def test_channel_validation(args):
    with pytest.raises(ValueError):
        setup_channel(*args)


@settings(max_examples=10)
@given(st.floats(0.0, 1.0))
def test_partial_attack_rate_is_bounded_by_full(f):
    assert 0 <= expected_error_rate(InterceptResend(f)) <= expected_error_rate(InterceptResend(1.0))
