import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from mcwalk import qss
from mcwalk.statevec import GeneralizedBellLabel, make_generalized_bell, tensor

INTERCEPT = qss.Adversary("intercept_resend_computational", "alice-bob")


def bell(d, k, l):
    return make_generalized_bell(GeneralizedBellLabel(d, k, l))


def label_of(pair):
    """Generalized Bell label of ``pair`` by brute-force overlap."""
    d = pair.dims[0]
    for k in range(d):
        for l in range(d):
            if abs(abs(np.vdot(oracle.generalized_bell(d, k, l), pair.amps)) - 1) < 1e-9:
                return k, l
    raise AssertionError("not a generalized Bell state")


def test_encode_secret_examples():
    pair = bell(3, 0, 0)
    assert qss.encode_secret(pair, 0, 3).allclose(pair)
    assert qss.encode_secret(pair, 1, 3).allclose(bell(3, 0, 2))
    with pytest.raises(ValueError):
        qss.encode_secret(pair, 3, 3)


@pytest.mark.parametrize("d", [3, 5])
def test_encode_secret_shifts_label(d):
    for k in range(d):
        for l in range(d):
            for i in range(d):
                assert qss.encode_secret(bell(d, k, l), i, d).allclose(bell(d, k, (l - i) % d))


@pytest.mark.parametrize("basis", qss.BASES)
@pytest.mark.parametrize("k,l", [(0, 0), (1, 2), (2, 1)])
def test_untampered_check_always_passes(basis, k, l):
    label = GeneralizedBellLabel(3, k, l)
    pair = make_generalized_bell(label)
    assert abs(qss.check_pass_probability(pair, label, basis) - 1) < 1e-12
    rng = np.random.default_rng(0)
    assert all(qss.channel_check(pair, label, basis, rng)[2] for _ in range(50))


@pytest.mark.parametrize("d", [3, 5, 7])
def test_intercept_resend_pass_probabilities(d):
    label = GeneralizedBellLabel(d, 0, 0)
    pair = make_generalized_bell(label)
    assert abs(qss.check_pass_probability(pair, label, "fourier_tilde", INTERCEPT) - 1 / d) < 1e-12
    assert abs(qss.check_pass_probability(pair, label, "computational", INTERCEPT) - 1) < 1e-12


def test_fourier_correlation_matches_oracle():
    d = 3
    w = np.exp(2j * np.pi / d)
    tilde = np.array([[w ** (i * j) for j in range(d)] for i in range(d)]) / np.sqrt(d)
    for k, l in [(0, 0), (1, 2)]:
        amp = tilde.conj().T @ oracle.generalized_bell(d, k, l).reshape(d, d) @ tilde.conj()
        probs = np.abs(amp) ** 2
        for i in range(d):
            for j in range(d):
                passes = qss.check_passes(GeneralizedBellLabel(d, k, l), "fourier_tilde", i, j)
                assert (probs[i, j] > 1e-12) == passes


def test_swap_step_example_d3():
    recs = {r.outcome: r for r in qss.swap_step_enumerate(tensor([bell(3, 0, 0), bell(3, 0, 0)]))}
    assert recs[(0, 0)].residual.allclose(bell(3, 0, 0))


@pytest.mark.parametrize("d", [3, 5])
def test_swap_labels_and_uniform_outcomes(d):
    for x, y, k, l in [(0, 0, 0, 0), (1, 2, 0, 1), (d - 1, 1, 2, d - 1)]:
        recs = qss.swap_step_enumerate(tensor([bell(d, x, y), bell(d, k, l)]))
        assert len(recs) == d * d
        for r in recs:
            assert abs(r.prob - 1 / d**2) < 1e-12
            assert label_of(r.residual) == qss.swap_map(d, k, y, r.outcome)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_swap_map_bijection(d):
    assert all(qss.is_swap_bijection(d, k, y) for k in range(d) for y in range(d))


def test_swap_map_not_bijective_for_even_d():
    assert not qss.is_swap_bijection(4, 0, 0)


def test_swap_step_sampled():
    rng = np.random.default_rng(2)
    digits, pair = qss.swap_step(tensor([bell(5, 1, 3), bell(5, 2, 4)]), rng)
    assert label_of(pair) == qss.swap_map(5, 2, 3, digits)
    with pytest.raises(ValueError):
        qss.swap_step(tensor([bell(3, 0, 0), bell(5, 0, 0)]), rng)


@pytest.mark.parametrize("k,l", [(0, 0), (1, 2)])
def test_decode_exhaustive_d3(k, l):
    # every secret and every outcome path of both swap rounds
    d = 3
    for secret in range(d):
        encoded = qss.encode_secret(bell(d, k, l), secret, d)
        for first in qss.swap_step_enumerate(tensor([encoded, bell(d, k, l)])):
            for second in qss.swap_step_enumerate(tensor([first.residual, bell(d, k, l)])):
                final = label_of(second.residual)
                assert qss.decode_secret(l, first.outcome, [second.outcome], final, d) == secret


def test_bell_measure_reads_label():
    rng = np.random.default_rng(0)
    for k, l in [(0, 0), (2, 1)]:
        (kk, ll), p = qss.bell_measure(bell(3, k, l), rng)
        assert (kk, ll) == (k, l) and abs(p - 1) < 1e-12


def test_run_protocol_secret_two_d3():
    for seed in range(30):
        t = qss.run_protocol(qss.QssConfig(d=3, seed=seed), 2)
        assert t.phase == "message" and not t.aborted and t.decoded_secret == 2


def test_run_protocol_d5_all_secrets():
    for i in range(5):
        runs = qss.run_batch(qss.QssConfig(d=5, seed=i), 100, i)
        assert all(t.correct for t in runs)


def test_run_protocol_n4():
    runs = qss.run_batch(qss.QssConfig(d=3, parties=4, q=0.3, seed=11), 50)
    assert all(t.correct and not t.aborted for t in runs)
    assert all(len(t.bob_outcomes) == 2 for t in runs)


def test_n3_reduces_to_base_protocol():
    cfg = qss.QssConfig(d=5, q=0.4, seed=9)
    assert qss.run_protocol(cfg, 3).to_json() == qss.run_protocol_n(cfg, 3).to_json()
    with pytest.raises(ValueError):
        qss.run_protocol(qss.QssConfig(d=3, parties=4), 0)


def test_check_round_failure_oracle():
    for d in (3, 5, 7):
        cfg = qss.QssConfig(d=d, q=0.5)
        assert abs(qss.check_round_failure_probability(cfg, INTERCEPT) - 0.5 * (1 - 1 / d)) < 1e-12
    assert qss.check_round_failure_probability(qss.QssConfig(d=3), qss.NO_ADVERSARY) == 0
    assert abs(qss.abort_probability(qss.QssConfig(d=3, q=0.5), INTERCEPT) - 0.25) < 1e-12


def test_n4_tampered_link_detection_matches_single_channel_oracle():
    # every run's first round is a check when q is close to one
    d = 3
    adv = qss.Adversary("intercept_resend_computational", 1)
    cfg = qss.QssConfig(d=d, parties=4, q=0.999, seed=5)
    delta = qss.check_round_failure_probability(cfg, adv)
    assert abs(delta - 0.5 * (1 - 1 / d)) < 1e-12
    runs = qss.run_batch(cfg, 3000, 0, adv)
    first_round_fail = np.mean([t.aborted and t.rounds == 1 for t in runs])
    sigma = np.sqrt(delta * (1 - delta) / len(runs))
    assert abs(first_round_fail - cfg.q * delta) < 4 * sigma
    assert abs(np.mean([t.aborted for t in runs]) - qss.abort_probability(cfg, adv)) < 0.02


def test_abort_rate_statistics_d3():
    cfg = qss.QssConfig(d=3, q=0.5, seed=21)
    runs = qss.run_batch(cfg, 2000, None, INTERCEPT)
    p = qss.abort_probability(cfg, INTERCEPT)
    rate = np.mean([t.aborted for t in runs])
    assert abs(rate - p) < 4 * np.sqrt(p * (1 - p) / len(runs))


def test_no_adversary_never_aborts():
    runs = qss.run_batch(qss.QssConfig(d=3, q=0.7, seed=1), 200)
    assert not any(t.aborted for t in runs)
    assert all(t.correct for t in runs)
    assert all(c.passed for t in runs for c in t.check_results)


def test_config_validation():
    for bad in [dict(d=4), dict(d=1), dict(k=3), dict(q=1.0), dict(q=-0.1), dict(parties=2)]:
        with pytest.raises(ValueError):
            qss.QssConfig(**bad)
    with pytest.raises(ValueError):
        qss.QssConfig.from_dict({"d": 3, "colour": 1})
    assert qss.QssConfig.from_dict(qss.QssConfig(d=5, k=1).to_dict()) == qss.QssConfig(d=5, k=1)
    with pytest.raises(ValueError):
        qss.Adversary("mitm")
    with pytest.raises(ValueError):
        qss.run_protocol(qss.QssConfig(d=3), 3)
    with pytest.raises(ValueError):
        qss.run_protocol(qss.QssConfig(d=3), 0, qss.Adversary("intercept_resend_computational", 5))


def test_adversary_link_names():
    assert INTERCEPT.link(3) == 0
    assert qss.Adversary("intercept_resend_computational", "alice-charlie").link(4) == 3
    assert qss.NO_ADVERSARY.link(3) is None


def test_transcript_serialization_and_determinism():
    cfg = qss.QssConfig(d=3, q=0.5, seed=4)
    a = qss.run_batch(cfg, 5, None, INTERCEPT)
    b = qss.run_batch(cfg, 5, None, INTERCEPT)
    assert [t.to_json() for t in a] == [t.to_json() for t in b]
    row = json.loads(a[0].to_json())
    assert {"phase", "check_results", "alice_announcement", "bob_outcomes", "decoded_secret", "true_secret", "aborted"} <= set(row)


def test_capacity_bits():
    assert qss.capacity_bits(3) == 2 and qss.capacity_bits(7) == 3 and qss.capacity_bits(9) == 4


@given(st.sampled_from([3, 5, 7]), st.integers(0, 2**32 - 1), st.integers(3, 5))
def test_round_trip_property(d, seed, parties):
    rng = np.random.default_rng(seed)
    k, l, secret = (int(x) for x in rng.integers(d, size=3))
    t = qss.run_protocol_n(qss.QssConfig(d=d, k=k, l=l, parties=parties, seed=seed), secret)
    assert t.decoded_secret == secret
    assert 0 <= t.decoded_secret < d
