import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from mcwalk.statevec import (
    DensityMatrix,
    GeneralizedBellLabel,
    PureState,
    apply_unitary,
    bell_state,
    decode_index,
    encode_index,
    make_generalized_bell,
    make_ghz,
    make_pair,
    measure_enumerate,
    partial_trace,
    reduced_density,
    sample_shots,
    tensor,
)
from mcwalk.walk import build_shift, GraphKind, hadamard, weyl_x

S2 = 2**-0.5
W3 = np.exp(2j * np.pi / 3)


def test_bell_d2_00():
    assert bell_state(2, 0, 0).allclose(PureState((2, 2), np.array([1, 0, 0, 1]) * S2))


def test_bell_d3_second_index_is_m_minus_l():
    k3 = lambda x, y: oracle.ket([x, y], [3, 3])
    assert np.allclose(bell_state(3, 0, 1).amps, (k3(0, 2) + k3(1, 0) + k3(2, 1)) / np.sqrt(3))
    assert np.allclose(bell_state(3, 0, 2).amps, (k3(0, 1) + k3(1, 2) + k3(2, 0)) / np.sqrt(3))


def test_bell_d3_10_phases():
    amps = bell_state(3, 1, 0).amps
    assert np.allclose([amps[0], amps[4], amps[8]], np.array([1, W3, W3**2]) / np.sqrt(3))
    assert np.allclose(np.delete(amps, [0, 4, 8]), 0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_bell_labels_match_oracle_and_form_a_basis(d):
    states = [make_generalized_bell(GeneralizedBellLabel(d, k, l)) for k in range(d) for l in range(d)]
    for s, (k, l) in zip(states, [(k, l) for k in range(d) for l in range(d)]):
        assert np.allclose(s.amps, oracle.generalized_bell(d, k, l))
    gram = np.array([[np.vdot(a.amps, b.amps) for b in states] for a in states])
    assert np.allclose(gram, np.eye(d * d))


def test_label_range_enforced_and_wrap():
    with pytest.raises(ValueError):
        GeneralizedBellLabel(3, 3, 0)
    assert GeneralizedBellLabel.wrap(3, 4, -1) == GeneralizedBellLabel(3, 1, 2)


def test_make_pair_examples():
    assert make_pair(S2, S2).allclose(PureState((2, 2), np.array([0, 1, 1, 0]) * S2))
    assert make_pair(1, 0).allclose(PureState.basis((2, 2), (0, 1)))
    p = make_pair(0.6, 0.8)
    assert np.allclose(p.amps, [0, 0.6, 0.8, 0])
    assert abs(np.linalg.norm(p.amps) - 1) < 1e-12


def test_make_pair_rejects_unnormalized():
    with pytest.raises(ValueError):
        make_pair(1, 1)


def test_make_ghz_examples():
    assert np.allclose(make_ghz(2, 3).amps, (oracle.ket([0, 0, 0], [2] * 3) + oracle.ket([1, 1, 1], [2] * 3)) * S2)
    expected = sum(oracle.ket([j] * 3, [3] * 3) for j in range(3)) / np.sqrt(3)
    assert np.allclose(make_ghz(3, 3).amps, expected)
    assert make_ghz(2, 2).allclose(bell_state(2, 0, 0))


def test_tensor_examples():
    zero, one = PureState.basis((2,), (0,)), PureState.basis((2,), (1,))
    assert tensor([zero, one]).allclose(PureState.basis((2, 2), (0, 1)))
    pair = make_pair(S2, S2)
    four = tensor([pair, pair])
    assert np.allclose(four.amps, np.kron(pair.amps, pair.amps))
    plus = PureState((2,), np.array([S2, S2]))
    assert np.allclose(tensor([plus, plus]).amps, 0.5)


def test_apply_unitary_examples():
    s = apply_unitary(PureState.basis((2, 2), (0, 1)), weyl_x(2), [0])
    assert s.allclose(PureState.basis((2, 2), (1, 1)))
    s = apply_unitary(PureState.basis((2,), (0,)), hadamard(), [0])
    assert np.allclose(s.amps, [S2, S2])
    s = apply_unitary(PureState.basis((2, 2), (1, 1)), build_shift(GraphKind("complete", 2)), [0, 1])
    assert s.allclose(PureState.basis((2, 2), (0, 1)))


def test_apply_unitary_rejects_bad_input():
    s = PureState.basis((2, 2), (0, 0))
    with pytest.raises(ValueError):
        apply_unitary(s, np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(3), [0])
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(2), [2])


def test_pure_state_rejects_unnormalized_and_is_readonly():
    with pytest.raises(ValueError):
        PureState((2,), np.array([1, 1]))
    s = PureState.basis((2,), (0,))
    with pytest.raises(ValueError):
        s.amps[0] = 0


def test_measure_bell_one_side():
    recs = measure_enumerate(bell_state(2), [0])
    assert [r.outcome for r in recs] == [(0,), (1,)]
    assert all(abs(r.prob - 0.5) < 1e-12 for r in recs)
    assert recs[0].residual.allclose(PureState.basis((2,), (0,)))
    assert recs[1].residual.allclose(PureState.basis((2,), (1,)))


def test_measure_two_line_state_gives_bell_every_outcome():
    psi = PureState((2,) * 4, oracle.closed_form_two_line_bell(S2, S2))
    recs = measure_enumerate(psi, [1, 2])
    assert len(recs) == 4
    for r in recs:
        assert abs(r.prob - 0.25) < 1e-12
        assert abs(r.residual.fidelity(bell_state(2)) - 1) < 1e-12


def test_measure_two_complete_state_degenerate_amplitudes():
    psi = PureState((2,) * 4, oracle.closed_form_two_complete_bell(1, 0))
    recs = {r.outcome: r for r in measure_enumerate(psi, [1, 2])}
    assert set(recs) == {(1, 0), (1, 1)}
    assert abs(recs[(1, 0)].prob - 0.5) < 1e-12
    assert recs[(1, 0)].residual.equal_up_to_phase(PureState.basis((2, 2), (1, 0)))
    assert recs[(1, 1)].residual.equal_up_to_phase(PureState.basis((2, 2), (0, 0)))


def test_sample_shots_examples():
    assert sample_shots(PureState.basis((2,), (0,)), 100, 0) == {"0": 100}
    s = make_ghz(2, 3)
    assert sample_shots(s, 500, 3) == sample_shots(s, 500, 3)


def test_partial_trace_examples():
    rho = PureState.basis((2, 2), (0, 0)).density()
    assert partial_trace(rho, [0]).allclose(PureState.basis((2,), (0,)).density())
    assert reduced_density(bell_state(2), [0]).allclose(DensityMatrix.maximally_mixed((2,)))


def test_partial_trace_ghz_like_d3():
    d = 3
    amps = sum(oracle.ket([(p + q) % d, p, q], [d] * 3) for p in range(d) for q in range(d)) / d
    rho = reduced_density(PureState((d,) * 3, amps), [0])
    assert rho.allclose(DensityMatrix.maximally_mixed((d,)))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        DensityMatrix((2,), np.eye(2))
    assert not DensityMatrix((2,), np.diag([1.5, -0.5])).is_psd()


def test_json_round_trip():
    s = bell_state(3, 1, 2)
    assert PureState.from_json(s.to_json()).allclose(s)
    rho = s.density()
    assert DensityMatrix.from_dict(rho.to_dict()).allclose(rho)


dims_st = st.lists(st.integers(2, 4), min_size=1, max_size=4)


@st.composite
def random_state(draw):
    dims = draw(dims_st)
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    total = int(np.prod(dims))
    v = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return PureState.from_unnormalized(dims, v), rng


@given(dims_st, st.data())
def test_index_round_trip(dims, data):
    idx = data.draw(st.integers(0, int(np.prod(dims)) - 1))
    assert encode_index(decode_index(idx, dims), dims) == idx


@given(random_state(), st.data())
def test_apply_unitary_matches_dense_oracle(state_rng, data):
    state, rng = state_rng
    targets = data.draw(st.permutations(range(state.n)).map(lambda p: p[: max(1, len(p) // 2)]))
    sub = int(np.prod([state.dims[t] for t in targets]))
    z = rng.standard_normal((sub, sub)) + 1j * rng.standard_normal((sub, sub))
    u, _ = np.linalg.qr(z)
    out = apply_unitary(state, u, targets)
    expected = oracle.embed(u, list(state.dims), list(targets)) @ state.amps
    assert np.allclose(out.amps, expected, atol=1e-10)
    assert abs(np.linalg.norm(out.amps) - 1) < 1e-10


@given(random_state(), st.data())
def test_measurement_probabilities_sum_to_one(state_rng, data):
    state, _ = state_rng
    targets = data.draw(st.lists(st.integers(0, state.n - 1), min_size=1, unique=True))
    recs = measure_enumerate(state, targets)
    assert abs(sum(r.prob for r in recs) - 1) < 1e-9
    for r in recs:
        assert abs(np.linalg.norm(r.residual.amps) - 1) < 1e-9


@given(random_state(), st.data())
def test_partial_trace_properties(state_rng, data):
    state, _ = state_rng
    keep = sorted(data.draw(st.lists(st.integers(0, state.n - 1), min_size=1, unique=True)))
    rho = reduced_density(state, keep)
    assert abs(np.trace(rho.mat) - 1) < 1e-9
    assert np.allclose(rho.mat, rho.mat.conj().T)
    assert rho.is_psd()
    assert np.allclose(rho.mat, oracle.reduced(state.amps, list(state.dims), keep), atol=1e-10)
    assert np.allclose(partial_trace(state.density(), keep).mat, rho.mat, atol=1e-10)
