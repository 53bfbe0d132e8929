import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.circuit import Circuit, Gate
from espnor.config import NoiseSpec
from espnor.mitigation import fold_gates_at_random
from espnor.noise import density_matrix_probabilities, noiseless_probabilities, simulate_noisy, trajectory_stream
from espnor.statevector import circuit_unitary, equal_up_to_phase, total_variation
from espnor.transpile import cnot, compile_to_native, gate_count_report

angles = st.floats(-np.pi, np.pi, allow_nan=False)


def _cnot_matrix():
    m = np.eye(4)
    m[[2, 3]] = m[[3, 2]]
    return m


def test_cnot_sequence():
    U = circuit_unitary(Circuit(2, tuple(cnot(0, 1))))
    assert equal_up_to_phase(U, _cnot_matrix()) < 1e-12


@given(angles)
def test_givens_compiles_to_two_rxx(t):
    c = Circuit(2, (Gate("G", (0, 1), t),))
    native = compile_to_native(c)
    assert native.is_native()
    assert native.gate_counts().get("RXX", 0) <= 2
    assert equal_up_to_phase(circuit_unitary(native), circuit_unitary(c)) < 1e-9


@given(angles)
def test_pair_exchange_compiles(t):
    c = Circuit(4, (Gate("PX", (0, 2, 1, 3), t),))
    native = compile_to_native(c)
    assert native.is_native()
    assert equal_up_to_phase(circuit_unitary(native), circuit_unitary(c)) < 1e-9


@given(st.lists(st.tuples(st.sampled_from(["RX", "RZ", "X"]), st.integers(0, 1), angles), max_size=12))
def test_fusion_preserves_unitary(ops):
    gates = [Gate(k, (q,), None if k == "X" else t) for k, q, t in ops]
    c = Circuit(2, tuple(gates))
    native = compile_to_native(c)
    assert len(native) <= len(c)
    assert equal_up_to_phase(circuit_unitary(native), circuit_unitary(c)) < 1e-9


def test_merged_circuit_compiles(prep_4e4o):
    assert equal_up_to_phase(circuit_unitary(prep_4e4o.native), circuit_unitary(prep_4e4o.circuit)) < 1e-9
    rep = gate_count_report(prep_4e4o.native)
    assert rep["total"] == rep["single_qubit"] + rep["two_qubit"]


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0, 2.5])
def test_folding_preserves_unitary_and_length(prep_2e2o, lam):
    native = prep_2e2o.native
    folded = fold_gates_at_random(native, lam, 11)
    assert abs(len(folded) - lam * len(native)) <= 2
    assert equal_up_to_phase(circuit_unitary(folded), circuit_unitary(native)) < 1e-9


def test_folding_rejects_logical_gates():
    with pytest.raises(ValueError):
        fold_gates_at_random(Circuit(2, (Gate("G", (0, 1), 0.1),)), 2, 0)


def _bell():
    return compile_to_native(Circuit(2, (Gate("RX", (0,), 0.9), *cnot(0, 1), Gate("RXX", (0, 1), 0.3))))


def test_zero_noise_matches_ideal():
    c = _bell()
    dm = density_matrix_probabilities(c, NoiseSpec(0.0, 0.0))
    np.testing.assert_allclose(dm, noiseless_probabilities(c), atol=1e-13)


def test_full_depolarizing_gives_mixed_state():
    c = Circuit(2, (Gate("RXX", (0, 1), 0.4),))
    np.testing.assert_allclose(density_matrix_probabilities(c, NoiseSpec(0.0, 1.0)), np.full(4, 0.25), atol=1e-14)


def test_single_qubit_channel_closed_form():
    # RX(pi) then depolarize with p: P(1) = 1 - p/2
    p = 0.2
    c = Circuit(1, (Gate("RX", (0,), np.pi),))
    probs = density_matrix_probabilities(c, NoiseSpec(p, 0.0))
    assert probs[1] == pytest.approx(1 - p / 2, abs=1e-14)


def test_trajectories_track_density_matrix():
    c = _bell()
    noise = NoiseSpec(0.05, 0.1)
    dm = density_matrix_probabilities(c, noise)
    counts = simulate_noisy(c, noise, 200_000, 9)
    assert total_variation(counts.frequencies(), dm) < 0.006


def test_trajectory_stream_is_seeded():
    c = _bell()
    a = trajectory_stream(c, NoiseSpec(), 500, 3)
    b = trajectory_stream(c, NoiseSpec(), 500, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, trajectory_stream(c, NoiseSpec(), 500, 4))
