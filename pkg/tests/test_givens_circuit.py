import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.circuit import Circuit, Gate, gate_matrix, parse_circuit
from espnor.givens import decompose, fix_determinant, merge, random_orthogonal, to_matrix
from espnor.statevector import (
    apply_circuit,
    circuit_unitary,
    equal_up_to_phase,
    probabilities,
    sample,
    sample_distribution,
    total_variation,
)


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_decompose_reconstructs(n, seed):
    U = random_orthogonal(n, np.random.default_rng(seed))
    net = decompose(U)
    assert len(net.rotations) <= n * (n - 1) // 2
    np.testing.assert_allclose(to_matrix(net), U, atol=1e-12)


def test_merge_is_product(rng):
    A, B = random_orthogonal(4, rng), random_orthogonal(4, rng)
    m = merge(decompose(A), decompose(B))
    np.testing.assert_allclose(to_matrix(m), B @ A, atol=1e-12)


def test_fix_determinant_flips_one_column(rng):
    Q = random_orthogonal(4, rng, special=False)
    Q[:, 0] *= np.sign(np.linalg.det(Q)) * -1
    assert np.linalg.det(fix_determinant(Q)) == pytest.approx(1.0)


@pytest.mark.parametrize("kind,n", [("RX", 1), ("RZ", 1), ("RXX", 2), ("G", 2), ("PX", 4)])
def test_gate_matrices_unitary_and_inverse(kind, n):
    m = gate_matrix(kind, 0.37)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(2**n), atol=1e-14)
    inv = Gate(kind, tuple(range(n)), 0.37).inverse().matrix()
    np.testing.assert_allclose(inv @ m, np.eye(2**n), atol=1e-14)


def test_givens_and_pair_exchange_blocks():
    t = 0.8
    c, s = np.cos(t / 2), np.sin(t / 2)
    G = gate_matrix("G", t)
    np.testing.assert_allclose(G[np.ix_([1, 2], [1, 2])], [[c, -s], [s, c]])
    P = gate_matrix("PX", t)
    np.testing.assert_allclose(P[np.ix_([12, 3], [12, 3])], [[c, -s], [s, c]])
    assert P[5, 5] == 1 and P[0, 0] == 1


def test_rxx_has_no_half_angle():
    t = 0.3
    XX = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]])
    np.testing.assert_allclose(gate_matrix("RXX", t), np.cos(t) * np.eye(4) - 1j * np.sin(t) * XX, atol=1e-15)


def test_circuit_text_round_trip():
    c = Circuit(4, (Gate("X", (0,)), Gate("G", (0, 1), 0.1), Gate("PX", (0, 2, 1, 3), -0.2), Gate("RXX", (2, 3), 1.0)))
    assert parse_circuit(c.dumps()) == c


@pytest.mark.parametrize("text", [
    "qubits 2\nX 0\n",
    "espnor-circuit-v1\nqubits 2\nCZ 0 1\n",
    "espnor-circuit-v1\nqubits 2\nRX 0\n",
    "espnor-circuit-v1\nqubits 2\nRXX 0 0 1.0\n",
    "espnor-circuit-v1\nqubits 1\nRX 1 0.2\n",
])
def test_circuit_parse_errors(text):
    with pytest.raises(ValueError):
        parse_circuit(text)


def test_qubit_zero_is_most_significant():
    psi = apply_circuit(Circuit(3, (Gate("X", (0,)),)))
    assert np.argmax(np.abs(psi)) == 0b100


def test_unitary_and_phase_distance(rng):
    c = Circuit(2, (Gate("RX", (0,), 0.4), Gate("RXX", (0, 1), 0.2), Gate("RZ", (1,), -1.1)))
    U = circuit_unitary(c)
    assert equal_up_to_phase(U, np.exp(0.7j) * U) < 1e-14
    assert equal_up_to_phase(U, circuit_unitary(c.inverse()).conj().T) < 1e-14


def test_sampling_is_seeded_and_analytic_mode_exact():
    psi = apply_circuit(Circuit(2, (Gate("RX", (0,), 1.0), Gate("RXX", (0, 1), 0.5))))
    a, b = sample(psi, 1000, 5), sample(psi, 1000, 5)
    assert np.array_equal(a.stream, b.stream)
    exact = sample(psi, 1000, 5, analytic=True)
    np.testing.assert_allclose(exact.frequencies(), probabilities(psi), atol=1e-15)


def test_sampled_distribution_close_to_truth():
    p = np.array([0.5, 0.25, 0.125, 0.125])
    counts = sample_distribution(p, 200_000, 3)
    assert total_variation(counts.frequencies(), p) < 0.005
