"""Dense statevector simulation, expectation values and shot sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate
from .fermion import PauliSum, index_to_bitstring

NORM_TOL = 1e-10


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def apply_matrix(tensor: np.ndarray, mat: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Apply a k-qubit matrix to axes ``qubits`` of a ``(2,)*n + rest`` tensor."""
    k = len(qubits)
    m = mat.reshape((2,) * (2 * k))
    out = np.tensordot(m, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def apply_gate(state: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    t = state.reshape((2,) * n_qubits)
    return apply_matrix(t, gate.matrix(), gate.qubits, n_qubits).reshape(-1)


def apply_circuit(circuit: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    """Evolve ``state`` (default ``|0...0>``) through every gate of ``circuit``."""
    n = circuit.n_qubits
    if state is None:
        state = basis_state(n)
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**n,):
        raise ValueError(f"state of shape {state.shape} does not fit {n} qubits")
    t = state.reshape((2,) * n)
    for g in circuit.gates:
        t = apply_matrix(t, g.matrix(), g.qubits, n)
    return t.reshape(-1)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    dim = 2**n
    t = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in circuit.gates:
        t = apply_matrix(t, g.matrix(), g.qubits, n)
    return t.reshape(dim, dim)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between ``a`` and ``b`` after the best global phase on ``b``."""
    overlap = np.vdot(b.reshape(-1), a.reshape(-1))
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def expectation(state: np.ndarray, observable: PauliSum) -> float:
    if state.shape != (2**observable.n_qubits,):
        raise ValueError("state and observable dimensions differ")
    val = np.vdot(state, observable.apply(state))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; observable not Hermitian?")
    return float(val.real)


def probabilities(state: np.ndarray) -> np.ndarray:
    p = np.abs(state) ** 2
    return p / p.sum()


@dataclass(frozen=True, eq=False)
class BitstringCounts:
    """Measurement record: counts per bitstring plus, when sampled, the shot order.

    ``counts`` may be fractional when produced in analytic mode. ``stream``
    holds basis indices in arrival order.
    """

    n_qubits: int
    counts: dict[str, float]
    stream: np.ndarray | None = field(default=None)

    @property
    def total_shots(self) -> float:
        return float(sum(self.counts.values()))

    def as_vector(self) -> np.ndarray:
        v = np.zeros(2**self.n_qubits)
        for s, c in self.counts.items():
            v[int(s, 2)] += c
        return v

    def frequencies(self) -> np.ndarray:
        v = self.as_vector()
        total = v.sum()
        return v / total if total > 0 else v

    @classmethod
    def from_vector(cls, weights: np.ndarray, n_qubits: int, stream=None) -> BitstringCounts:
        counts = {index_to_bitstring(int(i), n_qubits): _scalar(weights[i])
                  for i in np.flatnonzero(weights)}
        return cls(n_qubits, counts, stream)

    @classmethod
    def from_stream(cls, stream: np.ndarray, n_qubits: int) -> BitstringCounts:
        stream = np.asarray(stream, dtype=np.int64)
        weights = np.bincount(stream, minlength=2**n_qubits)
        return cls.from_vector(weights, n_qubits, stream)

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "total_shots": self.total_shots,
                "counts": dict(sorted(self.counts.items()))}


def _scalar(x):
    return int(x) if isinstance(x, (int, np.integer)) else float(x)


def sample(state: np.ndarray, shots: int, rng_seed: int, *, analytic: bool = False) -> BitstringCounts:
    """Draw ``shots`` i.i.d. outcomes from ``|amplitude|**2``.

    With ``analytic=True`` the counts are the exact expected counts
    ``shots * |amplitude|**2`` (fractional, no stream).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = int(np.log2(state.size))
    probs = probabilities(state)
    if analytic:
        return BitstringCounts.from_vector(probs * shots, n)
    rng = np.random.default_rng(rng_seed)
    stream = rng.choice(probs.size, size=shots, p=probs)
    return BitstringCounts.from_stream(stream, n)


def sample_distribution(probs: np.ndarray, shots: int, rng_seed: int) -> BitstringCounts:
    n = int(np.log2(probs.size))
    p = np.clip(probs, 0, None)
    rng = np.random.default_rng(rng_seed)
    stream = rng.choice(p.size, size=shots, p=p / p.sum())
    return BitstringCounts.from_stream(stream, n)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))
