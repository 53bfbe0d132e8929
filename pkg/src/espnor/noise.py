"""Depolarizing noise on native circuits: exact density matrices and Monte-Carlo trajectories.

Each native gate is followed, on every qubit it addresses, by the
single-qubit depolarizing channel

    rho -> (1 - p) rho + p Tr_q(rho) (x) I/2,

with ``p = p1`` after one-qubit gates and ``p = p2`` after ``RXX``. In a
trajectory this is a Pauli drawn uniformly from ``{I, X, Y, Z}`` with
probability ``p`` (otherwise nothing), so ``p = 1`` fully depolarizes.

The trajectory kernel caches the noiseless state after every gate. A
trajectory first scans for its earliest error; error-free trajectories are
sampled from the cached output distribution, the rest resume from the
cached prefix. All trajectories share one seeded stream and run serially,
so counts are reproducible bit for bit.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from .circuit import NATIVE, Circuit
from .config import NoiseSpec
from .statevector import BitstringCounts, apply_circuit, apply_matrix, probabilities, sample

TRAJECTORY = "trajectory"
DENSITY_MATRIX = "density_matrix"
MODES = (TRAJECTORY, DENSITY_MATRIX)


def _require_native(circuit: Circuit) -> None:
    bad = sorted({g.kind for g in circuit.gates if g.kind not in NATIVE})
    if bad:
        raise ValueError(f"noisy simulation needs a native circuit; found {bad}")


def _rate(noise: NoiseSpec, arity: int) -> float:
    return noise.p1 if arity == 1 else noise.p2


# ----------------------------------------------------------------------------
# density matrix


def _depolarize(rho: np.ndarray, q: int, n: int, p: float) -> np.ndarray:
    if p == 0.0:
        return rho
    r = np.moveaxis(rho, (q, n + q), (0, 1))
    mixed = 0.5 * (r[0, 0] + r[1, 1])
    out = (1.0 - p) * r
    out[0, 0] += p * mixed
    out[1, 1] += p * mixed
    return np.moveaxis(out, (0, 1), (q, n + q))


def density_matrix_probabilities(circuit: Circuit, noise: NoiseSpec,
                                 initial: np.ndarray | None = None) -> np.ndarray:
    """Exact outcome distribution of ``circuit`` under the noise model (<= 10 qubits)."""
    _require_native(circuit)
    n = circuit.n_qubits
    if n > 10:
        raise ValueError("density-matrix mode is limited to 10 qubits")
    psi = np.zeros(2**n, dtype=complex)
    if initial is None:
        psi[0] = 1.0
    else:
        psi[:] = initial
    rho = np.outer(psi, psi.conj()).reshape((2,) * (2 * n))
    for g in circuit.gates:
        m = g.matrix()
        rho = apply_matrix(rho, m, g.qubits, n)
        rho = apply_matrix(rho, m.conj(), tuple(n + q for q in g.qubits), 2 * n)
        p = _rate(noise, len(g.qubits))
        for q in g.qubits:
            rho = _depolarize(rho, q, n, p)
    diag = np.real(np.diagonal(rho.reshape(2**n, 2**n))).copy()
    diag = np.clip(diag, 0.0, None)
    return diag / diag.sum()


# ----------------------------------------------------------------------------
# trajectories

_PAULIS = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)


@nb.njit(cache=True, fastmath=True)
def _apply1(psi, m, q, n):
    stride = 1 << (n - 1 - q)
    low = stride - 1
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    for k in range(psi.shape[0] >> 1):
        i = ((k & ~low) << 1) | (k & low)
        j = i | stride
        a, b = psi[i], psi[j]
        psi[i] = m00 * a + m01 * b
        psi[j] = m10 * a + m11 * b


@nb.njit(cache=True, fastmath=True)
def _apply_diag1(psi, d0, d1, q, n):
    stride = 1 << (n - 1 - q)
    low = stride - 1
    for k in range(psi.shape[0] >> 1):
        i = ((k & ~low) << 1) | (k & low)
        psi[i] *= d0
        psi[i | stride] *= d1


@nb.njit(cache=True, fastmath=True)
def _base_index(k, lo_bit, hi_bit):
    # insert zeros at bit positions lo_bit < hi_bit
    low = (1 << lo_bit) - 1
    k = ((k & ~low) << 1) | (k & low)
    low = (1 << hi_bit) - 1
    return ((k & ~low) << 1) | (k & low)


@nb.njit(cache=True, fastmath=True)
def _apply2(psi, m, q0, q1, n):
    b0 = n - 1 - q0
    b1 = n - 1 - q1
    s0 = 1 << b0
    s1 = 1 << b1
    lo, hi = (b0, b1) if b0 < b1 else (b1, b0)
    for k in range(psi.shape[0] >> 2):
        i = _base_index(k, lo, hi)
        i1 = i | s1
        i2 = i | s0
        i3 = i | s0 | s1
        a0, a1, a2, a3 = psi[i], psi[i1], psi[i2], psi[i3]
        psi[i] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
        psi[i1] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
        psi[i2] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
        psi[i3] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3


@nb.njit(cache=True, fastmath=True)
def _apply_xx(psi, c, t, q0, q1, n):
    # exp(-i theta XX): couples |00>,|11> and |01>,|10> with c on the diagonal, t = -i sin
    b0 = n - 1 - q0
    b1 = n - 1 - q1
    s0 = 1 << b0
    s1 = 1 << b1
    lo, hi = (b0, b1) if b0 < b1 else (b1, b0)
    for k in range(psi.shape[0] >> 2):
        i = _base_index(k, lo, hi)
        i1 = i | s1
        i2 = i | s0
        i3 = i | s0 | s1
        a0, a1, a2, a3 = psi[i], psi[i1], psi[i2], psi[i3]
        psi[i] = c * a0 + t * a3
        psi[i3] = t * a0 + c * a3
        psi[i1] = c * a1 + t * a2
        psi[i2] = t * a1 + c * a2


KIND_DENSE1, KIND_DIAG1, KIND_XX = 0, 1, 2


@nb.njit(cache=True, fastmath=True)
def _apply(psi, mats, kinds, qa, qb, k, n):
    kind = kinds[k]
    if kind == KIND_DIAG1:
        _apply_diag1(psi, mats[k, 0, 0], mats[k, 1, 1], qa[k], n)
    elif kind == KIND_XX:
        _apply_xx(psi, mats[k, 0, 0], mats[k, 0, 3], qa[k], qb[k], n)
    elif kind == KIND_DENSE1:
        _apply1(psi, mats[k, :2, :2], qa[k], n)
    else:
        _apply2(psi, mats[k], qa[k], qb[k], n)


@nb.njit(cache=True, fastmath=True)
def _draw(cdf):
    u = np.random.random() * cdf[-1]
    lo, hi = 0, cdf.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


@nb.njit(cache=True, fastmath=True)
def _trajectories(prefix, mats, kinds, arity, qa, qb, rates, paulis, shots, n, seed):
    np.random.seed(seed)
    n_gates = mats.shape[0]
    dim = prefix.shape[1]
    final_cdf = np.cumsum(np.abs(prefix[n_gates]) ** 2)
    out = np.empty(shots, dtype=np.int64)
    psi = np.empty(dim, dtype=np.complex128)
    cdf = np.empty(dim)
    for t in range(shots):
        start = -1
        first_q = 0
        for k in range(n_gates):
            p = rates[k]
            if p > 0.0:
                if np.random.random() < p:
                    start, first_q = k, qa[k]
                    break
                if arity[k] == 2 and np.random.random() < p:
                    start, first_q = k, qb[k]
                    break
        if start < 0:
            out[t] = _draw(final_cdf)
            continue
        psi[:] = prefix[start + 1]
        # the first error was on first_q; qb (if it comes second) still needs its own draw
        _apply1(psi, paulis[np.random.randint(4)], first_q, n)
        if arity[start] == 2 and first_q == qa[start] and np.random.random() < rates[start]:
            _apply1(psi, paulis[np.random.randint(4)], qb[start], n)
        for k in range(start + 1, n_gates):
            _apply(psi, mats, kinds, qa, qb, k, n)
            p = rates[k]
            if p > 0.0:
                if np.random.random() < p:
                    _apply1(psi, paulis[np.random.randint(4)], qa[k], n)
                if arity[k] == 2 and np.random.random() < p:
                    _apply1(psi, paulis[np.random.randint(4)], qb[k], n)
        acc = 0.0
        for i in range(dim):
            acc += psi[i].real ** 2 + psi[i].imag ** 2
            cdf[i] = acc
        out[t] = _draw(cdf)
    return out


def _pack(circuit: Circuit, noise: NoiseSpec):
    k = len(circuit.gates)
    mats = np.zeros((k, 4, 4), dtype=np.complex128)
    arity = np.zeros(k, dtype=np.int64)
    kinds = np.full(k, 3, dtype=np.int64)
    qa = np.zeros(k, dtype=np.int64)
    qb = np.zeros(k, dtype=np.int64)
    rates = np.zeros(k)
    for i, g in enumerate(circuit.gates):
        m = g.matrix()
        d = m.shape[0]
        mats[i, :d, :d] = m
        arity[i] = len(g.qubits)
        qa[i] = g.qubits[0]
        qb[i] = g.qubits[-1]
        rates[i] = _rate(noise, arity[i])
        if g.kind == "RZ":
            kinds[i] = KIND_DIAG1
        elif g.kind == "RXX":
            kinds[i] = KIND_XX
        elif d == 2:
            kinds[i] = KIND_DENSE1
    return mats, kinds, arity, qa, qb, rates


def _prefix_states(circuit: Circuit, initial: np.ndarray) -> np.ndarray:
    n = circuit.n_qubits
    out = np.empty((len(circuit.gates) + 1, 2**n), dtype=np.complex128)
    psi = np.array(initial, dtype=np.complex128)
    out[0] = psi
    for i, g in enumerate(circuit.gates):
        psi = apply_circuit(Circuit(n, (g,)), psi)
        out[i + 1] = psi
    return out


def trajectory_stream(circuit: Circuit, noise: NoiseSpec, shots: int, rng_seed: int,
                      initial: np.ndarray | None = None) -> np.ndarray:
    """Outcome indices, one per noisy trajectory, in trajectory order."""
    _require_native(circuit)
    n = circuit.n_qubits
    if initial is None:
        initial = np.zeros(2**n, dtype=complex)
        initial[0] = 1.0
    mats, kinds, arity, qa, qb, rates = _pack(circuit, noise)
    prefix = _prefix_states(circuit, initial)
    seed = int(np.random.SeedSequence(rng_seed).generate_state(1)[0])
    return _trajectories(prefix, mats, kinds, arity, qa, qb, rates, _PAULIS, int(shots), n, seed)


def simulate_noisy(circuit: Circuit, noise: NoiseSpec, shots: int, rng_seed: int,
                   mode: str = TRAJECTORY, *, initial: np.ndarray | None = None) -> BitstringCounts:
    """Noisy measurement record of ``shots`` runs of a native ``circuit``.

    ``trajectory`` draws one Monte-Carlo trajectory per shot. ``density_matrix``
    propagates the exact channel and then samples the diagonal. Without noise
    both reduce to plain sampling of the ideal state with the same seed.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    _require_native(circuit)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = circuit.n_qubits
    if noise.is_zero:
        return sample(apply_circuit(circuit, initial), shots, rng_seed)
    if mode == DENSITY_MATRIX:
        probs = density_matrix_probabilities(circuit, noise, initial)
        rng = np.random.default_rng(rng_seed)
        return BitstringCounts.from_stream(rng.choice(probs.size, size=shots, p=probs), n)
    return BitstringCounts.from_stream(trajectory_stream(circuit, noise, shots, rng_seed, initial), n)


def noiseless_probabilities(circuit: Circuit) -> np.ndarray:
    return probabilities(apply_circuit(circuit))
