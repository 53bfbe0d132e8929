"""Jordan-Wigner encoding of the spin-restricted active-space Hamiltonian.

Qubit layout: alpha spin-orbitals occupy qubits ``0..N-1``, beta ones
``N..2N-1``. A bitstring's character ``k`` (leftmost is ``k = 0``) is qubit
``k``; as a basis-state index, qubit 0 is the most significant bit, so
``format(index, f"0{n}b")`` is the bitstring.

Annihilators carry a Z string over every lower qubit index. Under the
``zero_is_occupied`` convention every operator is conjugated by a full layer
of X, i.e. Y and Z letters flip sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import ONE_IS_OCCUPIED, ZERO_IS_OCCUPIED

# (a, b) -> (phase, a*b) for single-qubit Paulis
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True)
class QubitLayout:
    n_spatial: int
    occupation_convention: str = ONE_IS_OCCUPIED

    def __post_init__(self) -> None:
        if self.n_spatial < 1:
            raise ValueError("n_spatial must be >= 1")
        if self.occupation_convention not in (ONE_IS_OCCUPIED, ZERO_IS_OCCUPIED):
            raise ValueError(f"unknown occupation convention {self.occupation_convention!r}")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    def qubit(self, orbital: int, spin: int) -> int:
        """Qubit index of ``orbital`` with spin 0 (alpha) or 1 (beta)."""
        if not 0 <= orbital < self.n_spatial or spin not in (0, 1):
            raise ValueError(f"no qubit for orbital {orbital}, spin {spin}")
        return orbital + spin * self.n_spatial

    @property
    def occupied_bit(self) -> int:
        return 1 if self.occupation_convention == ONE_IS_OCCUPIED else 0

    def occupations(self, bitstring: str) -> np.ndarray:
        """Per-qubit occupation numbers (0/1) of a bitstring."""
        bits = np.frombuffer(bitstring.encode("ascii"), dtype=np.uint8) - ord("0")
        return bits if self.occupied_bit == 1 else 1 - bits

    def with_convention(self, convention: str) -> QubitLayout:
        return QubitLayout(self.n_spatial, convention)


def index_to_bitstring(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def bit_table(n_qubits: int) -> np.ndarray:
    """(2**n, n) array of qubit values per basis index."""
    idx = np.arange(2**n_qubits)
    shifts = n_qubits - 1 - np.arange(n_qubits)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def pauli_word_product(a: str, b: str) -> tuple[complex, str]:
    phase: complex = 1
    out = []
    for x, y in zip(a, b):
        p, z = _PAULI_PRODUCT[(x, y)]
        phase *= p
        out.append(z)
    return phase, "".join(out)


def _masks(word: str) -> tuple[int, int, int]:
    n = len(word)
    x_mask = z_mask = n_y = 0
    for k, ch in enumerate(word):
        bit = 1 << (n - 1 - k)
        if ch in "XY":
            x_mask |= bit
        if ch in "ZY":
            z_mask |= bit
        n_y += ch == "Y"
    return x_mask, z_mask, n_y


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit parity of each entry of an integer array."""
    v = values.copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


class PauliSum:
    """Real linear combination of Pauli words (Hermitian observable)."""

    def __init__(self, terms, n_qubits: int | None = None, *, atol: float = 1e-14):
        acc: dict[str, complex] = {}
        for coeff, word in terms:
            if not set(word) <= set("IXYZ"):
                raise ValueError(f"invalid Pauli word {word!r}")
            acc[word] = acc.get(word, 0.0) + coeff
        if n_qubits is None:
            if not acc:
                raise ValueError("n_qubits required for an empty PauliSum")
            n_qubits = len(next(iter(acc)))
        for word, coeff in acc.items():
            if len(word) != n_qubits:
                raise ValueError(f"word {word!r} does not have length {n_qubits}")
            if abs(complex(coeff).imag) > 1e-10:
                raise ValueError(f"non-Hermitian coefficient {coeff} on {word}")
            if not np.isfinite(complex(coeff).real):
                raise ValueError(f"non-finite coefficient on {word}")
        self.n_qubits = n_qubits
        self.terms: tuple[tuple[float, str], ...] = tuple(
            (float(complex(c).real), w) for w, c in sorted(acc.items()) if abs(c) > atol
        )

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"PauliSum({len(self.terms)} terms on {self.n_qubits} qubits)"

    def as_dict(self) -> dict[str, float]:
        return {w: c for c, w in self.terms}

    def canonical(self) -> PauliSum:
        return PauliSum(self.terms, self.n_qubits)

    def __add__(self, other: PauliSum) -> PauliSum:
        return PauliSum(self.terms + other.terms, self.n_qubits)

    def scaled(self, factor: float) -> PauliSum:
        return PauliSum([(factor * c, w) for c, w in self.terms], self.n_qubits)

    @cached_property
    def _compiled(self):
        coeffs = np.array([c for c, _ in self.terms], dtype=float)
        masks = np.array([_masks(w) for _, w in self.terms], dtype=np.int64).reshape(-1, 3)
        return coeffs, masks

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Return O|state> for a flat amplitude vector."""
        n = self.n_qubits
        if state.shape != (2**n,):
            raise ValueError(f"state has shape {state.shape}, expected ({2**n},)")
        idx = np.arange(2**n)
        out = np.zeros(2**n, dtype=complex)
        coeffs, masks = self._compiled
        for c, (x, z, ny) in zip(coeffs, masks):
            phase = (1j) ** ny * (1 - 2 * _parity(idx & z))
            out[idx ^ x] += c * phase * state
        return out

    def to_matrix(self) -> np.ndarray:
        n = self.n_qubits
        dim = 2**n
        idx = np.arange(dim)
        mat = np.zeros((dim, dim), dtype=complex)
        coeffs, masks = self._compiled
        for c, (x, z, ny) in zip(coeffs, masks):
            phase = (1j) ** ny * (1 - 2 * _parity(idx & z))
            mat[idx ^ x, idx] += c * phase
        return mat

    def diagonal(self) -> np.ndarray:
        """Diagonal of the matrix (contribution of I/Z-only words)."""
        n = self.n_qubits
        idx = np.arange(2**n)
        out = np.zeros(2**n)
        coeffs, masks = self._compiled
        for c, (x, z, ny) in zip(coeffs, masks):
            if x == 0:
                out += c * (1 - 2 * _parity(idx & z))
        return out


def _flip_convention(op: dict[str, complex]) -> dict[str, complex]:
    out = {}
    for word, c in op.items():
        sign = (-1) ** sum(ch in "YZ" for ch in word)
        out[word] = out.get(word, 0) + sign * c
    return out


def _op_product(a: dict[str, complex], b: dict[str, complex]) -> dict[str, complex]:
    out: dict[str, complex] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            phase, w = pauli_word_product(wa, wb)
            out[w] = out.get(w, 0) + phase * ca * cb
    return out


def _ladder(mode: int, n: int, create: bool) -> dict[str, complex]:
    prefix = "Z" * mode
    suffix = "I" * (n - mode - 1)
    # a = (X + iY)/2 annihilates |1>; a^dagger = (X - iY)/2
    sign = -1 if create else 1
    return {prefix + "X" + suffix: 0.5, prefix + "Y" + suffix: sign * 0.5j}


def _excitation_ops(layout: QubitLayout) -> dict[tuple[int, int, int], dict[str, complex]]:
    """a^dagger_{p,spin} a_{q,spin} for all p, q, spin in one-is-occupied form."""
    n = layout.n_qubits
    ops = {}
    for spin in (0, 1):
        for p in range(layout.n_spatial):
            cp = _ladder(layout.qubit(p, spin), n, True)
            for q in range(layout.n_spatial):
                aq = _ladder(layout.qubit(q, spin), n, False)
                ops[(spin, p, q)] = _op_product(cp, aq)
    return ops


def _accumulate(acc: dict[str, complex], op: dict[str, complex], coeff: float) -> None:
    for w, c in op.items():
        acc[w] = acc.get(w, 0) + coeff * c


def jw_hamiltonian(h_act: np.ndarray, g_act: np.ndarray, E_core: float, layout: QubitLayout) -> PauliSum:
    """Qubit image of ``E_core + sum h_pq E_pq + 1/2 sum (pq|rs)(E_pq E_rs - delta_qr E_ps)``.

    ``E_pq`` is the spin-summed excitation operator and ``(pq|rs)`` are
    chemists'-notation integrals.
    """
    N = layout.n_spatial
    h_act = np.asarray(h_act, dtype=float)
    g_act = np.asarray(g_act, dtype=float)
    if h_act.shape != (N, N) or g_act.shape != (N,) * 4:
        raise ValueError(
            f"integral shapes {h_act.shape}, {g_act.shape} do not match {N} spatial orbitals"
        )
    n = layout.n_qubits
    E = _excitation_ops(layout)
    acc: dict[str, complex] = {"I" * n: E_core}
    # Fold the delta term into an effective one-body operator.
    h_eff = h_act - 0.5 * np.einsum("prrs->ps", g_act)
    for spin in (0, 1):
        for p in range(N):
            for q in range(N):
                if h_eff[p, q] != 0.0:
                    _accumulate(acc, E[(spin, p, q)], h_eff[p, q])
    for s1 in (0, 1):
        for s2 in (0, 1):
            for p in range(N):
                for q in range(N):
                    for r in range(N):
                        for s in range(N):
                            g = g_act[p, q, r, s]
                            if g != 0.0:
                                _accumulate(acc, _op_product(E[(s1, p, q)], E[(s2, r, s)]), 0.5 * g)
    if layout.occupation_convention == ZERO_IS_OCCUPIED:
        acc = _flip_convention(acc)
    return PauliSum([(c, w) for w, c in acc.items()], n, atol=1e-13)


def number_operators(layout: QubitLayout) -> tuple[PauliSum, PauliSum]:
    """Alpha and beta particle-number operators, n = (I - Z)/2 per qubit (or (I + Z)/2)."""
    n, N = layout.n_qubits, layout.n_spatial
    zsign = -0.5 if layout.occupation_convention == ONE_IS_OCCUPIED else 0.5
    out = []
    for spin in (0, 1):
        terms = [(0.5 * N, "I" * n)]
        for v in range(N):
            k = layout.qubit(v, spin)
            terms.append((zsign, "I" * k + "Z" + "I" * (n - k - 1)))
        out.append(PauliSum(terms, n))
    return out[0], out[1]


def hartree_fock_state(layout: QubitLayout, n_alpha: int, n_beta: int) -> int:
    """Basis-state index with the lowest ``n_alpha``/``n_beta`` orbitals of each spin occupied."""
    N = layout.n_spatial
    if not (0 <= n_alpha <= N and 0 <= n_beta <= N):
        raise ValueError(f"cannot place ({n_alpha}, {n_beta}) electrons in {N} orbitals")
    occ = layout.occupied_bit
    bits = [1 - occ] * layout.n_qubits
    for v in range(n_alpha):
        bits[layout.qubit(v, 0)] = occ
    for v in range(n_beta):
        bits[layout.qubit(v, 1)] = occ
    return int("".join(map(str, bits)), 2)


def sector_mask(layout: QubitLayout, n_alpha: int, n_beta: int) -> np.ndarray:
    """Boolean mask over basis indices with the given per-spin particle numbers."""
    N = layout.n_spatial
    bits = bit_table(layout.n_qubits)
    occ = bits if layout.occupied_bit == 1 else 1 - bits
    return (occ[:, :N].sum(axis=1) == n_alpha) & (occ[:, N:].sum(axis=1) == n_beta)


def occupation_table(layout: QubitLayout) -> np.ndarray:
    """(2**n, n) per-qubit occupation numbers of every basis state."""
    bits = bit_table(layout.n_qubits)
    return bits if layout.occupied_bit == 1 else 1 - bits


def one_rdm_from_state(state: np.ndarray, layout: QubitLayout) -> np.ndarray:
    """Spin-summed 1-PDM ``<E_pq>`` of a statevector (dense, for checks)."""
    N = layout.n_spatial
    E = _excitation_ops(layout)
    n = layout.n_qubits
    gamma = np.zeros((N, N))
    for p in range(N):
        for q in range(N):
            ops = {}
            for spin in (0, 1):
                _accumulate(ops, E[(spin, p, q)], 1.0)
            if layout.occupation_convention == ZERO_IS_OCCUPIED:
                ops = _flip_convention(ops)
            # E_pq + E_qp is Hermitian; use the symmetric part (gamma is real symmetric here)
            herm = PauliSum([(c.real, w) for w, c in ops.items() if abs(c.real) > 1e-15] or [(0.0, "I" * n)], n)
            anti = [(c.imag, w) for w, c in ops.items() if abs(c.imag) > 1e-15]
            val = np.vdot(state, herm.apply(state))
            if anti:
                val = val + 1j * np.vdot(state, PauliSum(anti, n).apply(state))
            gamma[p, q] = val.real
    return gamma
