from functools import reduce

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from espnor.config import ZERO_IS_OCCUPIED
from espnor.fci import SectorBasis, sector_hamiltonian
from espnor.fermion import (
    PauliSum,
    QubitLayout,
    hartree_fock_state,
    jw_hamiltonian,
    number_operators,
    one_rdm_from_state,
    sector_mask,
)
from espnor.model_io import generate_synthetic_instance


def _kron_ladder(n_modes):
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    return [reduce(np.kron, [z] * k + [lower] + [np.eye(2)] * (n_modes - k - 1)) for k in range(n_modes)]


def _brute_hamiltonian(inst):
    N = inst.n_act
    a = _kron_ladder(2 * N)
    H = inst.E_core * np.eye(4**N)
    for p in range(N):
        for q in range(N):
            for s in (0, 1):
                H += inst.h_act[p, q] * a[p + s * N].T @ a[q + s * N]
    for p, q, r, t in np.ndindex(*inst.g_act.shape):
        for s1 in (0, 1):
            for s2 in (0, 1):
                H += 0.5 * inst.g_act[p, q, r, t] * (a[p + s1 * N].T @ a[r + s2 * N].T
                                                     @ a[t + s2 * N] @ a[q + s1 * N])
    return H


@pytest.mark.parametrize("n_ao,n_act,seed", [(3, 2, 1), (4, 3, 2), (4, 4, 3)])
def test_jw_matches_explicit_ladder_operators(n_ao, n_act, seed):
    inst = generate_synthetic_instance(n_ao, n_act, seed)
    layout = QubitLayout(n_act)
    H = jw_hamiltonian(inst.h_act, inst.g_act, inst.E_core, layout).to_matrix()
    np.testing.assert_allclose(H, _brute_hamiltonian(inst), atol=1e-12)


def test_jw_sector_block_matches_determinant_hamiltonian():
    inst = generate_synthetic_instance(4, 4, 5)
    layout = QubitLayout(4)
    H = jw_hamiltonian(inst.h_act, inst.g_act, inst.E_core, layout).to_matrix()
    basis = SectorBasis(4, 2, 2)
    idx = basis.full_indices
    Hs = sector_hamiltonian(inst.h_act, inst.g_act, inst.E_core, basis)
    np.testing.assert_allclose(H[np.ix_(idx, idx)].real, Hs, atol=1e-10)


def test_hartree_fock_index_layout():
    lay = QubitLayout(4)
    # alpha block first, qubit 0 most significant
    assert format(hartree_fock_state(lay, 2, 2), "08b") == "11001100"
    lay0 = lay.with_convention(ZERO_IS_OCCUPIED)
    assert format(hartree_fock_state(lay0, 2, 1), "08b") == "00110111"


def test_number_operators_are_diagonal_counts():
    lay = QubitLayout(3)
    na, nb = number_operators(lay)
    idx = int("110" "010", 2)
    assert na.diagonal()[idx] == pytest.approx(2)
    assert nb.diagonal()[idx] == pytest.approx(1)
    mask = sector_mask(lay, 2, 1)
    assert mask.sum() == 3 * 3 and mask[idx]


def test_convention_flip_is_x_conjugation():
    inst = generate_synthetic_instance(3, 2, 4)
    lay = QubitLayout(2)
    H1 = jw_hamiltonian(inst.h_act, inst.g_act, inst.E_core, lay).to_matrix()
    H0 = jw_hamiltonian(inst.h_act, inst.g_act, inst.E_core, lay.with_convention(ZERO_IS_OCCUPIED)).to_matrix()
    X = reduce(np.kron, [np.array([[0, 1], [1, 0]])] * 4)
    np.testing.assert_allclose(X @ H1 @ X, H0, atol=1e-12)


@given(st.integers(0, 2**6 - 1))
def test_rdm_of_basis_state_is_occupation(index):
    lay = QubitLayout(3)
    psi = np.zeros(64)
    psi[index] = 1
    bits = np.array(list(format(index, "06b")), dtype=int)
    g = one_rdm_from_state(psi, lay)
    np.testing.assert_allclose(g, np.diag(bits[:3] + bits[3:]), atol=1e-14)


def test_pauli_apply_matches_matrix(rng):
    terms = [(rng.normal(), "".join(rng.choice(list("IXYZ"), 4))) for _ in range(12)]
    ps = PauliSum(terms, 4)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    np.testing.assert_allclose(ps.apply(v), ps.to_matrix() @ v, atol=1e-12)
