"""Brute-force exact diagonalization in fixed (n_alpha, n_beta) sectors.

Determinants are occupation bitstrings over spin-orbitals ordered alpha block
then beta block; a determinant is the ordered product of creation operators
(lowest spin-orbital index leftmost) acting on the vacuum. This is the same
ordering the Jordan-Wigner layout uses, so sector matrices agree literally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .electrostatics import (
    ElectrostaticsResult,
    build_esp_matrix,
    electrostatics_direct_ao,
    electrostatics_from_diag_rdm,
    esp_natural_basis,
    promote_to_ao,
)
from .model_io import ProblemInstance


@dataclass(frozen=True)
class SectorBasis:
    n_spatial: int
    n_alpha: int
    n_beta: int

    @cached_property
    def bitstrings(self) -> tuple[str, ...]:
        N = self.n_spatial
        alphas = _strings(N, self.n_alpha)
        betas = _strings(N, self.n_beta)
        return tuple(sorted(a + b for a in alphas for b in betas))

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.bitstrings)}

    @cached_property
    def full_indices(self) -> np.ndarray:
        """Positions of the sector determinants in the 2**(2N) qubit basis."""
        return np.array([int(s, 2) for s in self.bitstrings], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.bitstrings)


def _strings(N: int, k: int) -> list[str]:
    out = []
    for occ in itertools.combinations(range(N), k):
        out.append("".join("1" if i in occ else "0" for i in range(N)))
    return out


def _excite(bits: list[int], p: int, q: int) -> tuple[int, list[int]] | None:
    """Apply a^dagger_p a_q to an occupation list; returns (sign, result) or None."""
    if not bits[q]:
        return None
    out = list(bits)
    sign = (-1) ** sum(out[:q])
    out[q] = 0
    if out[p]:
        return None
    sign *= (-1) ** sum(out[:p])
    out[p] = 1
    return sign, out


def excitation_matrices(basis: SectorBasis) -> np.ndarray:
    """Spin-summed E_pq as dense sector matrices, shape (N, N, dim, dim)."""
    N = basis.n_spatial
    dim = len(basis)
    mats = np.zeros((N, N, dim, dim))
    for col, s in enumerate(basis.bitstrings):
        bits = [int(c) for c in s]
        for spin in (0, 1):
            off = spin * N
            for p in range(N):
                for q in range(N):
                    res = _excite(bits, p + off, q + off)
                    if res is None:
                        continue
                    sign, out = res
                    row = basis.index_of["".join(map(str, out))]
                    mats[p, q, row, col] += sign
    return mats


def sector_hamiltonian(h_act: np.ndarray, g_act: np.ndarray, E_core: float, basis: SectorBasis) -> np.ndarray:
    E = excitation_matrices(basis)
    dim = len(basis)
    h_eff = h_act - 0.5 * np.einsum("prrs->ps", g_act)
    H = E_core * np.eye(dim) + np.einsum("pq,pqij->ij", h_eff, E)
    inner = np.einsum("pqrs,rsjk->pqjk", g_act, E)
    H += 0.5 * np.einsum("pqij,pqjk->ik", E, inner)
    return (H + H.T) / 2


@dataclass(frozen=True, eq=False)
class ExactSolution:
    E0: float
    vector: np.ndarray
    basis: SectorBasis
    gamma_exact: np.ndarray

    def statevector(self) -> np.ndarray:
        """Ground vector embedded in the full 2**(2N) qubit space (one-is-occupied)."""
        out = np.zeros(2 ** (2 * self.basis.n_spatial), dtype=complex)
        out[self.basis.full_indices] = self.vector
        return out


def one_rdm(vector: np.ndarray, basis: SectorBasis) -> np.ndarray:
    E = excitation_matrices(basis)
    gamma = np.einsum("i,pqij,j->pq", vector, E, vector)
    return (gamma + gamma.T) / 2


def exact_ground_state(h_act, g_act, E_core: float, n_alpha: int, n_beta: int) -> ExactSolution:
    h_act = np.asarray(h_act, dtype=float)
    g_act = np.asarray(g_act, dtype=float)
    N = h_act.shape[0]
    if N > 6:
        raise ValueError(f"dense sector diagonalization limited to N <= 6, got {N}")
    if not (0 <= n_alpha <= N and 0 <= n_beta <= N):
        raise ValueError(f"empty sector ({n_alpha}, {n_beta}) for {N} orbitals")
    basis = SectorBasis(N, n_alpha, n_beta)
    H = sector_hamiltonian(h_act, g_act, E_core, basis)
    evals, evecs = np.linalg.eigh(H)
    v = evecs[:, 0]
    pivot = int(np.argmax(np.abs(v) > 1e-8 * np.max(np.abs(v))))
    if v[pivot] < 0:
        v = -v
    gamma = one_rdm(v, basis)
    return ExactSolution(E0=float(evals[0]), vector=v, basis=basis, gamma_exact=gamma)


def full_mo_rdm(instance: ProblemInstance, gamma_act: np.ndarray) -> np.ndarray:
    """Core (2 on the diagonal) plus active block, zero elsewhere, in the MO basis."""
    g = np.zeros((instance.n_mo, instance.n_mo))
    core = list(instance.active.core_mo)
    act = list(instance.active.active_mo)
    g[core, core] = 2.0
    g[np.ix_(act, act)] = gamma_act
    return g


@dataclass(frozen=True)
class ExactElectrostatics:
    ao_route: ElectrostaticsResult
    diag_route: ElectrostaticsResult
    solution: ExactSolution

    @property
    def E_elst(self) -> float:
        return self.ao_route.E_elst


def exact_electrostatics(instance: ProblemInstance, *, tol: float = 1e-9) -> ExactElectrostatics:
    sol = exact_ground_state(instance.h_act, instance.g_act, instance.E_core,
                             instance.n_alpha, instance.n_beta)
    gamma_ao = promote_to_ao(instance, full_mo_rdm(instance, sol.gamma_exact))
    ao = electrostatics_direct_ao(instance, gamma_ao)
    esp = build_esp_matrix(instance)
    nat = esp_natural_basis(esp.J_mo, instance.active)
    gbar = np.diag(nat.U.T @ sol.gamma_exact @ nat.U)
    core_diag = np.diag(esp.J_mo)[list(instance.active.core_mo)]
    diag = electrostatics_from_diag_rdm(nat.w, gbar, core_diag)
    if abs(ao.E_elst - diag.E_elst) > tol:
        raise ArithmeticError(
            f"electrostatics routes disagree: AO {ao.E_elst!r} vs diagonal {diag.E_elst!r}"
        )
    return ExactElectrostatics(ao_route=ao, diag_route=diag, solution=sol)


def supermolecular_interaction(instance_AB: ProblemInstance, instance_A: ProblemInstance,
                               instance_B: ProblemInstance) -> float:
    """E_AB - E_A - E_B from exact active-space ground states (Hartree)."""
    sols = []
    for inst in (instance_AB, instance_A, instance_B):
        sols.append(exact_ground_state(inst.h_act, inst.g_act, inst.E_core, inst.n_alpha, inst.n_beta))
    na = instance_A.n_alpha + instance_B.n_alpha
    nb = instance_A.n_beta + instance_B.n_beta
    if (instance_AB.n_alpha, instance_AB.n_beta) != (na, nb):
        raise ValueError(
            f"dimer sector {(instance_AB.n_alpha, instance_AB.n_beta)} != monomer sum {(na, nb)}"
        )
    return sols[0].E0 - sols[1].E0 - sols[2].E0


def active_hamiltonian_interaction(h_ab, g_ab, e_ab, sector_ab, h_a, g_a, e_a, sector_a,
                                   h_b, g_b, e_b, sector_b) -> float:
    """Supermolecular interaction from raw active-space integrals."""
    e = [exact_ground_state(h, g, c, *sec).E0 for h, g, c, sec in
         ((h_ab, g_ab, e_ab, sector_ab), (h_a, g_a, e_a, sector_a), (h_b, g_b, e_b, sector_b))]
    if tuple(sector_ab) != (sector_a[0] + sector_b[0], sector_a[1] + sector_b[1]):
        raise ValueError("dimer sector does not equal the sum of monomer sectors")
    return e[0] - e[1] - e[2]
