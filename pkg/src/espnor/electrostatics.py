"""Electrostatic interaction energy from monomer-A one-particle densities.

Three routes are provided and must agree:

* AO-direct: explicit Coulomb/nuclear-attraction sum over AO densities.
* MO contraction: ``sum_tt' J_tt' gamma_tt'`` with the generalized
  electrostatic potential matrix ``J`` of monomer B.
* Diagonal: core term ``2 sum_core J_tt`` plus ``sum_v w_v gbar_vv`` in the
  basis that diagonalizes the active block of ``J``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import EnergyEstimate
from .givens import fix_determinant
from .model_io import HARTREE_TO_KCAL, ActiveSpaceSpec, ProblemInstance

OCC_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EspMatrix:
    J_ao: np.ndarray
    J_mo: np.ndarray


@dataclass(frozen=True, eq=False)
class EspNaturalBasis:
    U: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class ElectrostaticsResult:
    E_elst: float
    core_term: float
    active_term: float
    route: str
    terms: dict[str, float] = field(default_factory=dict)
    estimate: EnergyEstimate | None = None

    @property
    def E_elst_kcal(self) -> float:
        return self.E_elst * HARTREE_TO_KCAL

    def to_dict(self) -> dict:
        out = {
            "route": self.route,
            "E_elst_hartree": self.E_elst,
            "E_elst_kcal_mol": self.E_elst_kcal,
            "core_term_hartree": self.core_term,
            "active_term_hartree": self.active_term,
        }
        if self.terms:
            out["terms_hartree"] = dict(sorted(self.terms.items()))
        if self.estimate is not None:
            out["estimate"] = self.estimate.to_dict()
        return out


def build_esp_matrix(instance: ProblemInstance) -> EspMatrix:
    """Generalized electrostatic potential of monomer B in the AO and MO bases."""
    if instance.N_A == 0 or instance.N_B == 0:
        raise ValueError("electron counts N_A and N_B must be nonzero")
    gB, S = instance.gamma_B_ao, instance.S
    coulomb = np.einsum("pqrs,rs->pq", instance.eri_ao, gB)
    nuc_a = np.sum(gB * instance.V_A_ao)
    n_b = np.sum(gB * S)
    J_ao = (
        coulomb
        + (nuc_a / instance.N_A) * S
        + (n_b / instance.N_B) * instance.V_B_ao
        + (instance.V_AB / (instance.N_A * instance.N_B)) * n_b * S
    )
    J_ao = (J_ao + J_ao.T) / 2
    J_mo = instance.C.T @ J_ao @ instance.C
    return EspMatrix(J_ao=J_ao, J_mo=(J_mo + J_mo.T) / 2)


def active_block(J_mo: np.ndarray, active: ActiveSpaceSpec) -> np.ndarray:
    act = list(active.active_mo)
    return J_mo[np.ix_(act, act)]


def esp_natural_basis(J_mo: np.ndarray, active: ActiveSpaceSpec) -> EspNaturalBasis:
    """Eigenbasis of the active block of ``J_mo`` (ascending eigenvalues, det U = +1).

    Each eigenvector is signed so its largest-magnitude component is
    positive; the last column is then negated if needed to make det(U) = +1.
    """
    J_mo = np.asarray(J_mo, dtype=float)
    res = float(np.max(np.abs(J_mo - J_mo.T))) if J_mo.size else 0.0
    if res > 1e-10:
        raise ValueError(f"J_mo is not symmetric (residual {res:.3e})")
    J_act = active_block(J_mo, active)
    w, U = np.linalg.eigh(J_act)
    for k in range(U.shape[1]):
        col = U[:, k]
        pivot = int(np.argmax(np.abs(col) - 1e-12 * np.arange(len(col))))
        if col[pivot] < 0:
            U[:, k] = -col
    return EspNaturalBasis(U=fix_determinant(U), w=w)


def promote_to_ao(instance: ProblemInstance, gamma_mo: np.ndarray) -> np.ndarray:
    """AO-basis density ``C gamma C^T`` from a full MO-basis density."""
    return instance.C @ gamma_mo @ instance.C.T


def electrostatics_direct_ao(instance: ProblemInstance, gamma_A_ao: np.ndarray,
                             *, count_tol: float = 1e-6) -> ElectrostaticsResult:
    gA = np.asarray(gamma_A_ao, dtype=float)
    if np.max(np.abs(gA - gA.T)) > 1e-10:
        raise ValueError("gamma_A_ao must be symmetric")
    n_a = float(np.sum(instance.S * gA))
    if abs(n_a - instance.N_A) > count_tol:
        raise ValueError(f"sum(S * gamma_A) = {n_a:.8f} does not match N_A = {instance.N_A}")
    gB = instance.gamma_B_ao
    terms = {
        "coulomb": float(np.einsum("pq,pqrs,rs->", gA, instance.eri_ao, gB)),
        "gammaA_VB": float(np.sum(gA * instance.V_B_ao)),
        "VA_gammaB": float(np.sum(instance.V_A_ao * gB)),
        "V_AB": float(instance.V_AB),
    }
    total = sum(terms.values())
    return ElectrostaticsResult(E_elst=total, core_term=0.0, active_term=total,
                                route="ao_direct", terms=terms)


def electrostatics_mo_contraction(J_mo: np.ndarray, gamma_mo: np.ndarray,
                                  active: ActiveSpaceSpec) -> ElectrostaticsResult:
    core = list(active.core_mo)
    act = list(active.active_mo)
    core_term = float(np.sum(J_mo[np.ix_(core, core)] * gamma_mo[np.ix_(core, core)]))
    active_term = float(np.sum(J_mo[np.ix_(act, act)] * gamma_mo[np.ix_(act, act)]))
    total = float(np.sum(J_mo * gamma_mo))
    return ElectrostaticsResult(E_elst=total, core_term=core_term, active_term=total - core_term,
                                route="mo_contraction",
                                terms={"active_block": active_term})


def electrostatics_from_diag_rdm(w, gamma_diag, core_J_diag) -> ElectrostaticsResult:
    """``2 sum(core_J_diag) + sum_v w_v gamma_vv``.

    Raises ValueError when an occupation leaves ``[-1e-6, 2 + 1e-6]``.
    """
    w = np.asarray(w, dtype=float)
    g = np.asarray(gamma_diag, dtype=float)
    if w.shape != g.shape:
        raise ValueError(f"w {w.shape} and gamma_diag {g.shape} differ in shape")
    if np.any(g < -OCC_TOL) or np.any(g > 2 + OCC_TOL):
        raise ValueError(f"occupations outside [0, 2]: {g}")
    core_term = 2.0 * float(np.sum(np.asarray(core_J_diag, dtype=float)))
    active_term = float(np.dot(w, g))
    return ElectrostaticsResult(E_elst=core_term + active_term, core_term=core_term,
                                active_term=active_term, route="diagonal")


def one_body_diag_energy(h_act, U, gamma_diag, *, samples=None, layout=None) -> EnergyEstimate:
    """``sum_v hbar_vv gamma_vv`` with ``hbar = U^T h U``.

    With ``samples`` (postselected counts) and ``layout`` the mean and its
    standard error come from the per-shot values; otherwise sem is 0.
    """
    hbar = np.asarray(U).T @ np.asarray(h_act) @ np.asarray(U)
    hdiag = np.diag(hbar).copy()
    if samples is not None:
        from .estimators import estimate_with_sem

        return estimate_with_sem(samples, hdiag, 0.0, layout)
    g = np.asarray(gamma_diag, dtype=float)
    return EnergyEstimate(mean=float(np.dot(hdiag, g)), sem=0.0, n_samples_used=0)
