"""End-to-end pipeline stages shared by the command-line tools and experiment scripts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .ansatz import OptimizationResult, QnpAnsatz, build_ansatz, merge_measurement_rotation, optimize
from .circuit import Circuit
from .config import ONE_IS_OCCUPIED, ZERO_IS_OCCUPIED, NoiseSpec, RunConfig, ZneConfig
from .electrostatics import (
    EspNaturalBasis,
    build_esp_matrix,
    electrostatics_from_diag_rdm,
    electrostatics_mo_contraction,
    esp_natural_basis,
)
from .estimators import (
    bhattacharyya,
    convergence_curve,
    default_grid,
    diag_rdm_from_counts,
    estimate_with_sem,
    postselect,
)
from .fci import ExactElectrostatics, exact_electrostatics, full_mo_rdm
from .fermion import PauliSum, QubitLayout, jw_hamiltonian, one_rdm_from_state
from .mitigation import fold_gates_at_random, invert_occupation_convention, mitigated_electrostatics, zne_extrapolate_frequencies
from .model_io import HARTREE_TO_KCAL, ProblemInstance
from .noise import density_matrix_probabilities, simulate_noisy
from .statevector import BitstringCounts, apply_circuit, probabilities, sample
from .transpile import compile_to_native, gate_count_report

REPORT_VERSION = "espnor-report-v1"
FCI_MAX_ORBITALS = 6


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage


@dataclass(frozen=True, eq=False)
class Prepared:
    """Everything up to (and including) the measurement circuit."""

    instance: ProblemInstance
    config: RunConfig
    layout: QubitLayout
    hamiltonian: PauliSum
    ansatz: QnpAnsatz
    vqe: OptimizationResult
    exact: ExactElectrostatics | None
    esp: EspNaturalBasis
    J_mo: np.ndarray
    core_J_diag: np.ndarray
    core_term: float
    circuit: Circuit
    native: Circuit

    @property
    def n_alpha(self) -> int:
        return self.instance.n_alpha

    @property
    def n_beta(self) -> int:
        return self.instance.n_beta


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(name, str(exc)) from exc


def prepare_pipeline(instance: ProblemInstance, config: RunConfig) -> Prepared:
    """Hamiltonian, VQE, ESP basis, merged measurement circuit and its native compilation."""
    N = instance.n_act
    base_layout = QubitLayout(N, ONE_IS_OCCUPIED)
    H = _stage("hamiltonian", jw_hamiltonian, instance.h_act, instance.g_act, instance.E_core, base_layout)
    ansatz = _stage("ansatz", build_ansatz, base_layout, instance.n_alpha, instance.n_beta)
    vqe = _stage("vqe", optimize, H, ansatz, config.optimizer, config.rng_seed)
    exact = _stage("oracle", exact_electrostatics, instance) if N <= FCI_MAX_ORBITALS else None
    esp_mat = _stage("esp", build_esp_matrix, instance)
    esp = _stage("esp", esp_natural_basis, esp_mat.J_mo, instance.active)
    core_diag = np.diag(esp_mat.J_mo)[list(instance.active.core_mo)].copy()
    core_term = 2.0 * float(np.sum(core_diag))
    circuit = _stage("merge", merge_measurement_rotation, ansatz, vqe.theta, esp.U)
    layout = base_layout
    if config.occupation_convention == ZERO_IS_OCCUPIED:
        circuit, _ = invert_occupation_convention(circuit)
        layout = base_layout.with_convention(ZERO_IS_OCCUPIED)
    native = _stage("transpile", compile_to_native, circuit)
    return Prepared(instance, config, layout, H, ansatz, vqe, exact, esp, esp_mat.J_mo, core_diag,
                    core_term, circuit, native)


def _energy(h):
    return {"hartree": h, "kcal_mol": h * HARTREE_TO_KCAL}


def exact_state_electrostatics(prep: Prepared, state: np.ndarray) -> dict:
    """Electrostatics of a statevector (1-PDM taken exactly) by the MO and diagonal routes."""
    layout = QubitLayout(prep.layout.n_spatial, ONE_IS_OCCUPIED)
    gamma = one_rdm_from_state(state, layout)
    mo = electrostatics_mo_contraction(prep.J_mo, full_mo_rdm(prep.instance, gamma), prep.instance.active)
    gbar = np.diag(prep.esp.U.T @ gamma @ prep.esp.U)
    diag = electrostatics_from_diag_rdm(prep.esp.w, gbar, prep.core_J_diag)
    return {"mo_contraction": mo, "diagonal": diag, "gamma": gamma}


def _sample_measurement(prep: Prepared, shots: int, seed: int) -> BitstringCounts:
    noise = prep.config.noise
    if noise is None or noise.is_zero:
        return sample(apply_circuit(prep.circuit), shots, seed)
    return simulate_noisy(prep.native, noise, shots, seed)


def _shot_block(prep: Prepared, counts: BitstringCounts, *, seed: int) -> tuple[dict, object]:
    ps = postselect(counts, prep.layout, prep.n_alpha, prep.n_beta)
    block = {
        "seed": seed,
        "shots": int(counts.total_shots),
        "retention_fraction": ps.retention_fraction,
        "kept_shots": int(ps.kept.total_shots),
    }
    if ps.kept.total_shots == 0:
        block["insufficient_statistics"] = True
        return block, None
    est = estimate_with_sem(ps.kept, prep.esp.w, prep.core_term, prep.layout)
    block["gamma_diag"] = [float(x) for x in diag_rdm_from_counts(ps.kept, prep.layout)]
    block["estimate"] = est.to_dict()
    if est.insufficient_statistics:
        block["insufficient_statistics"] = True
    return block, (ps, est)


def run_report(instance: ProblemInstance, config: RunConfig) -> tuple[dict, dict]:
    """Full ``run`` pipeline. Returns the report and CSV sidecars (name -> rows)."""
    prep = prepare_pipeline(instance, config)
    seed = config.rng_seed
    report: dict = {
        "format": REPORT_VERSION,
        "instance_digest": instance.digest(),
        "config": config.to_dict(),
        "active_space": {"n_orbitals": instance.n_act, "n_alpha": instance.n_alpha, "n_beta": instance.n_beta,
                         "n_core": instance.active.n_core},
        "vqe": {**prep.vqe.to_dict(), "n_parameters": prep.ansatz.n_parameters,
                "px_pairs": [list(p) for p in prep.ansatz.px_pairs],
                "g_pairs": [list(p) for p in prep.ansatz.g_pairs]},
        "esp_basis": {"w_hartree": [float(x) for x in prep.esp.w], "core_term_hartree": prep.core_term},
        "circuit": {"logical": gate_count_report(prep.circuit), "native": gate_count_report(prep.native)},
    }
    if prep.exact is not None:
        report["fci"] = {
            "E0_hartree": prep.exact.solution.E0,
            "electrostatics_ao_direct": prep.exact.ao_route.to_dict(),
            "electrostatics_diagonal": prep.exact.diag_route.to_dict(),
        }
        report["vqe"]["gap_to_fci_hartree"] = prep.vqe.energy - prep.exact.solution.E0
    ideal = apply_circuit(prep.ansatz.circuit(prep.vqe.theta))
    vqe_el = _stage("estimate", exact_state_electrostatics, prep, ideal)
    report["electrostatics_vqe_exact"] = {
        "mo_contraction": vqe_el["mo_contraction"].to_dict(),
        "diagonal": vqe_el["diagonal"].to_dict(),
    }
    counts = _stage("sample", _sample_measurement, prep, config.shots, seed)
    block, stats = _stage("estimate", _shot_block, prep, counts, seed=seed)
    report["shots"] = block
    sidecars: dict = {"vqe_trace.csv": [("iteration", "energy_hartree")] + list(prep.vqe.trace)}
    if stats is not None:
        ps, est = stats
        grid = default_grid(int(ps.kept.total_shots), min_shots=config.convergence_min_shots,
                            include_small=config.include_small_shot_range)
        curve = convergence_curve(ps.kept, prep.esp.w, prep.core_term, grid, prep.layout) if grid else []
        rows = [("n", "mean_kcalmol", "sem_kcalmol")]
        for n, e in curve:
            rows.append((n, e.mean * HARTREE_TO_KCAL,
                         e.sem * HARTREE_TO_KCAL if math.isfinite(e.sem) else None))
        sidecars["convergence.csv"] = rows
        report["shots"]["convergence_points"] = len(curve)
        if prep.exact is not None:
            ref = prep.exact.E_elst
            dev = est.mean - ref
            report["shots"]["deviation_from_fci_hartree"] = dev
            if math.isfinite(est.sem) and est.sem > 0:
                report["shots"]["deviation_in_sem"] = dev / est.sem
    if config.noise is not None and not config.noise.is_zero:
        ideal_probs = probabilities(apply_circuit(prep.circuit))
        report["overlap"] = {"bhattacharyya_noiseless_vs_noisy": bhattacharyya(ideal_probs, counts.frequencies())}
    if config.zne is not None:
        report["zne"] = zne_block(prep)
    return report, sidecars


def _lambda_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def zne_frequencies(prep: Prepared, zcfg: ZneConfig, noise: NoiseSpec, *, analytic: bool = False):
    """Outcome frequencies of the folded native circuit at each scale factor."""
    freqs = {}
    lengths = {}
    for k, lam in enumerate(zcfg.lambdas):
        folded = fold_gates_at_random(prep.native, lam, _lambda_seed(zcfg.rng_seed, k))
        lengths[lam] = len(folded)
        if analytic:
            freqs[lam] = density_matrix_probabilities(folded, noise)
        else:
            counts = simulate_noisy(folded, noise, zcfg.trajectories_per_lambda,
                                    _lambda_seed(zcfg.rng_seed, 1000 + k), mode=zcfg.mode)
            freqs[lam] = counts.frequencies()
    return freqs, lengths


def zne_block(prep: Prepared, *, analytic: bool | None = None) -> dict:
    zcfg = prep.config.zne
    noise = prep.config.noise
    if zcfg is None:
        raise StageError("zne", "no zne section in the configuration")
    if noise is None:
        raise StageError("zne", "zero-noise extrapolation needs a noise model")
    if analytic is None:
        analytic = zcfg.analytic
    freqs, lengths = _stage("zne", zne_frequencies, prep, zcfg, noise, analytic=analytic)
    res = _stage("zne", zne_extrapolate_frequencies, freqs, zcfg)
    args = (prep.layout, prep.n_alpha, prep.n_beta, prep.esp.w, prep.core_term)
    zero = np.zeros_like(res.sigma)
    f1 = freqs[1.0]
    if analytic:
        noisy = _stage("zne", mitigated_electrostatics, f1, zero, *args)
    else:
        # multinomial errors sqrt(f/T) reproduce the usual var/kept of a postselected mean
        t = zcfg.trajectories_per_lambda
        noisy = _stage("zne", mitigated_electrostatics, f1, np.sqrt(f1 / t), *args,
                       n_samples=round(float(f1[_sector(prep)].sum()) * t))
    mitigated = _stage("zne", mitigated_electrostatics, res.distribution, res.sigma, *args)
    ideal = probabilities(apply_circuit(prep.circuit))
    noiseless = _stage("zne", mitigated_electrostatics, ideal, zero, *args)
    n = prep.layout.n_qubits
    block = {
        "lambdas": list(zcfg.lambdas),
        "anchor": {"lambda": zcfg.anchor_lambda, "value": zcfg.anchor_for(n)},
        "mode": zcfg.mode,
        "rng_seed": zcfg.rng_seed,
        "trajectories_per_lambda": None if analytic else zcfg.trajectories_per_lambda,
        "folded_gate_counts": {repr(k): v for k, v in lengths.items()},
        "noiseless": noiseless.to_dict(),
        "unmitigated": noisy.to_dict(),
        "mitigated": mitigated.to_dict(),
        "retention_by_lambda": {repr(k): float(v[_sector(prep)].sum()) for k, v in freqs.items()},
        "bhattacharyya_noiseless_vs_noisy": bhattacharyya(ideal, freqs[1.0]),
        "bhattacharyya_noiseless_vs_extrapolated": bhattacharyya(ideal, res.distribution),
        "fits": res.to_dict(n, threshold=1e-4),
        "n_failed_fits": len(res.failed_states),
    }
    fitted_only = _stage("zne", mitigated_electrostatics, res.distribution,
                         np.where(np.isfinite(res.sigma), res.sigma, 0.0), *args)
    # failed fits contribute no uncertainty here; the strict figure is mitigated.sem
    block["mitigated_sem_fitted_states_kcalmol"] = _finite_or_none(fitted_only.sem * HARTREE_TO_KCAL)
    if prep.exact is not None:
        block["fci_E_elst_hartree"] = prep.exact.E_elst
    return block


def _finite_or_none(x: float):
    return float(x) if np.isfinite(x) else None


def _sector(prep: Prepared) -> np.ndarray:
    from .fermion import sector_mask

    return sector_mask(prep.layout, prep.n_alpha, prep.n_beta)


def oracle_report(instance: ProblemInstance) -> dict:
    ex = exact_electrostatics(instance)
    esp = build_esp_matrix(instance)
    mo = electrostatics_mo_contraction(esp.J_mo, full_mo_rdm(instance, ex.solution.gamma_exact), instance.active)
    return {
        "format": REPORT_VERSION,
        "instance_digest": instance.digest(),
        "fci": {
            "E0_hartree": ex.solution.E0,
            "gamma_active": ex.solution.gamma_exact.tolist(),
            "electrostatics_ao_direct": ex.ao_route.to_dict(),
            "electrostatics_mo_contraction": mo.to_dict(),
            "electrostatics_diagonal": ex.diag_route.to_dict(),
        },
    }


def _headline(report: dict) -> tuple[float, float, str]:
    """(E_elst, sem, source) in Hartree from a run, zne or oracle report.

    The mitigated value is preferred when its standard error is defined.
    """
    if "zne" in report and report["zne"]["mitigated"]["sem_hartree"] is not None:
        est = report["zne"]["mitigated"]
        return est["mean_hartree"], est["sem_hartree"], "zne_mitigated"
    if "shots" in report and "estimate" in report["shots"]:
        est = report["shots"]["estimate"]
        return est["mean_hartree"], est["sem_hartree"], "shots"
    if "fci" in report:
        return report["fci"]["electrostatics_ao_direct"]["E_elst_hartree"], 0.0, "fci"
    raise ValueError("report carries no electrostatics estimate")


CHEMICAL_ACCURACY_KCAL = 1.0


def compare_reports(a: dict, b: dict) -> dict:
    """``E(B) - E(A)`` with quadrature-combined standard errors."""
    for r in (a, b):
        if r.get("format") != REPORT_VERSION:
            raise ValueError(f"unsupported report format {r.get('format')!r}")
    ea, sa, src_a = _headline(a)
    eb, sb, src_b = _headline(b)
    if sa is None or sb is None:
        raise ValueError("a report has no finite standard error")
    d = eb - ea
    sem = math.hypot(sa, sb)
    d_kcal = d * HARTREE_TO_KCAL
    return {
        "format": REPORT_VERSION,
        "delta_E_elst": _energy(d),
        "sem": _energy(sem),
        "E_A_hartree": ea,
        "E_B_hartree": eb,
        "source_A": src_a,
        "source_B": src_b,
        "sign": int(np.sign(d)),
        "chemical_accuracy_kcal_mol": CHEMICAL_ACCURACY_KCAL,
        "sem_within_chemical_accuracy": sem * HARTREE_TO_KCAL <= CHEMICAL_ACCURACY_KCAL,
        "abs_delta_within_chemical_accuracy": abs(d_kcal) <= CHEMICAL_ACCURACY_KCAL,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True, allow_nan=False) + "\n"


def with_overrides(config: RunConfig, *, seed=None, shots=None, noise=None, zne=None) -> RunConfig:
    kw = {}
    if seed is not None:
        kw["rng_seed"] = seed
    if shots is not None:
        kw["shots"] = shots
    if noise is not None:
        kw["noise"] = noise
    if zne is not None:
        kw["zne"] = zne
    return replace(config, **kw) if kw else config
